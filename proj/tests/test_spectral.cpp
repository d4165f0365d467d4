#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "dgbo/spectral.hpp"

using namespace dgbo;

namespace {

Spectrum random_real_spectrum(int K, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Spectrum s(K);
    for (int k = 1; k <= K; ++k) {
        s[k] = cplx{n01(rng), n01(rng)};
        s[-k] = std::conj(s[k]);
    }
    return s;
}

std::vector<double> samples_of(const TorusGrid& g, double (*f)(double)) {
    std::vector<double> v(static_cast<std::size_t>(g.N));
    for (int j = 0; j < g.N; ++j) v[static_cast<std::size_t>(j)] = f(g.x(j));
    return v;
}

} // namespace

TEST(Transform, ZeroFunction) {
    const auto g = TorusGrid::make(8, 32);
    const auto c = forward_transform(std::vector<double>(32, 0.0), g);
    EXPECT_EQ(c.max_abs(), 0.0);
    const auto s = inverse_transform(Spectrum(8), g);
    for (double x : s) EXPECT_EQ(x, 0.0);
}

TEST(Transform, CosineHasHalfCoefficients) {
    const auto g = TorusGrid::make(4, 16);
    const auto c = forward_transform(samples_of(g, [](double x) { return std::cos(x); }), g);
    EXPECT_NEAR(c[1].real(), 0.5, 1e-15);
    EXPECT_NEAR(c[-1].real(), 0.5, 1e-15);
    for (int k = -4; k <= 4; ++k) {
        if (std::abs(k) != 1) {
            EXPECT_NEAR(std::abs(c[k]), 0.0, 1e-15);
        }
    }
}

TEST(Transform, ExpSinMatchesGaussLegendre) {
    // (1/2pi) \int e^{sin x} e^{-ikx} dx by 64-point Gauss-Legendre on four panels.
    const auto g = TorusGrid::make(16, 64);
    const auto c = forward_transform(samples_of(g, [](double x) { return std::exp(std::sin(x)); }), g);
    using GL = boost::math::quadrature::gauss<double, 64>;
    for (int k = -16; k <= 16; ++k) {
        cplx ref{};
        for (int p = 0; p < 4; ++p) {
            const double a = -kPi + p * kPi / 2, b = a + kPi / 2;
            const double re = GL::integrate([k](double x) { return std::exp(std::sin(x)) * std::cos(k * x); }, a, b);
            const double im = GL::integrate([k](double x) { return -std::exp(std::sin(x)) * std::sin(k * x); }, a, b);
            ref += cplx{re, im};
        }
        ref /= kTwoPi;
        EXPECT_NEAR(std::abs(c[k] - ref), 0.0, 1e-10) << "k = " << k;
    }
}

TEST(Transform, SizeMismatchIsArgumentError) {
    const auto g = TorusGrid::make(4, 16);
    EXPECT_THROW(forward_transform(std::vector<double>(15, 0.0), g), ArgumentError);
}

TEST(Transform, InverseOfHalfCosineCoefficients) {
    const auto g = TorusGrid::make(3, 12);
    Spectrum s(3);
    s[1] = s[-1] = 0.5;
    const auto v = inverse_transform(s, g);
    for (int j = 0; j < g.N; ++j) EXPECT_NEAR(v[static_cast<std::size_t>(j)], std::cos(g.x(j)), 1e-15);
}

TEST(Transform, RealityViolationIsInvariantError) {
    const auto g = TorusGrid::make(3, 12);
    Spectrum s(3);
    s[1] = cplx{0.0, 1.0};
    s[-1] = cplx{0.0, 1.0};  // should be the conjugate
    EXPECT_THROW(inverse_transform(s, g), InvariantError);
}

TEST(Transform, RoundTripAllSizes) {
    for (int K : {1, 2, 8, 31, 64, 200, 512}) {
        const auto g = TorusGrid::dealiased(K);
        const auto s = random_real_spectrum(K, static_cast<std::uint64_t>(K));
        const auto back = forward_transform(inverse_transform(s, g), g);
        double err = 0.0;
        for (int k = -K; k <= K; ++k) err = std::max(err, std::abs(back[k] - s[k]));
        EXPECT_LT(err, 1e-12 * s.max_abs()) << "K = " << K;
    }
}

TEST(Transform, Parseval) {
    const auto g = TorusGrid::dealiased(40);
    const auto s = random_real_spectrum(40, 3);
    const auto v = inverse_transform(s, g);
    double lhs = 0.0;
    for (double x : v) lhs += x * x;
    lhs *= kTwoPi / g.N;
    const double rhs = std::pow(l2_norm(s), 2);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
}

TEST(Field, RejectsMeanAndNonFinite) {
    const auto g = TorusGrid::make(2, 8);
    Spectrum s(2);
    s[0] = 1.0;
    EXPECT_THROW(SpectralField(g, s), InvariantError);
    Spectrum t(2);
    t[1] = t[-1] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(SpectralField(g, t), InvariantError);
    EXPECT_THROW(TorusGrid::make(0, 8), ArgumentError);
}

TEST(Dispersion, ZeroStaysZero) {
    const auto g = TorusGrid::make(4, 16);
    EXPECT_EQ(apply_dispersion(SpectralField::zero(g), 1.5).coeffs().max_abs(), 0.0);
}

TEST(Dispersion, SineToCosineAtAlphaTwo) {
    const auto g = TorusGrid::make(4, 16);
    Spectrum s(4);
    s[1] = cplx{0.0, -0.5};
    s[-1] = cplx{0.0, 0.5};
    const auto out = apply_dispersion(SpectralField(g, s), 2.0);
    EXPECT_NEAR(std::abs(out[1] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out[-1] - 0.5), 0.0, 1e-15);
}

TEST(Dispersion, PlancherelDirectSum) {
    const auto g = TorusGrid::dealiased(32);
    const SpectralField v(g, random_real_spectrum(32, 11));
    const auto out = apply_dispersion(v, 1.5);
    double ref = 0.0;
    for (int k = -32; k <= 32; ++k) ref += k * k * std::pow(std::abs(k), 3.0) * std::norm(v[k]);
    ref *= kTwoPi;
    EXPECT_NEAR(std::pow(out.l2_norm(), 2) / ref, 1.0, 1e-12);
}

TEST(Dispersion, SkewSymmetric) {
    const auto g = TorusGrid::dealiased(24);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SpectralField v(g, random_real_spectrum(24, seed));
        const cplx ip = inner(apply_dispersion(v, 1.3).coeffs(), v.coeffs());
        EXPECT_LT(std::abs(ip.real()), 1e-12 * std::pow(apply_dispersion(v, 1.3).l2_norm(), 1) * v.l2_norm());
    }
}

TEST(Fractional, Examples) {
    const auto g = TorusGrid::make(4, 16);
    const SpectralField v(g, random_real_spectrum(4, 1));
    const auto id = apply_fractional(v, 0.0);
    for (int k = -4; k <= 4; ++k) EXPECT_EQ(id[k], v[k]);

    Spectrum s(4);
    s[1] = cplx{0.0, -0.5};
    s[-1] = cplx{0.0, 0.5};
    const auto same = apply_fractional(SpectralField(g, s), 0.5);
    EXPECT_EQ(same[1], s[1]);

    Spectrum c(4);
    c[2] = c[-2] = 0.5;
    const auto twice = apply_fractional(SpectralField(g, c), 1.0);
    EXPECT_NEAR(std::abs(twice[2] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(twice[-2] - 1.0), 0.0, 1e-15);
}

TEST(Multiply, ZeroAndDoubleAngle) {
    const auto g = TorusGrid::dealiased(4);
    EXPECT_EQ(multiply(SpectralField::zero(g), SpectralField::zero(g)).max_abs(), 0.0);

    Spectrum s(4);
    s[1] = cplx{0.0, -0.5};
    s[-1] = cplx{0.0, 0.5};
    const SpectralField v(g, s);
    const Spectrum p = multiply(v, v);  // sin^2 x = 1/2 - cos(2x)/2
    EXPECT_NEAR(std::abs(p[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p[2] + 0.25), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p[-2] + 0.25), 0.0, 1e-15);
    // d/dx (sin^2 x) = sin 2x: coefficients -i/2 at k = 2.
    const auto d = dx_square(v);
    EXPECT_NEAR(std::abs(d[2] - cplx{0.0, -0.5}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d[-2] - cplx{0.0, 0.5}), 0.0, 1e-15);
}

TEST(Multiply, MatchesDenseConvolution) {
    for (int K : {16, 32}) {
        const auto g = TorusGrid::make(K, K == 16 ? 64 : 128);
        const SpectralField u(g, random_real_spectrum(K, 5)), v(g, random_real_spectrum(K, 6));
        const Spectrum p = multiply(u, v);
        for (int k = -K; k <= K; ++k) {
            cplx ref{};
            for (int m = -K; m <= K; ++m) ref += u.coeffs().get(k - m) * v[m];
            EXPECT_NEAR(std::abs(p[k] - ref), 0.0, 1e-12) << "k = " << k;
        }
    }
}

TEST(Multiply, GridMismatch) {
    const auto a = TorusGrid::dealiased(4), b = TorusGrid::dealiased(8);
    EXPECT_THROW(multiply(SpectralField::zero(a), SpectralField::zero(b)), ArgumentError);
}
