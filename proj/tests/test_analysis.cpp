#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "dgbo/analysis/bands.hpp"
#include "dgbo/analysis/claims.hpp"
#include "dgbo/analysis/ratios.hpp"
#include "dgbo/analysis/zb.hpp"

using namespace dgbo;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

double integrate(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    return half * GK::integrate([&](double x) { return f(mid + half * x); }, -1.0, 1.0, 30, 1e-13);
}

DampingDecomposition bump_decomposition(int K, double beta = 0.8) {
    const auto p = DampingProfile::build(ProfileKind::smooth_bump, Interval{0.0, kPi / 2}, TorusGrid::dealiased(K));
    return compute_ck(p, beta, K);
}

SpaceTimeField random_field(int K, double alpha, const TimeGrid& tg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<cplx> amp, freq;
    for (int k = 1; k <= K; ++k) {
        amp.emplace_back(n01(rng) / k, n01(rng) / k);
        freq.emplace_back(n01(rng), 0.0);
    }
    return SpaceTimeField::from_profile(TorusGrid::make(K, 2 * K + 2), alpha, tg, [&](int k, double t) {
        const auto i = static_cast<std::size_t>(k - 1);
        return amp[i] * std::exp(cplx{-0.02 * t * t, freq[i].real() * t});
    });
}

TimeGrid centered_grid(double half, double dt) {
    TimeGrid tg;
    tg.dt = dt;
    tg.M = 2 * static_cast<int>(std::ceil(half / dt)) + 1;
    tg.t0 = -dt * (tg.M - 1) / 2;
    return tg;
}

} // namespace

// --- Z^b ---------------------------------------------------------------------------

TEST(Zb, WeightBranches) {
    ZbParams z{0.3, 0.8, 1.5};
    EXPECT_NEAR(z.weight(3, 0.0), std::pow(std::sqrt(10.0), 0.3 * 0.8), 1e-15);
    z.b = 1.0;
    const double scale = std::pow(std::sqrt(10.0), 0.8);
    EXPECT_NEAR(z.weight(3, 2.0), std::pow(std::sqrt(10.0), 0.4) * std::sqrt(1.0 + 4.0 / (scale * scale)), 1e-14);
    z.b = -0.5;
    EXPECT_NEAR(z.weight(3, 0.0), std::pow(std::sqrt(10.0), -0.4), 1e-15);
    z.b = 0.0;
    EXPECT_EQ(z.weight(7, 123.0), 1.0);
}

TEST(Zb, WeightDominationInB) {
    const std::vector<double> bs{0.0, 0.1, 0.3, 0.49, 0.5, 0.6, 1.0, 1.4};
    for (std::size_t i = 1; i < bs.size(); ++i) {
        const ZbParams hi{bs[i], 0.8, 1.5}, lo{bs[i - 1], 0.8, 1.5};
        for (int k = -50; k <= 50; ++k)
            for (double s = -1e4; s <= 1e4; s += 37.5) EXPECT_GE(hi.weight(k, s), lo.weight(k, s) * (1 - 1e-15));
    }
}

TEST(Zb, ZeroFieldHasZeroNorm) {
    const TimeGrid tg = centered_grid(5.0, 0.1);
    const SpaceTimeField f(TorusGrid::make(4, 10), 1.5, tg);
    EXPECT_EQ(znorm(f, ZbParams{0.7, 0.8, 1.5}), 0.0);
}

TEST(Zb, PlancherelAtBZero) {
    const TimeGrid tg = centered_grid(20.0, 0.05);
    const auto f = random_field(6, 1.5, tg, 1);
    const Window win = Window::tukey(0.1);
    const auto w = win.values(tg);
    const auto samples = f.samples();
    const int N = f.grid().N;
    double l2 = 0.0;
    for (int m = 0; m < tg.M; ++m)
        for (int j = 0; j < N; ++j) {
            const double v = w[static_cast<std::size_t>(m)] * samples[static_cast<std::size_t>(m) * N + j];
            l2 += v * v;
        }
    l2 *= tg.dt * kTwoPi / N;
    const double z = znorm(f, ZbParams{0.0, 0.8, 1.5}, win);
    EXPECT_NEAR(z, std::sqrt(l2), 1e-10 * std::sqrt(l2));
}

TEST(Zb, SamplesRoundTrip) {
    const TimeGrid tg = centered_grid(3.0, 0.1);
    const auto f = random_field(5, 1.5, tg, 2);
    const auto g = SpaceTimeField::from_samples(f.grid(), 1.5, tg, f.samples());
    for (int k = 1; k <= 5; ++k)
        for (int m = 0; m < tg.M; m += 7) EXPECT_NEAR(std::abs(f.profile(k, m) - g.profile(k, m)), 0.0, 1e-13);
}

TEST(Zb, SingleModeHandEvaluation) {
    // a_1(t) = exp(-t^2 / (2 sigma^2) + i s0 t): A(s) = sigma sqrt(2 pi) exp(-sigma^2 (s - s0)^2 / 2).
    const double sigma = 2.0, s0 = 1.5;
    const ZbParams zb{1.0, 1.0, 2.0};
    const TimeGrid tg = centered_grid(40.0, 0.05);
    const auto f = SpaceTimeField::from_profile(TorusGrid::make(1, 4), 2.0, tg, [&](int, double t) {
        return std::exp(cplx{-0.5 * t * t / (sigma * sigma), s0 * t});
    });
    auto A2 = [&](double s) { return 2.0 * kPi * sigma * sigma * std::exp(-sigma * sigma * (s - s0) * (s - s0)); };
    const double plus = integrate([&](double s) { return std::pow(zb.weight(1, s), 2) * A2(s); }, s0 - 12, s0 + 12);
    const double minus = integrate([&](double s) { return std::pow(zb.weight(-1, -s), 2) * A2(s); }, s0 - 12, s0 + 12);
    EXPECT_NEAR(znorm(f, zb, Window::none()), std::sqrt(plus + minus), 1e-9);
    // The weight at the peak: <1>^{1/2} <s0 / <1>>.
    EXPECT_NEAR(zb.weight(1, s0), std::pow(2.0, 0.25) * std::sqrt(1.0 + s0 * s0 / 2.0), 1e-15);
}

TEST(Zb, EmbeddingIntoContinuousL2) {
    const double b = 0.6;
    const ZbParams zb{b, 0.8, 1.5};
    const TimeGrid tg = centered_grid(30.0, 0.05);
    const Window win = Window::tukey(0.1);
    const auto w = win.values(tg);
    // C(b)^2 = \int <tau>^{-2b} dtau / (2 pi).
    const double C0sq = std::sqrt(kPi) * boost::math::tgamma(b - 0.5) / boost::math::tgamma(b);
    const double C = std::sqrt(C0sq / kTwoPi);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto f = random_field(6, 1.5, tg, 10 + seed);
        const double z = znorm(f, zb, win);
        double sup = 0.0, h = 0.0;
        for (int m = 0; m < tg.M; ++m) {
            double s = 0.0, sh = 0.0;
            for (int k = 1; k <= f.K(); ++k) {
                const double e = 2.0 * kTwoPi * std::norm(w[static_cast<std::size_t>(m)] * f.profile(k, m));
                s += e;
                sh += std::pow(bracket(k), 0.8) * e;
            }
            sup = std::max(sup, std::sqrt(s));
            h += tg.dt * sh;
        }
        EXPECT_LE(sup, 1.01 * C * z);
        EXPECT_LE(std::sqrt(h), z * (1 + 1e-10));
    }
}

TEST(Zb, CutoffEta) {
    EXPECT_EQ(cutoff_eta(0.0), 1.0);
    EXPECT_EQ(cutoff_eta(-1.0), 1.0);
    EXPECT_EQ(cutoff_eta(2.0), 0.0);
    EXPECT_EQ(cutoff_eta(-2.5), 0.0);
    EXPECT_NEAR(cutoff_eta(1.5), 0.5, 1e-15);
    for (double t = 0.0; t < 2.0; t += 0.01) EXPECT_GE(cutoff_eta(t), cutoff_eta(t + 0.01));
}

// --- free evolution ------------------------------------------------------------------

TEST(Free, SingleModeClosedFormAtBZero) {
    const auto d = bump_decomposition(16);
    FreeRatioOptions opt;
    opt.K = 16;
    opt.dt = 0.0125;
    const auto z = free_mode_energies(ZbParams{0.0, 0.8, 1.5}, d, opt);
    for (int k = 1; k <= 16; k += 5) EXPECT_NEAR(z[static_cast<std::size_t>(k - 1)], kTwoPi / d.c(k), 1e-4 * kTwoPi / d.c(k));
}

TEST(Free, BoundedAndGrowingTowardsThreeHalves) {
    const auto d = bump_decomposition(16);
    const auto r1 = free_solution_ratio(ZbParams{1.0, 0.8, 1.5}, d, 20, 1);
    const auto r2 = free_solution_ratio(ZbParams{1.45, 0.8, 1.5}, d, 20, 1);
    EXPECT_TRUE(std::isfinite(r1.max));
    EXPECT_LT(r1.max, 10.0);
    for (std::size_t i = 0; i < r1.values.size(); ++i) EXPECT_GT(r2.values[i], r1.values[i]);
    const auto again = free_solution_ratio(ZbParams{1.0, 0.8, 1.5}, d, 20, 1);
    EXPECT_EQ(again.values, r1.values);
}

TEST(Free, ShortWindowIsPrecisionError) {
    const auto d = bump_decomposition(16);
    FreeRatioOptions opt;
    opt.half_window = 10.0;
    EXPECT_THROW(free_solution_ratio(ZbParams{1.0, 0.8, 1.5}, d, 2, 0, opt), PrecisionError);
}

// --- cutoff scaling ----------------------------------------------------------------------

namespace {
const std::vector<double> kTGrid{1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2};
}

TEST(Cutoff, EqualExponentsGiveFlatRatio) {
    const auto d = bump_decomposition(8);
    std::mt19937_64 rng(3);
    const auto s = cutoff_scaling(0.3, 0.3, ZbParams{0.0, 0.8, 1.5}, 8, free_profile(d, detail::random_coefficients(8, rng)), kTGrid);
    EXPECT_LT(std::abs(s.fit.slope), 0.05);
}

TEST(Cutoff, FreeSolutionSlope) {
    const auto d = bump_decomposition(8);
    std::mt19937_64 rng(4);
    const auto s = cutoff_scaling(0.4, 0.0, ZbParams{0.0, 0.8, 1.5}, 8, free_profile(d, detail::random_coefficients(8, rng)), kTGrid);
    EXPECT_GE(s.fit.slope, 0.25);
    EXPECT_LE(s.fit.slope, 0.45);
}

TEST(Cutoff, ConstantModeSlope) {
    const ZbParams base{0.0, 0.8, 1.5};
    const auto s = cutoff_scaling(0.3, 0.1, base, 1, [&](int k, double t) { return std::exp(cplx{0.0, base.L(k) * t}); }, kTGrid);
    EXPECT_NEAR(s.fit.slope, 0.2, 0.03);
    EXPECT_THROW(cutoff_scaling(0.6, 0.1, base, 1, [](int, double) { return cplx{1.0}; }, kTGrid), ArgumentError);
    EXPECT_THROW(cutoff_scaling(0.1, 0.3, base, 1, [](int, double) { return cplx{1.0}; }, kTGrid), ArgumentError);
}

// --- Duhamel -----------------------------------------------------------------------------

TEST(Duhamel, ProfileMatchesQuadrature) {
    const double c = 0.3;
    Forcing f;
    f.amp = {cplx{0.7, -0.2}};
    f.detune = {1.3};
    f.center = 6.0;
    f.width = 1.0;
    TimeGrid tg;
    tg.t0 = -2.03;
    tg.dt = 0.05;
    tg.M = 400;
    const auto a = duhamel_profile(c, [&](double s) { return f(1, s); }, tg);
    for (int m = 0; m < tg.M; m += 37) {
        const double t = tg.t(m);
        auto part = [&](bool imag) {
            return integrate([&](double s) {
                const cplx v = std::exp(-c * std::abs(t - s)) * f(1, s);
                return imag ? v.imag() : v.real();
            }, std::min(0.0, t), std::max(0.0, t)) * (t >= 0 ? 1.0 : -1.0);
        };
        EXPECT_NEAR(std::abs(a[static_cast<std::size_t>(m)] - cplx{part(false), part(true)}), 0.0, 1e-10) << t;
    }
}

TEST(Duhamel, TranslationInvariance) {
    const auto d = bump_decomposition(8);
    const ZbParams zb{0.6, 0.8, 1.5};
    std::mt19937_64 rng(5);
    Forcing f = random_forcing(8, 0.8, rng);
    const double r0 = duhamel_value(zb, d, f).ratio;
    // Shifting the forcing in time multiplies F_k by a phase only after re-centering the detuning.
    Forcing g = f;
    g.center += 10.0;
    for (int k = 1; k <= 8; ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        g.amp[i] *= std::exp(cplx{0.0, g.detune[i] * 10.0});
    }
    const double r1 = duhamel_value(zb, d, g).ratio;
    EXPECT_NEAR(r1 / r0, 1.0, 0.05);
}

TEST(Duhamel, BoundedAndSeeded) {
    const auto d = bump_decomposition(8);
    const ZbParams zb{0.6, 0.8, 1.5};
    const auto a = duhamel_smoothing_ratio(zb, d, 8, 5, 7);
    const auto b = duhamel_smoothing_ratio(zb, d, 8, 5, 7);
    EXPECT_EQ(a.values, b.values);
    EXPECT_TRUE(std::isfinite(a.max));
    EXPECT_GT(a.min, 0.0);
    EXPECT_THROW(duhamel_smoothing_ratio(ZbParams{0.4, 0.8, 1.5}, d, 8, 1), ArgumentError);
}

// --- bilinear and N1 ------------------------------------------------------------------------

TEST(Bilinear, ZeroInputGivesZero) {
    const ZbParams zb{0.55, 0.5, 2.0};
    EXPECT_EQ(bilinear_value(BandField{}, detail::on_shell(1, 2.0, 0.5), zb), 0.0);
}

TEST(Bilinear, SingleModeProductMatchesQuadrature) {
    const ZbParams zb{0.55, 0.5, 2.0};
    const auto u = detail::on_shell(1, 2.0, 0.5);
    const Band b = u.modes().at(1).front();
    // (uu)^_2(tau) = (1/2pi) \int uhat_1(t) uhat_1(tau - t) dt.
    auto prod = [&](double tau) {
        return integrate([&](double t) { return std::real(u.value(1, t) * u.value(1, tau - t)); }, b.center - 12 * b.width,
                         b.center + 12 * b.width) / kTwoPi;
    };
    ZbParams zl = zb;
    zl.b = zb.b - 1.0;
    const double s = -zb.beta * (zb.b - 0.5);
    const double m2 = 2.0 * std::pow(2.0, s);
    const double c2 = 2.0 * b.center;
    // Modes +2 and -2 contribute equally.
    const double lhs2 = 2.0 * m2 * m2 * integrate([&](double tau) {
        const double p = prod(tau);
        return std::pow(zl.weight(2, tau - zl.L(2)), 2) * p * p;
    }, c2 - 14 * b.width, c2 + 14 * b.width);
    const double n1 = 2.0 * integrate([&](double tau) {
        return std::pow(zb.weight(1, tau - zb.L(1)), 2) * std::norm(u.value(1, tau));
    }, b.center - 10 * b.width, b.center + 10 * b.width);
    EXPECT_NEAR(bilinear_value(u, u, zb), std::sqrt(lhs2) / n1, 1e-6 * std::sqrt(lhs2) / n1);
}

TEST(Bilinear, SmallScanIsFiniteAndChecksAdmissibility) {
    BilinearOptions opt;
    opt.K = 8;
    opt.trials = 5;
    const auto r = bilinear_ratio(ZbParams{0.55, 0.5, 2.0}, opt);
    EXPECT_TRUE(std::isfinite(r.max));
    EXPECT_GT(r.max, 0.0);
    EXPECT_FALSE(r.adversarial_witness.empty());
    try {
        bilinear_ratio(ZbParams{0.61, 0.5, 2.0}, opt);
        FAIL() << "inadmissible b accepted";
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("(alpha-1/2)/(alpha-beta+1)"), std::string::npos) << e.what();
    }
    EXPECT_THROW(bilinear_ratio(ZbParams{0.45, 0.5, 2.0}, opt), ArgumentError);
}

TEST(N1Ratio, ConstantProfileGivesZero) {
    const auto p = DampingProfile::build(ProfileKind::constant, Interval{}, TorusGrid::dealiased(8));
    const auto d = compute_ck(p, 0.8, 8);
    const auto r = n1_bound_ratio(ZbParams{0.55, 0.8, 1.5}, d, 8, 3);
    EXPECT_LT(r.max, 1e-15);
}

TEST(N1Ratio, SingleModeHandAssembled) {
    const int K = 8;
    const auto d = bump_decomposition(K);
    const ZbParams zb{0.55, 0.8, 1.5};
    const Eigen::MatrixXcd n1 = n1_matrix(d, K);
    BandField v;
    v.add_real(3, Band{zb.L(3), 2.0, cplx{1.0, 0.5}});
    ZbParams zl = zb;
    zl.b = zb.b - 1.0;
    const double s = -zb.beta * (zb.b - 0.5);
    double num = 0.0;
    for (int k = -K; k <= K; ++k) {
        if (k == 0) continue;
        num += std::pow(std::abs(k), 2 * s) * integrate([&](double tau) {
            cplx val = n1(mode_index(k, K), mode_index(3, K)) * v.value(3, tau) +
                       n1(mode_index(k, K), mode_index(-3, K)) * v.value(-3, tau);
            return std::pow(zl.weight(k, tau - zl.L(k)), 2) * std::norm(val);
        }, -zb.L(3) - 40, zb.L(3) + 40);
    }
    const double den = 2.0 * integrate([&](double tau) { return std::pow(zb.weight(3, tau - zb.L(3)), 2) * std::norm(v.value(3, tau)); },
                                       zb.L(3) - 20, zb.L(3) + 20);
    EXPECT_NEAR(n1_value(n1, K, v, zb), std::sqrt(num / den), 1e-6 * std::sqrt(num / den));
}

TEST(N1Ratio, WindowPrecondition) {
    const auto d = bump_decomposition(8);
    EXPECT_THROW(n1_bound_ratio(ZbParams{0.7, 0.8, 1.5}, d, 8, 1), ArgumentError);
    EXPECT_THROW(n1_bound_ratio(ZbParams{0.55, 0.7, 1.5}, d, 8, 1), ArgumentError);
    const auto r = n1_bound_ratio(ZbParams{0.55, 0.8, 1.5}, d, 8, 5, 1);
    EXPECT_TRUE(std::isfinite(r.max));
    EXPECT_GT(r.max, 0.0);
}

// --- arithmetic claims -----------------------------------------------------------------------

TEST(Resonance, Examples) {
    EXPECT_DOUBLE_EQ(resonance(FrequencyTriple::make(1, 1, -2), 2.0), -6.0);
    EXPECT_DOUBLE_EQ(resonance(FrequencyTriple::make(1, 1, -2), 1.0), -2.0);
    EXPECT_NEAR(resonance(FrequencyTriple::make(3, 5, -8), 1.5), std::pow(3, 2.5) + std::pow(5, 2.5) - std::pow(8, 2.5), 1e-12);
    EXPECT_THROW(FrequencyTriple::make(1, 2, 3), ArgumentError);
    EXPECT_THROW(FrequencyTriple::make(0, 2, -2), ArgumentError);
}

TEST(Resonance, CubicScanMatchesIdentity) {
    const int K = 40;
    double best = std::numeric_limits<double>::infinity();
    for (int a = -K; a <= K; ++a)
        for (int b = -K; b <= K; ++b) {
            const int c = -a - b;
            if (a == 0 || b == 0 || c == 0 || std::abs(c) > K) continue;
            const double nmax = std::max({std::abs(a), std::abs(b), std::abs(c)});
            const double nmin = std::min({std::abs(a), std::abs(b), std::abs(c)});
            best = std::min(best, 3.0 * std::abs(static_cast<double>(a) * b * c) / (nmax * nmax * nmin));
        }
    EXPECT_EQ(resonance_constant_scan(2.0, K).min_ratio, best);
    EXPECT_GT(resonance_constant_scan(1.0, K).min_ratio, 0.0);
}

TEST(Resonance, ScaleProbe) {
    for (double alpha : {1.0, 1.5, 2.0}) {
        const double limit = (std::pow(2.0, 1 + alpha) - 2.0) / std::pow(2.0, alpha);
        for (int n : {1, 10, 1000}) EXPECT_NEAR(resonance_ratio(FrequencyTriple::make(n, n, -2 * n), alpha), limit, 1e-12);
    }
}

TEST(Modulation, ClosedFormExample) {
    const double v = minmax_modulation(FrequencyTriple::make(1, 1, -2), 2.0, 1.0);
    EXPECT_NEAR(v, 6.0 / (2.0 * std::sqrt(2.0) + std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(v, 1.1847, 1e-4);
}

TEST(Modulation, EqualizedPointAttainsTheValue) {
    const auto t = FrequencyTriple::make(4, -7, 3);
    const double alpha = 1.5, beta = 0.8;
    double W = 0.0;
    for (int k : t.k) W += std::pow(bracket(k), beta);
    const double omega = resonance(t, alpha);
    double mx = 0.0, sum = 0.0;
    for (int k : t.k) {
        const double sig = -omega * std::pow(bracket(k), beta) / W;
        sum += sig;
        mx = std::max(mx, std::abs(sig) / std::pow(bracket(k), beta));
    }
    EXPECT_NEAR(sum, -omega, 1e-10);
    EXPECT_NEAR(mx, minmax_modulation(t, alpha, beta), 1e-12);
}

TEST(Modulation, ClosedFormMatchesSearch) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> pick(-60, 60);
    int checked = 0;
    while (checked < 40) {
        const int a = pick(rng), b = pick(rng);
        if (a == 0 || b == 0 || a + b == 0) continue;
        const auto t = FrequencyTriple::from_pair(a, b);
        const double exact = minmax_modulation(t, 1.5, 0.8);
        EXPECT_NEAR(minmax_modulation_search(t, 1.5, 0.8), exact, 1e-6 * std::max(1.0, exact));
        ++checked;
    }
}

TEST(Modulation, ScanConstantsArePositive) {
    const auto s = modulation_scan(1.5, 0.8, 60);
    EXPECT_GT(s.min_minmax, 0.0);
    EXPECT_GT(s.min_dominant, 0.0);
    EXPECT_GT(s.min_raw, 0.0);
}

TEST(Offdiag, ClosedFormExample) {
    const auto g = offdiag_modulation_gap(1, 2, 2.0, 1.0);
    EXPECT_NEAR(g.gap, 7.0 / (std::sqrt(2.0) + std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(g.normalized, g.gap / std::sqrt(5.0), 1e-15);
    // At the weighted midpoint both weighted distances equal the gap.
    EXPECT_NEAR(std::abs(g.tau_star - 1.0) / std::sqrt(2.0), g.gap, 1e-12);
    EXPECT_NEAR(std::abs(g.tau_star - 8.0) / std::sqrt(5.0), g.gap, 1e-12);
    EXPECT_THROW(offdiag_modulation_gap(3, 3, 2.0, 1.0), ArgumentError);
}

TEST(Offdiag, ScanMatchesPairwiseFunction) {
    const auto s = offdiag_scan(1.5, 0.8, 30);
    EXPECT_GT(s.min_normalized, 0.0);
    EXPECT_NEAR(offdiag_modulation_gap(s.k, s.n, 1.5, 0.8).normalized, s.min_normalized, 1e-14);
}

TEST(Numerology, Examples) {
    const auto a = admissible_b_interval(2.0, 0.5);
    EXPECT_NEAR(a.bounds[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(a.bounds[1], 0.6, 1e-15);
    EXPECT_NEAR(a.bounds[2], 0.625, 1e-15);
    EXPECT_NEAR(a.bounds[3], 0.6, 1e-15);
    EXPECT_NEAR(a.upper(), 0.6, 1e-15);
    EXPECT_TRUE(a.contains(0.55));
    EXPECT_FALSE(a.contains(0.6));
    EXPECT_TRUE(admissible_b_interval(1.4, 0.6).empty());
    EXPECT_NEAR(admissible_b_interval(1.5, 0.8).upper(), 1.0 / 1.7, 1e-12);
    EXPECT_FALSE(admissible_b_interval(1.5, 0.8).empty());
    EXPECT_THROW(admissible_b_interval(1.0, 1.0), ArgumentError);
}

TEST(Numerology, GridHasNoViolations) {
    const auto c = numerology_grid_check();
    EXPECT_EQ(c.violations, 0);
    EXPECT_GT(c.points, 1000);
}

TEST(A2, ConstantWeight) {
    A2Sweep sw;
    sw.centers = 5;
    sw.lengths = 5;
    EXPECT_NEAR(a2_constant(0.0, sw).value, 1.0, 1e-12);
    EXPECT_NEAR(detail::bracket_power_integral(0.0, -3.0, 5.0, 1e-12), 8.0, 1e-12);
}

TEST(A2, ReflectionAndInversionInvariance) {
    for (double a : {0.3, 0.8})
        for (auto [lo, hi] : {std::pair{-2.0, 7.0}, std::pair{10.0, 1e3}, std::pair{-1e4, 1e4}}) {
            const double v = a2_product(a, lo, hi);
            EXPECT_NEAR(a2_product(-a, lo, hi), v, 1e-12 * v);
            EXPECT_NEAR(a2_product(a, -hi, -lo), v, 1e-12 * v);
        }
}

TEST(A2, GrowsTowardsTheEndpoint) {
    A2Sweep sw;
    sw.centers = 8;
    sw.lengths = 10;
    double prev = 1.0;
    for (double a : {0.5, 0.9, 0.99}) {
        const double v = a2_constant(a, sw).value;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Stats, Summary) {
    const auto s = summarize({3.0, 1.0, 2.0});
    EXPECT_EQ(s.max, 3.0);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(summarize({}).values.size(), 0u);
}
