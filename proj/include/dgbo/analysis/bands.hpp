#ifndef DGBO_ANALYSIS_BANDS_HPP
#define DGBO_ANALYSIS_BANDS_HPP

// Space-time fields given directly in Fourier variables as sums of gaussian
// bands, uhat_k(tau) = sum_i a_i exp(-(tau - c_i)^2 / (2 s_i^2)). Products are
// exact (gaussians convolve to gaussians), so bilinear ratios in Z^b need no
// time sampling at all; only the final weighted L^2_tau norms use quadrature.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgbo/analysis/claims.hpp"
#include "dgbo/analysis/ratios.hpp"
#include "dgbo/analysis/zb.hpp"
#include "dgbo/damping.hpp"

namespace dgbo {

struct Band {
    double center = 0.0;
    double width = 1.0;
    cplx amp{};
};

class BandField {
public:
    void add(int k, const Band& b) {
        if (k == 0) return;
        modes_[k].push_back(b);
    }
    /// Adds the band at k and its mirror at -k, keeping the field real.
    void add_real(int k, const Band& b) {
        add(k, b);
        add(-k, Band{-b.center, b.width, std::conj(b.amp)});
    }
    const std::map<int, std::vector<Band>>& modes() const { return modes_; }
    bool empty() const { return modes_.empty(); }

    cplx value(int k, double tau) const {
        const auto it = modes_.find(k);
        if (it == modes_.end()) return {};
        cplx s{};
        for (const auto& b : it->second) {
            const double x = (tau - b.center) / b.width;
            s += b.amp * std::exp(-0.5 * x * x);
        }
        return s;
    }

private:
    std::map<int, std::vector<Band>> modes_;
};

/// Space-time product: (uv)^_k(tau) = (1/2pi) sum_{k1+k2=k} \int uhat_{k1}(t) vhat_{k2}(tau - t) dt.
/// The zero mode is dropped (every use applies d/dx afterwards).
inline BandField product(const BandField& u, const BandField& v) {
    BandField out;
    for (const auto& [k1, b1] : u.modes())
        for (const auto& [k2, b2] : v.modes()) {
            const int k = k1 + k2;
            if (k == 0) continue;
            for (const auto& p : b1)
                for (const auto& q : b2) {
                    const double s2 = p.width * p.width + q.width * q.width;
                    const double s = std::sqrt(s2);
                    const cplx a = p.amp * q.amp * (std::sqrt(kTwoPi) * p.width * q.width / s) / kTwoPi;
                    out.add(k, Band{p.center + q.center, s, a});
                }
        }
    return out;
}

/// Z^b norm with an extra spatial multiplier |m(k)|, by the trapezoid rule on
/// each cluster of bands (support taken as center +- 8 widths, spacing width/4).
inline double band_znorm(const BandField& f, const ZbParams& zb, const std::function<double(int)>& multiplier = nullptr) {
    double total = 0.0;
    for (const auto& [k, bands] : f.modes()) {
        const double mk = multiplier ? multiplier(k) : 1.0;
        if (mk == 0.0) continue;
        const double Lk = zb.L(k);
        std::vector<const Band*> order;
        for (const auto& b : bands) order.push_back(&b);
        std::sort(order.begin(), order.end(), [](const Band* a, const Band* b) { return a->center - 8 * a->width < b->center - 8 * b->width; });
        std::size_t i = 0;
        while (i < order.size()) {
            double lo = order[i]->center - 8.0 * order[i]->width, hi = order[i]->center + 8.0 * order[i]->width;
            double smin = order[i]->width;
            std::size_t j = i + 1;
            while (j < order.size() && order[j]->center - 8.0 * order[j]->width <= hi) {
                hi = std::max(hi, order[j]->center + 8.0 * order[j]->width);
                smin = std::min(smin, order[j]->width);
                ++j;
            }
            const int n = std::max(16, static_cast<int>(std::ceil((hi - lo) / (0.25 * smin))));
            const double h = (hi - lo) / n;
            double acc = 0.0;
            for (int q = 0; q <= n; ++q) {
                const double tau = lo + h * q;
                cplx s{};
                for (std::size_t r = i; r < j; ++r) {
                    const double x = (tau - order[r]->center) / order[r]->width;
                    s += order[r]->amp * std::exp(-0.5 * x * x);
                }
                const double w = zb.weight(k, tau - Lk);
                acc += (q == 0 || q == n ? 0.5 : 1.0) * w * w * std::norm(s);
            }
            total += mk * mk * acc * h;
            i = j;
        }
    }
    return std::sqrt(total);
}

namespace detail {

/// One band per mode 1..K: center L_k + <k>^beta N(0,1), width <k>^beta U[1/2, 2],
/// amplitude <k>^{-1} complex gaussian.
inline BandField random_band_field(int K, double alpha, double beta, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    BandField f;
    for (int k = 1; k <= K; ++k) {
        const double scale = std::pow(bracket(k), beta);
        const double c = ModelParams::dispersion_relation(k, alpha) + scale * n01(rng);
        const double s = scale * u(rng);
        const double re = n01(rng), im = n01(rng);
        f.add_real(k, Band{c, s, cplx{re, im} / bracket(k)});
    }
    return f;
}

inline BandField on_shell(int k, double alpha, double beta, double shift = 0.0) {
    BandField f;
    f.add_real(k, Band{ModelParams::dispersion_relation(k, alpha) + shift, std::pow(bracket(k), beta), cplx{1.0, 0.0}});
    return f;
}

} // namespace detail

struct BilinearOptions {
    int K = 32;
    int trials = 100;
    std::uint64_t seed = 0;
    bool adversarial = true;
    /// false evaluates the same scan with beta = 0 in the norms, the D factor
    /// and the band scales; admissibility is still checked for the true beta.
    bool dissipation_weight = true;
};

struct BilinearReport {
    RatioStats random;
    double adversarial_max = 0.0;
    std::string adversarial_witness;
    double max = 0.0;
};

/// |D^{-beta(b-1/2)} d/dx (uv)|_{Z^{b-1}} / (|u|_{Z^b} |v|_{Z^b}).
inline double bilinear_value(const BandField& u, const BandField& v, const ZbParams& zb) {
    const double nu = band_znorm(u, zb), nv = band_znorm(v, zb);
    if (!(nu > 0.0) || !(nv > 0.0)) return 0.0;
    ZbParams zl = zb;
    zl.b = zb.b - 1.0;
    const double s = -zb.beta * (zb.b - 0.5);
    const double lhs = band_znorm(product(u, v), zl, [s](int k) {
        const double ak = std::abs(static_cast<double>(k));
        return ak * std::pow(ak, s);
    });
    return lhs / (nu * nv);
}

inline BilinearReport bilinear_ratio(const ZbParams& zb, const BilinearOptions& opt = {}) {
    require_admissible_b(zb.b, zb.alpha, zb.beta);
    if (!(zb.alpha + zb.beta > 2.0)) throw ArgumentError("bilinear_ratio: requires alpha + beta > 2");
    if (opt.K < 2) throw ArgumentError("bilinear_ratio: K must be >= 2");
    ZbParams z = zb;
    if (!opt.dissipation_weight) z.beta = 0.0;
    BilinearReport rep;
    std::mt19937_64 rng(opt.seed);
    std::vector<double> vals;
    for (int t = 0; t < opt.trials; ++t) {
        const auto u = detail::random_band_field(opt.K, z.alpha, z.beta, rng);
        const auto v = detail::random_band_field(opt.K, z.alpha, z.beta, rng);
        vals.push_back(bilinear_value(u, v, z));
    }
    rep.random = summarize(std::move(vals));
    rep.max = rep.random.max;
    if (opt.adversarial) {
        auto consider = [&](int k1, int k2, double shift1, double shift2, const std::string& tag) {
            const double r = bilinear_value(detail::on_shell(k1, z.alpha, z.beta, shift1), detail::on_shell(k2, z.alpha, z.beta, shift2), z);
            if (r > rep.adversarial_max) {
                rep.adversarial_max = r;
                rep.adversarial_witness = tag + " (" + std::to_string(k1) + ", " + std::to_string(k2) + ")";
            }
        };
        // High-low pairs: both inputs on shell, or one input carrying the resonance
        // so that the output sits on shell.
        std::vector<std::pair<int, int>> pairs{{opt.K, 1}, {opt.K, 2}, {opt.K / 2, 1}};
        // Near-resonant triples from the resonance scan of the band.
        const auto scan = resonance_constant_scan(z.alpha, opt.K);
        pairs.emplace_back(scan.witness.k[0], scan.witness.k[1]);
        pairs.emplace_back(opt.K / 2, opt.K / 2);
        pairs.emplace_back(opt.K, -(opt.K - 1));
        for (const auto& [k1, k2] : pairs) {
            if (k1 == 0 || k2 == 0 || k1 + k2 == 0) continue;
            const double omega = z.L(k1) + z.L(k2) - z.L(k1 + k2);
            consider(k1, k2, 0.0, 0.0, "on-shell");
            consider(k1, k2, -omega, 0.0, "output on shell, first input off");
            consider(k1, k2, 0.0, -omega, "output on shell, second input off");
        }
        rep.max = std::max(rep.max, rep.adversarial_max);
    }
    return rep;
}

// --- N_1 ------------------------------------------------------------------------

/// N_1 applied to a band field: each band at n contributes N1_{kn} times itself at k.
inline BandField apply_n1(const Eigen::MatrixXcd& n1, int K, const BandField& v) {
    BandField out;
    for (const auto& [n, bands] : v.modes()) {
        if (std::abs(n) > K) continue;
        const int col = mode_index(n, K);
        for (int row = 0; row < 2 * K; ++row) {
            const cplx m = n1(row, col);
            if (m == cplx{}) continue;
            const int k = mode_of_index(row, K);
            for (const auto& b : bands) out.add(k, Band{b.center, b.width, m * b.amp});
        }
    }
    return out;
}

/// |D^{-beta(b-1/2)} N_1 v|_{Z^{b-1}} / |v|_{Z^b} for one field.
inline double n1_value(const Eigen::MatrixXcd& n1, int K, const BandField& v, const ZbParams& zb) {
    const double nv = band_znorm(v, zb);
    if (!(nv > 0.0)) return 0.0;
    ZbParams zl = zb;
    zl.b = zb.b - 1.0;
    const double s = -zb.beta * (zb.b - 0.5);
    return band_znorm(apply_n1(n1, K, v), zl, [s](int k) { return std::pow(std::abs(static_cast<double>(k)), s); }) / nv;
}

inline RatioStats n1_bound_ratio(const ZbParams& zb, const DampingDecomposition& d, int K, int trials, std::uint64_t seed = 0) {
    const double hi = zb.alpha / (zb.alpha + zb.beta);
    if (!(zb.b > 0.5 && zb.b < hi))
        throw ArgumentError("n1_bound_ratio: b = " + std::to_string(zb.b) + " outside (1/2, alpha/(alpha+beta)) = (0.5, " +
                            std::to_string(hi) + ")");
    if (std::abs(d.beta() - zb.beta) > 1e-15) throw ArgumentError("n1_bound_ratio: decomposition beta differs from the norm's beta");
    if (K < 1 || K > d.kmax()) throw ArgumentError("n1_bound_ratio: K must lie in [1, kmax]");
    const Eigen::MatrixXcd n1 = n1_matrix(d, K);
    std::mt19937_64 rng(seed);
    std::vector<double> vals;
    for (int t = 0; t < trials; ++t) vals.push_back(n1_value(n1, K, detail::random_band_field(K, zb.alpha, zb.beta, rng), zb));
    return summarize(std::move(vals));
}

} // namespace dgbo

#endif
