#ifndef DGBO_ANALYSIS_CLAIMS_HPP
#define DGBO_ANALYSIS_CLAIMS_HPP

// Arithmetic facts behind the nonlinear estimate, checked by exhaustive
// search: the resonance lower bound, modulation lower bounds, the admissible
// range of b, and the A_2 characteristic of <tau>^a.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dgbo/errors.hpp"
#include "dgbo/model.hpp"
#include "dgbo/spectral.hpp"

namespace dgbo {

/// Nonzero integers with k1 + k2 + k3 = 0.
struct FrequencyTriple {
    std::array<int, 3> k{};

    static FrequencyTriple make(int k1, int k2, int k3) {
        if (k1 == 0 || k2 == 0 || k3 == 0) throw ArgumentError("frequency triple must have nonzero entries");
        if (k1 + k2 + k3 != 0) throw ArgumentError("frequency triple must sum to zero");
        return FrequencyTriple{{k1, k2, k3}};
    }
    static FrequencyTriple from_pair(int k1, int k2) { return make(k1, k2, -k1 - k2); }

    int n_max() const { return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}); }
    int n_min() const { return std::min({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}); }
    /// Index of the entry with the smallest |k_j| (first one on ties).
    int min_index() const {
        int j = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(k[static_cast<std::size_t>(i)]) < std::abs(k[static_cast<std::size_t>(j)])) j = i;
        return j;
    }
};

/// Omega = sum_j k_j |k_j|^alpha.
inline double resonance(const FrequencyTriple& t, double alpha) {
    double s = 0.0;
    for (int kj : t.k) s += ModelParams::dispersion_relation(kj, alpha);
    return s;
}

/// |Omega| / (N_max^alpha N_min).
inline double resonance_ratio(const FrequencyTriple& t, double alpha) {
    return std::abs(resonance(t, alpha)) / (std::pow(t.n_max(), alpha) * t.n_min());
}

struct ResonanceScan {
    double min_ratio = std::numeric_limits<double>::infinity();
    FrequencyTriple witness{};
    long triples = 0;
};

/// Every triple with max |k_j| <= K_max (each unordered triple visited up to permutation and sign).
template <class F>
void for_each_triple(int K_max, F&& f) {
    for (int k1 = -K_max; k1 <= K_max; ++k1) {
        if (k1 == 0) continue;
        for (int k2 = -K_max; k2 <= K_max; ++k2) {
            const int k3 = -k1 - k2;
            if (k2 == 0 || k3 == 0 || std::abs(k3) > K_max) continue;
            f(FrequencyTriple{{k1, k2, k3}});
        }
    }
}

inline ResonanceScan resonance_constant_scan(double alpha, int K_max) {
    if (K_max < 2) throw ArgumentError("resonance_constant_scan: K_max must be >= 2");
    ResonanceScan s;
    for_each_triple(K_max, [&](const FrequencyTriple& t) {
        ++s.triples;
        const double r = resonance_ratio(t, alpha);
        if (r < s.min_ratio) {
            s.min_ratio = r;
            s.witness = t;
        }
    });
    return s;
}

// --- modulation ---------------------------------------------------------------

/// min over tau_1 + tau_2 + tau_3 = 0 of max_j |tau_j - L_{k_j}| / <k_j>^beta,
/// attained when the weighted distances are equal: |Omega| / sum_j <k_j>^beta.
inline double minmax_modulation(const FrequencyTriple& t, double alpha, double beta) {
    double w = 0.0;
    for (int kj : t.k) w += std::pow(bracket(kj), beta);
    return std::abs(resonance(t, alpha)) / w;
}

/// The same minimum found numerically: nested golden-section search over the
/// modulations (s1, s2), with s3 = -Omega - s1 - s2. The objective is convex.
inline double minmax_modulation_search(const FrequencyTriple& t, double alpha, double beta, int iterations = 200) {
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j) w[static_cast<std::size_t>(j)] = std::pow(bracket(t.k[static_cast<std::size_t>(j)]), beta);
    const double omega = resonance(t, alpha);
    auto objective = [&](double s1, double s2) {
        const double s3 = -omega - s1 - s2;
        return std::max({std::abs(s1) / w[0], std::abs(s2) / w[1], std::abs(s3) / w[2]});
    };
    auto golden = [iterations](double lo, double hi, const std::function<double(double)>& f) {
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int i = 0; i < iterations; ++i) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = f(x2);
            }
        }
        return std::min(f1, f2);
    };
    const double R = std::abs(omega) + 1.0;
    return golden(-R, R, [&](double s1) { return golden(-R, R, [&](double s2) { return objective(s1, s2); }); });
}

/// Lower bound in the case where the unweighted modulation |tau_j - L_{k_j}| is
/// largest at the smallest frequency j0: min of |sigma_{j0}| / <k_{j0}>^beta
/// subject to |sigma_j| <= |sigma_{j0}| and sum sigma = -Omega, i.e.
/// |Omega| / (3 <k_{j0}>^beta).
inline double dominant_low_modulation(const FrequencyTriple& t, double alpha, double beta) {
    const int j0 = t.min_index();
    return std::abs(resonance(t, alpha)) / (3.0 * std::pow(bracket(t.k[static_cast<std::size_t>(j0)]), beta));
}

struct ModulationScan {
    double min_minmax = std::numeric_limits<double>::infinity();       // minmax / (N_max^{alpha-beta} N_min)
    FrequencyTriple minmax_witness{};
    double min_dominant = std::numeric_limits<double>::infinity();     // dominant / (N_max^alpha N_min^{1-beta})
    FrequencyTriple dominant_witness{};
    double min_raw = std::numeric_limits<double>::infinity();          // smallest unnormalized min-max value
    long triples = 0;
};

inline ModulationScan modulation_scan(double alpha, double beta, int K_max) {
    if (K_max < 2) throw ArgumentError("modulation_scan: K_max must be >= 2");
    ModulationScan s;
    for_each_triple(K_max, [&](const FrequencyTriple& t) {
        ++s.triples;
        const double nmax = t.n_max(), nmin = t.n_min();
        const double mm = minmax_modulation(t, alpha, beta);
        s.min_raw = std::min(s.min_raw, mm);
        const double r1 = mm / (std::pow(nmax, alpha - beta) * nmin);
        if (r1 < s.min_minmax) {
            s.min_minmax = r1;
            s.minmax_witness = t;
        }
        const double r2 = dominant_low_modulation(t, alpha, beta) / (std::pow(nmax, alpha) * std::pow(nmin, 1.0 - beta));
        if (r2 < s.min_dominant) {
            s.min_dominant = r2;
            s.dominant_witness = t;
        }
    });
    return s;
}

// --- off-diagonal gap -------------------------------------------------------------

struct OffdiagGap {
    double gap = 0.0;         // min over tau of max(|tau - L_k| / <k>^beta, |tau - L_n| / <n>^beta)
    double bracketed = 0.0;   // the same with brackets, <gap>
    double normalized = 0.0;  // gap / max(<n>, <k>)^{alpha - beta}
    double tau_star = 0.0;    // weighted midpoint where the minimum is attained
};

inline OffdiagGap offdiag_modulation_gap(int k, int n, double alpha, double beta) {
    if (k == 0 || n == 0) throw ArgumentError("offdiag_modulation_gap: k and n must be nonzero");
    if (k == n) throw ArgumentError("offdiag_modulation_gap: requires n != k");
    const double Lk = ModelParams::dispersion_relation(k, alpha), Ln = ModelParams::dispersion_relation(n, alpha);
    const double wk = std::pow(bracket(k), beta), wn = std::pow(bracket(n), beta);
    OffdiagGap g;
    g.gap = std::abs(Ln - Lk) / (wk + wn);
    g.bracketed = bracket(g.gap);
    g.normalized = g.gap / std::pow(std::max(bracket(k), bracket(n)), alpha - beta);
    g.tau_star = (wn * Lk + wk * Ln) / (wk + wn);
    return g;
}

struct OffdiagScan {
    double min_normalized = std::numeric_limits<double>::infinity();
    int k = 0;
    int n = 0;
    long pairs = 0;
};

inline OffdiagScan offdiag_scan(double alpha, double beta, int K_max) {
    if (K_max < 1) throw ArgumentError("offdiag_scan: K_max must be >= 1");
    OffdiagScan s;
    std::vector<double> L(static_cast<std::size_t>(2 * K_max + 1)), w(L.size()), br(L.size());
    for (int k = -K_max; k <= K_max; ++k) {
        const auto i = static_cast<std::size_t>(k + K_max);
        L[i] = ModelParams::dispersion_relation(k, alpha);
        w[i] = std::pow(bracket(k), beta);
        br[i] = std::pow(bracket(k), alpha - beta);
    }
    for (int k = -K_max; k <= K_max; ++k) {
        if (k == 0) continue;
        const auto ik = static_cast<std::size_t>(k + K_max);
        for (int n = -K_max; n <= K_max; ++n) {
            if (n == 0 || n == k) continue;
            const auto in = static_cast<std::size_t>(n + K_max);
            ++s.pairs;
            const double r = std::abs(L[in] - L[ik]) / (w[ik] + w[in]) / std::max(br[ik], br[in]);
            if (r < s.min_normalized) {
                s.min_normalized = r;
                s.k = k;
                s.n = n;
            }
        }
    }
    return s;
}

// --- admissible b ---------------------------------------------------------------

struct AdmissibleInterval {
    double lower = 0.5;
    std::array<double, 4> bounds{};
    std::array<const char*, 4> names{
        "(alpha-1)/(alpha-beta)",
        "(alpha-1/2)/(alpha-beta+1)",
        "1-(1-beta/2)/alpha",
        "1-(3/2-beta)/(alpha-beta+1)",
    };

    double upper() const { return *std::min_element(bounds.begin(), bounds.end()); }
    bool empty() const { return !(upper() > lower); }
    bool contains(double b) const { return b > lower && b < upper(); }
};

/// (1/2, min of the four upper bounds); empty iff alpha + beta <= 2.
inline AdmissibleInterval admissible_b_interval(double alpha, double beta) {
    if (!(alpha > beta && beta > 0.0)) throw ArgumentError("admissible_b_interval: requires alpha > beta > 0");
    AdmissibleInterval r;
    r.bounds = {
        (alpha - 1.0) / (alpha - beta),
        (alpha - 0.5) / (alpha - beta + 1.0),
        1.0 - (1.0 - 0.5 * beta) / alpha,
        1.0 - (1.5 - beta) / (alpha - beta + 1.0),
    };
    return r;
}

/// Throws ArgumentError naming the violated bound if b is outside the interval.
inline void require_admissible_b(double b, double alpha, double beta) {
    if (!(beta > 0.0) || !(alpha > beta))
        throw ArgumentError("b = " + std::to_string(b) + " cannot be admissible: requires alpha > beta > 0");
    const auto iv = admissible_b_interval(alpha, beta);
    if (!(b > iv.lower)) throw ArgumentError("b = " + std::to_string(b) + " violates the lower bound b > 1/2");
    for (std::size_t i = 0; i < 4; ++i)
        if (!(b < iv.bounds[i]))
            throw ArgumentError("b = " + std::to_string(b) + " violates b < " + iv.names[i] + " = " + std::to_string(iv.bounds[i]));
}

struct NumerologyCheck {
    int points = 0;
    int skipped = 0;
    int violations = 0;
};

/// Nonemptiness versus alpha + beta > 2 on an n x n grid of (alpha, beta) in
/// (1, 2] x (0, 2), skipping beta >= alpha and the band |alpha + beta - 2| <= band.
inline NumerologyCheck numerology_grid_check(int n = 50, double band = 1e-9) {
    NumerologyCheck c;
    for (int i = 1; i <= n; ++i) {
        const double alpha = 1.0 + static_cast<double>(i) / n;
        for (int j = 1; j <= n; ++j) {
            const double beta = 2.0 * j / (n + 1);
            if (beta >= alpha || std::abs(alpha + beta - 2.0) <= band) {
                ++c.skipped;
                continue;
            }
            ++c.points;
            if (admissible_b_interval(alpha, beta).empty() == (alpha + beta > 2.0)) ++c.violations;
        }
    }
    return c;
}

// --- A_2 ----------------------------------------------------------------------------

struct A2Sweep {
    int centers = 28;           // log grid in [center_min, center_max], plus the center 0
    double center_min = 1e-3;
    double center_max = 1e6;
    int lengths = 37;           // log grid in [length_min, length_max]
    double length_min = 1e-3;
    double length_max = 1e6;
    double rel_tol = 1e-12;
};

struct A2Result {
    double value = 0.0;
    double center = 0.0;
    double length = 0.0;
    int intervals = 0;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    if (n == 1) return {lo};
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

/// \int_lo^hi <tau>^p dtau, split at 0 and +-10^j so every piece sees a mild weight.
inline double bracket_power_integral(double p, double lo, double hi, double rel_tol) {
    std::vector<double> cuts{lo, hi, 0.0};
    for (double s = 1.0; s < 1e9; s *= 10.0) {
        cuts.push_back(s);
        cuts.push_back(-s);
    }
    std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Integrate on [-1, 1] so the error estimate and the tolerance share a scale.
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]), half = 0.5 * (cuts[i + 1] - cuts[i]);
        double err = 0.0;
        const double r = GK::integrate([p, mid, half](double x) {
            const double t = mid + half * x;
            return std::pow(1.0 + t * t, 0.5 * p);
        }, -1.0, 1.0, 20, rel_tol, &err);
        const double v = half * r;
        if (!std::isfinite(v) || err > 1e-8 * std::abs(r) + 1e-300)
            throw NumericalError("a2_constant: quadrature did not converge on [" + std::to_string(cuts[i]) + ", " +
                                 std::to_string(cuts[i + 1]) + "]");
        total += v;
    }
    return total;
}

} // namespace detail

/// (avg_I W)(avg_I W^{-1}) for W = <tau>^a.
inline double a2_product(double a, double lo, double hi, double rel_tol = 1e-12) {
    const double len = hi - lo;
    return detail::bracket_power_integral(a, lo, hi, rel_tol) / len * detail::bracket_power_integral(-a, lo, hi, rel_tol) / len;
}

/// Largest A_2 product over the swept intervals: a lower bound for the A_2 characteristic.
inline A2Result a2_constant(double a, const A2Sweep& sweep = {}) {
    if (sweep.centers < 1 || sweep.lengths < 1) throw ArgumentError("a2_constant: empty sweep");
    auto centers = detail::log_grid(sweep.center_min, sweep.center_max, sweep.centers);
    centers.insert(centers.begin(), 0.0);
    const auto lengths = detail::log_grid(sweep.length_min, sweep.length_max, sweep.lengths);
    A2Result r;
    for (double c : centers)
        for (double len : lengths) {
            const double v = a2_product(a, c - 0.5 * len, c + 0.5 * len, sweep.rel_tol);
            ++r.intervals;
            if (v > r.value) {
                r.value = v;
                r.center = c;
                r.length = len;
            }
        }
    return r;
}

} // namespace dgbo

#endif
