#ifndef DGBO_FIT_HPP
#define DGBO_FIT_HPP

#include <cmath>
#include <span>

#include "dgbo/errors.hpp"

namespace dgbo {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y ~ slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ArgumentError("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        r += e * e;
    }
    f.rms_residual = std::sqrt(r / n);
    f.points = x.size();
    return f;
}

} // namespace dgbo

#endif
