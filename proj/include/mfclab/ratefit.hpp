#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mfclab/error.hpp"

namespace mfclab {

// (N, error) series with its fitted log-log slope; the verdict object
// every rate experiment reduces to.
struct RateFit {
    std::vector<double> n_values;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    bool degenerate = false;
};

// Ordinary least squares on (log N, log err). Non-positive errors are
// filtered out; fewer than 3 surviving points flags the fit degenerate.
inline RateFit loglog_fit(const std::vector<double>& n_values,
                          const std::vector<double>& errors) {
    if (n_values.size() != errors.size()) throw Error("loglog_fit: size mismatch");
    RateFit fit;
    fit.n_values = n_values;
    fit.errors = errors;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] > 0.0 && std::isfinite(errors[i])) {
            xs.push_back(std::log(n_values[i]));
            ys.push_back(std::log(errors[i]));
        }
    }
    if (xs.size() < 3) {
        fit.degenerate = true;
        return fit;
    }

    const std::size_t m = xs.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / m);
    return fit;
}

// Wilson 95% score interval for a binomial proportion; the sane choice for
// the rare-event exit and exceedance counts.
struct WilsonInterval {
    double estimate;
    double lo;
    double hi;
};

inline WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963984540054) {
    if (trials <= 0) throw Error("wilson_interval: trials must be positive");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace mfclab
