#pragma once

// Independent oracles used by the unit and acceptance suites. These stay
// deliberately naive (dense scans, direct quadrature, log-sum-exp sums) and
// share no discretization machinery with the solvers they check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfclab/model.hpp"

namespace oracles {

// Hopf-Lax on the torus: u(t0, z) = min_w [ g(w) + d(z, w)^2 / (2 s) ],
// evaluated by dense scan over w plus image shifts.
inline double hopf_lax(const mfclab::PeriodicFn& g, double z, double horizon,
                       int scan_points = 100000) {
    double best = 1e300;
    for (int i = 0; i < scan_points; ++i) {
        const double w = (i + 0.5) / scan_points;
        const double gw = g(w);
        for (int img = -1; img <= 1; ++img) {
            const double d = z - (w + img);
            best = std::min(best, gw + d * d / (2.0 * horizon));
        }
    }
    return best;
}

// Exact Cole-Hopf integral representation for f = 0:
//   v(t0, z) = -2 eps log int K(z - y; 2 eps (T - t0)) exp(-g(y) / (2 eps)) dy
// with the periodic heat kernel K; computed by log-sum-exp quadrature so it
// stays finite for any N.
inline double cole_hopf_quadrature(const mfclab::PeriodicFn& g, double z, int N, double horizon,
                                   int quad_points = 100000) {
    const double eps = 1.0 / N;
    const double var = 2.0 * eps * horizon;
    std::vector<double> logterms(static_cast<std::size_t>(quad_points));
    double m = -1e300;
    for (int i = 0; i < quad_points; ++i) {
        const double y = (i + 0.5) / quad_points;
        // periodic heat kernel via image sum, in log space
        double kbest = -1e300;
        double kacc = 0.0;
        for (int img = -3; img <= 3; ++img) {
            const double d = z - y + img;
            const double lk = -d * d / (2.0 * var);
            if (lk > kbest) kbest = lk;
        }
        for (int img = -3; img <= 3; ++img) {
            const double d = z - y + img;
            kacc += std::exp(-d * d / (2.0 * var) - kbest);
        }
        const double logk = kbest + std::log(kacc) - 0.5 * std::log(2.0 * M_PI * var);
        logterms[static_cast<std::size_t>(i)] = logk - g(y) / (2.0 * eps);
        m = std::max(m, logterms[static_cast<std::size_t>(i)]);
    }
    double acc = 0.0;
    for (double t : logterms) acc += std::exp(t - m);
    const double log_integral = m + std::log(acc) - std::log(static_cast<double>(quad_points));
    return -2.0 * eps * log_integral;
}

}  // namespace oracles
