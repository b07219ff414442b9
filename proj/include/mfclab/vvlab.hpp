#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mfclab/error.hpp"
#include "mfclab/grid.hpp"
#include "mfclab/model.hpp"
#include "mfclab/ratefit.hpp"
#include "mfclab/tridiag.hpp"

namespace mfclab {

// Solvers for the reduced pair of equations
//   -d_t v - (1/N) Lap v + |Dv|^2 / 2 = f,   v(T) = g   (viscous, eps = 1/N)
//   -d_t u             + |Du|^2 / 2 = f,     u(T) = g   (first-order limit)
// on the unit torus. v(t) and u(t) are stored on the mesh knots.

enum class ViscousMethod { ColeHopf, SemiImplicit };

struct ViscousSolveResult {
    TorusGrid grid;
    TimeMesh mesh;
    int N = 0;  // viscosity eps = 1/N
    ViscousMethod method = ViscousMethod::ColeHopf;
    std::vector<ScalarField> v;  // knots 0..n_t

    const ScalarField& at(int k) const { return v[static_cast<std::size_t>(k)]; }
};

struct LimitSolveResult {
    TorusGrid grid;
    TimeMesh mesh;
    std::vector<ScalarField> u;
    std::vector<int> kink_nodes;  // nodes at t0 where one-sided Du jumps
    double kink_threshold = 0.2;

    const ScalarField& at(int k) const { return u[static_cast<std::size_t>(k)]; }
    bool near_kink(double z, double radius) const {
        for (int j : kink_nodes)
            if (torus_distance(z, grid.x(j)) <= radius) return true;
        return false;
    }
};

namespace detail {

// One discrete heat-propagation step exp(s * eps * Lap): periodic Gaussian
// kernel of variance 2 * eps * s sampled on the grid and normalized to unit
// row sum (so h * sum w is conserved exactly). Offsets cover [-radius, radius].
struct HeatKernel {
    int radius = 0;
    std::vector<double> w;  // size 2*radius+1, sums to 1
};

inline HeatKernel heat_kernel(const TorusGrid& grid, double variance) {
    const int n = grid.n_x;
    const double sigma = std::sqrt(variance);
    int radius = std::min(n / 2, static_cast<int>(std::ceil(10.0 * sigma / grid.h)) + 2);
    radius = std::max(radius, 2);
    HeatKernel k;
    k.radius = radius;
    k.w.assign(static_cast<std::size_t>(2 * radius + 1), 0.0);
    double sum = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        double val = 0.0;
        for (int img = -2; img <= 2; ++img) {
            const double z = d * grid.h + img;
            val += std::exp(-z * z / (2.0 * variance));
        }
        k.w[static_cast<std::size_t>(d + radius)] = val;
        sum += val;
    }
    for (auto& x : k.w) x /= sum;
    return k;
}

// One convolution step carried in log space: l'_j = log sum_d w_d exp(l_{j+d}).
// Each block of nodes is renormalized by the max of its dependence window, so
// the inner loop is a plain correlation of nonnegative doubles; the field l
// itself may span thousands of orders of magnitude.
inline void lse_convolve(const HeatKernel& k, const std::vector<double>& src,
                         std::vector<double>& dst) {
    const int n = static_cast<int>(src.size());
    const int R = k.radius;
    const int B = std::max(R, 64);
    std::vector<double> window;
    for (int jlo = 0; jlo < n; jlo += B) {
        const int jhi = std::min(n, jlo + B);
        const int wlen = (jhi - jlo) + 2 * R;
        window.resize(static_cast<std::size_t>(wlen));
        double m = -1e300;
        for (int t = 0; t < wlen; ++t) {
            int i = jlo - R + t;
            i %= n;
            if (i < 0) i += n;
            const double s = src[static_cast<std::size_t>(i)];
            window[static_cast<std::size_t>(t)] = s;
            if (s > m) m = s;
        }
        for (auto& x : window) x = std::exp(x - m);
        for (int j = jlo; j < jhi; ++j) {
            const double* e = window.data() + (j - jlo);
            double acc = 0.0;
            for (int d = 0; d <= 2 * R; ++d) acc += k.w[static_cast<std::size_t>(d)] * e[d];
            dst[static_cast<std::size_t>(j)] = m + std::log(acc);
        }
    }
}

// Godunov numerical Hamiltonian for H(p) = p^2/2: given left/right slopes,
// Hhat(a, b) = max(max(a,0)^2, min(b,0)^2) / 2.
inline double godunov_halfsq(double a, double b) {
    const double ap = std::max(a, 0.0);
    const double bm = std::min(b, 0.0);
    return 0.5 * std::max(ap * ap, bm * bm);
}

inline double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

// One-sided slopes, optionally with minmod-limited second-order reconstruction.
inline void one_sided_slopes(const std::vector<double>& u, double h, bool second_order,
                             std::vector<double>& left, std::vector<double>& right) {
    const int n = static_cast<int>(u.size());
    left.resize(u.size());
    right.resize(u.size());
    auto at = [&](int j) {
        if (j < 0) j += n;
        if (j >= n) j -= n;
        return u[static_cast<std::size_t>(j)];
    };
    for (int j = 0; j < n; ++j) {
        const double dm = (at(j) - at(j - 1)) / h;
        const double dp = (at(j + 1) - at(j)) / h;
        if (!second_order) {
            left[static_cast<std::size_t>(j)] = dm;
            right[static_cast<std::size_t>(j)] = dp;
        } else {
            const double c0 = (at(j + 1) - 2.0 * at(j) + at(j - 1)) / h;
            const double cm = (at(j) - 2.0 * at(j - 1) + at(j - 2)) / h;
            const double cp = (at(j + 2) - 2.0 * at(j + 1) + at(j)) / h;
            left[static_cast<std::size_t>(j)] = dm + 0.5 * minmod(c0, cm);
            right[static_cast<std::size_t>(j)] = dp - 0.5 * minmod(c0, cp);
        }
    }
}

inline double max_slope(const std::vector<double>& left, const std::vector<double>& right) {
    double m = 0.0;
    for (double a : left) m = std::max(m, std::fabs(a));
    for (double b : right) m = std::max(m, std::fabs(b));
    return m;
}

}  // namespace detail

// Cole-Hopf: w = exp(-v / (2 eps)) turns the viscous equation into the heat
// equation d_s w = eps Lap w - (f / (2 eps)) w in reversed time. The heat
// step is applied as an exact Gaussian-kernel convolution carried entirely
// in log space (log-sum-exp), which keeps the scheme stable for any N even
// though w itself spans thousands of orders of magnitude; the potential term
// is an exact exponential factor applied in Strang order.
template <class FFn, class GFn>
ViscousSolveResult solve_viscous_cole_hopf(FFn&& f, GFn&& g, int N, const TorusGrid& grid,
                                           const TimeMesh& mesh) {
    const double eps = 1.0 / N;
    const int n = grid.n_x;
    ViscousSolveResult res;
    res.grid = grid;
    res.mesh = mesh;
    res.N = N;
    res.method = ViscousMethod::ColeHopf;
    res.v.assign(static_cast<std::size_t>(mesh.n_t) + 1, ScalarField(grid));

    std::vector<double> logw(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) logw[static_cast<std::size_t>(j)] = -g(grid.x(j)) / (2.0 * eps);
    for (int j = 0; j < n; ++j) res.v[static_cast<std::size_t>(mesh.n_t)].v[j] = g(grid.x(j));

    const auto kernel = detail::heat_kernel(grid, 2.0 * eps * mesh.dt);
    std::vector<double> half_pot(static_cast<std::size_t>(n));
    bool has_f = false;
    for (int j = 0; j < n; ++j) {
        const double fj = f(grid.x(j));
        if (fj != 0.0) has_f = true;
        half_pot[static_cast<std::size_t>(j)] = -mesh.dt * fj / (4.0 * eps);
    }

    std::vector<double> tmp(logw.size());
    for (int k = mesh.n_t - 1; k >= 0; --k) {
        if (has_f)
            for (std::size_t j = 0; j < logw.size(); ++j) logw[j] += half_pot[j];
        detail::lse_convolve(kernel, logw, tmp);
        logw.swap(tmp);
        if (has_f)
            for (std::size_t j = 0; j < logw.size(); ++j) logw[j] += half_pot[j];
        auto& vk = res.v[static_cast<std::size_t>(k)];
        for (int j = 0; j < n; ++j) {
            vk.v[j] = -2.0 * eps * logw[static_cast<std::size_t>(j)];
            if (!std::isfinite(vk.v[j])) throw SchemeError("cole-hopf: failed to stabilize");
        }
    }
    return res;
}

// Semi-implicit: backward Euler diffusion (implicit), explicit Godunov
// numerical Hamiltonian on minmod-reconstructed one-sided slopes, with
// automatic CFL sub-stepping dt_sub <= cfl * h / max|Dv|.
template <class FFn, class GFn>
ViscousSolveResult solve_viscous_semi_implicit(FFn&& f, GFn&& g, int N, const TorusGrid& grid,
                                               const TimeMesh& mesh, bool second_order = true,
                                               double cfl = 0.8, double dt_cap = 0.0) {
    const double eps = 1.0 / N;
    const int n = grid.n_x;
    ViscousSolveResult res;
    res.grid = grid;
    res.mesh = mesh;
    res.N = N;
    res.method = ViscousMethod::SemiImplicit;
    res.v.assign(static_cast<std::size_t>(mesh.n_t) + 1, ScalarField(grid));

    std::vector<double> fv(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) fv[static_cast<std::size_t>(j)] = f(grid.x(j));
    auto& vT = res.v[static_cast<std::size_t>(mesh.n_t)];
    for (int j = 0; j < n; ++j) vT.v[j] = g(grid.x(j));

    PeriodicTridiag solver;
    double cached_dt = -1.0;
    auto diffuse = [&](std::vector<double>& rhs, double dt_sub) {
        if (dt_sub != cached_dt) {
            const double a = eps * dt_sub / (grid.h * grid.h);
            std::vector<double> lower(static_cast<std::size_t>(n), -a);
            std::vector<double> diag(static_cast<std::size_t>(n), 1.0 + 2.0 * a);
            std::vector<double> upper(static_cast<std::size_t>(n), -a);
            solver.setup(lower, diag, upper);
            cached_dt = dt_sub;
        }
        solver.solve(rhs);
    };

    std::vector<double> cur = vT.v, nxt(cur.size()), left, right;
    for (int k = mesh.n_t - 1; k >= 0; --k) {
        double remaining = mesh.dt;
        while (remaining > 1e-15) {
            detail::one_sided_slopes(cur, grid.h, second_order, left, right);
            const double speed = detail::max_slope(left, right);
            double dt_sub = remaining;
            if (speed > 0.0) dt_sub = std::min(dt_sub, cfl * grid.h / speed);
            if (dt_cap > 0.0) dt_sub = std::min(dt_sub, dt_cap);
            for (int j = 0; j < n; ++j) {
                const std::size_t sj = static_cast<std::size_t>(j);
                nxt[sj] = cur[sj] - dt_sub * (detail::godunov_halfsq(left[sj], right[sj]) - fv[sj]);
            }
            diffuse(nxt, dt_sub);
            cur.swap(nxt);
            remaining -= dt_sub;
        }
        auto& vk = res.v[static_cast<std::size_t>(k)];
        vk.v = cur;
        if (!all_finite(vk.v)) throw SchemeError("semi-implicit viscous: blow-up");
    }
    return res;
}

template <class FFn, class GFn>
ViscousSolveResult solve_viscous(FFn&& f, GFn&& g, int N, const TorusGrid& grid,
                                 const TimeMesh& mesh, ViscousMethod method) {
    if (N < 1) throw Error("solve_viscous: N must be >= 1");
    return method == ViscousMethod::ColeHopf
               ? solve_viscous_cole_hopf(f, g, N, grid, mesh)
               : solve_viscous_semi_implicit(f, g, N, grid, mesh);
}

// Monotone Godunov scheme for the first-order limit equation, backward in
// time with CFL sub-stepping. Kinks are the nodes at t0 where the one-sided
// slopes of u differ by more than threshold * max|Du|.
template <class FFn, class GFn>
LimitSolveResult solve_limit(FFn&& f, GFn&& g, const TorusGrid& grid, const TimeMesh& mesh,
                             double kink_threshold = 0.2, double cfl = 0.8,
                             bool second_order = true) {
    const int n = grid.n_x;
    LimitSolveResult res;
    res.grid = grid;
    res.mesh = mesh;
    res.kink_threshold = kink_threshold;
    res.u.assign(static_cast<std::size_t>(mesh.n_t) + 1, ScalarField(grid));

    std::vector<double> fv(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) fv[static_cast<std::size_t>(j)] = f(grid.x(j));
    for (int j = 0; j < n; ++j) res.u[static_cast<std::size_t>(mesh.n_t)].v[j] = g(grid.x(j));

    std::vector<double> cur = res.u[static_cast<std::size_t>(mesh.n_t)].v, nxt(cur.size()), left,
                        right;
    for (int k = mesh.n_t - 1; k >= 0; --k) {
        double remaining = mesh.dt;
        while (remaining > 1e-15) {
            detail::one_sided_slopes(cur, grid.h, second_order, left, right);
            const double speed = detail::max_slope(left, right);
            double dt_sub = remaining;
            if (speed > 0.0) dt_sub = std::min(dt_sub, cfl * grid.h / speed);
            for (int j = 0; j < n; ++j) {
                const std::size_t sj = static_cast<std::size_t>(j);
                nxt[sj] = cur[sj] - dt_sub * (detail::godunov_halfsq(left[sj], right[sj]) - fv[sj]);
            }
            cur.swap(nxt);
            remaining -= dt_sub;
            if (!all_finite(cur)) throw SchemeError("limit solver: blow-up");
        }
        res.u[static_cast<std::size_t>(k)].v = cur;
    }

    detail::one_sided_slopes(cur, grid.h, false, left, right);
    double maxslope = detail::max_slope(left, right);
    if (maxslope > 0.0) {
        for (int j = 0; j < n; ++j) {
            const std::size_t sj = static_cast<std::size_t>(j);
            if (std::fabs(right[sj] - left[sj]) > kink_threshold * maxslope)
                res.kink_nodes.push_back(j);
        }
    }
    return res;
}

struct PointRate {
    double point = 0.0;
    RateFit fit;
    std::vector<double> grad_errors;  // filled by gradient_rate
};

// |v^N(t0, z) - u(t0, z)| against N, fitted per point.
template <class FFn, class GFn>
std::vector<PointRate> pointwise_rate(FFn&& f, GFn&& g, const TorusGrid& grid,
                                      const TimeMesh& mesh, const std::vector<double>& points,
                                      const std::vector<int>& n_list,
                                      ViscousMethod method = ViscousMethod::ColeHopf) {
    if (n_list.size() < 4) throw Error("pointwise_rate: need at least 4 values of N");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw Error("pointwise_rate: N_list must be ascending");

    const auto limit = solve_limit(f, g, grid, mesh);
    std::vector<std::vector<double>> errs(points.size());
    for (int N : n_list) {
        const auto vis = solve_viscous(f, g, N, grid, mesh, method);
        for (std::size_t q = 0; q < points.size(); ++q) {
            const double z = points[q];
            errs[q].push_back(std::fabs(interpolate(vis.at(0), z) - interpolate(limit.at(0), z)));
        }
    }
    std::vector<PointRate> out;
    std::vector<double> nvals(n_list.begin(), n_list.end());
    for (std::size_t q = 0; q < points.size(); ++q)
        out.push_back({points[q], loglog_fit(nvals, errs[q]), {}});
    return out;
}

// |Dv^N - Du|(t0, z) with matched one-sided (forward) differences on both
// sides; points inside the kink set are rejected.
template <class FFn, class GFn>
std::vector<PointRate> gradient_rate(FFn&& f, GFn&& g, const TorusGrid& grid,
                                     const TimeMesh& mesh, const std::vector<double>& points,
                                     const std::vector<int>& n_list,
                                     ViscousMethod method = ViscousMethod::ColeHopf) {
    const auto limit = solve_limit(f, g, grid, mesh);
    const double guard = 8.0 * grid.h;
    for (double z : points)
        if (limit.near_kink(z, guard))
            throw Error("gradient_rate: point inside the kink set of the limit solution");

    auto forward_diff = [&](const ScalarField& field, double z) {
        return (interpolate(field, z + grid.h) - interpolate(field, z)) / grid.h;
    };

    std::vector<std::vector<double>> errs(points.size());
    for (int N : n_list) {
        const auto vis = solve_viscous(f, g, N, grid, mesh, method);
        for (std::size_t q = 0; q < points.size(); ++q) {
            const double z = points[q];
            errs[q].push_back(std::fabs(forward_diff(vis.at(0), z) - forward_diff(limit.at(0), z)));
        }
    }
    std::vector<PointRate> out;
    std::vector<double> nvals(n_list.begin(), n_list.end());
    for (std::size_t q = 0; q < points.size(); ++q) {
        PointRate pr{points[q], loglog_fit(nvals, errs[q]), errs[q]};
        out.push_back(std::move(pr));
    }
    return out;
}

// max over the grid of (v^N - u)^+ for each N; the one-sided inequality
// sweep (caller asserts N * max is bounded).
template <class FFn, class GFn>
std::vector<std::pair<int, double>> one_sided_bound(FFn&& f, GFn&& g, const TorusGrid& grid,
                                                    const TimeMesh& mesh,
                                                    const std::vector<int>& n_list,
                                                    ViscousMethod method = ViscousMethod::ColeHopf) {
    const auto limit = solve_limit(f, g, grid, mesh);
    std::vector<std::pair<int, double>> out;
    for (int N : n_list) {
        const auto vis = solve_viscous(f, g, N, grid, mesh, method);
        double worst = 0.0;
        for (int j = 0; j < grid.n_x; ++j)
            worst = std::max(worst, vis.at(0).v[j] - limit.at(0).v[j]);
        out.emplace_back(N, std::max(worst, 0.0));
    }
    return out;
}

}  // namespace mfclab
