#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mfclab/error.hpp"

namespace mfclab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform grid on the unit torus: nodes x_j = j*h, j = 0..n_x-1, h = 1/n_x.
struct TorusGrid {
    int n_x = 0;
    double h = 0.0;

    TorusGrid() = default;
    explicit TorusGrid(int n) : n_x(n), h(1.0 / n) {
        if (n < 8) throw Error("TorusGrid: n_x must be >= 8");
    }

    double x(int j) const { return j * h; }
    int wrap_index(int j) const {
        j %= n_x;
        return j < 0 ? j + n_x : j;
    }
    bool operator==(const TorusGrid& o) const { return n_x == o.n_x; }
};

// Reduce any real to its torus representative in [0,1).
inline double wrap01(double x) {
    double y = x - std::floor(x);
    if (y >= 1.0) y = 0.0;  // guard against floor rounding at integers
    return y;
}

// Signed torus displacement in [-1/2, 1/2).
inline double torus_delta(double a, double b) {
    double d = wrap01(a - b);
    if (d >= 0.5) d -= 1.0;
    return d;
}

inline double torus_distance(double a, double b) { return std::fabs(torus_delta(a, b)); }

struct TimeMesh {
    double t0 = 0.0;
    double T = 1.0;
    int n_t = 0;
    double dt = 0.0;

    TimeMesh() = default;
    TimeMesh(double t0_, double T_, int n_t_) : t0(t0_), T(T_), n_t(n_t_) {
        if (!(t0 >= 0.0 && t0 < T)) throw Error("TimeMesh: need 0 <= t0 < T");
        if (n_t < 2) throw Error("TimeMesh: n_t must be >= 2");
        dt = (T - t0) / n_t;
    }
    double t(int k) const { return t0 + k * dt; }
};

struct ScalarField {
    TorusGrid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g, double fill = 0.0)
        : grid(g), v(static_cast<std::size_t>(g.n_x), fill) {}

    double& operator[](std::size_t j) { return v[j]; }
    double operator[](std::size_t j) const { return v[j]; }
    int size() const { return grid.n_x; }
};

template <class Fn>
ScalarField sample_function(const TorusGrid& g, Fn&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.n_x; ++j) out.v[j] = f(g.x(j));
    return out;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require_finite(const ScalarField& f, const char* what) {
    if (!all_finite(f.v)) throw Error(std::string(what) + ": non-finite entries");
}

// h * sum, the grid quadrature of a periodic field.
inline double integral(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid.h;
}

inline double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (int j = 0; j < a.size(); ++j) s += a.v[j] * b.v[j];
    return s * a.grid.h;
}

inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

// Probability density on the torus: nonnegative, h * sum = 1.
struct DensityField {
    TorusGrid grid;
    std::vector<double> v;

    DensityField() = default;
    explicit DensityField(const TorusGrid& g, double fill = 1.0)
        : grid(g), v(static_cast<std::size_t>(g.n_x), fill) {}

    int size() const { return grid.n_x; }

    double total_mass() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s * grid.h;
    }

    void validate(double tol = 1e-10) const {
        for (double x : v)
            if (!(x >= 0.0)) throw SchemeError("DensityField: negative or NaN entry");
        if (std::fabs(total_mass() - 1.0) > tol)
            throw SchemeError("DensityField: mass differs from 1 beyond tolerance");
    }

    ScalarField as_scalar() const {
        ScalarField f(grid);
        f.v = v;
        return f;
    }
};

// Signed density (perturbations rho, mu, xi); carries its declared total mass.
struct SignedField {
    TorusGrid grid;
    std::vector<double> v;
    double declared_mass = 0.0;

    SignedField() = default;
    explicit SignedField(const TorusGrid& g, double mass = 0.0)
        : grid(g), v(static_cast<std::size_t>(g.n_x), 0.0), declared_mass(mass) {}

    int size() const { return grid.n_x; }

    double total_mass() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s * grid.h;
    }

    void validate(double tol = 1e-10) const {
        if (!all_finite(v)) throw Error("SignedField: non-finite entries");
        if (std::fabs(total_mass() - declared_mass) > tol)
            throw Error("SignedField: mass differs from declared value");
    }

    ScalarField as_scalar() const {
        ScalarField f(grid);
        f.v = v;
        return f;
    }
};

// Second-order central difference with periodic wrap.
inline ScalarField periodic_gradient(const ScalarField& f) {
    require_finite(f, "periodic_gradient");
    const int n = f.size();
    ScalarField g(f.grid);
    const double inv2h = 1.0 / (2.0 * f.grid.h);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1 == n) ? 0 : j + 1;
        const int jm = (j == 0) ? n - 1 : j - 1;
        g.v[j] = (f.v[jp] - f.v[jm]) * inv2h;
    }
    return g;
}

inline ScalarField periodic_laplacian(const ScalarField& f) {
    require_finite(f, "periodic_laplacian");
    const int n = f.size();
    ScalarField g(f.grid);
    const double invh2 = 1.0 / (f.grid.h * f.grid.h);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1 == n) ? 0 : j + 1;
        const int jm = (j == 0) ? n - 1 : j - 1;
        g.v[j] = (f.v[jp] - 2.0 * f.v[j] + f.v[jm]) * invh2;
    }
    return g;
}

// Piecewise-linear periodic interpolation; x is reduced mod 1.
inline double interpolate(const ScalarField& f, double x) {
    if (!std::isfinite(x)) throw Error("interpolate: non-finite x");
    const int n = f.size();
    const double s = wrap01(x) * n;
    int j = static_cast<int>(s);
    if (j >= n) j = n - 1;
    const double w = s - j;
    const int jp = (j + 1 == n) ? 0 : j + 1;
    return (1.0 - w) * f.v[j] + w * f.v[jp];
}

}  // namespace mfclab
