#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mfclab/error.hpp"
#include "mfclab/grid.hpp"
#include "mfclab/rng.hpp"

namespace mfclab {

enum class Geometry { Line, Torus };

// Sorted particle positions with uniform weights.
struct EmpiricalMeasure {
    std::vector<double> positions;  // sorted ascending
    Geometry geometry = Geometry::Torus;

    EmpiricalMeasure() = default;
    EmpiricalMeasure(std::vector<double> pos, Geometry geo) : positions(std::move(pos)), geometry(geo) {
        if (positions.empty()) throw Error("EmpiricalMeasure: need N >= 1");
        std::sort(positions.begin(), positions.end());
        if (geometry == Geometry::Torus)
            for (double x : positions)
                if (!(x >= 0.0 && x < 1.0)) throw Error("EmpiricalMeasure: torus positions must lie in [0,1)");
    }

    int size() const { return static_cast<int>(positions.size()); }
};

inline double pair_distance(double a, double b, Geometry geo) {
    return geo == Geometry::Torus ? torus_distance(a, b) : std::fabs(a - b);
}

// Piecewise-linear CDF of a grid density (density constant per cell) and its
// inverse; the sampling and quantile-coupling backbone.
class DensityCdf {
  public:
    explicit DensityCdf(const DensityField& m) : grid_(m.grid) {
        m.validate(1e-8);
        const int n = grid_.n_x;
        cell_mass_.resize(n);
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            cell_mass_[j] = 0.5 * (m.v[j] + m.v[jp]) * grid_.h;
        }
        cum_.assign(n + 1, 0.0);
        for (int j = 0; j < n; ++j) cum_[j + 1] = cum_[j] + cell_mass_[j];
        const double total = cum_[n];
        if (!(total > 0.0)) throw SchemeError("DensityCdf: degenerate density");
        for (auto& c : cum_) c /= total;
        cum_[n] = 1.0;
    }

    // Inverse CDF (quantile function) for u in [0,1).
    double quantile(double u) const {
        const int n = grid_.n_x;
        u = std::clamp(u, 0.0, 1.0);
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        int j = static_cast<int>(it - cum_.begin()) - 1;
        j = std::clamp(j, 0, n - 1);
        const double mass = cum_[j + 1] - cum_[j];
        const double w = mass > 0.0 ? (u - cum_[j]) / mass : 0.0;
        return wrap01((j + w) * grid_.h);
    }

  private:
    TorusGrid grid_;
    std::vector<double> cell_mass_;
    std::vector<double> cum_;
};

// Inverse-CDF sampling with a counter-based stream keyed by (seed, draw index).
inline EmpiricalMeasure sample_from_density(const DensityField& m, int N, std::uint64_t seed) {
    if (N < 1) throw Error("sample_from_density: N must be >= 1");
    DensityCdf cdf(m);
    std::vector<double> pos(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        pos[static_cast<std::size_t>(i)] = cdf.quantile(uniform01(seed, static_cast<std::uint64_t>(i), 0));
    return EmpiricalMeasure(std::move(pos), Geometry::Torus);
}

// q-th moment; torus atoms are read at their representative in [-1/2, 1/2).
inline double moment(const EmpiricalMeasure& a, double q) {
    if (!(q > 0.0)) throw Error("moment: q must be positive");
    double s = 0.0;
    for (double x : a.positions) {
        double r = x;
        if (a.geometry == Geometry::Torus && r >= 0.5) r -= 1.0;
        s += std::pow(std::fabs(r), q);
    }
    return s / a.size();
}

// Equal-size W_p: sorted pairing on the line; minimum over the N cyclic
// shifts of the sorted pairing on the torus (exact in 1-D).
inline double wasserstein_p(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (p < 1.0) throw Error("wasserstein_p: p must be >= 1");
    if (a.geometry != b.geometry) throw Error("wasserstein_p: geometry mismatch");
    const int n = a.size();
    if (n != b.size()) throw Error("wasserstein_p: equal sizes required (densify one side instead)");

    if (a.geometry == Geometry::Line) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::pow(std::fabs(a.positions[i] - b.positions[i]), p);
        return std::pow(s / n, 1.0 / p);
    }
    double best = -1.0;
    for (int shift = 0; shift < n; ++shift) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            int j = i + shift;
            if (j >= n) j -= n;
            s += std::pow(torus_distance(a.positions[i], b.positions[j]), p);
        }
        if (best < 0.0 || s < best) best = s;
    }
    return std::pow(best / n, 1.0 / p);
}

// Exact minimum over all N! assignments; the independent oracle.
inline double ot_bruteforce_oracle(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    const int n = a.size();
    if (n > 8) throw Error("ot_bruteforce_oracle: N must be <= 8");
    if (n != b.size()) throw Error("ot_bruteforce_oracle: equal sizes required");
    if (a.geometry != b.geometry) throw Error("ot_bruteforce_oracle: geometry mismatch");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += std::pow(pair_distance(a.positions[i], b.positions[perm[i]], a.geometry), p);
        if (best < 0.0 || s < best) best = s;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / n, 1.0 / p);
}

namespace detail {

// Quantile-coupling cost between sorted torus atoms and a density, with the
// quantile probe rotated by offset c.
inline double quantile_coupling_cost(const EmpiricalMeasure& a, const DensityCdf& cdf, double p,
                                     double c) {
    const int n = a.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = wrap01((i + 0.5) / n - c);
        s += std::pow(torus_distance(a.positions[i], cdf.quantile(u)), p);
    }
    return s / n;
}

}  // namespace detail

// W_p between an empirical measure and a density on the torus: quantile
// coupling with a single rotation offset optimized by coarse scan plus
// golden-section refinement.
inline double wasserstein_p_density(const EmpiricalMeasure& a, const DensityField& m, double p) {
    if (p < 1.0) throw Error("wasserstein_p_density: p must be >= 1");
    if (a.geometry != Geometry::Torus) throw Error("wasserstein_p_density: torus geometry required");
    DensityCdf cdf(m);
    const int coarse = 48;
    double best_c = 0.0, best = -1.0;
    for (int k = 0; k < coarse; ++k) {
        const double c = static_cast<double>(k) / coarse;
        const double v = detail::quantile_coupling_cost(a, cdf, p, c);
        if (best < 0.0 || v < best) {
            best = v;
            best_c = c;
        }
    }
    double lo = best_c - 1.0 / coarse, hi = best_c + 1.0 / coarse;
    const double gr = 0.6180339887498949;
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = detail::quantile_coupling_cost(a, cdf, p, c1);
    double f2 = detail::quantile_coupling_cost(a, cdf, p, c2);
    for (int it = 0; it < 48; ++it) {
        if (f1 < f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = detail::quantile_coupling_cost(a, cdf, p, c1);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = detail::quantile_coupling_cost(a, cdf, p, c2);
        }
    }
    best = std::min(best, std::min(f1, f2));
    return std::pow(best, 1.0 / p);
}

// W_1 between two grid densities on the torus via the CDF median formula:
// W_1 = min_c int |F_1 - F_2 - c|.
inline double wasserstein1_density(const DensityField& m1, const DensityField& m2) {
    if (!(m1.grid == m2.grid)) throw Error("wasserstein1_density: grid mismatch");
    const int n = m1.size();
    std::vector<double> delta(n, 0.0);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        delta[j] = acc;
        acc += (m1.v[j] - m2.v[j]) * m1.grid.h;
    }
    std::vector<double> sorted(delta);
    std::sort(sorted.begin(), sorted.end());
    const double med = 0.5 * (sorted[(n - 1) / 2] + sorted[n / 2]);
    double s = 0.0;
    for (double d : delta) s += std::fabs(d - med);
    return s * m1.grid.h;
}

}  // namespace mfclab
