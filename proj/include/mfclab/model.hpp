#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mfclab/error.hpp"
#include "mfclab/grid.hpp"

namespace mfclab {

// Periodic scalar function with two derivatives; the data f, g of the
// mean-reduction (vanishing viscosity) equations and of linear functionals.
struct PeriodicFn {
    enum class Kind { Zero, Cosine, DoubleWell };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    int frequency = 1;

    double operator()(double x) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Cosine: return amplitude * std::cos(kTwoPi * frequency * x);
            case Kind::DoubleWell: {
                const double s = std::sin(kTwoPi * x);
                return amplitude * s * s * s * s;
            }
        }
        return 0.0;
    }
    double d1(double x) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Cosine:
                return -amplitude * kTwoPi * frequency * std::sin(kTwoPi * frequency * x);
            case Kind::DoubleWell: {
                const double s = std::sin(kTwoPi * x), c = std::cos(kTwoPi * x);
                return amplitude * 4.0 * kTwoPi * s * s * s * c;
            }
        }
        return 0.0;
    }
    double d2(double x) const {
        const double w = kTwoPi * frequency;
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Cosine: return -amplitude * w * w * std::cos(w * x);
            case Kind::DoubleWell: {
                const double s = std::sin(kTwoPi * x), c = std::cos(kTwoPi * x);
                return amplitude * 4.0 * kTwoPi * kTwoPi * (3.0 * s * s * c * c - s * s * s * s);
            }
        }
        return 0.0;
    }
};

inline PeriodicFn zero_fn() { return {}; }
inline PeriodicFn cosine_fn(double amplitude, int frequency) {
    if (frequency < 1) throw ModelError("cosine: frequency must be >= 1");
    return {PeriodicFn::Kind::Cosine, amplitude, frequency};
}
inline PeriodicFn double_well_fn(double amplitude) {
    return {PeriodicFn::Kind::DoubleWell, amplitude, 1};
}

// The limit source f and terminal g of the reduced equations, resolved from
// built-in names: "zero", "cosine", "double-well-projected".
inline PeriodicFn make_scalar_fn(const std::string& spec, double amplitude, int frequency) {
    if (spec == "zero") return zero_fn();
    if (spec == "cosine") return cosine_fn(amplitude, frequency);
    if (spec == "double-well-projected") return double_well_fn(amplitude);
    throw ModelError("unknown scalar function spec: " + spec);
}

inline std::pair<PeriodicFn, PeriodicFn> build_mean_reduction_scalars(
    const std::string& f_spec, double f_amp, int f_freq, const std::string& g_spec, double g_amp,
    int g_freq) {
    return {make_scalar_fn(f_spec, f_amp, f_freq), make_scalar_fn(g_spec, g_amp, g_freq)};
}

// Quadratic family H(x,p) = c(x) p^2 / 2, L(x,a) = a^2 / (2 c(x)) with
// c(x) = kappa_h (1 + c_amp cos(2 pi x)). Legendre duality is exact and
// D_ppH = c(x) >= kappa_h (1 - |c_amp|) > 0.
struct HamiltonianModel {
    double kappa_h = 1.0;
    double c_amp = 0.0;

    HamiltonianModel() = default;
    HamiltonianModel(double kappa, double amp) : kappa_h(kappa), c_amp(amp) {
        if (!(kappa_h > 0.0)) throw ModelError("HamiltonianModel: kappa_h must be positive");
        if (!(std::fabs(c_amp) < 1.0)) throw ModelError("HamiltonianModel: |c_amp| must be < 1");
    }

    double coef(double x) const { return kappa_h * (1.0 + c_amp * std::cos(kTwoPi * x)); }
    double coef_dx(double x) const { return -kappa_h * c_amp * kTwoPi * std::sin(kTwoPi * x); }

    double H(double x, double p) const { return 0.5 * coef(x) * p * p; }
    double L(double x, double a) const { return a * a / (2.0 * coef(x)); }
    double dpH(double x, double p) const { return coef(x) * p; }
    double dppH(double x, double) const { return coef(x); }
    double dxH(double x, double p) const { return 0.5 * coef_dx(x) * p * p; }
};

// max over the lattice of |H(x,p) - sup_a {-a p - L(x,a)}|, the inner sup by
// dense scan plus golden-section refinement.
inline double legendre_residual(const HamiltonianModel& model,
                                const std::vector<std::array<double, 3>>& lattice,
                                double scan_halfwidth = 10.0, double scan_step = 1e-4) {
    if (lattice.empty()) throw ModelError("legendre_residual: empty lattice");
    double worst = 0.0;
    for (const auto& [x, p, a_seed] : lattice) {
        const double A = std::max(scan_halfwidth, 2.0 * std::fabs(a_seed));
        auto obj = [&](double a) { return -a * p - model.L(x, a); };
        double best_a = -A, best = obj(-A);
        const int steps = static_cast<int>(2.0 * A / scan_step);
        for (int i = 1; i <= steps; ++i) {
            const double a = -A + i * scan_step;
            const double v = obj(a);
            if (v > best) {
                best = v;
                best_a = a;
            }
        }
        // golden-section polish around the best scan cell
        double lo = best_a - scan_step, hi = best_a + scan_step;
        const double gr = 0.6180339887498949;
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        for (int it = 0; it < 60; ++it) {
            if (obj(c) > obj(d)) hi = d; else lo = c;
            c = hi - gr * (hi - lo);
            d = lo + gr * (hi - lo);
        }
        best = std::max(best, obj(0.5 * (lo + hi)));
        const double h_val = model.H(x, p);
        if (!std::isfinite(h_val) || !std::isfinite(best))
            throw ModelError("legendre_residual: non-finite evaluator output");
        worst = std::max(worst, std::fabs(h_val - best));
    }
    return worst;
}

// H(x,p) - D_pH(x,q).p + L(x,-D_pH(x,q)) - (1/C)|D_pH(x,p)-D_pH(x,q)|^2;
// nonnegative for admissible C by strict convexity of L.
inline double convexity_gap(const HamiltonianModel& model, double x, double p, double q,
                            double C) {
    if (!(C > 0.0)) throw ModelError("convexity_gap: C must be positive");
    const double dq = model.dpH(x, q);
    const double dp = model.dpH(x, p);
    return model.H(x, p) - dq * p + model.L(x, -dq) - (dp - dq) * (dp - dq) / C;
}

// Functional of measures with value, normalized linear derivative, second
// derivative, and the linearization used by the coupled linear systems.
class MeanFieldFunctional {
  public:
    virtual ~MeanFieldFunctional() = default;
    virtual std::string name() const = 0;

    virtual double value(const DensityField& m) const = 0;

    // delta F / delta m (m, x), normalized so h * sum_x (.) m(x) = 0.
    virtual ScalarField linear_derivative(const DensityField& m) const = 0;

    // Linearization of x -> deltaF/deltam(m, x) against a zero-mass signed
    // field rho; drives the z-equation of the linearized systems.
    virtual ScalarField apply_linearization(const DensityField& m,
                                            const SignedField& rho) const = 0;

    // Doubly-normalized symmetric second derivative sampled on grid x grid,
    // row-major [i * n_x + j] for (x_i, y_j).
    virtual std::vector<double> second_derivative_matrix(const DensityField& m) const = 0;

    // Value on an empirical measure (positions on the torus).
    virtual double value_at_empirical(const std::vector<double>& positions) const = 0;
};

using FunctionalPtr = std::shared_ptr<const MeanFieldFunctional>;

class ZeroFunctional final : public MeanFieldFunctional {
  public:
    std::string name() const override { return "zero"; }
    double value(const DensityField&) const override { return 0.0; }
    ScalarField linear_derivative(const DensityField& m) const override {
        return ScalarField(m.grid);
    }
    ScalarField apply_linearization(const DensityField& m, const SignedField&) const override {
        return ScalarField(m.grid);
    }
    std::vector<double> second_derivative_matrix(const DensityField& m) const override {
        return std::vector<double>(static_cast<std::size_t>(m.size()) * m.size(), 0.0);
    }
    double value_at_empirical(const std::vector<double>&) const override { return 0.0; }
};

// F(m) = 1/2 iint phi(x - y) m(dx) m(dy) with phi(x) = -kappa cos(2 pi k x).
// kappa > 0 is an attractive interaction; the experiments' bifurcation knob.
class ConvolutionFunctional final : public MeanFieldFunctional {
  public:
    ConvolutionFunctional(double kappa, int frequency) : kappa_(kappa), freq_(frequency) {
        if (frequency < 1) throw ModelError("convolution functional: frequency must be >= 1");
    }

    std::string name() const override { return "convolution"; }
    double kappa() const { return kappa_; }
    int frequency() const { return freq_; }

    double value(const DensityField& m) const override {
        const auto [c, s] = modes(m.grid, m.v);
        return -0.5 * kappa_ * (c * c + s * s);
    }

    // (phi * m)(x) - iint phi dm dm
    ScalarField linear_derivative(const DensityField& m) const override {
        const auto [c, s] = modes(m.grid, m.v);
        ScalarField out(m.grid);
        const double mean_term = -kappa_ * (c * c + s * s);
        for (int j = 0; j < m.size(); ++j) {
            const double x = m.grid.x(j);
            out.v[j] = -kappa_ * (c * std::cos(kTwoPi * freq_ * x) + s * std::sin(kTwoPi * freq_ * x)) -
                       mean_term;
        }
        return out;
    }

    // (phi * rho)(x) - 2 <phi * m, rho> for zero-mass rho
    ScalarField apply_linearization(const DensityField& m, const SignedField& rho) const override {
        const auto [cm, sm] = modes(m.grid, m.v);
        const auto [cr, sr] = modes(rho.grid, rho.v);
        ScalarField out(m.grid);
        const double cross = -kappa_ * (cm * cr + sm * sr);  // <phi*m, rho>
        for (int j = 0; j < m.size(); ++j) {
            const double x = m.grid.x(j);
            out.v[j] = -kappa_ * (cr * std::cos(kTwoPi * freq_ * x) + sr * std::sin(kTwoPi * freq_ * x)) -
                       2.0 * cross;
        }
        return out;
    }

    // phi(x-y) - (phi*m)(x) - (phi*m)(y) + iint phi dm dm
    std::vector<double> second_derivative_matrix(const DensityField& m) const override {
        const int n = m.size();
        const auto [c, s] = modes(m.grid, m.v);
        std::vector<double> conv(n);
        for (int j = 0; j < n; ++j) {
            const double x = m.grid.x(j);
            conv[j] = -kappa_ * (c * std::cos(kTwoPi * freq_ * x) + s * std::sin(kTwoPi * freq_ * x));
        }
        const double quad = -kappa_ * (c * c + s * s);
        std::vector<double> out(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double d = m.grid.x(i) - m.grid.x(j);
                out[static_cast<std::size_t>(i) * n + j] =
                    -kappa_ * std::cos(kTwoPi * freq_ * d) - conv[i] - conv[j] + quad;
            }
        return out;
    }

    double value_at_empirical(const std::vector<double>& positions) const override {
        double c = 0.0, s = 0.0;
        for (double x : positions) {
            c += std::cos(kTwoPi * freq_ * x);
            s += std::sin(kTwoPi * freq_ * x);
        }
        const double n = static_cast<double>(positions.size());
        c /= n;
        s /= n;
        return -0.5 * kappa_ * (c * c + s * s);
    }

  private:
    template <class Vec>
    std::pair<double, double> modes(const TorusGrid& g, const Vec& vals) const {
        double c = 0.0, s = 0.0;
        for (int j = 0; j < g.n_x; ++j) {
            const double x = g.x(j);
            c += std::cos(kTwoPi * freq_ * x) * vals[j];
            s += std::sin(kTwoPi * freq_ * x) * vals[j];
        }
        return {c * g.h, s * g.h};
    }

    double kappa_;
    int freq_;
};

// G(m) = int g0 dm for a fixed smooth g0; the "fixed terminal" family.
class LinearFunctional final : public MeanFieldFunctional {
  public:
    explicit LinearFunctional(PeriodicFn g0) : g0_(g0) {}

    std::string name() const override { return "linear"; }
    const PeriodicFn& fn() const { return g0_; }

    double value(const DensityField& m) const override {
        double s = 0.0;
        for (int j = 0; j < m.size(); ++j) s += g0_(m.grid.x(j)) * m.v[j];
        return s * m.grid.h;
    }

    ScalarField linear_derivative(const DensityField& m) const override {
        const double mean = value(m);
        ScalarField out(m.grid);
        for (int j = 0; j < m.size(); ++j) out.v[j] = g0_(m.grid.x(j)) - mean;
        return out;
    }

    ScalarField apply_linearization(const DensityField& m, const SignedField& rho) const override {
        double s = 0.0;
        for (int j = 0; j < rho.size(); ++j) s += g0_(rho.grid.x(j)) * rho.v[j];
        ScalarField out(m.grid);
        for (int j = 0; j < m.size(); ++j) out.v[j] = -s * rho.grid.h;
        return out;
    }

    std::vector<double> second_derivative_matrix(const DensityField& m) const override {
        return std::vector<double>(static_cast<std::size_t>(m.size()) * m.size(), 0.0);
    }

    double value_at_empirical(const std::vector<double>& positions) const override {
        double s = 0.0;
        for (double x : positions) s += g0_(x);
        return s / static_cast<double>(positions.size());
    }

  private:
    PeriodicFn g0_;
};

inline FunctionalPtr build_zero_functional() { return std::make_shared<ZeroFunctional>(); }

inline FunctionalPtr build_convolution_functional(double kappa, int frequency) {
    return std::make_shared<ConvolutionFunctional>(kappa, frequency);
}

inline FunctionalPtr build_linear_functional(PeriodicFn g0) {
    return std::make_shared<LinearFunctional>(g0);
}

// Lattice checks of the standing assumptions on a built-in model: exact
// Legendre duality and uniform convexity of H in p.
inline void validate_model(const HamiltonianModel& model, double tol = 1e-8) {
    std::vector<std::array<double, 3>> lattice;
    for (double x : {0.0, 0.21, 0.5, 0.83})
        for (double p : {-2.0, -0.5, 0.0, 0.7, 2.0}) lattice.push_back({x, p, 0.0});
    if (legendre_residual(model, lattice) > tol)
        throw ModelError("model fails Legendre duality check");
    for (const auto& [x, p, a] : lattice)
        if (!(model.dppH(x, p) > 0.0)) throw ModelError("model fails convexity check");
}

}  // namespace mfclab
