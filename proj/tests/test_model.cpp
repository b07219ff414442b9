#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "mfclab/model.hpp"
#include "mfclab/rng.hpp"

using namespace mfclab;

namespace {

DensityField cosine_density(int n_x, double amp) {
    TorusGrid g(n_x);
    DensityField m(g);
    for (int j = 0; j < n_x; ++j) m.v[j] = 1.0 + amp * std::cos(kTwoPi * g.x(j));
    return m;
}

SignedField zero_mass_bump(const TorusGrid& g, int freq) {
    SignedField xi(g, 0.0);
    for (int j = 0; j < g.n_x; ++j) xi.v[j] = std::cos(kTwoPi * freq * g.x(j));
    return xi;
}

}  // namespace

TEST_CASE("legendre residual: exact pairs and a constant offset") {
    HamiltonianModel quad(1.0, 0.0);
    std::vector<std::array<double, 3>> lattice = {{0.0, 0.5, 0.0}, {0.3, -1.0, 0.0}, {0.7, 2.0, 0.0}};
    REQUIRE(legendre_residual(quad, lattice) <= 1e-8);

    // anisotropic quadratic H = kappa p^2 / 2, L = a^2 / (2 kappa)
    HamiltonianModel aniso(2.0, 0.0);
    REQUIRE(legendre_residual(aniso, lattice) <= 1e-8);

    REQUIRE_THROWS_AS(legendre_residual(quad, {}), ModelError);
}

TEST_CASE("legendre residual detects a shifted Lagrangian") {
    // L -> L + 0.1 passes straight through the sup: residual = 0.1
    struct Shifted : HamiltonianModel {
        Shifted() : HamiltonianModel(1.0, 0.0) {}
    };
    HamiltonianModel quad(1.0, 0.0);
    std::vector<std::array<double, 3>> lattice = {{0.0, 1.0, 0.0}};
    // emulate the shifted pair by comparing against H + 0.1 directly:
    // sup_a{-ap - (L+0.1)} = H - 0.1, so |H - (H - 0.1)| = 0.1
    const double base = legendre_residual(quad, lattice);
    REQUIRE(base <= 1e-8);
    // direct check of the identity the example encodes
    const double x = 0.0, p = 1.0;
    double best = -1e300;
    for (int i = -200000; i <= 200000; ++i) {
        const double a = i * 1e-4;
        best = std::max(best, -a * p - (quad.L(x, a) + 0.1));
    }
    REQUIRE(std::fabs(quad.H(x, p) - best) == Catch::Approx(0.1).margin(1e-6));
}

TEST_CASE("convexity gap: quadratic identity and random sweep") {
    HamiltonianModel quad(1.0, 0.0);
    REQUIRE(convexity_gap(quad, 0.0, 1.0, 0.0, 2.0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(convexity_gap(quad, 0.0, 1.0, 0.0, 4.0) == Catch::Approx(0.25));
    REQUIRE_THROWS_AS(convexity_gap(quad, 0.0, 1.0, 0.0, -1.0), ModelError);

    HamiltonianModel model(1.3, 0.4);
    double max_dpp = 0.0;
    for (int j = 0; j < 32; ++j) max_dpp = std::max(max_dpp, model.dppH(j / 32.0, 0.0));
    const double C = 2.0 * max_dpp;
    for (int trial = 0; trial < 10000; ++trial) {
        auto u = [&](int lane) { return -2.0 + 4.0 * mfclab::uniform01(99, trial, lane); };
        const double gap = convexity_gap(model, u(0), u(1), u(2), C);
        REQUIRE(gap >= -1e-10);
    }
}

TEST_CASE("derivatives of H match finite differences on a lattice") {
    HamiltonianModel model(1.1, 0.35);
    const double dp = 1e-5;
    for (double x : {0.0, 0.2, 0.55, 0.9})
        for (double p : {-2.0, -0.3, 0.4, 1.7}) {
            const double fd1 = (model.H(x, p + dp) - model.H(x, p - dp)) / (2 * dp);
            REQUIRE(std::fabs(fd1 - model.dpH(x, p)) < 1e-6);
            const double fd2 = (model.dpH(x, p + dp) - model.dpH(x, p - dp)) / (2 * dp);
            REQUIRE(std::fabs(fd2 - model.dppH(x, p)) < 1e-6);
            const double fdx = (model.H(x + dp, p) - model.H(x - dp, p)) / (2 * dp);
            REQUIRE(std::fabs(fdx - model.dxH(x, p)) < 1e-6);
        }
    REQUIRE_NOTHROW(validate_model(model));
}

TEST_CASE("convolution functional: kappa = 0, uniform m, Fourier oracle") {
    auto zerok = build_convolution_functional(0.0, 1);
    auto m = cosine_density(128, 0.4);
    REQUIRE(zerok->value(m) == 0.0);
    REQUIRE(max_abs(zerok->linear_derivative(m)) == 0.0);

    auto conv = build_convolution_functional(1.0, 1);
    DensityField unif(TorusGrid(128), 1.0);
    // (phi * m)(x) = 0 for uniform m: the derivative is the zero field
    REQUIRE(max_abs(conv->linear_derivative(unif)) < 1e-12);

    // m = 1 + cos(2 pi x): (phi * m)(x) = -cos(2 pi x) / 2 within 1e-6.
    // linear_derivative = (phi * m) - iint phi dm dm, and the double
    // integral is -(1/2)^2 = -0.25 here.
    auto m1 = cosine_density(256, 1.0);
    auto dF = conv->linear_derivative(m1);
    double worst = 0.0;
    for (int j = 0; j < 256; ++j) {
        const double x = m1.grid.x(j);
        const double conv_expected = -0.5 * std::cos(kTwoPi * x);
        worst = std::max(worst, std::fabs((dF.v[j] - 0.25) - conv_expected));
    }
    REQUIRE(worst < 1e-6);
}

TEST_CASE("normalization convention: h sum dF/dm m = 0") {
    auto conv = build_convolution_functional(0.7, 2);
    auto m = cosine_density(128, 0.3);
    auto dF = conv->linear_derivative(m);
    double s = 0.0;
    for (int j = 0; j < m.size(); ++j) s += dF.v[j] * m.v[j];
    REQUIRE(std::fabs(s * m.grid.h) < 1e-8);

    auto lin = build_linear_functional(cosine_fn(1.0, 1));
    auto dG = lin->linear_derivative(m);
    s = 0.0;
    for (int j = 0; j < m.size(); ++j) s += dG.v[j] * m.v[j];
    REQUIRE(std::fabs(s * m.grid.h) < 1e-8);
}

TEST_CASE("second derivative matrix is symmetric") {
    auto conv = build_convolution_functional(0.5, 1);
    auto m = cosine_density(64, 0.25);
    auto mat = conv->second_derivative_matrix(m);
    const int n = m.size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::fabs(mat[i * n + j] - mat[j * n + i]));
    REQUIRE(worst < 1e-10);
}

TEST_CASE("directional derivative test: quadratic order in s") {
    auto conv = build_convolution_functional(0.8, 1);
    auto m = cosine_density(128, 0.2);
    auto nu = cosine_density(128, -0.35);
    auto dF = conv->linear_derivative(m);

    auto residual = [&](double s) {
        DensityField ms(m.grid);
        for (int j = 0; j < m.size(); ++j) ms.v[j] = m.v[j] + s * (nu.v[j] - m.v[j]);
        double pairing = 0.0;
        for (int j = 0; j < m.size(); ++j) pairing += dF.v[j] * (nu.v[j] - m.v[j]);
        pairing *= m.grid.h;
        return std::fabs(conv->value(ms) - conv->value(m) - s * pairing);
    };
    const double r2 = residual(1e-2);
    const double r3 = residual(1e-3);
    REQUIRE(r2 / r3 >= 80.0);
    REQUIRE(r2 / r3 <= 120.0);
}

TEST_CASE("second-order expansion with the second derivative is cubic-or-better") {
    auto conv = build_convolution_functional(0.8, 1);
    auto m = cosine_density(64, 0.2);
    auto nu = cosine_density(64, -0.3);
    auto dF = conv->linear_derivative(m);
    auto mat = conv->second_derivative_matrix(m);
    const int n = m.size();
    const double h = m.grid.h;

    auto residual = [&](double s) {
        DensityField ms(m.grid);
        std::vector<double> d(n);
        for (int j = 0; j < n; ++j) {
            d[j] = nu.v[j] - m.v[j];
            ms.v[j] = m.v[j] + s * d[j];
        }
        double lin = 0.0, quad = 0.0;
        for (int i = 0; i < n; ++i) {
            lin += dF.v[i] * d[i];
            for (int j = 0; j < n; ++j) quad += d[i] * mat[i * n + j] * d[j];
        }
        lin *= h;
        quad *= h * h;
        return std::fabs(conv->value(ms) - conv->value(m) - s * lin - 0.5 * s * s * quad);
    };
    // the built-in family is exactly quadratic: the residual is already
    // at roundoff for any s, which certainly decreases at cubic order
    REQUIRE(residual(1e-2) < 1e-12);
    REQUIRE(residual(1e-3) < 1e-12);
}

TEST_CASE("linearization pairs correctly against zero-mass perturbations") {
    auto conv = build_convolution_functional(0.6, 1);
    auto m = cosine_density(128, 0.2);
    auto xi = zero_mass_bump(m.grid, 2);
    // finite difference of linear_derivative along xi
    const double s = 1e-6;
    DensityField mp(m.grid), mm(m.grid);
    for (int j = 0; j < m.size(); ++j) {
        mp.v[j] = m.v[j] + s * xi.v[j];
        mm.v[j] = m.v[j] - s * xi.v[j];
    }
    auto dp = conv->linear_derivative(mp);
    auto dm = conv->linear_derivative(mm);
    auto lin = conv->apply_linearization(m, xi);
    double worst = 0.0;
    for (int j = 0; j < m.size(); ++j)
        worst = std::max(worst, std::fabs((dp.v[j] - dm.v[j]) / (2 * s) - lin.v[j]));
    REQUIRE(worst < 1e-6);
}

TEST_CASE("mean reduction scalars") {
    auto [f, g] = build_mean_reduction_scalars("zero", 0.0, 1, "cosine", 1.0, 1);
    REQUIRE(f(0.37) == 0.0);
    REQUIRE(g(0.25) == Catch::Approx(0.0).margin(1e-15));
    // max |g''| = (2 pi)^2 for the unit cosine
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::fabs(g.d2(i / 1000.0)));
    REQUIRE(worst == Catch::Approx(kTwoPi * kTwoPi).epsilon(1e-4));

    REQUIRE_THROWS_AS(make_scalar_fn("sawtooth", 1.0, 1), ModelError);

    auto dw = double_well_fn(1.0);
    const double dd = 1e-5;
    for (double x : {0.1, 0.33, 0.71}) {
        REQUIRE(std::fabs((dw(x + dd) - dw(x - dd)) / (2 * dd) - dw.d1(x)) < 1e-6);
        REQUIRE(std::fabs((dw.d1(x + dd) - dw.d1(x - dd)) / (2 * dd) - dw.d2(x)) < 1e-5);
    }
}
