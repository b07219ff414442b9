#pragma once

#include <vector>

#include "mfclab/error.hpp"

namespace mfclab {

// LU-factored periodic (cyclic) tridiagonal system. The corner entries
// (0,n-1) and (n-1,0) are folded in by Sherman-Morrison, so one setup
// serves many right-hand sides (the implicit PDE steps reuse it).
class PeriodicTridiag {
  public:
    PeriodicTridiag() = default;

    // lower[i] multiplies x[i-1] (lower[0] is the (0,n-1) corner),
    // upper[i] multiplies x[i+1] (upper[n-1] is the (n-1,0) corner).
    PeriodicTridiag(const std::vector<double>& lower, const std::vector<double>& diag,
                    const std::vector<double>& upper) {
        setup(lower, diag, upper);
    }

    void setup(const std::vector<double>& lower, const std::vector<double>& diag,
               const std::vector<double>& upper) {
        n_ = static_cast<int>(diag.size());
        if (n_ < 3) throw Error("PeriodicTridiag: need n >= 3");
        lower_ = lower;
        upper_ = upper;
        beta_ = lower[0];                  // (0, n-1) corner
        const double alpha = upper[n_ - 1];  // (n-1, 0) corner
        gamma_ = -diag[0];

        bfac_.assign(n_, 0.0);
        mfac_.assign(n_, 0.0);
        std::vector<double> b(diag);
        b[0] -= gamma_;
        b[n_ - 1] -= alpha * beta_ / gamma_;

        bfac_[0] = b[0];
        for (int i = 1; i < n_; ++i) {
            mfac_[i] = lower_[i] / bfac_[i - 1];
            bfac_[i] = b[i] - mfac_[i] * upper_[i - 1];
            if (bfac_[i] == 0.0) throw Error("PeriodicTridiag: singular pivot");
        }

        std::vector<double> u(n_, 0.0);
        u[0] = gamma_;
        u[n_ - 1] = alpha;
        z_ = u;
        solve_plain(z_);
        denom_ = 1.0 + z_[0] + beta_ * z_[n_ - 1] / gamma_;
        if (denom_ == 0.0) throw Error("PeriodicTridiag: singular correction");
    }

    // Solve in place.
    void solve(std::vector<double>& d) const {
        solve_plain(d);
        const double fact = (d[0] + beta_ * d[n_ - 1] / gamma_) / denom_;
        for (int i = 0; i < n_; ++i) d[i] -= fact * z_[i];
    }

    int size() const { return n_; }

  private:
    void solve_plain(std::vector<double>& d) const {
        for (int i = 1; i < n_; ++i) d[i] -= mfac_[i] * d[i - 1];
        d[n_ - 1] /= bfac_[n_ - 1];
        for (int i = n_ - 2; i >= 0; --i) d[i] = (d[i] - upper_[i] * d[i + 1]) / bfac_[i];
    }

    int n_ = 0;
    std::vector<double> lower_, upper_, bfac_, mfac_, z_;
    double beta_ = 0.0, gamma_ = 0.0, denom_ = 0.0;
};

}  // namespace mfclab
