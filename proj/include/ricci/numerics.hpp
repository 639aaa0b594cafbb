#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ricci::num {

/// Compensated (Neumaier) accumulator. Stencil applications and quadratures
/// cancel heavily near the poles; plain summation there costs ~6 digits.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_dot(std::span<const double> w, std::span<const double> f);

/// Finite-difference weights for the m-th derivative at evaluation point z
/// from arbitrary nodes x (Fornberg's recurrence). Returns one weight per node.
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

/// Precomputed 4th-order derivative stencils for an n-node uniform grid:
/// centered in the interior, one-sided at the edges. Unit spacing; callers
/// divide by dx^d. Instances are immutable and safe to share across threads.
class DerivOps {
public:
    explicit DerivOps(int n);

    int n() const { return n_; }

    /// d-th derivative (d in 1..3) of f at node i, unit spacing.
    double deriv_at(std::span<const double> f, int d, int i) const;

    /// Full derivative array, unit spacing.
    void deriv(std::span<const double> f, int d, std::span<double> out) const;

    /// Shared per-n cache (stencil construction is not free; flows evaluate
    /// curvature millions of times).
    static std::shared_ptr<const DerivOps> get(int n);

private:
    struct Stencil {
        int lo;
        std::vector<double> w;
    };
    int n_;
    std::vector<Stencil> st_[3]; // index d-1
};

/// Fault-injection hook for the `verify --inject-fault stencil` test path:
/// perturbs one interior second-derivative weight. Not for production use.
namespace testing {
void inject_stencil_fault(bool on);
bool stencil_fault_active();
} // namespace testing

/// Composite Simpson on a uniform grid; n must be odd.
double simpson(std::span<const double> f, double dx);

/// Cumulative integral r[i] = Int_0^{x_i} f dx on a uniform grid, via a
/// 6-node local polynomial rule per interval (exact through degree 5).
/// Lower-order per-interval rules leave a boundary error-constant kink that
/// the pole stencils amplify after a regrid.
std::vector<double> cumulative_integral(std::span<const double> f, double dx);

/// Piecewise two-point Hermite resampling of (x, y) data at query points xq
/// (both strictly increasing). Matches y plus `nderiv` derivative estimates
/// per node (estimates from local fd_weights windows on the given abscissae).
/// nderiv = 3 keeps resampled second/third derivatives accurate enough for
/// curvature evaluation on the new grid.
std::vector<double> hermite_resample(std::span<const double> x,
                                     std::span<const double> y,
                                     std::span<const double> xq,
                                     int nderiv = 3);

/// Bracketed scalar minimization by golden-section search; returns the best
/// point evaluated. f must be unimodal on [lo, hi] for a guaranteed result.
struct MinimizeResult {
    double x;
    double fx;
    int evals;
};
MinimizeResult golden_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double xtol);

/// Shortest-faithful decimal formatting used by every data file: 17
/// significant digits, lowercase exponent, negative zero normalized.
std::string format_g17(double x);

/// sin(pi*t) evaluated symmetrically about t = 1/2 so both poles see the
/// same absolute accuracy.
double sin_pi(double t);

} // namespace ricci::num
