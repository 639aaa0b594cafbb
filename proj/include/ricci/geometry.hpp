#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace ricci::num {
class DerivOps;
}

namespace ricci::geometry {

/// Uniform coordinate grid on [0,1]. Node count is odd (composite Simpson)
/// and at least 9 (stencil support).
struct RadialGrid {
    int n = 0;
    double ds = 0.0;
    std::vector<double> s;

    static RadialGrid make(int n);
};

/// Rotationally symmetric metric phi(s)^2 ds^2 + h(s)^2 dtheta^2 on the
/// 2-sphere, sampled on a fixed grid. phi > 0 everywhere; h > 0 in the
/// interior and exactly 0 at the poles s = 0, 1.
struct WarpedMetric {
    RadialGrid grid;
    std::vector<double> phi;
    std::vector<double> h;

    int n() const { return grid.n; }
    /// Throws std::invalid_argument on any structural violation.
    void validate() const;
    /// Uniform scaling g -> lambda^2 g.
    WarpedMetric scaled(double lambda) const;
};

/// Gauss curvature at every node, 1/length^2. Pole entries come from the
/// regularized limit -h_rrr/h_r rather than -h_rr/h.
struct CurvatureField {
    std::vector<double> K;
    std::array<bool, 2> pole_regularized{true, true};

    double min() const;
    double max() const;
};

/// Deviations from the smooth-closure boundary conditions
/// h(0) = h(A) = 0, h_r(0) = -h_r(A) = 1.
struct BoundaryDefects {
    double h_at_0 = 0.0;
    double h_at_1 = 0.0;
    double slope_defect_0 = 0.0; // h_r(0) - 1
    double slope_defect_1 = 0.0; // h_r(1) + 1
    double max_abs() const;
};

enum class ProfileFamily { round, perturbed };

struct ProfileParams {
    ProfileFamily family = ProfileFamily::round;
    double eps = 0.0; // perturbed only; |eps| < 0.9
    int k = 1;        // perturbed only; k >= 1
};

/// Initial-data generator. round: phi = pi, h = sin(pi s).
/// perturbed: h = sin(pi s) * (1 + eps sin^{2k}(pi s)), phi = pi.
/// Rejects n even or < 9, |eps| >= 0.9, k < 1, and parameters that push the
/// interior h below 1e-3.
WarpedMetric make_profile(const ProfileParams& params, int n);

/// Arclength r(s_i) = Int_0^{s_i} phi ds. Strictly increasing; r.back() is
/// the total profile length A.
std::vector<double> arclength(const WarpedMetric& m);

/// Total profile length A = r(1).
double total_length(const WarpedMetric& m);

/// Gauss curvature K = -h_rr / h in the fixed gauge, 4th-order stencils;
/// pole values regularized. Throws on non-positive interior h and on
/// |h_r(pole)| < 1e-3 (pole regularization failure).
CurvatureField curvature(const WarpedMetric& m);

/// Total area 2*pi*Int phi h ds (composite Simpson).
double area(const WarpedMetric& m);

/// Gauss-Bonnet defect Int K dA - 4*pi.
double gauss_bonnet(const WarpedMetric& m);

/// Endpoint values and one-sided slope estimates in arclength.
BoundaryDefects boundary_defects(const WarpedMetric& m);

/// Resample onto a uniform n_new grid in the arclength gauge: phi = A
/// everywhere, h interpolated against arclength (two-point Hermite matching
/// value + three derivative estimates per node). Throws NonMonotoneError if
/// the arclength map is not strictly increasing.
WarpedMetric regrid(const WarpedMetric& m, int n_new);

/// Profile CSV: header `s,phi,h`, one row per node, 17 significant digits.
void write_profile_csv(const WarpedMetric& m, std::ostream& os);
void write_profile_csv(const WarpedMetric& m, const std::string& path);
WarpedMetric read_profile_csv(std::istream& is);
WarpedMetric read_profile_csv(const std::string& path);

namespace detail {

/// Allocation-free curvature kernel shared with the flow stepper. Buffers are
/// resized on first use; K is resized to n. Validates positivity of the
/// interior h (throws NumericalError) and the pole limits.
struct CurvatureWorkspace {
    std::vector<double> hs, hss, ps;
};

void curvature_core(const num::DerivOps& ops,
                    const std::vector<double>& phi, const std::vector<double>& h,
                    double ds, CurvatureWorkspace& ws, std::vector<double>& K);

} // namespace detail

} // namespace ricci::geometry
