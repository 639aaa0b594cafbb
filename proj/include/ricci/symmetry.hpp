#pragma once

#include "ricci/geometry.hpp"
#include "ricci/soliton.hpp"

#include <vector>

namespace ricci::symmetry {

/// Coefficient of a rotational vector field X = psi(r) * d/dtheta, sampled on
/// the metric's grid.
struct AngularField {
    std::vector<double> psi;
};

struct FitResult {
    double a_fit = 0.0;
    double fit_residual = 0.0; // sup |f_r - a_fit * h| over the fit window
};

/// sup |h^2 psi_r| over the interior window (nodes with h > 1e-3 * max h):
/// the only nonzero component of L_X g for X = psi(r) d/dtheta. Vanishes iff
/// X is Killing.
double killing_residual(const geometry::WarpedMetric& m, const AngularField& field);

/// Killing residual of the rotated gradient field: psi = f_r / h, with pole
/// entries regularized to f_rr / h_r. Requires f_r to vanish at the poles
/// (throws PoleRegularizationError otherwise).
double killing_residual_of_potential(const geometry::WarpedMetric& m,
                                     const soliton::PotentialProfile& f);

/// sup |f_rr - h_r f_r / h| over the interior window; the gradient of f is
/// conformal iff this vanishes. Pole entries are included (both sides tend
/// to f_rr) only when f_r vanishes there; otherwise poles are skipped.
double conformal_residual(const geometry::WarpedMetric& m,
                          const soliton::PotentialProfile& f);

/// Least-squares constant a minimizing sum (f_r - a h)^2 over interior
/// nodes; throws on a degenerate fit (sum h^2 below floor).
FitResult extract_a(const geometry::WarpedMetric& m, const soliton::PotentialProfile& f);

} // namespace ricci::symmetry
