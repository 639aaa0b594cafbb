#pragma once

#include "ricci/geometry.hpp"

#include <vector>

namespace ricci::soliton {

/// One node of a shoot trajectory: radius, profile value, profile slope.
struct TrajectoryPoint {
    double r;
    double h;
    double hp;
};

/// Outcome of integrating h'' = -h (1 + a h') from h(0) = 0, h'(0) = 1 until
/// the profile returns to zero (or r_max is reached).
struct ShootResult {
    double a = 0.0;
    bool hit_zero = false;
    double A = 0.0;              // polished first zero (valid iff hit_zero)
    double h_prime_at_A = 0.0;   // slope at the zero (valid iff hit_zero)
    double closure_defect = 0.0; // |h'(A) + 1|   (valid iff hit_zero)
    double step = 0.0;
    std::vector<TrajectoryPoint> profile; // nodes up to the zero, zero appended
};

/// Both sides of the first integral of the shoot ODE over [0, A]:
/// -(h')^2/2 |_0^A = h^2/2 |_0^A + a * Int h (h')^2 dr.
struct IdentityReport {
    double lhs = 0.0;          // -(h'(A)^2 - h'(0)^2)/2
    double rhs_boundary = 0.0; // (h(A)^2 - h(0)^2)/2
    double I = 0.0;            // Int_0^A h (h')^2 dr
    double a = 0.0;
    double residual = 0.0;     // lhs - (rhs_boundary + a*I)
};

/// Soliton potential sampled on a metric's grid; f(0) = 0 gauge.
struct PotentialProfile {
    std::vector<double> f;
    std::vector<double> f_r;
};

struct SolveResult {
    double a_star = 0.0;
    ShootResult result;
    int evals = 0;
};

struct SolitonResiduals {
    std::vector<double> res_rr; // K - c - f_rr
    std::vector<double> res_tt; // K - c - h_r f_r / h (poles regularized)
};

constexpr double kDefaultShootStep = 1e-4;
double default_r_max(); // 4*pi

/// Integrate the shoot ODE with fixed-step RK4; detect the first interior
/// sign change of h and polish the zero on the dense (cubic Hermite) output
/// to ~1e-12 in r. Throws BlowupError if the state leaves the finite range.
ShootResult shoot(double a, double step = kDefaultShootStep, double r_max = -1.0);

/// Minimize closure_defect(a) over [a_lo, a_hi] (golden-section, probes
/// strictly inside the bracket). Throws if a probe fails to hit zero.
SolveResult solve_closure(double a_lo, double a_hi, double tol,
                          double step = kDefaultShootStep, double r_max = -1.0);

/// Evaluate the integral identity on a closed shoot trajectory.
IdentityReport identity_report(const ShootResult& result);

/// Reconstruction of the closure defect forced by the identity together with
/// h(0)=h(A)=0, h'(0)=1:   a >= 0: 1 - sqrt(max(0, 1-2aI));
///                         a <  0: sqrt(1+2|a|I) - 1.
double defect_from_identity(double a, double I);

/// f_r = a*h nodewise; f by cumulative quadrature in arclength with f(0)=0.
PotentialProfile potential_from_a(const geometry::WarpedMetric& m, double a);

/// Residuals of the two reduced soliton equations with constant c:
/// res_rr = K - c - f_rr, res_tt = K - c - h_r f_r / h. Pole entries use
/// f_rr in place of h_r f_r/h (valid when f_r vanishes there; otherwise
/// throws PoleRegularizationError).
SolitonResiduals soliton_residuals(const geometry::WarpedMetric& m,
                                   const PotentialProfile& f, double c = 1.0);

/// sup_i |K_i - Kbar| with Kbar the area-weighted mean curvature.
double einstein_defect(const geometry::WarpedMetric& m);

/// Sample a closed shoot trajectory onto an n-node metric in the arclength
/// gauge (phi = A).
geometry::WarpedMetric to_metric(const ShootResult& result, int n);

} // namespace ricci::soliton
