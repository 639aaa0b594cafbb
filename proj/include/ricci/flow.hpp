#pragma once

#include "ricci/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ricci::flow {

enum class FlowMode { normalized, unnormalized };

struct FlowConfig {
    FlowMode mode = FlowMode::normalized;
    double dt = 1.0;              // cap on the step; the stability policy may shrink it
    double t_end = 5.0;           // stop time
    int record_every = 100;       // diagnostics cadence in steps
    double regrid_trigger = 0.1;  // on max_i |log(phi_i / A)|
    double convergence_tol = 1e-2;
    double area_floor = 0.02;     // unnormalized mode: extinction threshold

    void validate() const;
};

struct FlowState {
    geometry::WarpedMetric metric;
    double t = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double area = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    std::optional<double> ratio;   // K_max / K_min, defined only for K_min > 0
    double gb_defect = 0.0;
    std::optional<double> entropy; // undefined when min R <= 0
    double r_bar = 0.0;
};

enum class RunOutcome { converged, reached_t_end, extinct };

struct RunResult {
    FlowState state;
    std::vector<DiagnosticsRecord> records;
    RunOutcome outcome = RunOutcome::reached_t_end;
    int steps = 0;
    int regrids = 0;
};

/// Average scalar curvature (Int R dA) / Area with R = 2K. By Gauss-Bonnet
/// this equals 8*pi/Area up to discretization; the discrepancy is what the
/// gb_defect diagnostic records.
double mean_scalar_curvature(const geometry::WarpedMetric& m);

/// Largest step the explicit scheme accepts:
/// 0.2 * (min arclength spacing)^2 * min(1, 1/max|K|).
double stable_dt(const geometry::WarpedMetric& m);

/// One explicit 4-stage 4th-order step of d(phi)/dt = (rbar - R)/2 * phi,
/// d(h)/dt = (rbar - R)/2 * h (rbar dropped in unnormalized mode). Curvature
/// is recomputed at each stage; poles keep h = 0. Throws StepError when dt
/// violates the stability policy or when the state degenerates.
FlowState step(const FlowState& state, double dt, FlowMode mode);

/// Full diagnostics of a metric at time t.
DiagnosticsRecord diagnostics(const geometry::WarpedMetric& m, double t);

/// Convergence test on a record: K_min > 0, K_max/K_min - 1 < tol, and
/// |gb_defect| < 10*tol.
bool converged(const DiagnosticsRecord& record, double tol);

/// Entropy N = Int R log R dA; empty when min R <= 0 (domain restriction,
/// not an error).
std::optional<double> entropy(const geometry::WarpedMetric& m);

/// Evolve until t_end, convergence (normalized mode, checked at the record
/// cadence), or -- in unnormalized mode -- extinction (area below the
/// configured floor; a distinguished outcome, not a failure). The ratio test
/// is meaningless for the unnormalized flow, which keeps shrinking through
/// ratio 1, so only t_end and extinction stop it. Records always include the
/// first and last state. on_record, when set, fires for every recorded state.
RunResult run(const geometry::WarpedMetric& m0, const FlowConfig& config,
              const std::function<void(const FlowState&, const DiagnosticsRecord&)>& on_record = {});

/// Diagnostics CSV: header t,area,k_min,k_max,ratio,gb_defect,entropy,r_bar;
/// optional fields empty when undefined.
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& os);
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);

} // namespace ricci::flow
