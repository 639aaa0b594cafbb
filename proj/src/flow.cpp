#include "ricci/flow.hpp"
#include "ricci/errors.hpp"
#include "ricci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

namespace ricci::flow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDtSafety = 0.2;

using geometry::WarpedMetric;

/// Reusable buffers for the 4-stage stepper; one per run.
struct Stepper {
    explicit Stepper(int n) : n_(n), ops_(num::DerivOps::get(n)) {
        for (auto* v : {&K_, &dphi_, &dh_, &phi_acc_, &h_acc_, &phi_st_, &h_st_, &scratch_})
            v->assign(n, 0.0);
    }

    // rbar = (Int 2K dA)/Area computed with the same quadrature as area().
    double rbar(const std::vector<double>& phi, const std::vector<double>& h,
                const std::vector<double>& K, double ds) {
        for (int i = 0; i < n_; ++i) scratch_[i] = phi[i] * h[i];
        const double denom = num::simpson(scratch_, ds);
        for (int i = 0; i < n_; ++i) scratch_[i] = K[i] * phi[i] * h[i];
        return 2.0 * num::simpson(scratch_, ds) / denom;
    }

    void rhs(const std::vector<double>& phi, const std::vector<double>& h, double ds,
             FlowMode mode, std::vector<double>& dphi, std::vector<double>& dh) {
        geometry::detail::curvature_core(*ops_, phi, h, ds, ws_, K_);
        const double rb = (mode == FlowMode::normalized) ? rbar(phi, h, K_, ds) : 0.0;
        for (int i = 0; i < n_; ++i) {
            const double fac = 0.5 * (rb - 2.0 * K_[i]);
            dphi[i] = fac * phi[i];
            dh[i] = fac * h[i];
        }
        dh[0] = 0.0;
        dh[n_ - 1] = 0.0;
    }

    /// Classic RK4 with curvature recomputed at every stage.
    void advance(std::vector<double>& phi, std::vector<double>& h, double ds,
                 double dt, FlowMode mode, double t) {
        try {
            rhs(phi, h, ds, mode, dphi_, dh_);
            phi_acc_ = dphi_;
            h_acc_ = dh_;
            stage(phi, h, dphi_, dh_, 0.5 * dt);
            rhs(phi_st_, h_st_, ds, mode, dphi_, dh_);
            accumulate(dphi_, dh_, 2.0);
            stage(phi, h, dphi_, dh_, 0.5 * dt);
            rhs(phi_st_, h_st_, ds, mode, dphi_, dh_);
            accumulate(dphi_, dh_, 2.0);
            stage(phi, h, dphi_, dh_, dt);
            rhs(phi_st_, h_st_, ds, mode, dphi_, dh_);
            accumulate(dphi_, dh_, 1.0);
        } catch (const NumericalError& e) {
            throw StepError(std::string("step rejected: ") + e.what(), t);
        }
        for (int i = 0; i < n_; ++i) {
            phi[i] += dt / 6.0 * phi_acc_[i];
            h[i] += dt / 6.0 * h_acc_[i];
        }
        h[0] = 0.0;
        h[n_ - 1] = 0.0;
        for (int i = 0; i < n_; ++i) {
            if (!(phi[i] > 0.0) || !std::isfinite(phi[i]) || !std::isfinite(h[i]) ||
                (i > 0 && i < n_ - 1 && !(h[i] > 0.0)))
                throw StepError("step rejected: state degenerated", t);
        }
    }

    const std::vector<double>& last_curvature() const { return K_; }

private:
    void accumulate(const std::vector<double>& dphi, const std::vector<double>& dh, double w) {
        for (int i = 0; i < n_; ++i) {
            phi_acc_[i] += w * dphi[i];
            h_acc_[i] += w * dh[i];
        }
    }
    void stage(const std::vector<double>& phi, const std::vector<double>& h,
               const std::vector<double>& dphi, const std::vector<double>& dh, double c) {
        for (int i = 0; i < n_; ++i) {
            phi_st_[i] = phi[i] + c * dphi[i];
            h_st_[i] = h[i] + c * dh[i];
        }
    }

    int n_;
    std::shared_ptr<const num::DerivOps> ops_;
    geometry::detail::CurvatureWorkspace ws_;
    std::vector<double> K_, dphi_, dh_, phi_acc_, h_acc_, phi_st_, h_st_, scratch_;
};

double policy_dt(const WarpedMetric& m, const std::vector<double>& K) {
    double phimin = m.phi[0];
    double kmax = 0.0;
    for (int i = 0; i < m.n(); ++i) {
        phimin = std::min(phimin, m.phi[i]);
        kmax = std::max(kmax, std::abs(K[i]));
    }
    const double dr = phimin * m.grid.ds;
    return kDtSafety * dr * dr * std::min(1.0, 1.0 / std::max(kmax, 1.0));
}

DiagnosticsRecord diagnostics_from(const WarpedMetric& m, const std::vector<double>& K, double t) {
    DiagnosticsRecord rec;
    rec.t = t;
    const int n = m.n();
    const double ds = m.grid.ds;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = m.phi[i] * m.h[i];
    rec.area = 2.0 * kPi * num::simpson(f, ds);
    rec.k_min = *std::min_element(K.begin(), K.end());
    rec.k_max = *std::max_element(K.begin(), K.end());
    if (rec.k_min > 0.0) rec.ratio = rec.k_max / rec.k_min;
    for (int i = 0; i < n; ++i) f[i] = K[i] * 2.0 * kPi * m.phi[i] * m.h[i];
    const double total_k = num::simpson(f, ds);
    rec.gb_defect = total_k - 4.0 * kPi;
    rec.r_bar = 2.0 * total_k / rec.area;
    if (2.0 * rec.k_min > 0.0) {
        for (int i = 0; i < n; ++i) {
            const double R = 2.0 * K[i];
            f[i] = R * std::log(R) * 2.0 * kPi * m.phi[i] * m.h[i];
        }
        rec.entropy = num::simpson(f, ds);
    }
    return rec;
}

} // namespace

void FlowConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("FlowConfig: dt must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("FlowConfig: t_end must be > 0");
    if (record_every < 1) throw std::invalid_argument("FlowConfig: record_every must be >= 1");
    if (!(regrid_trigger > 0.0)) throw std::invalid_argument("FlowConfig: regrid_trigger must be > 0");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("FlowConfig: convergence_tol must be > 0");
    if (!(area_floor > 0.0)) throw std::invalid_argument("FlowConfig: area_floor must be > 0");
}

double mean_scalar_curvature(const geometry::WarpedMetric& m) {
    const auto K = geometry::curvature(m);
    std::vector<double> f(m.n());
    for (int i = 0; i < m.n(); ++i) f[i] = K.K[i] * m.phi[i] * m.h[i];
    const double num_int = num::simpson(f, m.grid.ds);
    for (int i = 0; i < m.n(); ++i) f[i] = m.phi[i] * m.h[i];
    return 2.0 * num_int / num::simpson(f, m.grid.ds);
}

double stable_dt(const geometry::WarpedMetric& m) {
    const auto K = geometry::curvature(m);
    return policy_dt(m, K.K);
}

FlowState step(const FlowState& state, double dt, FlowMode mode) {
    state.metric.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const auto K = geometry::curvature(state.metric);
    const double cap = policy_dt(state.metric, K.K);
    if (dt > cap * (1.0 + 1e-12))
        throw StepError("step: dt violates the stability policy", state.t);
    FlowState out = state;
    Stepper st(state.metric.n());
    st.advance(out.metric.phi, out.metric.h, out.metric.grid.ds, dt, mode, state.t);
    out.t = state.t + dt;
    return out;
}

DiagnosticsRecord diagnostics(const geometry::WarpedMetric& m, double t) {
    const auto K = geometry::curvature(m);
    return diagnostics_from(m, K.K, t);
}

bool converged(const DiagnosticsRecord& record, double tol) {
    return record.k_min > 0.0 && (record.k_max / record.k_min - 1.0) < tol &&
           std::abs(record.gb_defect) < 10.0 * tol;
}

std::optional<double> entropy(const geometry::WarpedMetric& m) {
    const auto K = geometry::curvature(m);
    if (2.0 * K.min() <= 0.0) return std::nullopt;
    std::vector<double> f(m.n());
    for (int i = 0; i < m.n(); ++i) {
        const double R = 2.0 * K.K[i];
        f[i] = R * std::log(R) * 2.0 * kPi * m.phi[i] * m.h[i];
    }
    return num::simpson(f, m.grid.ds);
}

RunResult run(const geometry::WarpedMetric& m0, const FlowConfig& config,
              const std::function<void(const FlowState&, const DiagnosticsRecord&)>& on_record) {
    config.validate();
    m0.validate();

    RunResult result;
    result.state = FlowState{m0, 0.0};
    auto& state = result.state;
    const int n = m0.n();
    Stepper stepper(n);
    auto ops = num::DerivOps::get(n);
    geometry::detail::CurvatureWorkspace ws;
    std::vector<double> K(n), scratch(n);

    auto record_now = [&](const std::vector<double>& Kcur) {
        auto rec = diagnostics_from(state.metric, Kcur, state.t);
        if (result.records.empty() || state.t > result.records.back().t) {
            result.records.push_back(rec);
            if (on_record) on_record(state, rec);
        }
        return rec;
    };

    while (true) {
        geometry::detail::curvature_core(*ops, state.metric.phi, state.metric.h,
                                         state.metric.grid.ds, ws, K);
        const bool at_cadence = (result.steps % config.record_every) == 0;
        if (at_cadence) {
            const auto rec = record_now(K);
            // Constant curvature is a settled state only for the normalized
            // flow; the unnormalized flow keeps shrinking through ratio 1.
            if (config.mode == FlowMode::normalized && converged(rec, config.convergence_tol)) {
                result.outcome = RunOutcome::converged;
                return result;
            }
        }
        if (config.mode == FlowMode::unnormalized) {
            for (int i = 0; i < n; ++i) scratch[i] = state.metric.phi[i] * state.metric.h[i];
            const double a = 2.0 * kPi * num::simpson(scratch, state.metric.grid.ds);
            if (a < config.area_floor) {
                record_now(K);
                result.outcome = RunOutcome::extinct;
                return result;
            }
        }
        if (state.t >= config.t_end) break;

        const double dt =
            std::min({config.dt, policy_dt(state.metric, K), config.t_end - state.t});
        stepper.advance(state.metric.phi, state.metric.h, state.metric.grid.ds, dt,
                        config.mode, state.t);
        state.t += dt;
        ++result.steps;

        // Keep effective resolution uniform in arclength.
        for (int i = 0; i < n; ++i) scratch[i] = state.metric.phi[i];
        const double A = num::simpson(scratch, state.metric.grid.ds);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(std::log(state.metric.phi[i] / A)));
        if (worst > config.regrid_trigger) {
            state.metric = geometry::regrid(state.metric, n);
            ++result.regrids;
        }
    }

    geometry::detail::curvature_core(*ops, state.metric.phi, state.metric.h,
                                     state.metric.grid.ds, ws, K);
    const auto rec = record_now(K);
    result.outcome = (config.mode == FlowMode::normalized &&
                      converged(rec, config.convergence_tol))
                         ? RunOutcome::converged
                         : RunOutcome::reached_t_end;
    return result;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, std::ostream& os) {
    os << "t,area,k_min,k_max,ratio,gb_defect,entropy,r_bar\n";
    for (const auto& r : records) {
        os << num::format_g17(r.t) << ',' << num::format_g17(r.area) << ','
           << num::format_g17(r.k_min) << ',' << num::format_g17(r.k_max) << ',';
        if (r.ratio) os << num::format_g17(*r.ratio);
        os << ',' << num::format_g17(r.gb_defect) << ',';
        if (r.entropy) os << num::format_g17(*r.entropy);
        os << ',' << num::format_g17(r.r_bar) << '\n';
    }
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open for writing: " + path);
    write_diagnostics_csv(records, os);
    os.flush();
    if (!os) throw std::ios_base::failure("write failed: " + path);
}

} // namespace ricci::flow
