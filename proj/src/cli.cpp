#include "ricci/cli.hpp"
#include "ricci/errors.hpp"
#include "ricci/flow.hpp"
#include "ricci/geometry.hpp"
#include "ricci/numerics.hpp"
#include "ricci/soliton.hpp"
#include "ricci/symmetry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace ricci::cli {

namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON emission

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

} // namespace

void JsonWriter::comma() {
    if (need_comma_) out_ += ",";
    out_ += '\n';
    need_comma_ = true;
}
void JsonWriter::indent() {
    for (int i = 0; i < depth_; ++i) out_ += "  ";
}
JsonWriter& JsonWriter::begin_object() {
    if (depth_ == 0) {
        out_ += "{";
    } else {
        comma();
        indent();
        out_ += "{";
    }
    ++depth_;
    need_comma_ = false;
    return *this;
}
JsonWriter& JsonWriter::begin_object_in_array() { return begin_object(); }
JsonWriter& JsonWriter::end_object() {
    out_ += '\n';
    --depth_;
    indent();
    out_ += "}";
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::begin_array(const std::string& key) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += ": [";
    ++depth_;
    need_comma_ = false;
    return *this;
}
JsonWriter& JsonWriter::end_array() {
    out_ += '\n';
    --depth_;
    indent();
    out_ += "]";
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, double v) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += ": " + num::format_g17(v);
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, int v) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += ": " + std::to_string(v);
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, bool v) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += v ? ": true" : ": false";
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += ": ";
    append_escaped(out_, v);
    return *this;
}
JsonWriter& JsonWriter::field_null(const std::string& key) {
    comma();
    indent();
    append_escaped(out_, key);
    out_ += ": null";
    return *this;
}
JsonWriter& JsonWriter::field_opt(const std::string& key, const std::optional<double>& v) {
    return v ? field(key, *v) : field_null(key);
}
std::string JsonWriter::str() const { return out_ + "\n"; }

namespace {

// ---------------------------------------------------------------------------
// config plumbing: optional JSON document, flags win

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw std::ios_base::failure("cannot open config: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    return j;
}

template <typename T>
void merge(const CLI::App& app, const json& cfg, const std::string& flag,
           const std::string& key, T& var) {
    if (app.count(flag) > 0) return; // explicit flag wins
    if (!cfg.contains(key)) return;
    try {
        var = cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config key '" + key + "' has the wrong type");
    }
}

geometry::ProfileParams parse_family(const std::string& family, double eps, int k) {
    geometry::ProfileParams p;
    if (family == "round") {
        p.family = geometry::ProfileFamily::round;
    } else if (family == "perturbed") {
        p.family = geometry::ProfileFamily::perturbed;
        p.eps = eps;
        p.k = k;
    } else {
        throw std::invalid_argument("family must be 'round' or 'perturbed'");
    }
    return p;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open for writing: " + path);
    os << text;
    os.flush();
    if (!os) throw std::ios_base::failure("write failed: " + path);
}

// ---------------------------------------------------------------------------
// subcommand payloads (throw on failure; mapped to exit codes in run_cli)

struct FlowArgs {
    std::string family = "round";
    double eps = 0.0;
    int k = 1;
    int n = 251;
    std::string mode = "normalized";
    flow::FlowConfig config;
    std::string out = "flow_diagnostics.csv";
    int snapshot_every = 0; // records between profile snapshots; 0 = off
    std::string snapshot_dir = ".";
};

int cmd_flow(const FlowArgs& a) {
    const auto params = parse_family(a.family, a.eps, a.k);
    flow::FlowConfig cfg = a.config;
    if (a.mode == "normalized")
        cfg.mode = flow::FlowMode::normalized;
    else if (a.mode == "unnormalized")
        cfg.mode = flow::FlowMode::unnormalized;
    else
        throw std::invalid_argument("mode must be 'normalized' or 'unnormalized'");
    cfg.validate();
    if (a.snapshot_every < 0) throw std::invalid_argument("snapshot-every must be >= 0");
    const auto m0 = geometry::make_profile(params, a.n);

    int record_index = 0;
    auto on_record = [&](const flow::FlowState& st, const flow::DiagnosticsRecord&) {
        if (a.snapshot_every > 0 && record_index % a.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_t%.9f.csv", st.t);
            const auto path = std::filesystem::path(a.snapshot_dir) / name;
            geometry::write_profile_csv(st.metric, path.string());
        }
        ++record_index;
    };

    flow::RunResult result;
    try {
        result = flow::run(m0, cfg, on_record);
    } catch (const StepError& e) {
        std::cerr << "flow: numerical failure at t = " << num::format_g17(e.t) << ": "
                  << e.what() << "\n";
        return kNumericalFailure;
    }
    flow::write_diagnostics_csv(result.records, a.out);
    std::cerr << "flow: " << result.steps << " steps, " << result.records.size()
              << " records, outcome = "
              << (result.outcome == flow::RunOutcome::converged      ? "converged"
                  : result.outcome == flow::RunOutcome::reached_t_end ? "t_end"
                                                                      : "extinct")
              << " at t = " << num::format_g17(result.state.t) << "\n";
    return result.outcome == flow::RunOutcome::extinct ? kExtinction : kOk;
}

struct SweepArgs {
    double a_min = -0.5;
    double a_max = 0.5;
    double a_step = 0.1;
    double step = soliton::kDefaultShootStep;
    double r_max = -1.0;
    std::string out = "soliton_sweep.csv";
};

std::vector<double> sweep_values(double a_min, double a_max, double a_step) {
    if (!(a_step > 0.0)) throw std::invalid_argument("a-step must be > 0");
    if (a_max < a_min) throw std::invalid_argument("a-max must be >= a-min");
    std::vector<double> as;
    const int count = static_cast<int>(std::floor((a_max - a_min) / a_step + 0.5)) + 1;
    for (int i = 0; i < count; ++i) {
        double a = a_min + i * a_step;
        if (std::abs(a) < 1e-12 * a_step) a = 0.0;
        as.push_back(a);
    }
    return as;
}

int cmd_soliton_sweep(const SweepArgs& a) {
    const auto as = sweep_values(a.a_min, a.a_max, a.a_step);
    std::ostringstream os;
    os << "a,A,h_prime_at_A,closure_defect,I,identity_residual\n";
    for (double av : as) {
        os << num::format_g17(av) << ',';
        try {
            const auto res = soliton::shoot(av, a.step, a.r_max);
            if (res.hit_zero) {
                const auto rep = soliton::identity_report(res);
                os << num::format_g17(res.A) << ',' << num::format_g17(res.h_prime_at_A) << ','
                   << num::format_g17(res.closure_defect) << ',' << num::format_g17(rep.I) << ','
                   << num::format_g17(rep.residual);
            } else {
                os << ",,,,"; // no zero before r_max
            }
        } catch (const BlowupError&) {
            os << ",,,,"; // blowup recorded as a non-closing row
        }
        os << '\n';
    }
    write_text_file(a.out, os.str());
    return kOk;
}

struct SolveArgs {
    double a_lo = -1.0;
    double a_hi = 1.0;
    double tol = 1e-8;
    double a_tolerance = 1e-6;
    double step = soliton::kDefaultShootStep;
    double r_max = -1.0;
    int n = 1001;
    std::string out;            // optional JSON file
    std::string profile_out;    // optional closed-profile CSV
    std::string trajectory_out; // optional trajectory CSV (r,phi,h with phi = 1)
};

int cmd_solve(const SolveArgs& a) {
    if (!(a.a_lo < a.a_hi)) throw std::invalid_argument("requires a-lo < a-hi");
    if (!(a.tol > 0.0) || !(a.a_tolerance > 0.0))
        throw std::invalid_argument("tolerances must be > 0");
    const auto solved = soliton::solve_closure(a.a_lo, a.a_hi, a.tol, a.step, a.r_max);
    const auto rep = soliton::identity_report(solved.result);
    const auto closed = soliton::to_metric(solved.result, a.n);
    const double edefect = soliton::einstein_defect(closed);
    const bool within = std::abs(solved.a_star) < a.a_tolerance;

    JsonWriter w;
    w.begin_object()
        .field("a_star", solved.a_star)
        .field("closure_defect", solved.result.closure_defect)
        .field("A", solved.result.A)
        .field("h_prime_at_A", solved.result.h_prime_at_A)
        .field("I", rep.I)
        .field("identity_residual", rep.residual)
        .field("einstein_defect", edefect)
        .field("bracket_lo", a.a_lo)
        .field("bracket_hi", a.a_hi)
        .field("tol", a.tol)
        .field("a_tolerance", a.a_tolerance)
        .field("shoot_evals", solved.evals)
        .field("within_tolerance", within)
        .end_object();
    std::cout << w.str();
    if (!a.out.empty()) write_text_file(a.out, w.str());
    if (!a.profile_out.empty()) geometry::write_profile_csv(closed, a.profile_out);
    if (!a.trajectory_out.empty()) {
        std::ostringstream os;
        os << "r,phi,h\n";
        for (const auto& p : solved.result.profile)
            os << num::format_g17(p.r) << ",1," << num::format_g17(p.h) << '\n';
        write_text_file(a.trajectory_out, os.str());
    }
    return within ? kOk : kNonzeroSoliton;
}

struct IdentityArgs {
    double a_min = -0.5;
    double a_max = 0.5;
    double a_step = 0.1;
    double step = 0.05;
    double r_max = -1.0;
    std::string out = "identity_check.csv";
};

int cmd_identity_check(const IdentityArgs& a) {
    if (!(a.step > 0.0)) throw std::invalid_argument("step must be > 0");
    const auto as = sweep_values(a.a_min, a.a_max, a.a_step);
    std::ostringstream os;
    os << "a,step,A,I,residual\n";
    for (double av : as) {
        for (double st : {a.step, a.step / 2.0}) {
            const auto res = soliton::shoot(av, st, a.r_max);
            if (!res.hit_zero)
                throw NumericalError("identity-check: a = " + std::to_string(av) +
                                     " did not close before r_max");
            const auto rep = soliton::identity_report(res);
            os << num::format_g17(av) << ',' << num::format_g17(st) << ','
               << num::format_g17(res.A) << ',' << num::format_g17(rep.I) << ','
               << num::format_g17(rep.residual) << '\n';
        }
    }
    write_text_file(a.out, os.str());
    return kOk;
}

int cmd_diagnose(const std::string& path) {
    const auto m = geometry::read_profile_csv(path);
    const auto rec = flow::diagnostics(m, 0.0);
    const auto bd = geometry::boundary_defects(m);
    JsonWriter w;
    w.begin_object()
        .field("n", m.n())
        .field("area", rec.area)
        .field("total_length", geometry::total_length(m))
        .field("k_min", rec.k_min)
        .field("k_max", rec.k_max)
        .field_opt("ratio", rec.ratio)
        .field("gb_defect", rec.gb_defect)
        .field_opt("entropy", rec.entropy)
        .field("r_bar", rec.r_bar)
        .field("h_at_0", bd.h_at_0)
        .field("h_at_1", bd.h_at_1)
        .field("slope_defect_0", bd.slope_defect_0)
        .field("slope_defect_1", bd.slope_defect_1)
        .field("einstein_defect", soliton::einstein_defect(m))
        .end_object();
    std::cout << w.str();
    return kOk;
}

} // namespace

// ---------------------------------------------------------------------------
// verify suite

std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opts) {
    if (opts.n < 9 || opts.n % 2 == 0)
        throw std::invalid_argument("verify: n must be odd and >= 9");
    if (!(opts.tol_scale >= 1.0))
        throw std::invalid_argument("verify: tol-scale must be >= 1");
    if (opts.fixed_point_steps < 1)
        throw std::invalid_argument("verify: fixed-point-steps must be >= 1");
    const double s = opts.tol_scale;
    std::vector<VerifyCheck> checks;
    auto push = [&](const std::string& name, double measured, double threshold,
                    const std::string& detail = "") {
        checks.push_back({name, measured < threshold, measured, threshold, detail});
    };

    using geometry::ProfileFamily;
    using geometry::ProfileParams;

    // round fixture
    {
        const auto m = geometry::make_profile({ProfileFamily::round, 0.0, 1}, opts.n);
        const auto K = geometry::curvature(m);
        double supk = 0.0;
        for (double k : K.K) supk = std::max(supk, std::abs(k - 1.0));
        push("round_curvature_sup_error", supk, 1e-6 * s);
        const double geom = std::max({std::abs(geometry::area(m) - 4.0 * kPi),
                                      std::abs(geometry::total_length(m) - kPi),
                                      geometry::boundary_defects(m).max_abs()});
        push("round_fixture_geometry", geom, 1e-8 * s);
        const auto ent = flow::entropy(m);
        push("round_entropy", std::abs((ent ? *ent : 1e30) - 8.0 * kPi * std::log(2.0)),
             1e-4 * s);
    }

    // Gauss-Bonnet defects and empirical order
    {
        for (auto [name, eps] : {std::pair<const char*, double>{"gauss_bonnet_round", 0.0},
                                 {"gauss_bonnet_perturbed_plus", 0.3},
                                 {"gauss_bonnet_perturbed_minus", -0.3}}) {
            const ProfileParams p{eps == 0.0 ? ProfileFamily::round : ProfileFamily::perturbed,
                                  eps, 1};
            push(name, std::abs(geometry::gauss_bonnet(geometry::make_profile(p, opts.n))),
                 1e-5 * s);
        }
        double d[3];
        const int ns[3] = {251, 501, 1001};
        for (int i = 0; i < 3; ++i)
            d[i] = std::abs(geometry::gauss_bonnet(
                geometry::make_profile({ProfileFamily::perturbed, 0.2, 1}, ns[i])));
        const double order = std::log2(d[0] / d[2]) / 2.0;
        push("gauss_bonnet_order_deviation", std::abs(order - 4.0), 0.5,
             "least-squares order across n = 251, 501, 1001 on perturbed(0.2,1)");
    }

    // integral identity: sweep residuals and 4th-order decay
    {
        double worst = 0.0;
        for (double a : {-0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5}) {
            const auto rep = soliton::identity_report(soliton::shoot(a));
            worst = std::max(worst, std::abs(rep.residual));
        }
        push("identity_sweep_residual", worst, 1e-8 * s);
        const double r1 = std::abs(soliton::identity_report(soliton::shoot(0.3, 0.05)).residual);
        const double r2 = std::abs(soliton::identity_report(soliton::shoot(0.3, 0.025)).residual);
        push("identity_order_ratio_inverse", r2 / r1, 1.0 / 12.0,
             "halving the step must shrink the residual by at least 12x");
    }

    // closure uniqueness and non-closure reconstruction
    {
        const auto solved = soliton::solve_closure(-1.0, 1.0, 1e-8);
        push("closure_a_star", std::abs(solved.a_star), 1e-6 * s);
        push("closure_defect", solved.result.closure_defect, 1e-8 * s);
        double worst_match = 0.0, min_defect = 1e30, min_i = 1e30;
        for (double a : {-0.5, -0.3, -0.1, 0.1, 0.3, 0.5}) {
            const auto res = soliton::shoot(a);
            const auto rep = soliton::identity_report(res);
            worst_match = std::max(worst_match,
                                   std::abs(res.closure_defect -
                                            soliton::defect_from_identity(a, rep.I)));
            min_defect = std::min(min_defect, res.closure_defect);
            min_i = std::min(min_i, rep.I);
        }
        push("nonclosure_min_defect_inverse", 0.01 / min_defect, 1.0,
             "every nonzero a must leave a closure defect above 0.01");
        push("nonclosure_reconstruction", worst_match, 1e-6 * s);
        push("nonclosure_correction_positive", min_i > 0.0 ? 0.0 : 1.0, 0.5);

        // residual chain on the closed profile
        const auto closed = soliton::to_metric(solved.result, opts.n);
        const auto f = soliton::potential_from_a(closed, solved.a_star);
        push("chain_killing_residual",
             symmetry::killing_residual_of_potential(closed, f), 1e-8 * s);
        push("chain_conformal_residual", symmetry::conformal_residual(closed, f), 1e-6 * s);
        const auto res = soliton::soliton_residuals(closed, f, 1.0);
        double sup = 0.0;
        for (int i = 0; i < closed.n(); ++i)
            sup = std::max({sup, std::abs(res.res_rr[i]), std::abs(res.res_tt[i])});
        push("chain_soliton_residual", sup, 1e-5 * s);
        push("chain_einstein_defect", soliton::einstein_defect(closed), 1e-5 * s);
    }

    // flow: fixed point drift and convergence from a perturbed start
    {
        const int nf = std::min(opts.n, 251);
        const auto m = geometry::make_profile({ProfileFamily::round, 0.0, 1}, nf);
        flow::FlowState st{m, 0.0};
        for (int i = 0; i < opts.fixed_point_steps; ++i)
            st = flow::step(st, flow::stable_dt(st.metric), flow::FlowMode::normalized);
        double drift = 0.0;
        for (int i = 0; i < nf; ++i)
            drift = std::max(drift, std::abs(st.metric.h[i] - m.h[i]));
        push("fixed_point_drift", drift, 1e-6 * s,
             std::to_string(opts.fixed_point_steps) + " normalized steps from the round profile");
    }
    {
        const auto m0 = geometry::make_profile({ProfileFamily::perturbed, 0.3, 1}, 101);
        flow::FlowConfig cfg;
        cfg.mode = flow::FlowMode::normalized;
        cfg.t_end = 8.0;
        cfg.convergence_tol = 5e-3;
        cfg.record_every = 100;
        const auto rr = flow::run(m0, cfg);
        const auto& last = rr.records.back();
        push("flow_convergence_ratio",
             last.ratio ? (*last.ratio - 1.0) : 1e30, 1e-2 * s);
        push("flow_area_drift",
             std::abs(last.area - rr.records.front().area) / rr.records.front().area,
             1e-4 * s);
        const double lam2 = last.area / (4.0 * kPi);
        const auto K = geometry::curvature(rr.state.metric);
        double supk = 0.0;
        for (double k : K.K) supk = std::max(supk, std::abs(k * lam2 - 1.0));
        push("flow_limit_curvature", supk, 1e-2 * s,
             "sup |K - 1| after renormalizing the area to 4*pi");
    }

    return checks;
}

namespace {

std::string verify_report_json(const VerifyOptions& opts, const std::vector<VerifyCheck>& checks) {
    JsonWriter w;
    w.begin_object().field("n", opts.n).field("tol_scale", opts.tol_scale);
    bool all = true;
    w.begin_array("checks");
    for (const auto& c : checks) {
        all = all && c.pass;
        w.begin_object_in_array()
            .field("name", c.name)
            .field("pass", c.pass)
            .field("measured", c.measured)
            .field("threshold", c.threshold);
        if (!c.detail.empty()) w.field("detail", c.detail);
        w.end_object();
    }
    w.end_array().field("all_pass", all).end_object();
    return w.str();
}

int cmd_verify(const VerifyOptions& opts, const std::string& out) {
    const auto checks = run_verify_suite(opts);
    const auto text = verify_report_json(opts, checks);
    std::cout << text;
    if (!out.empty()) write_text_file(out, text);
    for (const auto& c : checks) {
        if (!c.pass) {
            std::cerr << "verify: FAILED invariant '" << c.name
                      << "' (measured " << num::format_g17(c.measured) << ", threshold "
                      << num::format_g17(c.threshold) << ")\n";
            return kNumericalFailure;
        }
    }
    return kOk;
}

} // namespace

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"ricci2d: rotationally symmetric Ricci flow laboratory on the 2-sphere"};
    app.require_subcommand(1);

    // flow
    FlowArgs fa;
    std::string fa_config, fa_mode = "normalized";
    auto* flow_cmd = app.add_subcommand("flow", "evolve a profile by Ricci flow");
    flow_cmd->add_option("--config", fa_config, "JSON config; explicit flags win");
    flow_cmd->add_option("--family", fa.family, "round | perturbed");
    flow_cmd->add_option("--eps", fa.eps, "perturbation amplitude (|eps| < 0.9)");
    flow_cmd->add_option("--k", fa.k, "perturbation harmonic (k >= 1)");
    flow_cmd->add_option("--n", fa.n, "grid nodes (odd, >= 9)");
    flow_cmd->add_option("--mode", fa_mode, "normalized | unnormalized");
    flow_cmd->add_option("--dt", fa.config.dt, "time-step cap");
    flow_cmd->add_option("--t-end", fa.config.t_end, "stop time");
    flow_cmd->add_option("--record-every", fa.config.record_every, "steps per record");
    flow_cmd->add_option("--regrid-trigger", fa.config.regrid_trigger, "gauge distortion trigger");
    flow_cmd->add_option("--conv-tol", fa.config.convergence_tol, "convergence tolerance on K_max/K_min - 1");
    flow_cmd->add_option("--area-floor", fa.config.area_floor, "extinction floor (unnormalized)");
    flow_cmd->add_option("--out", fa.out, "diagnostics CSV path");
    flow_cmd->add_option("--snapshot-every", fa.snapshot_every, "records between profile snapshots (0 = off)");
    flow_cmd->add_option("--snapshot-dir", fa.snapshot_dir, "snapshot directory");

    // soliton-sweep
    SweepArgs sa;
    std::string sa_config;
    auto* sweep_cmd = app.add_subcommand("soliton-sweep", "shoot the soliton equation across a range of a");
    sweep_cmd->add_option("--config", sa_config, "JSON config; explicit flags win");
    sweep_cmd->add_option("--a-min", sa.a_min, "sweep start");
    sweep_cmd->add_option("--a-max", sa.a_max, "sweep end");
    sweep_cmd->add_option("--a-step", sa.a_step, "sweep spacing");
    sweep_cmd->add_option("--step", sa.step, "integrator step");
    sweep_cmd->add_option("--r-max", sa.r_max, "integration range (default 4*pi)");
    sweep_cmd->add_option("--out", sa.out, "sweep CSV path");

    // solve
    SolveArgs va;
    std::string va_config;
    auto* solve_cmd = app.add_subcommand("solve", "find the a that closes the soliton profile");
    solve_cmd->add_option("--config", va_config, "JSON config; explicit flags win");
    solve_cmd->add_option("--a-lo", va.a_lo, "bracket start");
    solve_cmd->add_option("--a-hi", va.a_hi, "bracket end");
    solve_cmd->add_option("--tol", va.tol, "bracket width tolerance");
    solve_cmd->add_option("--a-tolerance", va.a_tolerance, "|a_star| beyond this exits 4");
    solve_cmd->add_option("--step", va.step, "integrator step");
    solve_cmd->add_option("--r-max", va.r_max, "integration range (default 4*pi)");
    solve_cmd->add_option("--n", va.n, "closed-profile sample nodes");
    solve_cmd->add_option("--out", va.out, "also write the JSON report here");
    solve_cmd->add_option("--profile-out", va.profile_out, "write the closed profile CSV here");
    solve_cmd->add_option("--trajectory-out", va.trajectory_out, "write the shoot trajectory CSV here");

    // identity-check
    IdentityArgs ia;
    std::string ia_config;
    auto* id_cmd = app.add_subcommand("identity-check", "evaluate the integral identity at two steps per a");
    id_cmd->add_option("--config", ia_config, "JSON config; explicit flags win");
    id_cmd->add_option("--a-min", ia.a_min, "sweep start");
    id_cmd->add_option("--a-max", ia.a_max, "sweep end");
    id_cmd->add_option("--a-step", ia.a_step, "sweep spacing");
    id_cmd->add_option("--step", ia.step, "base integrator step (also runs step/2)");
    id_cmd->add_option("--r-max", ia.r_max, "integration range (default 4*pi)");
    id_cmd->add_option("--out", ia.out, "CSV path");

    // verify
    VerifyOptions vo;
    std::string vo_config, vo_out, vo_fault;
    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite and report pass/fail");
    verify_cmd->add_option("--config", vo_config, "JSON config; explicit flags win");
    verify_cmd->add_option("--n", vo.n, "grid nodes for the fixture checks");
    verify_cmd->add_option("--tol-scale", vo.tol_scale, "multiply every threshold (coarse grids)");
    verify_cmd->add_option("--fixed-point-steps", vo.fixed_point_steps, "steps in the drift check");
    verify_cmd->add_option("--out", vo_out, "also write the JSON report here");
    verify_cmd->add_option("--inject-fault", vo_fault)->group(""); // test hook

    // diagnose
    std::string diag_path;
    auto* diag_cmd = app.add_subcommand("diagnose", "print diagnostics of a profile CSV as JSON");
    diag_cmd->add_option("profile", diag_path, "profile CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return kInvalidConfig;
    }

    try {
        if (app.got_subcommand(flow_cmd)) {
            const json cfg = load_config(fa_config);
            merge(*flow_cmd, cfg, "--family", "family", fa.family);
            merge(*flow_cmd, cfg, "--eps", "eps", fa.eps);
            merge(*flow_cmd, cfg, "--k", "k", fa.k);
            merge(*flow_cmd, cfg, "--n", "n", fa.n);
            merge(*flow_cmd, cfg, "--mode", "mode", fa_mode);
            merge(*flow_cmd, cfg, "--dt", "dt", fa.config.dt);
            merge(*flow_cmd, cfg, "--t-end", "t_end", fa.config.t_end);
            merge(*flow_cmd, cfg, "--record-every", "record_every", fa.config.record_every);
            merge(*flow_cmd, cfg, "--regrid-trigger", "regrid_trigger", fa.config.regrid_trigger);
            merge(*flow_cmd, cfg, "--conv-tol", "convergence_tol", fa.config.convergence_tol);
            merge(*flow_cmd, cfg, "--area-floor", "area_floor", fa.config.area_floor);
            merge(*flow_cmd, cfg, "--out", "out", fa.out);
            merge(*flow_cmd, cfg, "--snapshot-every", "snapshot_every", fa.snapshot_every);
            merge(*flow_cmd, cfg, "--snapshot-dir", "snapshot_dir", fa.snapshot_dir);
            fa.mode = fa_mode;
            return cmd_flow(fa);
        }
        if (app.got_subcommand(sweep_cmd)) {
            const json cfg = load_config(sa_config);
            merge(*sweep_cmd, cfg, "--a-min", "a_min", sa.a_min);
            merge(*sweep_cmd, cfg, "--a-max", "a_max", sa.a_max);
            merge(*sweep_cmd, cfg, "--a-step", "a_step", sa.a_step);
            merge(*sweep_cmd, cfg, "--step", "step", sa.step);
            merge(*sweep_cmd, cfg, "--r-max", "r_max", sa.r_max);
            merge(*sweep_cmd, cfg, "--out", "out", sa.out);
            return cmd_soliton_sweep(sa);
        }
        if (app.got_subcommand(solve_cmd)) {
            const json cfg = load_config(va_config);
            merge(*solve_cmd, cfg, "--a-lo", "a_lo", va.a_lo);
            merge(*solve_cmd, cfg, "--a-hi", "a_hi", va.a_hi);
            merge(*solve_cmd, cfg, "--tol", "tol", va.tol);
            merge(*solve_cmd, cfg, "--a-tolerance", "a_tolerance", va.a_tolerance);
            merge(*solve_cmd, cfg, "--step", "step", va.step);
            merge(*solve_cmd, cfg, "--r-max", "r_max", va.r_max);
            merge(*solve_cmd, cfg, "--n", "n", va.n);
            merge(*solve_cmd, cfg, "--out", "out", va.out);
            merge(*solve_cmd, cfg, "--profile-out", "profile_out", va.profile_out);
            merge(*solve_cmd, cfg, "--trajectory-out", "trajectory_out", va.trajectory_out);
            return cmd_solve(va);
        }
        if (app.got_subcommand(id_cmd)) {
            const json cfg = load_config(ia_config);
            merge(*id_cmd, cfg, "--a-min", "a_min", ia.a_min);
            merge(*id_cmd, cfg, "--a-max", "a_max", ia.a_max);
            merge(*id_cmd, cfg, "--a-step", "a_step", ia.a_step);
            merge(*id_cmd, cfg, "--step", "step", ia.step);
            merge(*id_cmd, cfg, "--r-max", "r_max", ia.r_max);
            merge(*id_cmd, cfg, "--out", "out", ia.out);
            return cmd_identity_check(ia);
        }
        if (app.got_subcommand(verify_cmd)) {
            const json cfg = load_config(vo_config);
            merge(*verify_cmd, cfg, "--n", "n", vo.n);
            merge(*verify_cmd, cfg, "--tol-scale", "tol_scale", vo.tol_scale);
            merge(*verify_cmd, cfg, "--fixed-point-steps", "fixed_point_steps", vo.fixed_point_steps);
            merge(*verify_cmd, cfg, "--out", "out", vo_out);
            if (!vo_fault.empty()) {
                if (vo_fault != "stencil")
                    throw std::invalid_argument("unknown fault '" + vo_fault + "'");
                num::testing::inject_stencil_fault(true);
            }
            const int rc = cmd_verify(vo, vo_out);
            num::testing::inject_stencil_fault(false);
            return rc;
        }
        if (app.got_subcommand(diag_cmd)) {
            return cmd_diagnose(diag_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kIoFailure;
    } catch (const StepError& e) {
        std::cerr << "numerical failure at t = " << num::format_g17(e.t) << ": " << e.what()
                  << "\n";
        return kNumericalFailure;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kInvalidConfig;
}

} // namespace ricci::cli
