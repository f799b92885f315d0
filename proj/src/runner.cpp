#include "plap/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "plap/constants.hpp"
#include "plap/continuation.hpp"
#include "plap/field_io.hpp"
#include "plap/fixed_point.hpp"
#include "plap/norms.hpp"
#include "plap/report_json.hpp"
#include "plap/verification.hpp"

namespace fs = std::filesystem;

namespace plap {

namespace {

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    fs::path dir;
    Json report;
    int code = kExitOk;

    void field(const std::string& name, const Field<double>& u) const {
        if (cfg.write_csv) write_field_csv((dir / name).string(), u);
    }

    void flag(int c) {
        if (code == kExitOk || c == kExitNonconvergence) code = c;
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    os << text;
}

Json base_report(const RunConfig& cfg) {
    Json j;
    j["command"] = cfg.command;
    j["config"] = to_json(cfg);
    j["seed"] = cfg.seed;
    return j;
}

ContinuationResult run_u0(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ContinuationResult res = solve_u0(cfg.grid(), cfg.p, cfg.alpha, cfg.sched, cfg.core);
    ctx.field("u0.csv", res.u);
    if (cfg.write_csv) {
        std::ofstream os(ctx.dir / "stages.csv");
        write_stage_trace_csv(os, res.stages);
    }
    return res;
}

Json cauchy_json(const ContinuationResult& res, double tol) {
    const double inc = res.increments.empty() ? 0.0 : res.increments.back();
    const double threshold = 10.0 * tol * sup_norm(res.u);
    bool decreasing = true;
    for (std::size_t k = 1; k < res.increments.size(); ++k) decreasing = decreasing && res.increments[k] < res.increments[k - 1];
    Json incs = Json::array();
    for (double v : res.increments) incs.push_back(json_number(v));
    return Json{{"last_increment", json_number(inc)},
                {"threshold", json_number(threshold)},
                {"below_threshold", inc <= threshold},
                {"increments_decreasing", decreasing},
                {"increments", incs}};
}

void cmd_solve_u0(Context& ctx) {
    const ContinuationResult res = run_u0(ctx);
    ctx.report["problem"] = to_json(ProblemSpec::pure_singular(ctx.cfg.p, ctx.cfg.alpha, 1.0));
    ctx.report["solve"] = to_json(res.report);
    ctx.report["stages"] = to_json(res.stages);
    const Json cauchy = cauchy_json(res, ctx.cfg.core.tol);
    ctx.report["cauchy"] = cauchy;
    ctx.log << "u0: sup " << res.report.sup_norm << ", stages " << res.stages.size() << ", last increment "
            << cauchy["last_increment"] << '\n';
    if (!res.report.converged || !cauchy["below_threshold"].get<bool>()) ctx.flag(kExitNonconvergence);
}

void cmd_solve_sublinear(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const ProblemSpec spec = cfg.problem();
    const ContinuationResult res = solve_sublinear(cfg.grid(), spec, cfg.sched, cfg.core);
    ctx.field("u.csv", res.u);
    if (cfg.write_csv) {
        std::ofstream os(ctx.dir / "stages.csv");
        write_stage_trace_csv(os, res.stages);
    }
    const CheckResult residual = check_residual(spec, res.u, 1e-6, cfg.q, cfg.core.delta_reg);
    const DistanceBounds dist = check_distance_bounds(res.u);
    ctx.report["problem"] = to_json(spec);
    ctx.report["solve"] = to_json(res.report);
    ctx.report["stages"] = to_json(res.stages);
    ctx.report["cauchy"] = cauchy_json(res, cfg.core.tol);
    ctx.report["checks"] = to_json(std::vector<CheckResult>{residual, dist.check});
    ctx.log << "sublinear: sup " << res.report.sup_norm << ", residual " << residual.detail("residual_sup")
            << " (scale " << residual.detail("scale") << "), k1 " << dist.c_best << '\n';
    if (!res.report.converged) ctx.flag(kExitNonconvergence);
    if (!residual.passed || !dist.check.passed) ctx.flag(kExitVerification);
}

void cmd_eigen(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Eigenpair<double> e = solve_eigenpair(cfg.grid(), cfg.p, cfg.core);
    ctx.field("phi1.csv", e.phi1);
    ctx.report["problem"] = Json{{"p", cfg.p}};
    ctx.report["lambda1"] = e.lambda1;
    ctx.report["solve"] = to_json(e.report);
    ctx.log << "eigen: lambda1 " << e.lambda1 << '\n';
    if (!e.report.converged) ctx.flag(kExitNonconvergence);
}

struct ConstantsSetup {
    ConstantsInput input;
    Field<double> u0;
    GradientCalibration calibration;
    bool calibrated = false;
};

// u0 (solved unless only its sup norm is needed and given), then C~ from
// calibration unless supplied.
ConstantsSetup prepare_constants(Context& ctx, const ProblemSpec& spec, bool need_u0) {
    const RunConfig& cfg = ctx.cfg;
    ConstantsSetup s;
    ConstantsInput& in = s.input;
    in.p = spec.p;
    in.alpha = spec.alpha;
    in.a = spec.convection.a;
    in.b = spec.convection.b;
    // A zero coefficient removes its growth exponent from every formula.
    in.r1 = in.a == 0.0 && !(spec.convection.r1 > spec.p - 1.0) ? spec.p : spec.convection.r1;
    in.r2 = in.b == 0.0 && !(spec.convection.r2 > spec.p - 1.0) ? spec.p : spec.convection.r2;
    in.q = cfg.q;
    in.dimension = cfg.dim;
    if (need_u0 || !cfg.u0_sup || !cfg.cp_hat) {
        const ContinuationResult res = run_u0(ctx);
        if (!res.report.converged) throw Error(ErrorKind::BudgetExceeded, "u0 continuation did not converge");
        s.u0 = res.u;
        ctx.report["u0"] = to_json(res.report);
    }
    in.u0_sup = cfg.u0_sup ? *cfg.u0_sup : sup_norm(s.u0);
    if (cfg.cp_hat) {
        in.Cp_hat = *cfg.cp_hat;
    } else {
        s.calibration = calibrate_gradient_constant(cfg.grid(), spec.p, cfg.q, cfg.probes, cfg.core, cfg.seed);
        s.calibrated = true;
        in.Cp_hat = tilde_gradient_constant(s.calibration.Cp_hat, spec.p, s.u0, spec.alpha, cfg.q);
        ctx.report["calibration"] = to_json(s.calibration);
    }
    return s;
}

void cmd_constants(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const ProblemSpec spec = cfg.problem();
    const ConstantsSetup s = prepare_constants(ctx, spec, false);
    const ConstantsReport rep = constants_report(s.input, cfg.lambda);
    ctx.report["constants"] = to_json(rep);
    ctx.log << "constants: A " << rep.A << ", A* " << rep.A_star << ", lambda " << rep.lambda << ", M in [" << rep.M_lo
            << ", " << rep.M_hi << "], feasible " << (rep.feasible ? "yes" : "no") << '\n';
}

void cmd_solve_supercritical(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ProblemSpec spec = cfg.problem();
    const ConstantsSetup s = prepare_constants(ctx, spec, true);
    const ConstantsReport rep = constants_report(s.input, cfg.lambda);
    ctx.report["constants"] = to_json(rep);
    if (!rep.feasible) {
        std::ostringstream msg;
        msg << "lambda = " << rep.lambda << " admits no M window below A* = " << rep.A_star;
        throw Error(ErrorKind::HypothesisViolation, msg.str());
    }
    spec.lambda = rep.lambda;
    const AdmissibleSet set{s.u0, rep.lambda, rep.M_hi};
    const FixedPointResult res = iterate_T(spec, set, cfg.core);
    ctx.field("u.csv", res.u);
    const CheckResult residual = check_residual(spec, res.u, 1e-6, cfg.q, cfg.core.delta_reg);
    Json trace = Json::array();
    for (const auto& st : res.trace) {
        trace.push_back(Json{{"iteration", st.iteration},
                             {"sup_diff", json_number(st.sup_diff)},
                             {"omega", st.omega},
                             {"membership", to_json(st.membership)}});
    }
    ctx.report["problem"] = to_json(spec);
    ctx.report["M"] = rep.M_hi;
    ctx.report["solve"] = to_json(res.report);
    ctx.report["membership"] = to_json(res.membership);
    ctx.report["trace"] = trace;
    ctx.report["checks"] = to_json(std::vector<CheckResult>{residual});
    ctx.log << "supercritical: lambda " << rep.lambda << ", M " << rep.M_hi << ", iterations " << res.report.iterations
            << ", member " << (res.membership.member ? "yes" : "no") << ", residual "
            << residual.detail("residual_sup") << '\n';
    if (!res.report.converged) ctx.flag(kExitNonconvergence);
    if (!res.membership.member || !residual.passed) ctx.flag(kExitVerification);
}

void cmd_sweep(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const ProblemSpec spec = cfg.problem();
    const ConstantsSetup s = prepare_constants(ctx, spec, true);
    const ConstantsInput in = s.input;
    const auto M_of = [&](double lambda) { return compute_M_window(lambda, in).M_hi; };
    const std::vector<SweepRow> rows = lambda_sweep(spec, s.u0, cfg.sweep_lambdas, cfg.core, M_of);
    if (cfg.write_csv) {
        std::ofstream os(ctx.dir / "sweep.csv");
        write_sweep_csv(os, rows);
    }
    const ConstantsReport rep =
        constants_report(in, cfg.sweep_lambdas.empty() ? std::nullopt : std::optional<double>(cfg.sweep_lambdas.front()));
    const double ctilde = *in.Cp_hat;
    Json jrows = Json::array();
    for (const auto& r : rows) {
        Json j = to_json(r);
        j["grad_envelope"] =
            json_number(ctilde * std::pow(2.0, 1.0 / (spec.p - 1.0)) * std::pow(r.lambda, (1.0 - spec.alpha) / (spec.p - 1.0)));
        j["below_A_star"] = r.lambda < rep.A_star;
        jrows.push_back(j);
        if (!r.error.empty()) ctx.flag(kExitNonconvergence);
        else if (!r.in_set) ctx.flag(kExitVerification);
    }
    ctx.report["problem"] = to_json(spec);
    ctx.report["constants"] = to_json(rep);
    ctx.report["rows"] = jrows;
    ctx.log << "sweep: " << rows.size() << " rows\n";
}

void cmd_verify(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const fs::path in = cfg.verify_input.empty() ? ctx.dir : fs::path(cfg.verify_input);
    const fs::path report_path = in / "report.json";
    if (!fs::exists(report_path)) throw Error(ErrorKind::InvalidArgument, "no report.json in " + in.string());
    Json src;
    {
        std::ifstream is(report_path);
        try {
            src = Json::parse(is);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::ParseError, report_path.string() + ": " + e.what());
        }
    }
    std::vector<CheckResult> checks;
    auto tagged = [&](CheckResult c, const std::string& field) {
        c.name = field + ":" + c.name;
        checks.push_back(std::move(c));
    };
    const double p = src.contains("problem") ? src["problem"].at("p").get<double>() : cfg.p;
    const double alpha = src.contains("problem") && src["problem"].contains("alpha")
                             ? src["problem"]["alpha"].get<double>()
                             : cfg.alpha;
    if (fs::exists(in / "u0.csv")) {
        const Field<double> u0 = read_field_csv((in / "u0.csv").string());
        const ProblemSpec spec = ProblemSpec::pure_singular(p, alpha, 1.0);
        tagged(check_residual(spec, u0, 1e-6, cfg.q, cfg.core.delta_reg), "u0");
        tagged(check_distance_bounds(u0).check, "u0");
        tagged(check_supersolution(u0, spec, SolutionSide::Super, 1e-6, kCheckTolerance, cfg.core.delta_reg), "u0");
    }
    if (fs::exists(in / "u.csv")) {
        const Field<double> u = read_field_csv((in / "u.csv").string());
        const ProblemSpec spec = problem_from_json(src.at("problem"));
        tagged(check_residual(spec, u, 1e-6, cfg.q, cfg.core.delta_reg), "u");
        tagged(check_distance_bounds(u).check, "u");
    }
    if (fs::exists(in / "phi1.csv") && src.contains("lambda1")) {
        const Field<double> phi = read_field_csv((in / "phi1.csv").string());
        const double lambda1 = src["lambda1"].get<double>();
        tagged(check_distance_bounds(phi).check, "phi1");
        const double beta = 0.9 * std::pow(lambda1, -1.0 / (p - 1.0 + cfg.alpha));
        tagged(check_supersolution(beta * phi, ProblemSpec::pure_singular(p, cfg.alpha, 1.0), SolutionSide::Sub, 0.0,
                                   kCheckTolerance, cfg.core.delta_reg),
               "beta_phi1");
    }
    if (checks.empty()) throw Error(ErrorKind::InvalidArgument, "no field CSVs to verify in " + in.string());
    ctx.report["source"] = in.string();
    ctx.report["checks"] = to_json(checks);
    if (cfg.write_json) write_text(ctx.dir / "checks.json", to_json(checks).dump(2) + "\n");
    write_check_table(ctx.log, checks);
    for (const auto& c : checks) {
        if (!c.passed) ctx.flag(kExitVerification);
    }
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BudgetExceeded:
        case ErrorKind::Divergence:
        case ErrorKind::IterateEscape: return kExitNonconvergence;
        default: return kExitConfig;
    }
}

void write_failure(const std::string& dir, const std::string& kind, const std::string& message, int code) {
    try {
        fs::create_directories(dir);
        const Json j{{"error_kind", kind}, {"message", message}, {"exit_code", code}};
        write_text(fs::path(dir) / "failure.json", j.dump(2) + "\n");
    } catch (const std::exception&) {
    }
}

int run(const RunConfig& cfg, std::ostream& log) {
    Context ctx{cfg, log, fs::path(cfg.out_dir), base_report(cfg)};
    try {
        fs::create_directories(ctx.dir);
        fs::remove(ctx.dir / "failure.json");
        const std::string& c = cfg.command;
        if (c == "solve-u0") cmd_solve_u0(ctx);
        else if (c == "solve-sublinear") cmd_solve_sublinear(ctx);
        else if (c == "solve-supercritical") cmd_solve_supercritical(ctx);
        else if (c == "eigen") cmd_eigen(ctx);
        else if (c == "constants") cmd_constants(ctx);
        else if (c == "sweep-lambda") cmd_sweep(ctx);
        else if (c == "verify") cmd_verify(ctx);
        else throw Error(ErrorKind::InvalidArgument, "unknown command '" + c + "'");
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        write_failure(cfg.out_dir, to_string(e.kind()), e.what(), code);
        return code;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        write_failure(cfg.out_dir, "filesystem", e.what(), kExitConfig);
        return kExitConfig;
    }
    ctx.report["exit_code"] = ctx.code;
    // verify writes its own checks.json and leaves the solve report alone
    // when it runs inside the solve directory.
    const std::string report_name = cfg.command == "verify" ? "verify_report.json" : "report.json";
    if (cfg.write_json) write_text(ctx.dir / report_name, ctx.report.dump(2) + "\n");
    if (ctx.code != kExitOk) {
        if (ctx.code == kExitNonconvergence) {
            write_failure(cfg.out_dir, "nonconvergence", "solver did not converge", ctx.code);
        } else {
            write_failure(cfg.out_dir, "verification-failure", "hard checks failed, see the report", ctx.code);
        }
    }
    return ctx.code;
}

}  // namespace plap
