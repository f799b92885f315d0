#include "plap/continuation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "plap/error.hpp"
#include "plap/field_io.hpp"
#include "plap/norms.hpp"

namespace plap {

void EpsSchedule::validate() const {
    if (!(floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps floor must be > 0");
    if (!(eps0 > floor)) throw Error(ErrorKind::InvalidArgument, "eps0 must exceed the eps floor");
    if (!(factor > 0.0 && factor < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps factor must lie in (0,1)");
}

std::vector<double> EpsSchedule::levels() const {
    validate();
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double e = eps0 * std::pow(factor, k);
        if (e <= floor * (1.0 + 1e-9)) {
            out.push_back(floor);
            break;
        }
        out.push_back(e);
    }
    return out;
}

namespace {

// Guard floor 1e-3 * k * d with k the current positive lower slope u/d.
Eigen::VectorXd guard_floor(const Field<double>& u, double& slope) {
    const Grid<double>& g = u.grid();
    double k = std::numeric_limits<double>::infinity();
    for (Index node : g.interior_nodes()) k = std::min(k, u[node] / g.dist()[node]);
    if (k > 0.0 && std::isfinite(k)) slope = k;
    Eigen::VectorXd floor = Eigen::VectorXd::Zero(g.node_count());
    if (slope > 0.0) floor = 1e-3 * slope * g.dist();
    return floor;
}

double lower_slope(const Field<double>& u) {
    const Grid<double>& g = u.grid();
    double k = std::numeric_limits<double>::infinity();
    for (Index node : g.interior_nodes()) k = std::min(k, u[node] / g.dist()[node]);
    return k;
}

}  // namespace

DirichletSolution<double> solve_auxiliary(const ProblemSpec& spec, double eps, const Field<double>& init,
                                          const CoreConfig& cfg, const PicardOptions& opts) {
    spec.validate();
    cfg.validate();
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");

    Field<double> u = init;
    u.clamp_boundary();
    double omega = opts.omega;
    double prev_res = std::numeric_limits<double>::infinity();
    double first_scale = 0.0;
    double slope = 0.0;
    int inner = 0;

    DirichletSolution<double> out{u, {}};
    Field<double> warm = u;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Eigen::VectorXd floor = guard_floor(u, slope);
        const Field<double> rhs = regularized_rhs(spec, u, eps, &floor);
        auto step = solve_dirichlet<double>(rhs, spec.p, cfg, &warm);
        inner += step.report.iterations;
        const double scale = sup_norm(step.u);
        if (first_scale == 0.0) first_scale = std::max(scale, std::numeric_limits<double>::min());
        if (!std::isfinite(scale) || scale > opts.blowup_factor * first_scale) {
            std::ostringstream msg;
            msg << "Picard iterates diverge at eps = " << eps << " (sup norm " << scale << ")";
            throw Error(ErrorKind::Divergence, msg.str());
        }
        const double res = sup_distance(step.u, u);
        out.report.iterations = it;
        out.report.final_residual_sup = res;
        if (res <= cfg.tol * (1.0 + scale)) {
            out.u = std::move(step.u);
            out.report.converged = true;
            break;
        }
        if (res > prev_res) omega = std::max(opts.min_omega, 0.5 * omega);
        prev_res = res;
        warm = step.u;
        u.values() = (1.0 - omega) * u.values() + omega * step.u.values();
        out.u = u;
    }
    out.report.extras["inner_iterations"] = inner;
    out.report.extras["omega"] = omega;
    out.report.sup_norm = sup_norm(out.u);
    out.report.grad_sup_norm = gradient(out.u).sup_magnitude();
    const Field<double> rhs = regularized_rhs(spec, out.u, eps);
    out.report.energy = discrete_energy(out.u, rhs, spec.p, cfg.delta_reg);
    return out;
}

ContinuationResult continue_in_eps(GridPtr<double> grid, const ProblemSpec& spec, const EpsSchedule& sched,
                                   const CoreConfig& cfg, const PicardOptions& opts) {
    ContinuationResult res;
    Field<double> current(grid);
    int total = 0;
    bool converged = true;
    for (double eps : sched.levels()) {
        const Field<double> init = sched.transfer ? current : Field<double>(grid);
        // Stage accuracy has to stay below the eps increments, otherwise the
        // Cauchy sequence of stage solutions drowns in solver noise.
        CoreConfig stage_cfg = cfg;
        stage_cfg.tol = std::max(1e-14, std::min(cfg.tol, 1e-2 * eps));
        auto stage = solve_auxiliary(spec, eps, init, stage_cfg, opts);
        total += stage.report.iterations;
        converged = converged && stage.report.converged;
        res.stages.push_back({eps, stage.report.iterations, stage.report.final_residual_sup,
                              stage.report.sup_norm, stage.report.grad_sup_norm});
        if (!res.stage_fields.empty()) res.increments.push_back(sup_distance(stage.u, res.stage_fields.back()));
        res.stage_fields.push_back(stage.u);
        current = stage.u;
        res.report = stage.report;
    }
    res.u = current;
    res.report.iterations = total;
    res.report.converged = converged;
    res.report.extras["stages"] = static_cast<double>(res.stages.size());
    res.report.extras["eps_floor"] = sched.levels().back();
    res.report.extras["cauchy_increment"] = res.increments.empty() ? 0.0 : res.increments.back();
    res.report.extras["k1"] = lower_slope(res.u);
    return res;
}

ContinuationResult solve_u0(GridPtr<double> grid, double p, double alpha, const EpsSchedule& sched,
                            const CoreConfig& cfg, const PicardOptions& opts) {
    return continue_in_eps(std::move(grid), ProblemSpec::pure_singular(p, alpha, 1.0), sched, cfg, opts);
}

ContinuationResult solve_sublinear(GridPtr<double> grid, const ProblemSpec& spec, const EpsSchedule& sched,
                                   const CoreConfig& cfg, const PicardOptions& opts) {
    spec.validate();
    if (!spec.sublinear()) {
        std::ostringstream msg;
        msg << "solve_sublinear needs r1, r2 < p-1 (got r1 = " << spec.convection.r1
            << ", r2 = " << spec.convection.r2 << ", p-1 = " << spec.p - 1.0
            << "); use the fixed-point driver for supercritical growth";
        throw Error(ErrorKind::HypothesisViolation, msg.str());
    }
    ContinuationResult res = continue_in_eps(std::move(grid), spec, sched, cfg, opts);

    const InteriorResidual r = interior_residual(spec, res.u, cfg.delta_reg);
    res.report.extras["residual_interior_sup"] = r.sup;
    res.report.extras["residual_scale"] = r.scale;
    return res;
}

void write_stage_trace_csv(std::ostream& os, const std::vector<StageRecord>& stages) {
    os << "eps,iterations,residual_sup,sup_norm,grad_sup_norm\n";
    for (const auto& s : stages) {
        os << detail::format_double(s.eps) << ',' << s.iterations << ',' << detail::format_double(s.residual_sup)
           << ',' << detail::format_double(s.sup_norm) << ',' << detail::format_double(s.grad_sup_norm) << '\n';
    }
}

}  // namespace plap
