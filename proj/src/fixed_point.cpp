#include "plap/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plap/error.hpp"
#include "plap/field_io.hpp"
#include "plap/norms.hpp"

namespace plap {

void AdmissibleSet::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be > 0");
    if (!(M > 0.0) || !std::isfinite(M)) throw Error(ErrorKind::InvalidArgument, "M must be > 0");
    if (!(lambda <= M)) throw Error(ErrorKind::InvalidArgument, "admissible set needs lambda <= M");
    if (u0.size() == 0) throw Error(ErrorKind::InvalidArgument, "admissible set needs u0");
}

double Membership::worst() const { return std::min({lower_margin, upper_margin, gradient_margin}); }

Membership check_membership(const Field<double>& v, const AdmissibleSet& set) {
    v.check_same(set.u0);
    Membership m;
    m.lower_margin = std::numeric_limits<double>::infinity();
    m.upper_margin = std::numeric_limits<double>::infinity();
    for (Index node : v.grid().interior_nodes()) {
        m.lower_margin = std::min(m.lower_margin, v[node] - set.lambda * set.u0[node]);
        m.upper_margin = std::min(m.upper_margin, set.M * set.u0[node] - v[node]);
    }
    m.gradient_margin = set.M - gradient(v).sup_magnitude();
    m.member = m.worst() >= -kMembershipTolerance;
    return m;
}

DirichletSolution<double> apply_T(const ProblemSpec& spec, const Field<double>& v, const AdmissibleSet& set,
                                  const CoreConfig& cfg, const Field<double>* warm) {
    spec.validate();
    v.check_same(set.u0);
    for (Index node : v.grid().interior_nodes()) {
        const double floor = set.lambda * set.u0[node];
        if (v[node] < floor - 1e-12 || !(v[node] > 0.0)) {
            std::ostringstream msg;
            msg << "iterate escapes the admissible set at node " << node << ": v = " << v[node]
                << " < lambda u0 = " << floor;
            throw Error(ErrorKind::IterateEscape, msg.str());
        }
    }
    const Field<double> rhs = regularized_rhs(spec, v, 0.0);
    return solve_dirichlet(rhs, spec.p, cfg, warm);
}

FixedPointResult iterate_T(const ProblemSpec& spec, const AdmissibleSet& set, const CoreConfig& cfg,
                           const Field<double>* v_init) {
    spec.validate();
    set.validate();
    cfg.validate();
    Field<double> v = v_init != nullptr ? *v_init : set.lambda * set.u0;
    v.check_same(set.u0);
    v.clamp_boundary();

    FixedPointResult out;
    double omega = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    int inner = 0;
    bool converged = false;
    int it = 0;
    for (it = 1; it <= cfg.max_iter; ++it) {
        auto step = apply_T(spec, v, set, cfg, &v);
        inner += step.report.iterations;
        const double diff = sup_distance(step.u, v);
        if (diff > prev) omega = omega == 1.0 ? 0.5 : std::max(1.0 / 16, 0.5 * omega);
        prev = diff;
        const bool done = diff <= cfg.tol * sup_norm(v);
        if (done) {
            v = std::move(step.u);
        } else {
            v.values() += omega * (step.u.values() - v.values());
        }
        out.trace.push_back({it, diff, omega, check_membership(v, set)});
        if (done) {
            converged = true;
            break;
        }
    }
    out.u = v;
    out.membership = check_membership(v, set);
    out.residual = interior_residual(spec, v, cfg.delta_reg);
    out.report.iterations = std::min(it, cfg.max_iter);
    out.report.converged = converged;
    out.report.final_residual_sup = out.trace.empty() ? 0.0 : out.trace.back().sup_diff;
    out.report.sup_norm = sup_norm(v);
    out.report.grad_sup_norm = gradient(v).sup_magnitude();
    out.report.energy = discrete_energy(v, regularized_rhs(spec, v, 0.0), spec.p, cfg.delta_reg);
    out.report.extras["inner_iterations"] = inner;
    out.report.extras["residual_interior_sup"] = out.residual.sup;
    out.report.extras["residual_interior_l2"] = out.residual.l2;
    out.report.extras["residual_scale"] = out.residual.scale;
    out.report.extras["lower_margin"] = out.membership.lower_margin;
    out.report.extras["upper_margin"] = out.membership.upper_margin;
    out.report.extras["gradient_margin"] = out.membership.gradient_margin;
    out.report.extras["omega"] = omega;
    return out;
}

std::vector<SweepRow> lambda_sweep(const ProblemSpec& spec_template, const Field<double>& u0,
                                   const std::vector<double>& lambdas, const CoreConfig& cfg,
                                   const std::function<double(double)>& M_of_lambda) {
    std::vector<SweepRow> rows;
    const double expo = 1.0 / (spec_template.p - 1.0 + spec_template.alpha);
    Field<double> prev;
    double prev_lambda = 0.0;
    for (double lambda : lambdas) {
        SweepRow row;
        row.lambda = lambda;
        try {
            ProblemSpec spec = spec_template;
            spec.lambda = lambda;
            row.M = M_of_lambda(lambda);
            const AdmissibleSet set{u0, lambda, row.M};
            const Field<double> init =
                prev.size() == 0 ? std::pow(lambda, expo) * u0 : std::pow(lambda / prev_lambda, expo) * prev;
            FixedPointResult res = iterate_T(spec, set, cfg, &init);
            row.sup_u = res.report.sup_norm;
            row.sup_grad = res.report.grad_sup_norm;
            row.iterations = res.report.iterations;
            row.in_set = res.membership.member;
            row.residual_sup = res.residual.sup;
            if (!res.report.converged) row.error = "iteration budget exhausted";
            prev = res.u;
            prev_lambda = lambda;
        } catch (const Error& e) {
            row.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "lambda,sup_u,sup_grad,iterations,in_set,residual_sup\n";
    for (const auto& r : rows) {
        os << detail::format_double(r.lambda) << ',' << detail::format_double(r.sup_u) << ','
           << detail::format_double(r.sup_grad) << ',' << r.iterations << ',' << (r.in_set ? "true" : "false") << ','
           << detail::format_double(r.residual_sup) << '\n';
    }
}

}  // namespace plap
