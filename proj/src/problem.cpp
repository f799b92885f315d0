#include "plap/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "plap/error.hpp"
#include "plap/plap_core.hpp"

namespace plap {

double ConvectionSpec::operator()(double t, double grad_norm) const {
    double f = 0.0;
    if (a != 0.0 && t > 0.0) f += a * std::pow(t, r1);
    if (b != 0.0 && grad_norm > 0.0) f += b * std::pow(grad_norm, r2);
    return f;
}

void ConvectionSpec::validate() const {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "convection coefficients a, b must be >= 0");
    }
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "growth exponents r1, r2 must be > 0");
    }
}

void ProblemSpec::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "p must satisfy 1 < p < infinity");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be > 0");
    convection.validate();
    if (convection.r1 == p - 1.0 || convection.r2 == p - 1.0) {
        std::ostringstream msg;
        msg << "growth exponents must differ from p-1 = " << p - 1.0 << " (excluded exponent r = p-1)";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
}

ProblemSpec ProblemSpec::pure_singular(double p, double alpha, double lambda) {
    ProblemSpec s;
    s.p = p;
    s.alpha = alpha;
    s.lambda = lambda;
    s.convection = ConvectionSpec{0.0, 0.0, 0.5 * (p - 1.0), 0.5 * (p - 1.0)};
    return s;
}

double residual_delta(double p, double delta_reg) { return p < 2.0 ? delta_reg : 0.0; }

Field<double> convection_field(const ConvectionSpec& conv, const Field<double>& u) {
    Field<double> out(u.grid_ptr());
    if (conv.is_zero()) return out;
    const Eigen::VectorXd grad = nodal_gradient_norm(u);
    for (Index node : u.grid().interior_nodes()) out[node] = conv(u[node], grad[node]);
    return out;
}

Field<double> regularized_rhs(const ProblemSpec& spec, const Field<double>& u, double eps,
                              const Eigen::VectorXd* floor) {
    Field<double> out = convection_field(spec.convection, u);
    for (Index node : u.grid().interior_nodes()) {
        double t = u[node];
        if (floor != nullptr) t = std::max(t, (*floor)[node]);
        out[node] += spec.lambda * std::pow(t + eps, -spec.alpha);
    }
    return out;
}

Field<double> pde_residual(const ProblemSpec& spec, const Field<double>& u, double eps, double delta,
                           BoundaryMode mode) {
    if (delta < 0.0) delta = residual_delta(spec.p);
    Field<double> r = apply_plap(u, spec.p, delta, mode);
    const Field<double> rhs = regularized_rhs(spec, u, eps);
    for (Index node : u.grid().interior_nodes()) r[node] -= rhs[node];
    return r;
}

bool away_from_boundary(const Grid<double>& g, Index node) {
    return !g.is_boundary(node) && g.dist()[node] >= 2.0 * g.max_spacing() * (1.0 - 1e-9);
}

InteriorResidual interior_residual(const ProblemSpec& spec, const Field<double>& u, double delta_reg) {
    const Grid<double>& g = u.grid();
    for (Index node : g.interior_nodes()) {
        if (!(u[node] > 0.0)) throw Error(ErrorKind::InvalidArgument, "residual needs u > 0 in the interior");
    }
    const Field<double> r = pde_residual(spec, u, 0.0, residual_delta(spec.p, delta_reg));
    InteriorResidual out;
    double umin = std::numeric_limits<double>::infinity();
    double l2 = 0.0;
    for (Index node : g.interior_nodes()) {
        if (!away_from_boundary(g, node)) continue;
        const double v = std::abs(r[node]);
        if (v > out.sup || out.worst_node < 0) {
            out.sup = v;
            out.worst_node = node;
        }
        l2 += g.node_measure()[node] * v * v;
        umin = std::min(umin, u[node]);
    }
    out.l2 = std::sqrt(l2);
    out.scale = spec.lambda * std::pow(umin, -spec.alpha);
    return out;
}

}  // namespace plap
