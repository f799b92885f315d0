#pragma once

#include <Eigen/Core>

#include "plap/field.hpp"
#include "plap/plap_core.hpp"

namespace plap {

/// Convection nonlinearity f(x, t, xi) = a max(t, 0)^r1 + b |xi|^r2.
struct ConvectionSpec {
    double a = 0.0;
    double b = 0.0;
    double r1 = 0.5;
    double r2 = 0.5;

    double operator()(double t, double grad_norm) const;
    bool is_zero() const { return a == 0.0 && b == 0.0; }
    void validate() const;
};

/// Parameters of -Delta_p u = lambda u^{-alpha} + f(x, u, grad u).
struct ProblemSpec {
    double p = 2.0;
    double alpha = 0.5;
    double lambda = 1.0;
    ConvectionSpec convection{};

    /// Checks 1 < p, 0 < alpha < 1, lambda > 0 and that neither growth
    /// exponent equals the excluded value p - 1.
    void validate() const;
    bool sublinear() const { return convection.r1 < p - 1.0 && convection.r2 < p - 1.0; }
    bool supercritical() const { return convection.r1 > p - 1.0 && convection.r2 > p - 1.0; }

    /// The pure singular problem -Delta_p u = u^{-alpha}.
    static ProblemSpec pure_singular(double p, double alpha, double lambda = 1.0);
};

/// Delta used when evaluating the operator in residual checks: the solver
/// keeps its regularization for p < 2 and drops it for p >= 2.
double residual_delta(double p, double delta_reg = kDefaultDeltaReg);

/// lambda (max(u, floor) + eps)^{-alpha} + f(u, |grad u|) on interior nodes,
/// zero on the boundary. `floor` may be null (no guard).
Field<double> regularized_rhs(const ProblemSpec& spec, const Field<double>& u, double eps,
                              const Eigen::VectorXd* floor = nullptr);

/// Nodewise f(u, |grad u|) on interior nodes.
Field<double> convection_field(const ConvectionSpec& conv, const Field<double>& u);

/// apply_plap(u) - lambda (u + eps)^{-alpha} - f(u, grad u) on interior nodes.
Field<double> pde_residual(const ProblemSpec& spec, const Field<double>& u, double eps = 0.0,
                           double delta = -1.0, BoundaryMode mode = BoundaryMode::Dirichlet);

/// Interior nodes at distance >= 2h from the boundary.
bool away_from_boundary(const Grid<double>& g, Index node);

/// Residual of the un-regularized equation restricted to nodes away from
/// the boundary, with the natural scale lambda * min(u)^{-alpha} there.
struct InteriorResidual {
    double sup = 0.0;
    double l2 = 0.0;  // node-measure weighted
    double scale = 0.0;
    Index worst_node = -1;
};

InteriorResidual interior_residual(const ProblemSpec& spec, const Field<double>& u, double delta_reg = kDefaultDeltaReg);

}  // namespace plap
