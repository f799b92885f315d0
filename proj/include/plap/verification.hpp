#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "plap/continuation.hpp"
#include "plap/field.hpp"
#include "plap/plap_core.hpp"
#include "plap/problem.hpp"

namespace plap {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst_margin = 0.0;
    Index worst_node = -1;
    double tolerance = 1e-8;
    /// Named numbers backing the verdict. Non-finite values are legitimate
    /// (e.g. a mismatch under a degenerate exponent).
    std::vector<std::pair<std::string, double>> details;

    double detail(const std::string& key) const;
};

inline constexpr double kCheckTolerance = 1e-8;

/// u >= v on the interior, given Fu = apply_plap(u) - f(u) >= -tol and
/// Fv = apply_plap(v) - f(v) <= tol. The hypotheses are evaluated and
/// recorded, not enforced.
CheckResult check_comparison(const Field<double>& u, const Field<double>& v, const Field<double>& Fu,
                             const Field<double>& Fv, double tol = kCheckTolerance);

/// Residual of the un-regularized equation away from the boundary; passes
/// when its sup is at most rel_tol * lambda min(u)^{-alpha}. Also records
/// max lambda u^{-alpha} d^{alpha q} when q > 0.
CheckResult check_residual(const ProblemSpec& spec, const Field<double>& u, double rel_tol = 1e-6,
                           double q = 0.0, double delta_reg = kDefaultDeltaReg);

struct DistanceBounds {
    double c_best = 0.0;
    double K_best = 0.0;
    CheckResult check;
};

DistanceBounds check_distance_bounds(const Field<double>& u);

/// Solves -Delta_p w = lambda w^{-alpha} directly and compares it with
/// lambda^{1/(p-1+alpha)} u0. Passes when the sup distance is at most
/// rel_tol ||w||_inf. The mismatch under the exponent 1/(p-1-alpha) is
/// reported alongside. `u0` is computed when not supplied.
CheckResult check_scaling(GridPtr<double> grid, double p, double alpha, double lambda, const CoreConfig& cfg,
                          const EpsSchedule& sched = {}, const Field<double>* u0 = nullptr,
                          double rel_tol = 1e-6);

enum class SolutionSide { Sub, Super };

/// Sign of apply_plap(u) - lambda (u + eps)^{-alpha} - f(u, grad u) on nodes
/// at distance >= 2h: <= tol for sub-solutions, >= -tol for super-solutions.
/// Boundary values of u are used as stored.
CheckResult check_supersolution(const Field<double>& u, const ProblemSpec& spec, SolutionSide side,
                                double eps = 0.0, double tol = kCheckTolerance, double delta_reg = kDefaultDeltaReg);

void write_check_table(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace plap
