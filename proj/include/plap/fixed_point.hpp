#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "plap/field.hpp"
#include "plap/plap_core.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Order interval lambda u0 <= v <= M u0 intersected with ||grad v||_inf <= M.
struct AdmissibleSet {
    Field<double> u0;
    double lambda = 0.0;
    double M = 0.0;

    void validate() const;
};

struct Membership {
    bool member = false;
    double lower_margin = 0.0;     // min over interior of v - lambda u0
    double upper_margin = 0.0;     // min over interior of M u0 - v
    double gradient_margin = 0.0;  // M - ||grad v||_inf (cell-centered)

    double worst() const;
};

inline constexpr double kMembershipTolerance = 1e-10;

Membership check_membership(const Field<double>& v, const AdmissibleSet& set);

/// T(v): solve -Delta_p u = lambda v^{-alpha} + f(x, v, grad v) with v frozen.
/// Throws IterateEscape when v dips below lambda u0 - 1e-12 somewhere.
DirichletSolution<double> apply_T(const ProblemSpec& spec, const Field<double>& v, const AdmissibleSet& set,
                                  const CoreConfig& cfg, const Field<double>* warm = nullptr);

struct FixedPointStep {
    int iteration = 0;
    double sup_diff = 0.0;  // ||T(v_k) - v_k||_inf
    double omega = 1.0;
    Membership membership;
};

struct FixedPointResult {
    Field<double> u;
    SolveReport report;
    std::vector<FixedPointStep> trace;
    Membership membership;
    InteriorResidual residual;
};

/// Picard iteration v_{k+1} = v_k + omega (T(v_k) - v_k), omega = 1 until the
/// successive difference grows once, then 0.5 (halved again on each further
/// growth, down to 1/16). Stops when ||T(v_k) - v_k||_inf <= tol ||v_k||_inf.
/// Starts from lambda u0 unless `v_init` is given.
FixedPointResult iterate_T(const ProblemSpec& spec, const AdmissibleSet& set, const CoreConfig& cfg,
                           const Field<double>* v_init = nullptr);

struct SweepRow {
    double lambda = 0.0;
    double sup_u = 0.0;
    double sup_grad = 0.0;
    int iterations = 0;
    bool in_set = false;
    double residual_sup = 0.0;
    double M = 0.0;
    std::string error;  // empty when the row converged
};

/// Runs iterate_T for each lambda in order. Rows after the first are
/// warm-started from the previous solution times (lambda_k / lambda_{k-1})^{1/(p-1+alpha)};
/// the first from lambda^{1/(p-1+alpha)} u0. `M_of_lambda` picks the set size per row.
/// Row failures are recorded and the sweep continues.
std::vector<SweepRow> lambda_sweep(const ProblemSpec& spec_template, const Field<double>& u0,
                                   const std::vector<double>& lambdas, const CoreConfig& cfg,
                                   const std::function<double(double)>& M_of_lambda);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace plap
