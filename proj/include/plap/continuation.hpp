#pragma once

#include <ostream>
#include <vector>

#include "plap/field.hpp"
#include "plap/plap_core.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Geometric regularization schedule eps0, eps0*factor, ... ending at floor.
struct EpsSchedule {
    double eps0 = 1.0;
    double factor = 0.1;
    double floor = 1e-11;
    bool transfer = true;  // warm-start each stage from the previous one

    void validate() const;
    std::vector<double> levels() const;
};

struct PicardOptions {
    double omega = 0.7;          // initial damping, halved when the residual grows
    double min_omega = 1.0 / 64;
    double blowup_factor = 1e6;  // divergence when sup u exceeds this times the first-step scale
};

struct StageRecord {
    double eps = 0.0;
    int iterations = 0;
    double residual_sup = 0.0;
    double sup_norm = 0.0;
    double grad_sup_norm = 0.0;
};

struct ContinuationResult {
    Field<double> u;
    SolveReport report;
    std::vector<StageRecord> stages;
    std::vector<Field<double>> stage_fields;
    /// sup |u_k - u_{k-1}| between consecutive stages (one fewer than stages).
    std::vector<double> increments;
};

/// Picard iteration for -Delta_p u = lambda (u + eps)^{-alpha} + f(x, u, grad u):
/// freeze u and grad u in the right-hand side, solve the Dirichlet problem,
/// relax u <- (1 - omega) u + omega u_new. Throws on blow-up; budget
/// exhaustion is reported through `report.converged`.
DirichletSolution<double> solve_auxiliary(const ProblemSpec& spec, double eps, const Field<double>& init,
                                          const CoreConfig& cfg, const PicardOptions& opts = {});

/// Runs solve_auxiliary over the schedule and returns the floor-level solution.
ContinuationResult continue_in_eps(GridPtr<double> grid, const ProblemSpec& spec, const EpsSchedule& sched,
                                   const CoreConfig& cfg, const PicardOptions& opts = {});

/// Regularized solution of -Delta_p u0 = u0^{-alpha}.
ContinuationResult solve_u0(GridPtr<double> grid, double p, double alpha, const EpsSchedule& sched,
                            const CoreConfig& cfg, const PicardOptions& opts = {});

/// Full problem in the regime r1, r2 < p - 1. Rejects any other exponents.
/// Report extras carry the interior residual with the un-regularized
/// singular term and the positivity constant k1 = min u / d.
ContinuationResult solve_sublinear(GridPtr<double> grid, const ProblemSpec& spec, const EpsSchedule& sched,
                                   const CoreConfig& cfg, const PicardOptions& opts = {});

/// Header `eps,iterations,residual_sup,sup_norm,grad_sup_norm`.
void write_stage_trace_csv(std::ostream& os, const std::vector<StageRecord>& stages);

}  // namespace plap
