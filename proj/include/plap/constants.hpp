#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plap/field.hpp"
#include "plap/plap_core.hpp"

namespace plap {

/// Inputs of the explicit constant formulas for supercritical growth.
struct ConstantsInput {
    double p = 2.0;
    double alpha = 0.5;
    double a = 1.0;
    double b = 1.0;
    double r1 = 3.0;
    double r2 = 3.0;
    double u0_sup = 1.0;  // sup norm of the singular torsion solution
    double q = 3.0;       // integrability exponent of u0^{-alpha}
    int dimension = 2;    // N in q > max(N, p')
    std::optional<double> Cp_hat;  // calibrated gradient constant, enters A* only
    /// Boundary regularity exponent of the gradient estimates. It has no
    /// discrete counterpart on rectangles and is carried through unused.
    double theta = std::numeric_limits<double>::quiet_NaN();

    /// r1, r2 > p - 1, a, b >= 0, u0_sup > 0. Throws otherwise.
    void validate() const;
    /// q > max(N, p/(p-1)) and 0 < alpha q < 1.
    bool integrability_holds() const;
    /// alpha(1-alpha) + (p-1)(p-2) > 0; when it fails the (ii)/(iii) pair
    /// cannot hold for any lambda < 1 and the lambda window is empty.
    bool window_exponent_positive() const;
};

struct Term {
    std::string label;
    double value = 0.0;
};

struct TermMinimum {
    double value = 0.0;
    std::vector<Term> terms;
};

TermMinimum compute_A(const ConstantsInput& in);

/// Candidate minimum for the lambda range once the gradient constant is
/// known; needs `in.Cp_hat`.
TermMinimum compute_A_star(const ConstantsInput& in);

struct MWindow {
    double M_lo = 0.0;
    double M_hi = 0.0;
    /// Largest M satisfying (i) and (iii) exactly. The proof bounds split
    /// the right-hand side of (i) in halves, so M_hi <= M_hi_sharp.
    double M_hi_sharp = 0.0;
    std::vector<Term> terms;
};

/// Window [M_lo, M_hi] for the three conditions
///   (i)   a M^r1 |u0|^r1 + b M^r2 <= lambda^{1-alpha} / |u0|^alpha
///   (ii)  2^{1/(p-1)} lambda^{(1-alpha)/(p-1)} <= M
///   (iii) M <= lambda^{(2-p)/alpha}
/// Throws HypothesisViolation when lambda >= A or the window is empty.
/// Endpoints are pulled inward by 1e-13 relative so evaluating the
/// conditions at them never reports a rounding-negative margin.
MWindow compute_M_window(double lambda, const ConstantsInput& in);

struct Lem3Check {
    bool cond_i = false;
    bool cond_ii = false;
    bool cond_iii = false;
    double margin_i = 0.0;  // right-hand side minus left-hand side
    double margin_ii = 0.0;
    double margin_iii = 0.0;

    bool all() const { return cond_i && cond_ii && cond_iii; }
};

Lem3Check check_lem3(double lambda, double M, const ConstantsInput& in);

/// Explicit p-factor of the gradient estimates on convex domains:
/// 2^{p/(p-1)} for p < 2 and p^{5/2} for p >= 2.
double gradient_p_factor(double p);

/// ||grad u||_inf^{p-1} / (p_factor(p) * ||g||) for u solving -Delta_p u = g.
/// The load norm is L^{N,1} for N >= 3 and L^q otherwise, N = grid dimension.
double gradient_ratio(const Field<double>& g, double p, double q, const CoreConfig& cfg);

struct GradientCalibration {
    double Cp_hat = 0.0;
    double p_factor = 0.0;
    std::uint64_t seed = 42;
    std::vector<std::string> probe_labels;
    std::vector<double> ratios;
};

/// Max gradient ratio over probe loads (constant, torsion-shaped, then
/// seeded random positive fields), inflated by a safety factor of 2.
/// Probe j depends only on (j, seed), so a longer probe list is a superset.
GradientCalibration calibrate_gradient_constant(GridPtr<double> grid, double p, double q, int probe_count,
                                                const CoreConfig& cfg, std::uint64_t seed = 42);

/// Constant of the bound ||grad u||_inf <= C~ 2^{1/(p-1)} lambda^{(1-alpha)/(p-1)}:
/// C~ = (C p_factor(p) ||u0^{-alpha}||_q)^{1/(p-1)}, norm over interior nodes.
double tilde_gradient_constant(double C, double p, const Field<double>& u0, double alpha, double q);

struct ConstantsReport {
    double A = 0.0;
    double A_star = std::numeric_limits<double>::quiet_NaN();
    double lambda = 0.0;
    double M_lo = std::numeric_limits<double>::quiet_NaN();
    double M_hi = std::numeric_limits<double>::quiet_NaN();
    double M_hi_sharp = std::numeric_limits<double>::quiet_NaN();
    /// Lower end of M once the gradient cap is included: C~ * M_lo.
    double M_grad_lo = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;
    bool integrability_holds = false;
    ConstantsInput input;
    std::vector<Term> terms;
};

/// Evaluates A, A* (when Cp_hat is set), and the M window at `lambda`,
/// defaulting to A*/2 (or A/2 without Cp_hat).
ConstantsReport constants_report(const ConstantsInput& in, std::optional<double> lambda = {});

}  // namespace plap
