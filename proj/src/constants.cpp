#include "plap/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plap/error.hpp"
#include "plap/norms.hpp"

namespace plap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative inward shift of window endpoints; enough to absorb rounding in
// the powers of condition (i) for exponents r >= 0.01.
constexpr double kInward = 1e-13;

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be > 0");
}

// (1-alpha)(r+1-p): common denominator of the r-exponents.
double growth_denominator(const ConstantsInput& in, double r) { return (1.0 - in.alpha) * (r + 1.0 - in.p); }

double window_denominator(const ConstantsInput& in) {
    return in.alpha * (1.0 - in.alpha) + (in.p - 1.0) * (in.p - 2.0);
}

// 1 / (2^{r e} (2 coef)^{(p-1) e}) with e = 1/((1-alpha)(r+1-p)). A zero
// coefficient removes the constraint.
double growth_term(const ConstantsInput& in, double r, double coef) {
    if (coef == 0.0) return kInf;
    const double e = 1.0 / growth_denominator(in, r);
    return 1.0 / (std::pow(2.0, r * e) * std::pow(2.0 * coef, (in.p - 1.0) * e));
}

TermMinimum minimum_of(std::vector<Term> terms) {
    TermMinimum out;
    out.value = kInf;
    for (const Term& t : terms) out.value = std::min(out.value, t.value);
    out.terms = std::move(terms);
    return out;
}

double lem3_i_lhs(double M, const ConstantsInput& in) {
    return in.a * std::pow(M, in.r1) * std::pow(in.u0_sup, in.r1) + in.b * std::pow(M, in.r2);
}

double lem3_i_rhs(double lambda, const ConstantsInput& in) {
    return std::pow(lambda, 1.0 - in.alpha) / std::pow(in.u0_sup, in.alpha);
}

double load_norm(const Field<double>& g, double q) {
    if (g.grid().dim() >= 3) return lorentz_norm(g, static_cast<double>(g.grid().dim()), 1.0);
    return lp_norm(g, q);
}

}  // namespace

void ConstantsInput::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "p must be > 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw Error(ErrorKind::InvalidArgument, "convection coefficients a, b must be finite and >= 0");
    }
    if (!(r1 > p - 1.0) || !(r2 > p - 1.0)) {
        throw Error(ErrorKind::HypothesisViolation, "constant formulas need r1, r2 > p - 1");
    }
    require_finite_positive(u0_sup, "u0_sup");
    if (Cp_hat) require_finite_positive(*Cp_hat, "Cp_hat");
}

bool ConstantsInput::integrability_holds() const {
    const double conjugate = p / (p - 1.0);
    return q > std::max(static_cast<double>(dimension), conjugate) && alpha * q > 0.0 && alpha * q < 1.0;
}

bool ConstantsInput::window_exponent_positive() const { return window_denominator(*this) > 0.0; }

TermMinimum compute_A(const ConstantsInput& in) {
    in.validate();
    std::vector<Term> terms;
    terms.push_back({"A_term_1_r1", growth_term(in, in.r1, in.a * std::pow(in.u0_sup, in.r1 + in.alpha))});
    terms.push_back({"A_term_2_r2", growth_term(in, in.r2, in.b * std::pow(in.u0_sup, in.alpha))});
    terms.push_back({"A_term_3_window", 1.0 / std::pow(2.0, in.alpha / window_denominator(in))});
    terms.push_back({"A_cap", 1.0});
    return minimum_of(std::move(terms));
}

TermMinimum compute_A_star(const ConstantsInput& in) {
    in.validate();
    if (!in.Cp_hat) throw Error(ErrorKind::InvalidArgument, "A* needs the calibrated gradient constant Cp_hat");
    // (C 2^{1/(p-1)})^x is split as C^x 2^{x/(p-1)} so that C = 1 reproduces
    // the A terms bit for bit.
    const double C = *in.Cp_hat;
    const double s = in.u0_sup;
    const TermMinimum a = compute_A(in);
    std::vector<Term> terms;
    terms.push_back({"Astar_term_1", a.terms[0].value});
    terms.push_back({"Astar_term_2", a.terms[1].value});
    terms.push_back({"Astar_term_3", a.terms[2].value});
    auto gradient_term = [&](double r, double coef) {
        if (coef == 0.0) return kInf;
        const double e = 1.0 / growth_denominator(in, r);
        return 1.0 / (std::pow(C, r * (in.p - 1.0) * e) * std::pow(2.0, r * e) * std::pow(2.0 * coef, (in.p - 1.0) * e));
    };
    terms.push_back({"Astar_term_4", gradient_term(in.r1, in.a * std::pow(s, in.r1 + in.alpha))});
    terms.push_back({"Astar_term_5", gradient_term(in.r2, in.b * std::pow(s, in.alpha))});
    const double e3 = window_denominator(in);
    terms.push_back({"Astar_term_6", 1.0 / (std::pow(C, in.alpha * (in.p - 1.0) / e3) * std::pow(2.0, in.alpha / e3))});
    terms.push_back({"Astar_cap", 1.0});
    return minimum_of(std::move(terms));
}

MWindow compute_M_window(double lambda, const ConstantsInput& in) {
    in.validate();
    require_finite_positive(lambda, "lambda");
    const double A = compute_A(in).value;
    if (!(lambda < A)) {
        throw Error(ErrorKind::HypothesisViolation,
                    "lambda must lie below A = " + std::to_string(A) + " for the M window to exist");
    }
    MWindow w;
    const double lower = std::pow(2.0, 1.0 / (in.p - 1.0)) * std::pow(lambda, (1.0 - in.alpha) / (in.p - 1.0));
    auto r_bound = [&](double r, double coef) {
        if (coef == 0.0) return kInf;
        return std::pow(lambda, (1.0 - in.alpha) / r) / std::pow(2.0 * coef, 1.0 / r);
    };
    const double b1 = r_bound(in.r1, in.a * std::pow(in.u0_sup, in.r1 + in.alpha));
    const double b2 = r_bound(in.r2, in.b * std::pow(in.u0_sup, in.alpha));
    const double b3 = std::pow(lambda, (2.0 - in.p) / in.alpha);
    w.terms = {{"lem3_ii_lower", lower}, {"lem3_r1_bound", b1}, {"lem3_r2_bound", b2}, {"lem3_iii_bound", b3}};
    const double upper = std::min({b1, b2, b3});
    if (!(lower < upper)) {
        throw Error(ErrorKind::HypothesisViolation,
                    "empty M window: lower end " + std::to_string(lower) + " exceeds upper end " + std::to_string(upper));
    }
    w.M_lo = lower * (1.0 + kInward);
    w.M_hi = upper * (1.0 - kInward);

    // Solution set of (i) is [0, m] with m the root of lhs = rhs; bisect for it.
    const double rhs = lem3_i_rhs(lambda, in);
    double sharp = kInf;
    if (in.a > 0.0 || in.b > 0.0) {
        double lo = 0.0;
        double hi = std::max(upper, 1.0);
        while (lem3_i_lhs(hi, in) <= rhs) hi *= 2.0;
        for (int it = 0; it < 200 && std::nextafter(lo, kInf) < hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (lem3_i_lhs(mid, in) <= rhs ? lo : hi) = mid;
        }
        sharp = lo;
    }
    w.M_hi_sharp = std::max(w.M_hi, std::min(sharp, b3) * (1.0 - kInward));
    w.terms.push_back({"lem3_i_sharp_bound", sharp});
    return w;
}

Lem3Check check_lem3(double lambda, double M, const ConstantsInput& in) {
    Lem3Check c;
    c.margin_i = lem3_i_rhs(lambda, in) - lem3_i_lhs(M, in);
    c.margin_ii = M - std::pow(2.0, 1.0 / (in.p - 1.0)) * std::pow(lambda, (1.0 - in.alpha) / (in.p - 1.0));
    c.margin_iii = std::pow(lambda, (2.0 - in.p) / in.alpha) - M;
    c.cond_i = c.margin_i >= 0.0;
    c.cond_ii = c.margin_ii >= 0.0;
    c.cond_iii = c.margin_iii >= 0.0;
    return c;
}

double gradient_p_factor(double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be > 1");
    return p < 2.0 ? std::pow(2.0, p / (p - 1.0)) : std::pow(p, 2.5);
}

double gradient_ratio(const Field<double>& g, double p, double q, const CoreConfig& cfg) {
    const double gn = load_norm(g, q);
    if (!(gn > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe load must be nonzero");
    const DirichletSolution<double> sol = solve_dirichlet(g, p, cfg);
    if (!sol.report.converged) throw Error(ErrorKind::BudgetExceeded, "probe solve did not converge");
    const double grad = gradient(sol.u).sup_magnitude();
    return std::pow(grad, p - 1.0) / (gradient_p_factor(p) * gn);
}

GradientCalibration calibrate_gradient_constant(GridPtr<double> grid, double p, double q, int probe_count,
                                                const CoreConfig& cfg, std::uint64_t seed) {
    if (probe_count < 3) throw Error(ErrorKind::InvalidArgument, "calibration needs at least 3 probes");
    if (!(q >= 1.0)) throw Error(ErrorKind::InvalidArgument, "q must be >= 1");
    GradientCalibration out;
    out.p_factor = gradient_p_factor(p);
    out.seed = seed;

    const Field<double> one = Field<double>::sample_dirichlet(grid, [](double, double) { return 1.0; });
    for (int j = 0; j < probe_count; ++j) {
        Field<double> g;
        if (j == 0) {
            g = one;
            out.probe_labels.push_back("constant");
        } else if (j == 1) {
            Field<double> w = solve_dirichlet(one, p, cfg).u;
            w *= 1.0 / sup_norm(w);
            g = w;
            out.probe_labels.push_back("torsion");
        } else {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
            std::uniform_real_distribution<double> dist(0.1, 1.0);
            Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->node_count());
            for (Index node : grid->interior_nodes()) v[node] = dist(rng);
            g = Field<double>(grid, std::move(v));
            out.probe_labels.push_back("random_" + std::to_string(j));
        }
        out.ratios.push_back(gradient_ratio(g, p, q, cfg));
    }
    out.Cp_hat = 2.0 * *std::max_element(out.ratios.begin(), out.ratios.end());
    return out;
}

double tilde_gradient_constant(double C, double p, const Field<double>& u0, double alpha, double q) {
    require_finite_positive(C, "gradient constant");
    const Grid<double>& g = u0.grid();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g.node_count());
    for (Index node : g.interior_nodes()) {
        if (!(u0[node] > 0.0)) throw Error(ErrorKind::InvalidArgument, "u0 must be positive in the interior");
        v[node] = std::pow(u0[node], -alpha);
    }
    const double nrm = lp_norm(Field<double>(u0.grid_ptr(), std::move(v)), q);
    return std::pow(C * gradient_p_factor(p) * nrm, 1.0 / (p - 1.0));
}

ConstantsReport constants_report(const ConstantsInput& in, std::optional<double> lambda) {
    ConstantsReport rep;
    rep.input = in;
    const TermMinimum a = compute_A(in);
    rep.A = a.value;
    rep.terms = a.terms;
    rep.integrability_holds = in.integrability_holds();
    double bound = rep.A;
    if (in.Cp_hat) {
        const TermMinimum as = compute_A_star(in);
        rep.A_star = as.value;
        rep.terms.insert(rep.terms.end(), as.terms.begin(), as.terms.end());
        bound = rep.A_star;
    }
    rep.lambda = lambda ? *lambda : 0.5 * bound;
    if (rep.lambda > 0.0 && rep.lambda < rep.A) {
        try {
            const MWindow w = compute_M_window(rep.lambda, in);
            rep.M_lo = w.M_lo;
            rep.M_hi = w.M_hi;
            rep.M_hi_sharp = w.M_hi_sharp;
            if (in.Cp_hat) rep.M_grad_lo = *in.Cp_hat * w.M_lo;
            rep.terms.insert(rep.terms.end(), w.terms.begin(), w.terms.end());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::HypothesisViolation) throw;
        }
    }
    rep.feasible = rep.lambda < bound && rep.M_lo <= rep.M_hi;
    return rep;
}

}  // namespace plap
