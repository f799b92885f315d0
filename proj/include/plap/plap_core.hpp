#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/norms.hpp"

namespace plap {

/// Smoothing of the energy density. Small enough that the regularized
/// operator keeps the (p-1)-homogeneity to ~1e-10 relative for p < 2.
inline constexpr double kDefaultDeltaReg = 1e-14;

struct CoreConfig {
    double delta_reg = kDefaultDeltaReg;  // added to |grad u|^2 inside the energy density
    double tol = 1e-10;
    int max_iter = 200;
    double armijo = 1e-4;

    void validate() const {
        if (!(delta_reg >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta_reg must be >= 0");
        if (!(tol >= 1e-14)) throw Error(ErrorKind::InvalidArgument, "tol must be >= 1e-14");
        if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
        if (!(armijo > 0.0 && armijo < 0.5)) {
            throw Error(ErrorKind::InvalidArgument, "armijo factor must lie in (0, 0.5)");
        }
    }
};

struct SolveReport {
    int iterations = 0;
    double final_residual_sup = 0.0;
    double energy = 0.0;
    double sup_norm = 0.0;
    double grad_sup_norm = 0.0;
    bool converged = false;
    /// Module-specific diagnostics (Cauchy increments, bound constants...).
    std::map<std::string, double> extras;
};

template <typename Scalar = double>
struct DirichletSolution {
    Field<Scalar> u;
    SolveReport report;
};

template <typename Scalar = double>
struct Eigenpair {
    Scalar lambda1 = 0;
    Field<Scalar> phi1;
    SolveReport report;
};

namespace detail {

/// Corner nodes of one cell with the gradient weights of each corner.
template <typename Scalar>
struct CellStencil {
    int count = 0;
    std::array<Index, 4> nodes{};
    std::array<Scalar, 4> bx{};
    std::array<Scalar, 4> by{};
};

template <typename Scalar, typename F>
void for_each_cell(const Grid<Scalar>& g, F&& f) {
    CellStencil<Scalar> st;
    if (g.dim() == 1) {
        const Scalar inv_h = Scalar(1) / g.spacing(0);
        st.count = 2;
        st.bx = {-inv_h, inv_h, 0, 0};
        for (Index c = 0; c < g.cell_count(); ++c) {
            st.nodes = {c, c + 1, 0, 0};
            f(c, st);
        }
        return;
    }
    const Scalar hx = Scalar(0.5) / g.spacing(0);
    const Scalar hy = Scalar(0.5) / g.spacing(1);
    st.count = 4;
    st.bx = {-hx, hx, -hx, hx};
    st.by = {-hy, -hy, hy, hy};
    const Index cy = g.cells_along(1);
    for (Index ci = 0; ci < g.cells_along(0); ++ci) {
        for (Index cj = 0; cj < cy; ++cj) {
            st.nodes = {g.node_index(ci, cj), g.node_index(ci + 1, cj), g.node_index(ci, cj + 1),
                        g.node_index(ci + 1, cj + 1)};
            f(ci * cy + cj, st);
        }
    }
}

}  // namespace detail

/// Discrete p-Laplacian built as the exact gradient of
///   J(u) = sum_cells |cell| (1/p) (|G_c u|^2 + delta)^{p/2} - sum_interior h^d g_i u_i,
/// where G_c is the cell-centered gradient. Interior nodes carry measure h^d,
/// equal to the cell measure, so the operator is the raw energy gradient.
template <typename Scalar = double>
class PLaplacian {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Sparse = Eigen::SparseMatrix<Scalar>;

    PLaplacian(GridPtr<Scalar> grid, Scalar p, Scalar delta, BoundaryMode mode = BoundaryMode::Dirichlet)
        : grid_(std::move(grid)), p_(p), delta_(delta), mode_(mode) {
        if (!(p > Scalar(1)) || !std::isfinite(p)) {
            throw Error(ErrorKind::InvalidArgument, "p must satisfy 1 < p < infinity");
        }
        if (!(delta >= Scalar(0))) throw Error(ErrorKind::InvalidArgument, "delta_reg must be >= 0");
    }

    const Grid<Scalar>& grid() const { return *grid_; }
    Scalar p() const { return p_; }
    Scalar delta() const { return delta_; }

    /// Gradient-part energy sum_cells |cell| (1/p)(|G|^2 + delta)^{p/2}.
    Scalar gradient_energy(const Field<Scalar>& u) const {
        const Grid<Scalar>& g = *grid_;
        const Scalar cell = g.cell_measure();
        Scalar sum = 0;
        detail::for_each_cell(g, [&](Index, const detail::CellStencil<Scalar>& st) {
            const auto [gx, gy] = cell_gradient(u, st);
            sum += std::pow(gx * gx + gy * gy + delta_, p_ / Scalar(2));
        });
        return cell * sum / p_;
    }

    Scalar energy(const Field<Scalar>& u, const Field<Scalar>& g) const {
        const Grid<Scalar>& gr = *grid_;
        const Scalar w = gr.cell_measure();
        Scalar load = 0;
        for (Index node : gr.interior_nodes()) load += g[node] * u[node];
        return gradient_energy(u) - w * load;
    }

    /// Energy gradient divided by the interior node measure; zero on the
    /// boundary layer.
    Field<Scalar> apply(const Field<Scalar>& u) const {
        Field<Scalar> out(grid_);
        auto& v = out.values();
        detail::for_each_cell(*grid_, [&](Index, const detail::CellStencil<Scalar>& st) {
            const auto [gx, gy] = cell_gradient(u, st);
            const Scalar a = flux_coefficient(gx * gx + gy * gy);
            const Scalar fx = a * gx;
            const Scalar fy = a * gy;
            for (int k = 0; k < st.count; ++k) {
                v[st.nodes[k]] += fx * st.bx[k] + fy * st.by[k];
            }
        });
        for (Index k = 0; k < v.size(); ++k) {
            if (grid_->is_boundary(k)) v[k] = Scalar(0);
        }
        return out;
    }

    /// Hessian of the energy over interior unknowns, divided by the node measure.
    Sparse hessian(const Field<Scalar>& u) const {
        const Grid<Scalar>& g = *grid_;
        std::vector<Eigen::Triplet<Scalar>> trip;
        trip.reserve(static_cast<std::size_t>(g.cell_count()) * (g.dim() == 1 ? 4 : 16));
        const Scalar half_p = p_ / Scalar(2);
        detail::for_each_cell(g, [&](Index, const detail::CellStencil<Scalar>& st) {
            const auto [gx, gy] = cell_gradient(u, st);
            const Scalar s = gx * gx + gy * gy + delta_;
            Scalar a = 0, b = 0;
            if (s > Scalar(0)) {
                a = std::pow(s, half_p - Scalar(1));
                b = (p_ - Scalar(2)) * std::pow(s, half_p - Scalar(2));
            }
            // H_G = a I + b G G^T
            const Scalar hxx = a + b * gx * gx;
            const Scalar hxy = b * gx * gy;
            const Scalar hyy = a + b * gy * gy;
            for (int r = 0; r < st.count; ++r) {
                const Index ur = g.unknown_of(st.nodes[r]);
                if (ur < 0) continue;
                for (int c = 0; c < st.count; ++c) {
                    const Index uc = g.unknown_of(st.nodes[c]);
                    if (uc < 0) continue;
                    const Scalar val = st.bx[r] * (hxx * st.bx[c] + hxy * st.by[c]) +
                                       st.by[r] * (hxy * st.bx[c] + hyy * st.by[c]);
                    trip.emplace_back(ur, uc, val);
                }
            }
        });
        Sparse h(g.unknown_count(), g.unknown_count());
        h.setFromTriplets(trip.begin(), trip.end());
        return h;
    }

private:
    std::pair<Scalar, Scalar> cell_gradient(const Field<Scalar>& u, const detail::CellStencil<Scalar>& st) const {
        Scalar gx = 0, gy = 0;
        for (int k = 0; k < st.count; ++k) {
            const Scalar val = detail::node_value(u, st.nodes[k], mode_);
            gx += st.bx[k] * val;
            gy += st.by[k] * val;
        }
        return {gx, gy};
    }

    Scalar flux_coefficient(Scalar grad_sq) const {
        const Scalar s = grad_sq + delta_;
        if (s == Scalar(0)) return Scalar(0);
        if (p_ == Scalar(2)) return Scalar(1);
        return std::pow(s, p_ / Scalar(2) - Scalar(1));
    }

    GridPtr<Scalar> grid_;
    Scalar p_;
    Scalar delta_;
    BoundaryMode mode_;
};

template <typename Scalar>
Scalar discrete_energy(const Field<Scalar>& u, const Field<Scalar>& g, Scalar p, Scalar delta_reg) {
    u.check_same(g);
    return PLaplacian<Scalar>(u.grid_ptr(), p, delta_reg).energy(u, g);
}

template <typename Scalar>
Field<Scalar> apply_plap(const Field<Scalar>& u, Scalar p, Scalar delta_reg = Scalar(0),
                         BoundaryMode mode = BoundaryMode::Dirichlet) {
    return PLaplacian<Scalar>(u.grid_ptr(), p, delta_reg, mode).apply(u);
}

namespace detail {

template <typename Scalar>
Scalar interior_sup(const Field<Scalar>& f) {
    Scalar m = 0;
    for (Index node : f.grid().interior_nodes()) m = std::max(m, std::abs(f[node]));
    return m;
}

template <typename Scalar>
struct NewtonOutcome {
    int iterations = 0;
    Scalar residual = 0;
    bool converged = false;
};

/// Damped Newton with Armijo backtracking on one fixed-delta energy.
/// Near convergence the energy decrease drops below rounding; then a full
/// step is accepted whenever it lowers the residual.
template <typename Scalar>
NewtonOutcome<Scalar> newton_minimize(const PLaplacian<Scalar>& op, const Field<Scalar>& g, Field<Scalar>& u,
                                      const CoreConfig& cfg, int budget) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Grid<Scalar>& gr = op.grid();
    const auto& interior = gr.interior_nodes();
    const Index nu = gr.unknown_count();
    const Scalar target = static_cast<Scalar>(cfg.tol) * (Scalar(1) + interior_sup(g));
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar w = gr.cell_measure();

    auto residual_of = [&](const Field<Scalar>& v) {
        Field<Scalar> r = op.apply(v);
        Vector out(nu);
        for (Index k = 0; k < nu; ++k) {
            const Index node = interior[static_cast<std::size_t>(k)];
            out[k] = r[node] - g[node];
        }
        return out;
    };
    auto step = [&](const Field<Scalar>& v, const Vector& dir, Scalar t) {
        Field<Scalar> out = v;
        for (Index k = 0; k < nu; ++k) out[interior[static_cast<std::size_t>(k)]] += t * dir[k];
        return out;
    };

    NewtonOutcome<Scalar> outcome;
    Vector r = residual_of(u);
    Scalar res = r.size() ? r.cwiseAbs().maxCoeff() : Scalar(0);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt;
    bool analyzed = false;

    for (int it = 0; it < budget; ++it) {
        if (res <= target) {
            outcome.converged = true;
            break;
        }
        const auto h = op.hessian(u);
        if (!analyzed) {
            ldlt.analyzePattern(h);
            analyzed = true;
        }
        ldlt.factorize(h);
        Vector dir;
        bool newton = false;
        if (ldlt.info() == Eigen::Success) {
            dir = -ldlt.solve(r);
            newton = dir.allFinite() && r.dot(dir) < Scalar(0);
        }
        if (!newton) dir = -r;

        const Scalar j0 = op.energy(u, g);
        const Scalar slope = w * r.dot(dir);
        Scalar t = 1;
        bool accepted = false;
        Field<Scalar> trial = u;
        for (int ls = 0; ls < 60; ++ls) {
            trial = step(u, dir, t);
            const Scalar j1 = op.energy(trial, g);
            if (j1 <= j0 + static_cast<Scalar>(cfg.armijo) * t * slope) {
                accepted = true;
                break;
            }
            // Energy change below rounding: fall back to a residual test.
            if (std::abs(t * slope) <= Scalar(1e3) * eps * std::abs(j0)) {
                const Vector rt = residual_of(trial);
                if (rt.cwiseAbs().maxCoeff() < res) accepted = true;
                break;
            }
            t *= Scalar(0.5);
        }
        ++outcome.iterations;
        if (!accepted) break;

        const Scalar moved = t * dir.cwiseAbs().maxCoeff();
        u = std::move(trial);
        r = residual_of(u);
        res = r.cwiseAbs().maxCoeff();
        const Scalar scale = sup_norm(u);
        if (newton && t == Scalar(1) && moved <= Scalar(16) * eps * scale) {
            // Rounding floor of the residual evaluation has been reached.
            outcome.converged = res <= target || moved <= Scalar(16) * eps * scale;
            break;
        }
    }
    outcome.residual = res;
    if (res <= target) outcome.converged = true;
    return outcome;
}

template <typename Scalar>
void fill_report(SolveReport& rep, const PLaplacian<Scalar>& op, const Field<Scalar>& u, const Field<Scalar>& g) {
    rep.energy = static_cast<double>(op.energy(u, g));
    rep.sup_norm = static_cast<double>(sup_norm(u));
    rep.grad_sup_norm = static_cast<double>(gradient(u).sup_magnitude());
}

}  // namespace detail

/// Minimizes the discrete energy for -Delta_p u = g with zero boundary data.
///
/// Runs damped Newton at the configured delta_reg, starting from `init` or
/// from the p = 2 solution with the same load; for p >= 2 a final pass at
/// delta_reg = 0 removes the regularization. For p < 2 a warm start gets
/// one short Newton run; if that stalls it is dropped and delta is walked
/// down from 1e-2 starting at the p = 2 solution. Nonconvergence is reported
/// through `report.converged`, the returned field is the best iterate.
template <typename Scalar>
DirichletSolution<Scalar> solve_dirichlet(const Field<Scalar>& g, Scalar p, const CoreConfig& cfg,
                                          const Field<Scalar>* init = nullptr) {
    cfg.validate();
    if (!(p > Scalar(1)) || !std::isfinite(p)) {
        throw Error(ErrorKind::InvalidArgument, "p must satisfy 1 < p < infinity");
    }
    if (!g.values().allFinite()) throw Error(ErrorKind::InvalidArgument, "right-hand side must be finite");

    Field<Scalar> u(g.grid_ptr());
    if (init != nullptr) {
        g.check_same(*init);
        u = *init;
        u.clamp_boundary();
    } else if (p != Scalar(2)) {
        CoreConfig linear = cfg;
        u = solve_dirichlet<Scalar>(g, Scalar(2), linear).u;
    }

    const Scalar delta = static_cast<Scalar>(cfg.delta_reg);
    DirichletSolution<Scalar> sol{u, {}};
    int used = 0;
    PLaplacian<Scalar> op(g.grid_ptr(), p, delta);
    detail::NewtonOutcome<Scalar> first;
    bool done = false;
    if (p < Scalar(2) && init != nullptr) {
        // A good warm start usually lands in Newton's region directly.
        Field<Scalar> trial = sol.u;
        first = detail::newton_minimize(op, g, trial, cfg, std::min(cfg.max_iter, 30));
        used += first.iterations;
        if (first.converged) {
            sol.u = std::move(trial);
            done = true;
        }
    }
    if (p < Scalar(2) && !done) {
        if (init != nullptr) sol.u = solve_dirichlet<Scalar>(g, Scalar(2), cfg).u;
        // For p < 2 the flux is only Lipschitz on the scale sqrt(delta), so
        // Newton's quadratic region shrinks with delta. Walk delta down from a
        // coarse value; each stage starts inside the next one's region.
        CoreConfig loose = cfg;
        loose.tol = std::max(cfg.tol, 1e-8);
        for (Scalar d = Scalar(1e-2); d > delta * Scalar(10); d *= Scalar(1e-2)) {
            PLaplacian<Scalar> stage(g.grid_ptr(), p, d);
            used += detail::newton_minimize(stage, g, sol.u, loose, cfg.max_iter).iterations;
        }
    }
    if (!done) {
        first = detail::newton_minimize(op, g, sol.u, cfg, std::max(1, cfg.max_iter - used));
        used += first.iterations;
    }
    bool converged = first.converged;
    Scalar residual = first.residual;
    PLaplacian<Scalar> final_op = op;

    if (p > Scalar(2) && delta > Scalar(0)) {
        PLaplacian<Scalar> exact(g.grid_ptr(), p, Scalar(0));
        Field<Scalar> polished = sol.u;
        auto second = detail::newton_minimize(exact, g, polished, cfg, std::max(1, cfg.max_iter - used));
        if (polished.values().allFinite()) {
            sol.u = std::move(polished);
            converged = second.converged;
            residual = second.residual;
            final_op = exact;
        }
        used += second.iterations;
    }

    sol.report.iterations = used;
    sol.report.converged = converged;
    sol.report.final_residual_sup = static_cast<double>(residual);
    detail::fill_report(sol.report, final_op, sol.u, g);
    return sol;
}

/// Discrete Rayleigh quotient ||grad u||_p^p / ||u||_p^p.
template <typename Scalar>
Scalar rayleigh_quotient(const Field<Scalar>& u, Scalar p) {
    const Scalar num = PLaplacian<Scalar>(u.grid_ptr(), p, Scalar(0)).gradient_energy(u) * p;
    const auto& w = u.grid().node_measure();
    Scalar den = 0;
    for (Index k = 0; k < u.size(); ++k) den += w[k] * std::pow(std::abs(u[k]), p);
    return num / den;
}

/// First eigenpair by normalized inverse iteration: u <- S(u^{p-1}) followed
/// by sup-normalization, starting from the torsion function. Stops when
/// successive Rayleigh quotients agree to cfg.tol relatively.
template <typename Scalar>
Eigenpair<Scalar> solve_eigenpair(GridPtr<Scalar> grid, Scalar p, const CoreConfig& cfg) {
    cfg.validate();
    Field<Scalar> ones = Field<Scalar>::constant(grid, Scalar(1));
    ones.clamp_boundary();
    auto torsion = solve_dirichlet<Scalar>(ones, p, cfg);
    Field<Scalar> u = torsion.u;
    u.values() /= sup_norm(u);

    Eigenpair<Scalar> out;
    Scalar lambda = rayleigh_quotient(u, p);
    int total = torsion.report.iterations;
    bool converged = false;
    int outer = 0;
    for (; outer < cfg.max_iter; ++outer) {
        Field<Scalar> load(grid);
        for (Index node : grid->interior_nodes()) load[node] = std::pow(u[node], p - Scalar(1));
        auto next = solve_dirichlet<Scalar>(load, p, cfg, &u);
        total += next.report.iterations;
        u = std::move(next.u);
        // Positive load keeps the solution positive; clip rounding noise.
        for (Index node : grid->interior_nodes()) u[node] = std::max(u[node], Scalar(0));
        u.values() /= sup_norm(u);
        const Scalar updated = rayleigh_quotient(u, p);
        const bool done = std::abs(updated - lambda) <= static_cast<Scalar>(cfg.tol) * std::abs(updated);
        lambda = updated;
        if (done) {
            converged = true;
            ++outer;
            break;
        }
    }
    out.lambda1 = lambda;
    out.phi1 = u;
    out.report.iterations = total;
    out.report.converged = converged;
    Field<Scalar> eig_load(grid);
    for (Index node : grid->interior_nodes()) eig_load[node] = lambda * std::pow(u[node], p - Scalar(1));
    const Scalar delta = p < Scalar(2) ? static_cast<Scalar>(cfg.delta_reg) : Scalar(0);
    const Field<Scalar> lhs = apply_plap(u, p, delta);
    out.report.final_residual_sup = static_cast<double>(detail::interior_sup(lhs - eig_load));
    out.report.sup_norm = 1.0;
    out.report.grad_sup_norm = static_cast<double>(gradient(u).sup_magnitude());
    out.report.energy = static_cast<double>(PLaplacian<Scalar>(grid, p, Scalar(0)).gradient_energy(u));
    out.report.extras["outer_iterations"] = outer;
    return out;
}

}  // namespace plap
