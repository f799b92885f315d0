#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "plap/error.hpp"
#include "plap/grid.hpp"

namespace plap {

/// How boundary nodes enter difference stencils. `Dirichlet` reads them as
/// zero regardless of the stored values; `Nodal` uses the stored values.
enum class BoundaryMode { Dirichlet, Nodal };

/// Nodal scalar function on a grid, boundary nodes included.
template <typename Scalar = double>
class Field {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Field() = default;

    explicit Field(GridPtr<Scalar> grid)
        : grid_(std::move(grid)), values_(Vector::Zero(grid_->node_count())) {}

    Field(GridPtr<Scalar> grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->node_count()) {
            throw Error(ErrorKind::InvalidArgument, "field size does not match the grid node count");
        }
        if (!values_.allFinite()) {
            throw Error(ErrorKind::InvalidArgument, "field values must be finite");
        }
    }

    template <typename F>
    static Field sample(GridPtr<Scalar> grid, F&& f) {
        Vector v(grid->node_count());
        const auto& x = grid->coords();
        for (Index k = 0; k < v.size(); ++k) {
            v[k] = grid->dim() == 1 ? f(x(k, 0), Scalar(0)) : f(x(k, 0), x(k, 1));
        }
        return Field(std::move(grid), std::move(v));
    }

    /// Same as `sample`, then zeroes the boundary layer.
    template <typename F>
    static Field sample_dirichlet(GridPtr<Scalar> grid, F&& f) {
        Field u = sample(std::move(grid), std::forward<F>(f));
        u.clamp_boundary();
        return u;
    }

    static Field constant(GridPtr<Scalar> grid, Scalar c) {
        Vector v = Vector::Constant(grid->node_count(), c);
        return Field(std::move(grid), std::move(v));
    }

    const Grid<Scalar>& grid() const { return *grid_; }
    const GridPtr<Scalar>& grid_ptr() const { return grid_; }
    const Vector& values() const { return values_; }
    Vector& values() { return values_; }
    Index size() const { return values_.size(); }
    Scalar operator[](Index k) const { return values_[k]; }
    Scalar& operator[](Index k) { return values_[k]; }

    bool is_dirichlet() const {
        for (Index k = 0; k < values_.size(); ++k) {
            if (grid_->is_boundary(k) && values_[k] != Scalar(0)) return false;
        }
        return true;
    }

    void clamp_boundary() {
        for (Index k = 0; k < values_.size(); ++k) {
            if (grid_->is_boundary(k)) values_[k] = Scalar(0);
        }
    }

    Scalar interior_min() const {
        Scalar m = std::numeric_limits<Scalar>::infinity();
        for (Index node : grid_->interior_nodes()) m = std::min(m, values_[node]);
        return m;
    }

    Field& operator+=(const Field& o) { check_same(o); values_ += o.values_; return *this; }
    Field& operator-=(const Field& o) { check_same(o); values_ -= o.values_; return *this; }
    Field& operator*=(Scalar c) { values_ *= c; return *this; }

    void check_same(const Field& o) const {
        if (grid_ != o.grid_ && !grid_->same_layout(*o.grid_)) {
            throw Error(ErrorKind::GridMismatch, "fields live on different grids");
        }
    }

private:
    GridPtr<Scalar> grid_;
    Vector values_;
};

template <typename Scalar>
Field<Scalar> operator+(Field<Scalar> a, const Field<Scalar>& b) { return a += b; }
template <typename Scalar>
Field<Scalar> operator-(Field<Scalar> a, const Field<Scalar>& b) { return a -= b; }
template <typename Scalar>
Field<Scalar> operator*(Scalar c, Field<Scalar> a) { return a *= c; }
template <typename Scalar>
Field<Scalar> operator*(Field<Scalar> a, Scalar c) { return a *= c; }

/// Sup-distance between two fields on matching grids.
template <typename Scalar>
Scalar sup_distance(const Field<Scalar>& a, const Field<Scalar>& b) {
    a.check_same(b);
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

/// Per-cell gradient reconstructed at cell centers. Rows are cells, columns
/// are axes. Cell (ci, cj) has flat index ci * cells_along(1) + cj.
template <typename Scalar = double>
struct GradientField {
    GridPtr<Scalar> grid;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cell_values;

    Scalar sup_magnitude() const {
        if (cell_values.rows() == 0) return Scalar(0);
        return cell_values.rowwise().norm().maxCoeff();
    }
};

namespace detail {

template <typename Scalar>
inline Scalar node_value(const Field<Scalar>& u, Index node, BoundaryMode mode) {
    if (mode == BoundaryMode::Dirichlet && u.grid().is_boundary(node)) return Scalar(0);
    return u[node];
}

}  // namespace detail

/// Cell-centered differences. In 1D the cell between nodes c and c+1 gets
/// (u[c+1] - u[c]) / h; in 2D each component averages the two parallel
/// edge differences of the cell.
template <typename Scalar>
GradientField<Scalar> gradient(const Field<Scalar>& u, BoundaryMode mode = BoundaryMode::Dirichlet) {
    const Grid<Scalar>& g = u.grid();
    GradientField<Scalar> out{u.grid_ptr(), {}};
    out.cell_values.resize(g.cell_count(), g.dim());
    auto val = [&](Index node) { return detail::node_value(u, node, mode); };
    if (g.dim() == 1) {
        const Scalar inv_h = Scalar(1) / g.spacing(0);
        for (Index c = 0; c < g.cell_count(); ++c) {
            out.cell_values(c, 0) = (val(c + 1) - val(c)) * inv_h;
        }
        return out;
    }
    const Scalar half_inv_hx = Scalar(0.5) / g.spacing(0);
    const Scalar half_inv_hy = Scalar(0.5) / g.spacing(1);
    const Index cy = g.cells_along(1);
    for (Index ci = 0; ci < g.cells_along(0); ++ci) {
        for (Index cj = 0; cj < cy; ++cj) {
            const Scalar a = val(g.node_index(ci, cj));
            const Scalar b = val(g.node_index(ci + 1, cj));
            const Scalar c = val(g.node_index(ci, cj + 1));
            const Scalar d = val(g.node_index(ci + 1, cj + 1));
            const Index cell = ci * cy + cj;
            out.cell_values(cell, 0) = ((b - a) + (d - c)) * half_inv_hx;
            out.cell_values(cell, 1) = ((c - a) + (d - b)) * half_inv_hy;
        }
    }
    return out;
}

/// Gradient magnitude at nodes: the average of the adjacent cell-gradient
/// vectors, then its Euclidean length. Used to evaluate gradient-dependent
/// right-hand sides nodewise.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodal_gradient_norm(const Field<Scalar>& u,
                                                             BoundaryMode mode = BoundaryMode::Dirichlet) {
    const Grid<Scalar>& g = u.grid();
    const GradientField<Scalar> grad = gradient(u, mode);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(g.node_count());
    if (g.dim() == 1) {
        const Index cells = g.cell_count();
        for (Index k = 0; k < g.node_count(); ++k) {
            Scalar sum = 0;
            int count = 0;
            if (k - 1 >= 0) { sum += grad.cell_values(k - 1, 0); ++count; }
            if (k < cells) { sum += grad.cell_values(k, 0); ++count; }
            out[k] = std::abs(sum / static_cast<Scalar>(count));
        }
        return out;
    }
    const Index cx = g.cells_along(0);
    const Index cy = g.cells_along(1);
    for (Index i = 0; i < g.nodes_along(0); ++i) {
        for (Index j = 0; j < g.nodes_along(1); ++j) {
            Scalar sx = 0, sy = 0;
            int count = 0;
            for (Index ci = i - 1; ci <= i; ++ci) {
                for (Index cj = j - 1; cj <= j; ++cj) {
                    if (ci < 0 || cj < 0 || ci >= cx || cj >= cy) continue;
                    sx += grad.cell_values(ci * cy + cj, 0);
                    sy += grad.cell_values(ci * cy + cj, 1);
                    ++count;
                }
            }
            sx /= static_cast<Scalar>(count);
            sy /= static_cast<Scalar>(count);
            out[g.node_index(i, j)] = std::sqrt(sx * sx + sy * sy);
        }
    }
    return out;
}

}  // namespace plap
