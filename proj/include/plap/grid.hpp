#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "plap/error.hpp"

namespace plap {

using Index = Eigen::Index;

template <typename Scalar>
struct Interval {
    Scalar lo;
    Scalar hi;
};

/// Uniform tensor grid on an interval or an axis-aligned rectangle.
///
/// Nodes include the boundary layer explicitly. Along axis k there are
/// n[k] interior nodes and n[k] + 2 nodes in total, with spacing
/// h[k] = (hi[k] - lo[k]) / (n[k] + 1). Node (i, j) has flat index
/// i * (n[1] + 2) + j, so flat order is lexicographic in (x, y).
template <typename Scalar = double>
class Grid {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Coords = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    int dim() const { return dim_; }
    Scalar lo(int k) const { return extent_[k].lo; }
    Scalar hi(int k) const { return extent_[k].hi; }
    Index interior_count(int k) const { return n_[k]; }
    Index nodes_along(int k) const { return n_[k] + 2; }
    Index cells_along(int k) const { return n_[k] + 1; }
    Scalar spacing(int k) const { return h_[k]; }
    Scalar max_spacing() const { return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]); }

    Index node_count() const { return coords_.rows(); }
    Index cell_count() const {
        return dim_ == 1 ? cells_along(0) : cells_along(0) * cells_along(1);
    }
    Index unknown_count() const { return static_cast<Index>(interior_.size()); }

    Index node_index(Index i, Index j = 0) const {
        return dim_ == 1 ? i : i * nodes_along(1) + j;
    }

    const Coords& coords() const { return coords_; }
    const Eigen::Array<bool, Eigen::Dynamic, 1>& boundary_mask() const { return boundary_; }
    bool is_boundary(Index node) const { return boundary_[node]; }
    const Vector& dist() const { return dist_; }

    /// Measure of the dual cell of each node intersected with the domain.
    /// Interior nodes carry the full cell measure, boundary nodes a half
    /// (or quarter at corners), so the weights sum to |domain|.
    const Vector& node_measure() const { return node_measure_; }
    Scalar cell_measure() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
    Scalar measure() const {
        Scalar m = extent_[0].hi - extent_[0].lo;
        if (dim_ == 2) m *= extent_[1].hi - extent_[1].lo;
        return m;
    }

    /// Flat indices of interior nodes, ascending.
    const std::vector<Index>& interior_nodes() const { return interior_; }
    /// Unknown number of a node, or -1 on the boundary.
    Index unknown_of(Index node) const { return unknown_[static_cast<std::size_t>(node)]; }

    bool same_layout(const Grid& other) const {
        if (dim_ != other.dim_) return false;
        for (int k = 0; k < dim_; ++k) {
            if (n_[k] != other.n_[k] || extent_[k].lo != other.extent_[k].lo ||
                extent_[k].hi != other.extent_[k].hi) {
                return false;
            }
        }
        return true;
    }

    template <typename S>
    friend std::shared_ptr<const Grid<S>> build_grid(int, const std::vector<Interval<S>>&,
                                                     const std::vector<Index>&);

private:
    Grid() = default;

    int dim_ = 1;
    std::array<Interval<Scalar>, 2> extent_{};
    std::array<Index, 2> n_{0, 0};
    std::array<Scalar, 2> h_{0, 0};
    Coords coords_;
    Eigen::Array<bool, Eigen::Dynamic, 1> boundary_;
    Vector dist_;
    Vector node_measure_;
    std::vector<Index> interior_;
    std::vector<Index> unknown_;
};

template <typename Scalar = double>
using GridPtr = std::shared_ptr<const Grid<Scalar>>;

template <typename Scalar>
std::shared_ptr<const Grid<Scalar>> build_grid(int dim, const std::vector<Interval<Scalar>>& extent,
                                               const std::vector<Index>& n) {
    if (dim != 1 && dim != 2) {
        throw Error(ErrorKind::InvalidDomain, "grid dimension must be 1 or 2");
    }
    if (static_cast<int>(extent.size()) != dim || static_cast<int>(n.size()) != dim) {
        throw Error(ErrorKind::InvalidDomain, "extent and node counts must match the dimension");
    }
    std::shared_ptr<Grid<Scalar>> g(new Grid<Scalar>());
    g->dim_ = dim;
    for (int k = 0; k < dim; ++k) {
        if (n[k] < 2) {
            std::ostringstream msg;
            msg << "axis " << k << " needs at least 2 interior nodes, got " << n[k];
            throw Error(ErrorKind::InvalidDomain, msg.str());
        }
        if (!(extent[k].hi > extent[k].lo) || !std::isfinite(extent[k].lo) ||
            !std::isfinite(extent[k].hi)) {
            std::ostringstream msg;
            msg << "axis " << k << " has a degenerate extent";
            throw Error(ErrorKind::InvalidDomain, msg.str());
        }
        g->extent_[k] = extent[k];
        g->n_[k] = n[k];
        g->h_[k] = (extent[k].hi - extent[k].lo) / static_cast<Scalar>(n[k] + 1);
    }

    const Index mx = g->nodes_along(0);
    const Index my = dim == 2 ? g->nodes_along(1) : 1;
    const Index count = mx * my;
    g->coords_.resize(count, dim);
    g->boundary_.resize(count);
    g->dist_.resize(count);
    g->node_measure_.resize(count);
    g->unknown_.assign(static_cast<std::size_t>(count), -1);

    auto axis_coord = [&](int k, Index i) -> Scalar {
        // Endpoints are pinned so boundary nodes sit exactly on the boundary.
        if (i == 0) return g->extent_[k].lo;
        if (i == g->nodes_along(k) - 1) return g->extent_[k].hi;
        return g->extent_[k].lo + static_cast<Scalar>(i) * g->h_[k];
    };
    auto axis_dist = [&](int k, Index i) -> Scalar {
        const Scalar x = axis_coord(k, i);
        return std::min(x - g->extent_[k].lo, g->extent_[k].hi - x);
    };
    auto axis_weight = [&](int k, Index i) -> Scalar {
        const bool edge = (i == 0 || i == g->nodes_along(k) - 1);
        return edge ? g->h_[k] / Scalar(2) : g->h_[k];
    };

    Index unknown = 0;
    for (Index i = 0; i < mx; ++i) {
        for (Index j = 0; j < my; ++j) {
            const Index node = g->node_index(i, j);
            g->coords_(node, 0) = axis_coord(0, i);
            bool boundary = (i == 0 || i == mx - 1);
            Scalar d = axis_dist(0, i);
            Scalar w = axis_weight(0, i);
            if (dim == 2) {
                g->coords_(node, 1) = axis_coord(1, j);
                boundary = boundary || j == 0 || j == my - 1;
                d = std::min(d, axis_dist(1, j));
                w *= axis_weight(1, j);
            }
            g->boundary_[node] = boundary;
            g->dist_[node] = boundary ? Scalar(0) : d;
            g->node_measure_[node] = w;
            if (!boundary) {
                g->interior_.push_back(node);
                g->unknown_[static_cast<std::size_t>(node)] = unknown++;
            }
        }
    }
    return g;
}

/// Convenience overload for the unit interval family.
template <typename Scalar = double>
std::shared_ptr<const Grid<Scalar>> build_interval(Scalar lo, Scalar hi, Index n) {
    return build_grid<Scalar>(1, {{lo, hi}}, {n});
}

template <typename Scalar = double>
std::shared_ptr<const Grid<Scalar>> build_rectangle(Interval<Scalar> x, Interval<Scalar> y,
                                                    Index nx, Index ny) {
    return build_grid<Scalar>(2, {x, y}, {nx, ny});
}

}  // namespace plap
