#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "plap/error.hpp"
#include "plap/field.hpp"

namespace plap {

struct NormKind {
    enum class Type { Sup, Lp, W1pSeminorm };
    Type type = Type::Sup;
    double p = 2.0;

    static NormKind sup() { return {Type::Sup, 0.0}; }
    static NormKind lp(double p) { return {Type::Lp, p}; }
    static NormKind w1p(double p) { return {Type::W1pSeminorm, p}; }
};

template <typename Scalar>
Scalar sup_norm(const Field<Scalar>& u) {
    return u.size() == 0 ? Scalar(0) : u.values().cwiseAbs().maxCoeff();
}

/// Node-weighted rectangle rule with dual-cell weights.
template <typename Scalar>
Scalar lp_norm(const Field<Scalar>& u, Scalar p) {
    if (!(p >= Scalar(1))) throw Error(ErrorKind::InvalidArgument, "Lp norm needs p >= 1");
    const auto& w = u.grid().node_measure();
    Scalar sum = 0;
    for (Index k = 0; k < u.size(); ++k) sum += w[k] * std::pow(std::abs(u[k]), p);
    return std::pow(sum, Scalar(1) / p);
}

/// Midpoint rule over cells of |grad u|^p, boundary values taken as stored.
template <typename Scalar>
Scalar w1p_seminorm(const Field<Scalar>& u, Scalar p) {
    if (!(p >= Scalar(1))) throw Error(ErrorKind::InvalidArgument, "W1p seminorm needs p >= 1");
    const GradientField<Scalar> grad = gradient(u, BoundaryMode::Nodal);
    const Scalar cell = u.grid().cell_measure();
    Scalar sum = 0;
    for (Index c = 0; c < grad.cell_values.rows(); ++c) {
        sum += cell * std::pow(grad.cell_values.row(c).norm(), p);
    }
    return std::pow(sum, Scalar(1) / p);
}

template <typename Scalar>
Scalar norm(const Field<Scalar>& u, NormKind kind) {
    switch (kind.type) {
        case NormKind::Type::Sup: return sup_norm(u);
        case NormKind::Type::Lp: return lp_norm(u, static_cast<Scalar>(kind.p));
        case NormKind::Type::W1pSeminorm: return w1p_seminorm(u, static_cast<Scalar>(kind.p));
    }
    return Scalar(0);
}

/// Decreasing rearrangement of |u| as a step function on [0, |domain|].
/// Each node contributes a step of height |u_k| and width equal to its
/// node measure; ties keep node order.
template <typename Scalar>
struct Rearrangement {
    std::vector<Scalar> heights;
    std::vector<Scalar> widths;
};

template <typename Scalar>
Rearrangement<Scalar> decreasing_rearrangement(const Field<Scalar>& u) {
    const Index count = u.size();
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(u[a]) > std::abs(u[b]);
    });
    Rearrangement<Scalar> r;
    r.heights.reserve(order.size());
    r.widths.reserve(order.size());
    const auto& w = u.grid().node_measure();
    for (Index k : order) {
        r.heights.push_back(std::abs(u[k]));
        r.widths.push_back(w[k]);
    }
    return r;
}

/// Lorentz L^{pl,ql} norm evaluated exactly on the rearranged step function:
/// each step [t0, t1) contributes height^ql * (pl/ql) * (t1^s - t0^s) with
/// s = ql / pl.
template <typename Scalar>
Scalar lorentz_norm(const Field<Scalar>& u, Scalar pl, Scalar ql) {
    if (!(pl > Scalar(1)) || !std::isfinite(pl)) {
        throw Error(ErrorKind::InvalidArgument, "Lorentz norm needs 1 < pl < infinity");
    }
    if (std::isinf(ql)) {
        throw Error(ErrorKind::InvalidArgument, "weak Lorentz norms (ql = infinity) are not supported");
    }
    if (!(ql >= Scalar(1))) throw Error(ErrorKind::InvalidArgument, "Lorentz norm needs ql >= 1");

    const Rearrangement<Scalar> r = decreasing_rearrangement(u);
    const Scalar s = ql / pl;
    Scalar t0 = 0;
    Scalar sum = 0;
    for (std::size_t k = 0; k < r.heights.size(); ++k) {
        const Scalar width = r.widths[k];
        // t1^s - t0^s without cancellation.
        const Scalar increment = t0 > Scalar(0)
                                     ? std::pow(t0, s) * std::expm1(s * std::log1p(width / t0))
                                     : std::pow(width, s);
        if (r.heights[k] > Scalar(0)) sum += std::pow(r.heights[k], ql) * increment;
        t0 += width;
    }
    return std::pow(sum * pl / ql, Scalar(1) / ql);
}

}  // namespace plap
