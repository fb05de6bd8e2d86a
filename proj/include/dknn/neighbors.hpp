#pragma once

// Depth-based neighbors of an arbitrary point x. The sample is augmented with
// its reflections 2x - X_i, which makes x the deepest point; the depth of each
// original observation with respect to the augmented sample then orders the
// observations outward from x. Reflections only shape the ordering and are
// never ranked themselves.
//
// Everything is computed in coordinates centered at x, where a reflection is
// an exact negation. That keeps the symmetric structure free of rounding, so
// d = 1 orderings coincide exactly with orderings by |X_i - x|.

#include "depth.hpp"

#include <algorithm>
#include <numeric>

namespace dknn
{

struct SymmetrizedSample
{
    Point query;
    std::vector<Point> originals;
    std::vector<Point> reflected;

    /// Originals followed by reflections (size 2n).
    std::vector<Point> combined() const
    {
        std::vector<Point> all = originals;
        all.insert(all.end(), reflected.begin(), reflected.end());
        return all;
    }
};

inline SymmetrizedSample symmetrize(const Point& x, std::span<const Point> points)
{
    SymmetrizedSample s{x, {points.begin(), points.end()}, {}};
    s.reflected.reserve(points.size());
    for (const auto& p : points) {
        require_same_dim(p.size(), x.size(), "symmetrize");
        s.reflected.push_back(2.0 * x - p);
    }
    return s;
}

/// Originals grouped by equal symmetrized depth, groups in strictly
/// decreasing depth order. Within-group order carries no meaning.
struct OutwardOrdering
{
    std::vector<std::vector<std::size_t>> groups;
    std::vector<DepthValue> depths;

    std::size_t group_count() const noexcept { return groups.size(); }

    std::size_t point_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& g : groups)
            n += g.size();
        return n;
    }

    /// Number of leading groups needed to cover at least k points.
    std::size_t groups_covering(std::size_t k) const
    {
        std::size_t total = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            total += groups[g].size();
            if (total >= k)
                return g + 1;
        }
        return groups.size();
    }
};

/// Groups indices by equal value, in decreasing (or increasing) value order.
inline OutwardOrdering group_by_value(std::span<const double> values, bool descending)
{
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return descending ? values[a] > values[b] : values[a] < values[b];
    });
    OutwardOrdering out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i == 0 || values[idx[i]] != values[idx[i - 1]]) {
            out.groups.emplace_back();
            out.depths.push_back(values[idx[i]]);
        }
        out.groups.back().push_back(idx[i]);
    }
    return out;
}

namespace detail
{

inline std::vector<Point> centered(const Point& x, std::span<const Point> points)
{
    std::vector<Point> w;
    w.reserve(points.size());
    for (const auto& p : points) {
        require_same_dim(p.size(), x.size(), "outward ordering");
        w.push_back(p - x);
    }
    return w;
}

/// Halfspace depth in d >= 3 over a direction set shared by every original:
/// the fixed quasi-random set plus the normalized offsets X_i - x.
inline std::vector<DepthValue> symmetric_halfspace_directional(std::span<const Point> w, const DepthSpec& spec)
{
    const std::size_t n = w.size();
    const auto d = w.front().size();
    std::vector<Point> dirs = direction_set(d, spec.directions);
    for (const auto& v : w) {
        const double nrm = v.norm();
        if (nrm > 0)
            dirs.push_back(v / nrm);
    }
    std::vector<std::size_t> best(n, 2 * n);
    std::vector<double> proj(n), sorted(2 * n);
    for (const auto& u : dirs) {
        for (std::size_t i = 0; i < n; ++i) {
            proj[i] = u.dot(w[i]);
            sorted[2 * i] = proj[i];
            sorted[2 * i + 1] = -proj[i];
        }
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < n; ++j) {
            const auto lo = std::lower_bound(sorted.begin(), sorted.end(), proj[j]);
            const auto hi = std::upper_bound(lo, sorted.end(), proj[j]);
            const auto ge = static_cast<std::size_t>(sorted.end() - lo);
            const auto le = static_cast<std::size_t>(hi - sorted.begin());
            best[j] = std::min({best[j], ge, le});
        }
    }
    std::vector<DepthValue> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = static_cast<double>(best[j]) / static_cast<double>(2 * n);
    return out;
}

inline std::vector<DepthValue> symmetric_mahalanobis(std::span<const Point> w)
{
    const std::size_t n = w.size();
    const auto d = w.front().size();
    if (2 * n < static_cast<std::size_t>(d + 1))
        throw SingularityError("mahalanobis depth: symmetrized sample too small", 0.0);
    // The symmetrized sample has mean exactly x (the origin here).
    Matrix s = Matrix::Zero(d, d);
    for (const auto& v : w)
        s.noalias() += 2.0 * v * v.transpose();
    s /= static_cast<double>(2 * n - 1);
    const auto llt = spd_factor(s, "mahalanobis depth");
    std::vector<DepthValue> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point z = llt.matrixL().solve(w[j]);
        out[j] = 1.0 / (1.0 + z.squaredNorm());
    }
    return out;
}

inline std::vector<DepthValue> symmetric_projection(std::span<const Point> w, const DepthSpec& spec)
{
    const std::size_t n = w.size();
    const auto dirs = direction_set(w.front().size(), spec.directions);
    std::vector<double> outl(n, 0.0), proj(n), absval(2 * n);
    for (const auto& u : dirs) {
        for (std::size_t i = 0; i < n; ++i) {
            proj[i] = u.dot(w[i]);
            absval[2 * i] = absval[2 * i + 1] = std::abs(proj[i]);
        }
        // Median of the symmetrized projections is exactly 0.
        const double mad = median_inplace(absval);
        if (!(mad > 0))
            throw DegenerateScaleError("projection depth: zero MAD along a probed direction");
        for (std::size_t j = 0; j < n; ++j)
            outl[j] = std::max(outl[j], std::abs(proj[j]) / mad);
    }
    std::vector<DepthValue> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = 1.0 / (1.0 + outl[j]);
    return out;
}

} // namespace detail

/// Depth of each original X_j with respect to the empirical distribution of
/// {X_1..X_n, 2x - X_1..2x - X_n}.
inline std::vector<DepthValue> symmetrized_depths(const Point& x, std::span<const Point> points, const DepthSpec& spec)
{
    if (points.empty())
        throw ValidationError("outward ordering: empty sample");
    require_finite(x, "outward ordering");
    const auto w = detail::centered(x, points);
    const std::size_t n = w.size();
    const auto d = x.size();
    spec.validate(d);
    std::vector<DepthValue> out(n);

    const bool low_dim = d <= 2;
    if (low_dim && (spec.kind == DepthKind::halfspace || spec.kind == DepthKind::simplicial)) {
        const double total = spec.kind == DepthKind::halfspace ? static_cast<double>(2 * n)
                                                               : static_cast<double>(detail::choose(2 * n, d + 1));
        std::vector<detail::Ray> rays;
        std::vector<double> off1(2 * n);
        std::vector<detail::Vec2> off2(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            if (d == 1) {
                for (std::size_t i = 0; i < n; ++i) {
                    off1[2 * i] = w[i][0] - w[j][0];
                    off1[2 * i + 1] = -w[i][0] - w[j][0];
                }
                out[j] = spec.kind == DepthKind::halfspace
                             ? static_cast<double>(detail::halfspace_count_1d(off1)) / total
                             : (total > 0 ? static_cast<double>(detail::simplicial_count_1d(off1)) / total : 0.0);
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    off2[2 * i] = {w[i][0] - w[j][0], w[i][1] - w[j][1]};
                    off2[2 * i + 1] = {-w[i][0] - w[j][0], -w[i][1] - w[j][1]};
                }
                out[j] = spec.kind == DepthKind::halfspace
                             ? static_cast<double>(detail::halfspace_count_2d(off2, rays)) / total
                             : (total > 0 ? static_cast<double>(detail::simplicial_count_2d(off2, rays)) / total : 0.0);
            }
        }
        return out;
    }

    switch (spec.kind) {
    case DepthKind::halfspace: return detail::symmetric_halfspace_directional(w, spec);
    case DepthKind::mahalanobis: return detail::symmetric_mahalanobis(w);
    case DepthKind::projection: return detail::symmetric_projection(w, spec);
    case DepthKind::simplicial: {
        std::vector<Point> sym = w;
        for (const auto& v : w)
            sym.push_back(-v);
        const EmpiricalDepth dfun(std::move(sym), spec);
        for (std::size_t j = 0; j < n; ++j)
            out[j] = dfun(w[j]);
        return out;
    }
    }
    return out;
}

inline OutwardOrdering outward_ordering(const Point& x, std::span<const Point> points, const DepthSpec& spec)
{
    const auto depths = symmetrized_depths(x, points, spec);
    return group_by_value(depths, /*descending=*/true);
}

/// Smallest symmetrized depth region around x holding at least k originals.
struct DepthNeighborhood
{
    Point query;
    double beta = 0.0;
    std::vector<std::size_t> members; // sorted ascending
    std::size_t realized_count = 0;   // K_x; >= k under ties
    DepthValue level = 0.0;           // depth of the outermost included group
};

inline DepthNeighborhood neighborhood_from_ordering(const Point& x, const OutwardOrdering& ordering, std::size_t k)
{
    const std::size_t n = ordering.point_count();
    if (k < 1 || k > n)
        throw ValidationError("depth_neighborhood: k must lie in [1, " + std::to_string(n) + "], got " +
                              std::to_string(k));
    DepthNeighborhood nb{x, static_cast<double>(k) / static_cast<double>(n), {}, 0, 0.0};
    const std::size_t g = ordering.groups_covering(k);
    for (std::size_t i = 0; i < g; ++i)
        nb.members.insert(nb.members.end(), ordering.groups[i].begin(), ordering.groups[i].end());
    std::sort(nb.members.begin(), nb.members.end());
    nb.realized_count = nb.members.size();
    nb.level = ordering.depths[g - 1];
    return nb;
}

inline DepthNeighborhood depth_neighborhood(const Point& x, std::span<const Point> points, const DepthSpec& spec,
                                            std::size_t k)
{
    if (k < 1 || k > points.size())
        throw ValidationError("depth_neighborhood: k must lie in [1, n]");
    return neighborhood_from_ordering(x, outward_ordering(x, points, spec), k);
}

} // namespace dknn
