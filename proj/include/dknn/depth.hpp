#pragma once

// Sample depth functions D(x, P^(n)) and sample depth regions.
//
// Halfspace and simplicial depth are exact for d = 1 (order statistics) and
// d = 2 (angular sweep, O(n log n)). For d >= 3 halfspace depth is the minimum
// over a deterministic direction set and is therefore an upper bound on the
// true depth; simplicial depth enumerates all (d+1)-subsets up to a cap and
// falls back to Monte Carlo beyond it.

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dknn
{

enum class DepthKind
{
    halfspace,
    simplicial,
    mahalanobis,
    projection,
};

inline std::string_view to_string(DepthKind k)
{
    switch (k) {
    case DepthKind::halfspace: return "halfspace";
    case DepthKind::simplicial: return "simplicial";
    case DepthKind::mahalanobis: return "mahalanobis";
    case DepthKind::projection: return "projection";
    }
    return "?";
}

inline DepthKind parse_depth_kind(std::string_view s)
{
    if (s == "halfspace" || s == "h" || s == "H")
        return DepthKind::halfspace;
    if (s == "simplicial" || s == "s" || s == "S")
        return DepthKind::simplicial;
    if (s == "mahalanobis" || s == "m" || s == "M")
        return DepthKind::mahalanobis;
    if (s == "projection" || s == "p" || s == "P")
        return DepthKind::projection;
    throw ValidationError("unknown depth kind '" + std::string(s) + "'");
}

/// Choice of depth function plus its algorithmic parameters.
struct DepthSpec
{
    DepthKind kind = DepthKind::halfspace;
    /// Direction count for the approximate modes (halfspace d >= 3, projection d >= 2).
    int directions = 500;
    /// Largest number of (d+1)-subsets enumerated exactly by simplicial depth in
    /// d >= 3; also the number of Monte Carlo subsets drawn beyond it.
    std::uint64_t max_enumeration = 200'000;
    /// Stream for the simplicial Monte Carlo fallback.
    RngSeed seed{};

    void validate(Eigen::Index d) const
    {
        if (directions < 100)
            throw ValidationError("DepthSpec: directions must be >= 100, got " + std::to_string(directions));
        if (max_enumeration < static_cast<std::uint64_t>(d + 1))
            throw ValidationError("DepthSpec: max-enumeration must be >= d+1");
    }

    static DepthSpec of(DepthKind kind) { return DepthSpec{.kind = kind}; }
};

/// Depth value; in [0,1] for halfspace/simplicial, (0,1] for Mahalanobis/projection.
using DepthValue = double;

/// Sample indices whose depth is at least `level`, sorted ascending.
struct DepthRegion
{
    double level = 0.0;
    std::vector<std::size_t> members;
};

/// ceil(beta * n) with a guard against representation error, clamped to [1, n].
inline std::size_t content_count(double beta, std::size_t n)
{
    const double raw = std::ceil(beta * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(raw < 1.0 ? 1 : static_cast<std::size_t>(raw), 1, n);
}

namespace detail
{

inline constexpr double kCollinearTolerance = 1e-12;
inline constexpr double kBarycentricTolerance = 1e-10;

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    long double r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<std::uint64_t>(std::llround(r));
}

inline double radical_inverse(std::uint64_t index, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

/// Deterministic unit directions: d = 1 gives {+1}; d = 2 gives `count` equally
/// spaced angles on [0, pi); d >= 3 gives the coordinate axes followed by
/// `count` Halton points pushed through Box-Muller and normalized. Sets are
/// used with both orientations, so half the sphere suffices.
inline std::vector<Point> direction_set(Eigen::Index d, int count)
{
    std::vector<Point> dirs;
    if (d == 1) {
        dirs.push_back(Point::Ones(1));
        return dirs;
    }
    if (d == 2) {
        dirs.reserve(count);
        for (int k = 0; k < count; ++k) {
            const double a = std::numbers::pi * k / count;
            Point u(2);
            u << std::cos(a), std::sin(a);
            dirs.push_back(u);
        }
        return dirs;
    }
    static constexpr std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                               41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
    const auto pairs = static_cast<std::size_t>((d + 1) / 2);
    if (2 * pairs > std::size(primes))
        throw ValidationError("direction_set: dimension too large for the Halton sequence");
    dirs.reserve(static_cast<std::size_t>(d + count));
    for (Eigen::Index c = 0; c < d; ++c)
        dirs.push_back(Point::Unit(d, c));
    for (int k = 1; static_cast<int>(dirs.size()) < d + count; ++k) {
        Point u(d);
        for (std::size_t p = 0; p < pairs; ++p) {
            const double u1 = radical_inverse(k, primes[2 * p]);
            const double u2 = radical_inverse(k, primes[2 * p + 1]);
            const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
            const double a = 2.0 * std::numbers::pi * u2;
            u[static_cast<Eigen::Index>(2 * p)] = r * std::cos(a);
            if (static_cast<Eigen::Index>(2 * p + 1) < d)
                u[static_cast<Eigen::Index>(2 * p + 1)] = r * std::sin(a);
        }
        const double nrm = u.norm();
        if (nrm > 0)
            dirs.push_back(u / nrm);
    }
    return dirs;
}

// --- 1-D kernels on offsets v = p - x --------------------------------------

inline std::size_t halfspace_count_1d(std::span<const double> offsets)
{
    std::size_t ge = 0, le = 0;
    for (double v : offsets) {
        ge += (v >= 0);
        le += (v <= 0);
    }
    return std::min(ge, le);
}

inline std::uint64_t simplicial_count_1d(std::span<const double> offsets)
{
    std::uint64_t lt = 0, gt = 0;
    for (double v : offsets) {
        lt += (v < 0);
        gt += (v > 0);
    }
    return choose(offsets.size(), 2) - choose(lt, 2) - choose(gt, 2);
}

// --- 2-D kernels ------------------------------------------------------------

struct Ray
{
    double angle;
    double x, y, r;
};

struct Vec2
{
    double x, y;
};

/// Nonzero offsets sorted by angle, rotated so that no same-direction run
/// straddles the start of the array. Returns the number of zero offsets.
inline std::size_t sorted_rays(std::span<const Vec2> offsets, std::vector<Ray>& rays)
{
    rays.clear();
    std::size_t zeros = 0;
    for (const auto& v : offsets) {
        if (v.x == 0.0 && v.y == 0.0) {
            ++zeros;
            continue;
        }
        const double y = v.y + 0.0; // -0.0 -> +0.0 so the negative axis is one angle
        rays.push_back({std::atan2(y, v.x), v.x, y, std::hypot(v.x, y)});
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.angle < b.angle; });
    return zeros;
}

inline double cross(const Ray& a, const Ray& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Ray& a, const Ray& b) { return a.x * b.x + a.y * b.y; }

inline bool same_direction(const Ray& a, const Ray& b)
{
    return std::abs(cross(a, b)) <= kCollinearTolerance * a.r * b.r && dot(a, b) > 0;
}

inline bool strictly_left(const Ray& a, const Ray& b)
{
    return cross(a, b) > kCollinearTolerance * a.r * b.r;
}

/// b lies in the half-open angular range (0, pi] counterclockwise from a.
inline bool within_half_turn(const Ray& a, const Ray& b)
{
    const double c = cross(a, b);
    const double tol = kCollinearTolerance * a.r * b.r;
    return c > tol || (std::abs(c) <= tol && dot(a, b) < 0);
}

inline void rotate_to_group_start(std::vector<Ray>& rays)
{
    const std::size_t m = rays.size();
    if (m < 2 || !same_direction(rays[m - 1], rays[0]))
        return;
    for (std::size_t s = 1; s < m; ++s)
        if (!same_direction(rays[s - 1], rays[s])) {
            std::rotate(rays.begin(), rays.begin() + static_cast<std::ptrdiff_t>(s), rays.end());
            return;
        }
}

/// Minimum over closed halfplanes with the origin on their boundary of the
/// number of offsets they contain. Zero offsets lie in every halfplane.
inline std::size_t halfspace_count_2d(std::span<const Vec2> offsets, std::vector<Ray>& rays)
{
    const std::size_t zeros = sorted_rays(offsets, rays);
    const std::size_t m = rays.size();
    if (m == 0)
        return zeros;
    rotate_to_group_start(rays);

    // The count over generic open semicircles is piecewise constant; every
    // piece starts just past some ray angle theta or theta + pi.
    std::size_t best = m;
    std::size_t e = 0;
    for (std::size_t a = 0; a < m;) {
        std::size_t g = 1;
        while (a + g < m && same_direction(rays[a], rays[a + g]))
            ++g;
        e = std::max(e, a + g);
        while (e < a + m && within_half_turn(rays[a], rays[e % m]))
            ++e;
        const std::size_t ahead = e - (a + g);
        best = std::min({best, ahead, m - ahead});
        a += g;
    }
    return zeros + best;
}

/// Number of closed triangles, over all 3-subsets of the offsets (a multiset),
/// that contain the origin.
inline std::uint64_t simplicial_count_2d(std::span<const Vec2> offsets, std::vector<Ray>& rays)
{
    const std::uint64_t total = choose(offsets.size(), 3);
    sorted_rays(offsets, rays);
    const std::size_t m = rays.size();
    if (m < 3)
        return total;
    rotate_to_group_start(rays);

    // A triangle of nonzero offsets misses the origin iff its rays fit in an
    // open half-turn; count those by their first ray in counterclockwise order.
    std::uint64_t missing = 0;
    std::size_t e = 0;
    for (std::size_t a = 0; a < m;) {
        std::size_t g = 1;
        while (a + g < m && same_direction(rays[a], rays[a + g]))
            ++g;
        e = std::max(e, a + g);
        while (e < a + m && strictly_left(rays[a], rays[e % m]))
            ++e;
        const std::uint64_t left = e - (a + g);
        for (std::size_t t = 0; t < g; ++t)
            missing += choose(left + (g - 1 - t), 2);
        a += g;
    }
    return total - missing;
}

// --- general-d helpers ------------------------------------------------------

/// Closed-simplex containment by barycentric coordinates. Degenerate vertex
/// sets contain x only if some affinely independent subset does.
inline bool simplex_contains(std::span<const Point* const> vertices, const Point& x)
{
    const std::size_t k = vertices.size();
    const Eigen::Index d = x.size();
    const Point& v0 = *vertices[0];
    double scale = 1.0;
    for (const Point* v : vertices)
        scale = std::max(scale, v->cwiseAbs().maxCoeff());
    scale = std::max(scale, x.cwiseAbs().maxCoeff());
    if (k == 1)
        return (x - v0).cwiseAbs().maxCoeff() <= kBarycentricTolerance * scale;

    Matrix edges(d, static_cast<Eigen::Index>(k - 1));
    for (std::size_t j = 1; j < k; ++j)
        edges.col(static_cast<Eigen::Index>(j - 1)) = *vertices[j] - v0;
    Eigen::ColPivHouseholderQR<Matrix> qr(edges);
    qr.setThreshold(kBarycentricTolerance);
    if (qr.rank() == static_cast<Eigen::Index>(k - 1)) {
        const Eigen::VectorXd lambda = qr.solve(x - v0);
        const double residual = (edges * lambda - (x - v0)).cwiseAbs().maxCoeff();
        if (residual > kBarycentricTolerance * scale)
            return false;
        const double sum = lambda.sum();
        return lambda.minCoeff() >= -kBarycentricTolerance && sum <= 1.0 + kBarycentricTolerance;
    }
    std::vector<const Point*> sub(k - 1);
    for (std::size_t skip = 0; skip < k; ++skip) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (j != skip)
                sub[w++] = vertices[j];
        if (simplex_contains(sub, x))
            return true;
    }
    return false;
}

/// Advance a lexicographic k-combination of {0..n-1}; false when exhausted.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n)
{
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j)
                c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<Vec2> offsets_2d(std::span<const Point> points, const Point& x)
{
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back({p[0] - x[0], p[1] - x[1]});
    return out;
}

inline std::vector<double> offsets_1d(std::span<const Point> points, const Point& x)
{
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back(p[0] - x[0]);
    return out;
}

inline double median_inplace(std::vector<double>& v)
{
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double hi = *mid;
    if (n % 2 == 1)
        return hi;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Depth with respect to the empirical distribution of a fixed reference
/// sample. Construction does the per-reference work (moments, projected
/// medians and MADs); evaluation is then per query point.
class EmpiricalDepth
{
public:
    EmpiricalDepth(std::vector<Point> reference, DepthSpec spec)
        : ref_(std::move(reference))
        , spec_(spec)
    {
        dim_ = common_dimension(ref_, "depth");
        for (const auto& p : ref_)
            require_finite(p, "depth");
        spec_.validate(dim_);
        switch (spec_.kind) {
        case DepthKind::halfspace:
            if (dim_ >= 3)
                dirs_ = detail::direction_set(dim_, spec_.directions);
            break;
        case DepthKind::simplicial: break;
        case DepthKind::mahalanobis: fit_mahalanobis(); break;
        case DepthKind::projection: fit_projection(); break;
        }
    }

    const DepthSpec& spec() const noexcept { return spec_; }
    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ref_.size(); }
    const std::vector<Point>& reference() const noexcept { return ref_; }

    DepthValue operator()(const Point& x) const
    {
        require_same_dim(x.size(), dim_, "depth query");
        require_finite(x, "depth query");
        switch (spec_.kind) {
        case DepthKind::halfspace: return halfspace(x);
        case DepthKind::simplicial: return simplicial(x);
        case DepthKind::mahalanobis: return mahalanobis(x);
        case DepthKind::projection: return projection(x);
        }
        return 0.0;
    }

    /// Mahalanobis fit, exposed for volume computations.
    const Point& location() const noexcept { return location_; }
    const Matrix& scatter() const noexcept { return scatter_; }
    /// Projection fit, exposed for volume computations.
    const std::vector<Point>& directions() const noexcept { return dirs_; }
    const std::vector<double>& projected_scales() const noexcept { return mads_; }

private:
    DepthValue halfspace(const Point& x) const
    {
        const double n = static_cast<double>(ref_.size());
        if (dim_ == 1) {
            const auto off = detail::offsets_1d(ref_, x);
            return static_cast<double>(detail::halfspace_count_1d(off)) / n;
        }
        if (dim_ == 2) {
            const auto off = detail::offsets_2d(ref_, x);
            std::vector<detail::Ray> rays;
            return static_cast<double>(detail::halfspace_count_2d(off, rays)) / n;
        }
        std::vector<Point> offsets;
        offsets.reserve(ref_.size());
        for (const auto& p : ref_)
            offsets.push_back(p - x);
        std::size_t best = ref_.size();
        auto probe = [&](const Point& u) {
            std::size_t ge = 0, le = 0;
            for (const auto& v : offsets) {
                const double s = u.dot(v);
                ge += (s >= 0);
                le += (s <= 0);
            }
            best = std::min({best, ge, le});
        };
        for (const auto& u : dirs_)
            probe(u);
        for (const auto& v : offsets) {
            const double nrm = v.norm();
            if (nrm > 0)
                probe(v / nrm);
        }
        return static_cast<double>(best) / n;
    }

    DepthValue simplicial(const Point& x) const
    {
        const std::size_t n = ref_.size();
        const auto k = static_cast<std::size_t>(dim_ + 1);
        if (n < k)
            return 0.0;
        const std::uint64_t total = detail::choose(n, k);
        if (dim_ == 1) {
            const auto off = detail::offsets_1d(ref_, x);
            return static_cast<double>(detail::simplicial_count_1d(off)) / static_cast<double>(total);
        }
        if (dim_ == 2) {
            const auto off = detail::offsets_2d(ref_, x);
            std::vector<detail::Ray> rays;
            return static_cast<double>(detail::simplicial_count_2d(off, rays)) / static_cast<double>(total);
        }
        std::vector<const Point*> verts(k);
        if (total <= spec_.max_enumeration) {
            std::vector<std::size_t> c(k);
            for (std::size_t i = 0; i < k; ++i)
                c[i] = i;
            std::uint64_t hits = 0;
            do {
                for (std::size_t i = 0; i < k; ++i)
                    verts[i] = &ref_[c[i]];
                hits += detail::simplex_contains(verts, x);
            } while (detail::next_combination(c, n));
            return static_cast<double>(hits) / static_cast<double>(total);
        }
        Engine rng = make_engine(spec_.seed);
        std::vector<std::size_t> pick;
        std::uint64_t hits = 0;
        for (std::uint64_t draw = 0; draw < spec_.max_enumeration; ++draw) {
            pick.clear();
            while (pick.size() < k) {
                const std::size_t i = uniform_index(rng, n);
                if (std::find(pick.begin(), pick.end(), i) == pick.end())
                    pick.push_back(i);
            }
            for (std::size_t i = 0; i < k; ++i)
                verts[i] = &ref_[pick[i]];
            hits += detail::simplex_contains(verts, x);
        }
        return static_cast<double>(hits) / static_cast<double>(spec_.max_enumeration);
    }

    void fit_mahalanobis()
    {
        location_ = mean(ref_);
        if (ref_.size() < static_cast<std::size_t>(dim_ + 1))
            throw SingularityError("mahalanobis depth: need n >= d+1 for a nonsingular covariance", 0.0);
        scatter_ = covariance(ref_);
        llt_ = spd_factor(scatter_, "mahalanobis depth");
    }

    DepthValue mahalanobis(const Point& x) const
    {
        const Point z = llt_.matrixL().solve(x - location_);
        return 1.0 / (1.0 + z.squaredNorm());
    }

    void fit_projection()
    {
        if (ref_.size() < 2)
            throw InsufficientDataError("projection depth: need n >= 2");
        dirs_ = detail::direction_set(dim_, spec_.directions);
        medians_.reserve(dirs_.size());
        mads_.reserve(dirs_.size());
        std::vector<double> proj(ref_.size());
        for (const auto& u : dirs_) {
            for (std::size_t i = 0; i < ref_.size(); ++i)
                proj[i] = u.dot(ref_[i]);
            std::vector<double> tmp = proj;
            const double med = detail::median_inplace(tmp);
            for (std::size_t i = 0; i < ref_.size(); ++i)
                tmp[i] = std::abs(proj[i] - med);
            const double mad = detail::median_inplace(tmp);
            if (!(mad > 0))
                throw DegenerateScaleError("projection depth: zero MAD along a probed direction");
            medians_.push_back(med);
            mads_.push_back(mad);
        }
    }

    DepthValue projection(const Point& x) const
    {
        double out = 0.0;
        for (std::size_t k = 0; k < dirs_.size(); ++k)
            out = std::max(out, std::abs(dirs_[k].dot(x) - medians_[k]) / mads_[k]);
        return 1.0 / (1.0 + out);
    }

    std::vector<Point> ref_;
    DepthSpec spec_;
    Eigen::Index dim_ = 0;
    std::vector<Point> dirs_;
    Point location_;
    Matrix scatter_;
    Eigen::LLT<Matrix> llt_;
    std::vector<double> medians_;
    std::vector<double> mads_;
};

inline DepthValue halfspace_depth(const Point& x, std::span<const Point> points, DepthSpec spec = {})
{
    spec.kind = DepthKind::halfspace;
    return EmpiricalDepth({points.begin(), points.end()}, spec)(x);
}

inline DepthValue simplicial_depth(const Point& x, std::span<const Point> points, DepthSpec spec = {})
{
    spec.kind = DepthKind::simplicial;
    return EmpiricalDepth({points.begin(), points.end()}, spec)(x);
}

inline DepthValue mahalanobis_depth(const Point& x, std::span<const Point> points)
{
    return EmpiricalDepth({points.begin(), points.end()}, DepthSpec::of(DepthKind::mahalanobis))(x);
}

inline DepthValue projection_depth(const Point& x, std::span<const Point> points, DepthSpec spec = {})
{
    spec.kind = DepthKind::projection;
    return EmpiricalDepth({points.begin(), points.end()}, spec)(x);
}

inline DepthValue depth(const Point& x, std::span<const Point> points, const DepthSpec& spec)
{
    return EmpiricalDepth({points.begin(), points.end()}, spec)(x);
}

/// Depth of every query with respect to the empirical distribution of `reference`.
inline std::vector<DepthValue> depth_all(std::span<const Point> queries, std::span<const Point> reference,
                                         const DepthSpec& spec)
{
    const EmpiricalDepth dfun({reference.begin(), reference.end()}, spec);
    std::vector<DepthValue> out;
    out.reserve(queries.size());
    for (const auto& q : queries)
        out.push_back(dfun(q));
    return out;
}

/// Indices of sample points whose depth with respect to the sample is >= alpha.
inline DepthRegion region_by_level(std::span<const Point> points, const DepthSpec& spec, double alpha)
{
    if (!(alpha >= 0))
        throw ValidationError("region_by_level: alpha must be >= 0");
    const auto depths = depth_all(points, points, spec);
    DepthRegion r{alpha, {}};
    for (std::size_t i = 0; i < depths.size(); ++i)
        if (depths[i] >= alpha)
            r.members.push_back(i);
    return r;
}

/// Smallest sample depth region holding at least ceil(beta n) points; ties
/// at the cut may make it larger.
inline DepthRegion region_by_content(std::span<const Point> points, const DepthSpec& spec, double beta)
{
    if (!(beta > 0 && beta <= 1))
        throw ValidationError("region_by_content: beta must lie in (0,1]");
    const auto depths = depth_all(points, points, spec);
    std::vector<double> sorted = depths;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t m = content_count(beta, points.size());
    DepthRegion r{sorted[m - 1], {}};
    for (std::size_t i = 0; i < depths.size(); ++i)
        if (depths[i] >= r.level)
            r.members.push_back(i);
    return r;
}

} // namespace dknn
