#pragma once

// Nearest-neighbor regression and density estimation, in the classical
// Euclidean-ball form and in the depth form where the ball is replaced by the
// symmetrized depth region R_x around the query.

#include "knn.hpp"

#include <numbers>

namespace dknn
{

class RegressionSample
{
public:
    RegressionSample(std::vector<Point> points, std::vector<double> responses)
        : points_(std::move(points))
        , responses_(std::move(responses))
    {
        if (points_.empty())
            throw InsufficientDataError("RegressionSample: need at least one observation");
        if (points_.size() != responses_.size())
            throw ValidationError("RegressionSample: points and responses differ in length");
        common_dimension(points_, "RegressionSample");
        for (double y : responses_)
            if (!std::isfinite(y))
                throw ValidationError("RegressionSample: responses must be finite");
    }

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<double>& responses() const noexcept { return responses_; }

private:
    std::vector<Point> points_;
    std::vector<double> responses_;
};

struct EstimatorMode
{
    bool depth = false;
    DepthSpec spec{};

    static EstimatorMode euclidean() { return {}; }
    static EstimatorMode depth_based(DepthSpec s) { return {true, s}; }
};

struct VolumeEstimate
{
    double value = 0.0;
    double standard_error = 0.0;
};

struct VolumeOptions
{
    std::uint64_t budget = 200'000;
    RngSeed seed{};
};

/// Members of the neighborhood of x holding at least k points: whole distance
/// groups (Euclidean) or whole symmetrized-depth groups (depth mode).
inline OutwardOrdering neighbor_ordering(const Point& x, std::span<const Point> points, const EstimatorMode& mode)
{
    return mode.depth ? outward_ordering(x, points, mode.spec) : distance_ordering(x, points);
}

inline std::vector<std::size_t> neighborhood_members(const Point& x, std::span<const Point> points, std::size_t k,
                                                     const EstimatorMode& mode)
{
    require_k(k, points.size(), "neighborhood");
    return neighborhood_from_ordering(x, neighbor_ordering(x, points, mode), k).members;
}

/// Mean response over the neighborhood members, each weighted 1/K.
inline double knn_regress(const Point& x, const RegressionSample& sample, std::size_t k, const EstimatorMode& mode)
{
    const auto members = neighborhood_members(x, sample.points(), k, mode);
    double s = 0.0;
    for (auto i : members)
        s += sample.responses()[i];
    return s / static_cast<double>(members.size());
}

inline double unit_ball_volume(Eigen::Index d)
{
    const double h = static_cast<double>(d) / 2.0;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

namespace detail
{

/// Half-widths of an axis-aligned box around x (centered frame) that contains
/// the symmetrized depth region at `level`.
inline Eigen::VectorXd region_half_widths(const EmpiricalDepth& sym, std::span<const Point> w, double level)
{
    const auto d = w.front().size();
    Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
    switch (sym.spec().kind) {
    case DepthKind::mahalanobis: {
        // {y : y' S^-1 y <= 1/level - 1} is an ellipse with half-widths sqrt(c S_ii).
        const double c = 1.0 / level - 1.0;
        for (Eigen::Index i = 0; i < d; ++i)
            h[i] = std::sqrt(std::max(0.0, c * sym.scatter()(i, i)));
        break;
    }
    case DepthKind::projection: {
        // The probed axis directions bound each coordinate by c * MAD; the
        // slack covers axis directions that are only approximately axial.
        const double c = 1.0 / level - 1.0;
        h.setConstant(std::numeric_limits<double>::infinity());
        const auto& dirs = sym.directions();
        const auto& mads = sym.projected_scales();
        for (std::size_t j = 0; j < dirs.size(); ++j)
            for (Eigen::Index i = 0; i < d; ++i)
                if (std::abs(dirs[j][i]) > 1.0 - 1e-12)
                    h[i] = std::min(h[i], c * mads[j] * 1.01);
        // Fallback for axes the direction set misses: the sample extent.
        for (Eigen::Index i = 0; i < d; ++i)
            if (!std::isfinite(h[i])) {
                h[i] = 0.0;
                for (const auto& v : w)
                    h[i] = std::max(h[i], std::abs(v[i]));
            }
        break;
    }
    default:
        // Positive-level halfspace and simplicial regions lie in the convex hull.
        for (const auto& v : w)
            h = h.cwiseMax(v.cwiseAbs());
    }
    return h;
}

} // namespace detail

/// Lebesgue measure of the neighborhood `nb` of x. Euclidean: the
/// exact ball through the k-th nearest point. Depth mode: exact interval
/// length for d = 1, otherwise hit-or-miss Monte Carlo over a box containing
/// the symmetrized depth region.
inline VolumeEstimate region_volume(const Point& x, std::span<const Point> points, const DepthNeighborhood& nb,
                                    const EstimatorMode& mode, const VolumeOptions& options = {})
{
    const auto d = x.size();

    double radius = 0.0;
    for (auto i : nb.members)
        radius = std::max(radius, std::sqrt(squared_distance(points[i], x)));
    if (!(radius > 0))
        throw DegenerateVolumeError("neighborhood_volume: all neighbors coincide with the query");

    if (!mode.depth)
        return {unit_ball_volume(d) * std::pow(radius, static_cast<double>(d)), 0.0};
    if (d == 1)
        return {2.0 * radius, 0.0};

    if (options.budget < 1)
        throw ValidationError("neighborhood_volume: Monte Carlo budget must be positive");
    const auto w = detail::centered(x, points);
    std::vector<Point> sym = w;
    for (const auto& v : w)
        sym.push_back(-v);
    const EmpiricalDepth depth(std::move(sym), mode.spec);
    const Eigen::VectorXd half = detail::region_half_widths(depth, w, nb.level);
    double box = 1.0;
    for (Eigen::Index i = 0; i < d; ++i)
        box *= 2.0 * half[i];
    if (!(box > 0))
        throw DegenerateVolumeError("neighborhood_volume: depth region has an empty bounding box");

    Engine rng = make_engine(options.seed);
    std::uint64_t hits = 0;
    Point y(d);
    for (std::uint64_t b = 0; b < options.budget; ++b) {
        for (Eigen::Index i = 0; i < d; ++i)
            y[i] = (2.0 * uniform01(rng) - 1.0) * half[i];
        hits += depth(y) >= nb.level;
    }
    if (hits == 0)
        throw DegenerateVolumeError("neighborhood_volume: no Monte Carlo draw fell in the depth region");
    const double p = static_cast<double>(hits) / static_cast<double>(options.budget);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(options.budget))};
}

inline VolumeEstimate neighborhood_volume(const Point& x, std::span<const Point> points, std::size_t k,
                                          const EstimatorMode& mode, const VolumeOptions& options = {})
{
    require_k(k, points.size(), "neighborhood_volume");
    return region_volume(x, points, neighborhood_from_ordering(x, neighbor_ordering(x, points, mode), k), mode,
                         options);
}

struct DensityEstimate
{
    double value = 0.0;
    std::size_t count = 0; // k (Euclidean) or K_x (depth mode)
    VolumeEstimate volume;
};

/// count / (n * volume); the depth mode counts the realized K_x.
inline DensityEstimate knn_density_estimate(const Point& x, std::span<const Point> points, std::size_t k,
                                            const EstimatorMode& mode, const VolumeOptions& options = {})
{
    require_k(k, points.size(), "knn_density");
    const auto nb = neighborhood_from_ordering(x, neighbor_ordering(x, points, mode), k);
    const auto vol = region_volume(x, points, nb, mode, options);
    const std::size_t count = mode.depth ? nb.realized_count : k;
    return {static_cast<double>(count) / (static_cast<double>(points.size()) * vol.value), count, vol};
}

inline double knn_density(const Point& x, std::span<const Point> points, std::size_t k, const EstimatorMode& mode,
                          const VolumeOptions& options = {})
{
    return knn_density_estimate(x, points, k, mode, options).value;
}

} // namespace dknn
