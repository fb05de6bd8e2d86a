#pragma once

// Nearest-neighbor classifiers: depth-based kNN, Euclidean kNN and the
// affine-invariant (whitened) Euclidean kNN. All three vote over neighbor
// groups that keep ties whole, and break vote ties by growing the region one
// group at a time before falling back to a seeded coin.

#include "neighbors.hpp"

namespace dknn
{

struct VoteOutcome
{
    int label = 0;
    std::size_t class1 = 0;     // class-1 count in the first region
    std::size_t realized = 0;   // size of the first region (K)
    std::size_t regions = 1;    // regions examined
    bool coin = false;          // decided by the coin
};

/// Majority vote over the smallest union of leading groups holding >= k
/// points. Ties move on to the next group; a tie over the whole sample is
/// settled by a fair coin drawn from `coin_seed`.
inline VoteOutcome vote_by_groups(const OutwardOrdering& ordering, std::span<const int> labels, std::size_t k,
                                  RngSeed coin_seed)
{
    const std::size_t n = ordering.point_count();
    if (k < 1 || k > n)
        throw ValidationError("vote: k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
    VoteOutcome out;
    const std::size_t first = ordering.groups_covering(k);
    std::size_t c0 = 0, c1 = 0, g = 0;
    auto absorb = [&](std::size_t group) {
        for (auto i : ordering.groups[group])
            (labels[i] == 1 ? c1 : c0) += 1;
    };
    for (; g < first; ++g)
        absorb(g);
    out.class1 = c1;
    out.realized = c0 + c1;
    while (c0 == c1 && g < ordering.groups.size()) {
        absorb(g++);
        ++out.regions;
    }
    if (c1 != c0) {
        out.label = c1 > c0 ? 1 : 0;
        return out;
    }
    Engine rng = make_engine(coin_seed);
    out.coin = true;
    out.label = fair_coin(rng) ? 1 : 0;
    return out;
}

inline void require_both_classes(const LabeledSample& training, const char* context)
{
    if (!training.has_both_classes())
        throw ValidationError(std::string(context) + ": training sample must contain both classes");
}

inline void require_k(std::size_t k, std::size_t n, const char* context)
{
    if (k < 1 || k > n)
        throw ValidationError(std::string(context) + ": k must lie in [1, " + std::to_string(n) + "], got " +
                              std::to_string(k));
}

// --- depth-based kNN --------------------------------------------------------

/// Depth-based estimate of P[Y = 1 | X = x]: the class-1 share of the depth
/// neighborhood R_x with beta = k/n.
inline double dknn_posterior(const Point& x, const LabeledSample& training, const DepthSpec& spec, std::size_t k)
{
    require_k(k, training.size(), "dknn_posterior");
    const auto nb = depth_neighborhood(x, training.points(), spec, k);
    std::size_t c1 = 0;
    for (auto i : nb.members)
        c1 += training.label(i) == 1;
    return static_cast<double>(c1) / static_cast<double>(nb.realized_count);
}

inline VoteOutcome dknn_vote(const Point& x, const LabeledSample& training, const DepthSpec& spec, std::size_t k,
                             RngSeed tie_seed)
{
    require_both_classes(training, "dknn_classify");
    require_k(k, training.size(), "dknn_classify");
    return vote_by_groups(outward_ordering(x, training.points(), spec), training.labels(), k, tie_seed);
}

inline int dknn_classify(const Point& x, const LabeledSample& training, const DepthSpec& spec, std::size_t k,
                         RngSeed tie_seed)
{
    return dknn_vote(x, training, spec, k, tie_seed).label;
}

// --- Euclidean kNN ----------------------------------------------------------

/// Training points grouped by equal Euclidean distance to x, nearest first.
inline OutwardOrdering distance_ordering(const Point& x, std::span<const Point> points)
{
    std::vector<double> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        require_same_dim(points[i].size(), x.size(), "knn");
        dist[i] = squared_distance(points[i], x);
    }
    return group_by_value(dist, /*descending=*/false);
}

inline int euclidean_knn_classify(const Point& x, const LabeledSample& training, std::size_t k, RngSeed tie_seed)
{
    require_both_classes(training, "euclidean_knn_classify");
    require_k(k, training.size(), "euclidean_knn_classify");
    return vote_by_groups(distance_ordering(x, training.points()), training.labels(), k, tie_seed).label;
}

// --- affine-invariant kNN ---------------------------------------------------

/// Euclidean kNN on data standardized by the inverse square root of the
/// pooled training covariance.
class AffineKnn
{
public:
    AffineKnn(LabeledSample training, std::size_t k)
        : k_(k)
    {
        require_both_classes(training, "affine_knn");
        require_k(k, training.size(), "affine_knn");
        whitening_ = inverse_sqrt(pooled_covariance(training));
        std::vector<Point> white;
        white.reserve(training.size());
        for (const auto& p : training.points())
            white.push_back(whitening_ * p);
        whitened_ = LabeledSample(std::move(white), training.labels());
    }

    const Matrix& whitening() const noexcept { return whitening_; }
    const LabeledSample& whitened() const noexcept { return whitened_; }
    std::size_t k() const noexcept { return k_; }

    Point whiten(const Point& x) const { return whitening_ * x; }

    OutwardOrdering ordering(const Point& x) const { return distance_ordering(whiten(x), whitened_.points()); }

    int classify(const Point& x, RngSeed tie_seed) const
    {
        require_same_dim(x.size(), whitening_.rows(), "affine_knn");
        return vote_by_groups(ordering(x), whitened_.labels(), k_, tie_seed).label;
    }

private:
    std::size_t k_;
    Matrix whitening_;
    LabeledSample whitened_;
};

inline int affine_knn_classify(const Point& x, const LabeledSample& training, std::size_t k, RngSeed tie_seed)
{
    return AffineKnn(training, k).classify(x, tie_seed);
}

} // namespace dknn
