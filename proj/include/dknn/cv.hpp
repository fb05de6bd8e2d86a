#pragma once

// Leave-one-out cross-validation over a grid of neighbor counts. Every
// held-out point gets an exact refit on the remaining n - 1 observations.

#include "classifier.hpp"

#include <set>

namespace dknn
{

/// k = max(1, round(beta n)) for beta = 0.01, 0.02, ..., 0.50, deduplicated,
/// capped at n - 1.
inline std::vector<std::size_t> default_k_grid(std::size_t n)
{
    if (n < 2)
        throw InsufficientDataError("default_k_grid: need n >= 2");
    std::set<std::size_t> ks;
    for (int b = 1; b <= 50; ++b) {
        const double k = std::round(b / 100.0 * static_cast<double>(n));
        ks.insert(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1.0, k)), 1, n - 1));
    }
    return {ks.begin(), ks.end()};
}

/// Leave-one-out misclassification counts, one per grid entry. `spec.k` is
/// ignored for neighbor methods; other methods give the same count for every
/// entry.
inline std::vector<std::size_t> loocv_errors(const LabeledSample& training, const ClassifierSpec& spec,
                                             std::span<const std::size_t> grid)
{
    const std::size_t n = training.size();
    if (grid.empty())
        throw ValidationError("loocv: empty k grid");
    if (n < 3)
        throw InsufficientDataError("loocv: need n >= 3");
    for (auto k : grid)
        if (k < 1 || k > n - 1)
            throw ValidationError("loocv: grid values must lie in [1, n-1]");

    std::vector<std::size_t> errors(grid.size(), 0);
    std::vector<std::size_t> keep;
    keep.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        keep.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                keep.push_back(j);
        const LabeledSample rest = training.subset(keep);
        const Point& x = training.point(i);
        if (is_neighbor_method(spec.method)) {
            const NeighborOrderer orderer(spec.method, rest, spec.depth);
            const auto ordering = orderer(x);
            for (std::size_t g = 0; g < grid.size(); ++g)
                errors[g] += vote_by_groups(ordering, rest.labels(), grid[g], tie_seed_for(spec.seed, i)).label !=
                             training.label(i);
        } else {
            const bool wrong = fit(spec, rest).predict(x, i) != training.label(i);
            for (auto& e : errors)
                e += wrong;
        }
    }
    return errors;
}

/// Grid value with the fewest leave-one-out errors; ties go to the smallest k.
inline std::size_t loocv_select_k(const LabeledSample& training, const ClassifierSpec& spec,
                                  std::span<const std::size_t> grid)
{
    const auto errors = loocv_errors(training, spec, grid);
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (errors[g] < errors[best] || (errors[g] == errors[best] && grid[g] < grid[best]))
            best = g;
    return grid[best];
}

} // namespace dknn
