#pragma once

// One entry point for every classifier in the roster: a ClassifierSpec names
// the method and its parameters, fit() produces an immutable ClassifierModel,
// and predict() labels a query. Vote-tie coins are keyed by the query index so
// predictions do not depend on evaluation order.

#include "dd.hpp"
#include "gaussian.hpp"
#include "knn.hpp"

#include <variant>

namespace dknn
{

enum class Method
{
    dknn,     // depth-based kNN
    knn,      // Euclidean kNN
    knnaff,   // kNN on whitened data
    lda,
    qda,
    dd,       // exact DD-classifier
    ddsm,     // smoothed DD-classifier
    constant, // always predicts one label; a reference point for benchmarks
};

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::dknn: return "dknn";
    case Method::knn: return "knn";
    case Method::knnaff: return "knnaff";
    case Method::lda: return "lda";
    case Method::qda: return "qda";
    case Method::dd: return "dd";
    case Method::ddsm: return "ddsm";
    case Method::constant: return "constant";
    }
    return "?";
}

inline Method parse_method(std::string_view s)
{
    for (auto m : {Method::dknn, Method::knn, Method::knnaff, Method::lda, Method::qda, Method::dd, Method::ddsm,
                   Method::constant})
        if (s == to_string(m))
            return m;
    throw ValidationError("unknown method '" + std::string(s) + "'");
}

inline bool is_neighbor_method(Method m) { return m == Method::dknn || m == Method::knn || m == Method::knnaff; }
inline bool uses_depth(Method m) { return m == Method::dknn || m == Method::dd || m == Method::ddsm; }

struct ClassifierSpec
{
    Method method = Method::dknn;
    DepthSpec depth{};
    std::size_t k = 1;
    int m = 1;
    double t = 100.0;
    int starts = 100;
    std::uint64_t dd_cap = 20'000;
    int constant_label = 0;
    RngSeed seed{};

    /// Short stable identifier used in reports, e.g. "dknn-halfspace-k13".
    std::string name() const
    {
        std::string s(to_string(method));
        if (uses_depth(method))
            s += "-" + std::string(to_string(depth.kind));
        if (is_neighbor_method(method))
            s += "-k" + std::to_string(k);
        if (method == Method::dd || method == Method::ddsm)
            s += "-m" + std::to_string(m);
        if (method == Method::constant)
            s += "-" + std::to_string(constant_label);
        return s;
    }
};

namespace detail
{
inline constexpr std::uint64_t kTieStream = 0x7469'6573;  // vote-tie coins
inline constexpr std::uint64_t kFitStream = 0x6669'7473;  // DD subsampling / starts
} // namespace detail

/// Coin stream for the vote at query `index`.
inline RngSeed tie_seed_for(const RngSeed& base, std::size_t index)
{
    return base.substream(detail::kTieStream).substream(index);
}

/// Per-training-sample state for the neighbor methods: produces the grouped
/// neighbor ordering of any query.
class NeighborOrderer
{
public:
    NeighborOrderer(Method method, const LabeledSample& training, const DepthSpec& depth)
        : method_(method)
        , depth_(depth)
        , training_(training)
    {
        if (!is_neighbor_method(method))
            throw ValidationError("NeighborOrderer: not a neighbor method");
        require_both_classes(training, "neighbor classifier");
        if (method == Method::knnaff) {
            whitening_ = inverse_sqrt(pooled_covariance(training));
            std::vector<Point> white;
            white.reserve(training.size());
            for (const auto& p : training.points())
                white.push_back(whitening_ * p);
            white_points_ = std::move(white);
        }
    }

    Method method() const noexcept { return method_; }
    const LabeledSample& training() const noexcept { return training_; }
    std::span<const int> labels() const noexcept { return training_.labels(); }
    const Matrix& whitening() const noexcept { return whitening_; }

    OutwardOrdering operator()(const Point& x) const
    {
        require_same_dim(x.size(), training_.dim(), "neighbor classifier");
        switch (method_) {
        case Method::dknn: return outward_ordering(x, training_.points(), depth_);
        case Method::knn: return distance_ordering(x, training_.points());
        default: return distance_ordering(whitening_ * x, white_points_);
        }
    }

private:
    Method method_;
    DepthSpec depth_;
    LabeledSample training_;
    Matrix whitening_;
    std::vector<Point> white_points_;
};

struct NeighborModel
{
    NeighborOrderer orderer;
    std::size_t k;
};

struct ConstantModel
{
    int label = 0;
};

class ClassifierModel
{
public:
    using Variant = std::variant<NeighborModel, GaussianRule, DDClassifier, ConstantModel>;

    ClassifierModel(ClassifierSpec spec, Variant model)
        : spec_(std::move(spec))
        , model_(std::move(model))
    {
    }

    const ClassifierSpec& spec() const noexcept { return spec_; }
    const Variant& variant() const noexcept { return model_; }

    /// Label of x; `index` keys the vote-tie coin for neighbor methods.
    int predict(const Point& x, std::size_t index = 0) const
    {
        return std::visit(
            [&](const auto& m) -> int {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, NeighborModel>)
                    return vote_by_groups(m.orderer(x), m.orderer.labels(), m.k, tie_seed_for(spec_.seed, index))
                        .label;
                else if constexpr (std::is_same_v<T, ConstantModel>)
                    return m.label;
                else
                    return m.classify(x);
            },
            model_);
    }

private:
    ClassifierSpec spec_;
    Variant model_;
};

inline ClassifierModel fit(const ClassifierSpec& spec, const LabeledSample& training)
{
    switch (spec.method) {
    case Method::dknn:
    case Method::knn:
    case Method::knnaff:
        require_k(spec.k, training.size(), "fit");
        return {spec, NeighborModel{NeighborOrderer(spec.method, training, spec.depth), spec.k}};
    case Method::lda: return {spec, fit_lda(training)};
    case Method::qda: return {spec, fit_qda(training)};
    case Method::dd:
        return {spec, fit_dd_exact(training, spec.depth, spec.m,
                                   {.candidate_cap = spec.dd_cap, .seed = spec.seed.substream(detail::kFitStream)})};
    case Method::ddsm:
        return {spec, fit_dd_smoothed(training, spec.depth, spec.m,
                                      {.t = spec.t, .starts = spec.starts, .max_iterations = 500,
                                       .seed = spec.seed.substream(detail::kFitStream)})};
    case Method::constant:
        if (spec.constant_label != 0 && spec.constant_label != 1)
            throw ValidationError("constant classifier: label must be 0 or 1");
        return {spec, ConstantModel{spec.constant_label}};
    }
    throw ValidationError("fit: unknown method");
}

inline std::vector<int> predict_all(const ClassifierModel& model, std::span<const Point> queries)
{
    std::vector<int> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = model.predict(queries[i], i);
    return out;
}

/// Percentage of disagreements between predictions and true labels.
inline double error_percent(std::span<const int> predicted, std::span<const int> truth)
{
    if (predicted.size() != truth.size() || truth.empty())
        throw ValidationError("error_percent: size mismatch or empty");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        wrong += predicted[i] != truth[i];
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(truth.size());
}

/// Predictions of a neighbor method for several k at once; each query's
/// ordering is computed a single time. Result is indexed [k position][query].
inline std::vector<std::vector<int>> predict_neighbor_grid(const NeighborOrderer& orderer,
                                                           std::span<const Point> queries,
                                                           std::span<const std::size_t> ks, const RngSeed& seed)
{
    for (auto k : ks)
        require_k(k, orderer.training().size(), "predict_neighbor_grid");
    std::vector<std::vector<int>> out(ks.size(), std::vector<int>(queries.size()));
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto ordering = orderer(queries[q]);
        for (std::size_t j = 0; j < ks.size(); ++j)
            out[j][q] = vote_by_groups(ordering, orderer.labels(), ks[j], tie_seed_for(seed, q)).label;
    }
    return out;
}

} // namespace dknn
