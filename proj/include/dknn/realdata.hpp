#pragma once

// Real-data protocol: each neighbor classifier picks k by leave-one-out
// cross-validation on the training sample, then every classifier is scored
// on the test sample. Repeated stratified splits give mean and sd.

#include "benchmark.hpp"
#include "cv.hpp"
#include "ingest.hpp"

namespace dknn
{

struct RealDataEntry
{
    std::string label;
    ClassifierSpec spec; // spec.k is chosen by LOOCV for neighbor methods
};

/// LDA, QDA, kNN, kNNaff, halfspace and Mahalanobis depth kNN, and exact DD
/// with m = 1, 2 for halfspace and Mahalanobis depth.
inline std::vector<RealDataEntry> real_data_roster(int directions = 500)
{
    std::vector<RealDataEntry> r;
    auto add = [&](std::string label, Method m, DepthKind kind = DepthKind::halfspace, int degree = 1) {
        ClassifierSpec s;
        s.method = m;
        s.depth.kind = kind;
        s.depth.directions = directions;
        s.m = degree;
        r.push_back({std::move(label), s});
    };
    add("LDA", Method::lda);
    add("QDA", Method::qda);
    add("kNN", Method::knn);
    add("kNNaff", Method::knnaff);
    add("DH-kNN", Method::dknn, DepthKind::halfspace);
    add("DM-kNN", Method::dknn, DepthKind::mahalanobis);
    add("DDH-m1", Method::dd, DepthKind::halfspace, 1);
    add("DDH-m2", Method::dd, DepthKind::halfspace, 2);
    add("DDM-m1", Method::dd, DepthKind::mahalanobis, 1);
    add("DDM-m2", Method::dd, DepthKind::mahalanobis, 2);
    return r;
}

struct RealDataResult
{
    std::string label;
    double error_percent = 0.0; // NaN on failure
    std::size_t k = 0;          // selected k; 0 for non-neighbor methods
    std::string failure;
};

inline std::vector<RealDataResult> evaluate_split(const LabeledSample& train, const LabeledSample& test,
                                                  std::span<const RealDataEntry> roster, RngSeed seed)
{
    std::vector<RealDataResult> out;
    const auto grid = default_k_grid(train.size());
    for (const auto& e : roster) {
        RealDataResult res{e.label, 0.0, 0, {}};
        try {
            ClassifierSpec s = e.spec;
            s.seed = seed;
            s.depth.seed = seed;
            if (is_neighbor_method(s.method)) {
                s.k = loocv_select_k(train, s, grid);
                res.k = s.k;
            }
            res.error_percent = error_percent(predict_all(fit(s, train), test.points()), test.labels());
        } catch (const Error& err) {
            res.error_percent = std::numeric_limits<double>::quiet_NaN();
            res.failure = err.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

struct RepeatedSplitReport
{
    std::vector<std::string> labels;
    std::vector<std::vector<RealDataResult>> per_split; // [split][roster position]

    SummaryStats summary(std::size_t entry) const
    {
        std::vector<double> v;
        for (const auto& s : per_split)
            v.push_back(s[entry].error_percent);
        return summarize(v);
    }
};

/// `splits` stratified partitions with `train_sizes[j]` training points of
/// label j; split p uses stream p of `seed`. Splits run on `workers` threads.
inline RepeatedSplitReport run_repeated_splits(const LabeledSample& sample, std::array<std::size_t, 2> train_sizes,
                                               std::size_t splits, std::span<const RealDataEntry> roster,
                                               RngSeed seed, int workers = 1,
                                               const std::function<void(std::size_t, std::size_t)>& progress = {})
{
    if (splits < 1)
        throw ValidationError("repeated splits: need at least one split");
    RepeatedSplitReport report;
    for (const auto& e : roster)
        report.labels.push_back(e.label);
    report.per_split.resize(splits);
    std::atomic<std::size_t> next{0}, finished{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t p; (p = next.fetch_add(1)) < splits;) {
            const RngSeed ps = seed.substream(p);
            const auto part = partition(sample, train_sizes, ps.substream(1));
            report.per_split[p] = evaluate_split(part.train, part.test, roster, ps.substream(2));
            const std::size_t f = ++finished;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(f, splits);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return report;
}

} // namespace dknn
