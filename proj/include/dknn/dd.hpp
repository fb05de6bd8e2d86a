#pragma once

// Depth-versus-depth (DD) classifiers. Each training point maps to its
// DD-point (D_0(x), D_1(x)), its depths with respect to the two class
// subsamples, and the rule separates the DD-plot with a polynomial
// r(d) = c_1 d + ... + c_m d^m through the origin: label 1 iff D_1 > r(D_0).
//
// The exact fit searches the polynomials that interpolate the origin and m
// DD-points (plus the diagonal r(d) = d); the smoothed fit minimizes a
// logistic surrogate of the training error by gradient descent from random
// starting polynomials.

#include "depth.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace dknn
{

struct DDPoint
{
    DepthValue d0 = 0.0;
    DepthValue d1 = 0.0;
};

/// r(d) = sum_j c_j d^j, j = 1..m.
inline double dd_curve(std::span<const double> coefficients, double d)
{
    double r = 0.0, power = d;
    for (double c : coefficients) {
        r += c * power;
        power *= d;
    }
    return r;
}

/// Training misclassification count of a separating curve: class-1 points
/// strictly below the curve plus class-0 points strictly above it. Points on
/// the curve count for neither class.
inline std::size_t dd_misclassification(std::span<const DDPoint> points, std::span<const int> labels,
                                        std::span<const double> coefficients)
{
    std::size_t errors = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double margin = dd_curve(coefficients, points[i].d0) - points[i].d1;
        errors += labels[i] == 1 ? (margin > 0) : (-margin > 0);
    }
    return errors;
}

namespace detail
{
inline double logistic(double z)
{
    if (z >= 0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// sigma(z) (1 - sigma(z)) without cancellation.
inline double logistic_slope(double z)
{
    const double e = std::exp(-std::abs(z));
    return e / ((1.0 + e) * (1.0 + e));
}

/// Lexicographic unranking of m-combinations of {0..n-1}.
inline std::vector<std::size_t> unrank_combination(std::uint64_t rank, std::size_t n, std::size_t m)
{
    std::vector<std::size_t> c;
    c.reserve(m);
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < m; ++slot) {
        for (std::size_t v = next;; ++v) {
            const std::uint64_t block = choose(n - v - 1, m - slot - 1);
            if (rank < block) {
                c.push_back(v);
                next = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return c;
}

/// `count` distinct values from [0, total), sorted (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_ranks(std::uint64_t total, std::uint64_t count, Engine& rng)
{
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(count * 2);
    for (std::uint64_t j = total - count; j < total; ++j) {
        const std::uint64_t t = uniform_index(rng, j + 1);
        if (!chosen.insert(t).second)
            chosen.insert(j);
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Coefficients of the polynomial through the origin and the given DD-points,
/// or nothing when the interpolation is degenerate (a zero or repeated d0).
inline std::optional<std::vector<double>> interpolate_through_origin(std::span<const DDPoint> pts)
{
    const auto m = static_cast<Eigen::Index>(pts.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        if (pts[i].d0 == 0.0)
            return std::nullopt;
        for (Eigen::Index j = 0; j < i; ++j)
            if (pts[i].d0 == pts[j].d0)
                return std::nullopt;
    }
    if (m == 1)
        return std::vector<double>{pts[0].d1 / pts[0].d0};
    Matrix v(m, m);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double power = pts[i].d0;
        for (Eigen::Index j = 0; j < m; ++j) {
            v(i, j) = power;
            power *= pts[i].d0;
        }
        y[i] = pts[i].d1;
    }
    const Eigen::VectorXd c = v.fullPivLu().solve(y);
    if (!c.allFinite())
        return std::nullopt;
    return std::vector<double>(c.data(), c.data() + m);
}
} // namespace detail

/// DD-points of the training sample (no symmetrization).
inline std::vector<DDPoint> dd_points(const LabeledSample& training, const DepthSpec& spec)
{
    if (!training.has_both_classes())
        throw ValidationError("dd_points: training sample must contain both classes");
    const EmpiricalDepth depth0(training.class_points(0), spec);
    const EmpiricalDepth depth1(training.class_points(1), spec);
    std::vector<DDPoint> out;
    out.reserve(training.size());
    for (const auto& p : training.points())
        out.push_back({depth0(p), depth1(p)});
    return out;
}

/// Fitted DD rule: the two class depth functions and the separating curve.
class DDClassifier
{
public:
    DDClassifier(const LabeledSample& training, const DepthSpec& spec, std::vector<double> coefficients,
                 std::size_t training_errors)
        : depth0_(training.class_points(0), spec)
        , depth1_(training.class_points(1), spec)
        , coefficients_(std::move(coefficients))
        , training_errors_(training_errors)
    {
    }

    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    std::size_t degree() const noexcept { return coefficients_.size(); }
    std::size_t training_errors() const noexcept { return training_errors_; }

    DDPoint dd_point(const Point& x) const { return {depth0_(x), depth1_(x)}; }

    /// 1 iff D_1(x) > r(D_0(x)); ties go to 0.
    int classify(const Point& x) const
    {
        const auto p = dd_point(x);
        return p.d1 > dd_curve(coefficients_, p.d0) ? 1 : 0;
    }

private:
    EmpiricalDepth depth0_;
    EmpiricalDepth depth1_;
    std::vector<double> coefficients_;
    std::size_t training_errors_;
};

struct DDExactOptions
{
    std::uint64_t candidate_cap = 20'000;
    RngSeed seed{};
};

struct DDFit
{
    std::vector<double> coefficients;
    std::size_t errors = 0;
    std::uint64_t candidates = 0; // candidates evaluated, degenerate ones excluded
};

/// Exact search on precomputed DD-points. Candidate 0 is the diagonal; the
/// rest interpolate the origin and each m-subset of DD-points in
/// lexicographic order, uniformly subsampled to the cap when C(n, m) exceeds
/// it. The first candidate reaching the minimal error wins.
inline DDFit fit_dd_exact_points(std::span<const DDPoint> points, std::span<const int> labels, int m,
                                 const DDExactOptions& options = {})
{
    if (m != 1 && m != 2)
        throw ValidationError("fit_dd_exact: degree m must be 1 or 2");
    const std::size_t n = points.size();
    DDFit best;
    best.coefficients.assign(static_cast<std::size_t>(m), 0.0);
    best.coefficients[0] = 1.0;
    best.errors = dd_misclassification(points, labels, best.coefficients);
    best.candidates = 1;

    const auto mm = static_cast<std::size_t>(m);
    std::vector<DDPoint> chosen(mm);
    auto consider = [&](const std::vector<std::size_t>& subset) {
        for (std::size_t i = 0; i < mm; ++i)
            chosen[i] = points[subset[i]];
        const auto c = detail::interpolate_through_origin(chosen);
        if (!c)
            return;
        ++best.candidates;
        const std::size_t err = dd_misclassification(points, labels, *c);
        if (err < best.errors) {
            best.errors = err;
            best.coefficients = *c;
        }
    };

    if (n < mm)
        return best;
    const std::uint64_t total = detail::choose(n, mm);
    if (total <= options.candidate_cap) {
        std::vector<std::size_t> c(mm);
        for (std::size_t i = 0; i < mm; ++i)
            c[i] = i;
        do {
            consider(c);
        } while (detail::next_combination(c, n));
    } else {
        Engine rng = make_engine(options.seed);
        for (auto rank : detail::sample_ranks(total, options.candidate_cap, rng))
            consider(detail::unrank_combination(rank, n, mm));
    }
    return best;
}

inline DDClassifier fit_dd_exact(const LabeledSample& training, const DepthSpec& spec, int m,
                                 const DDExactOptions& options = {})
{
    const auto pts = dd_points(training, spec);
    auto fit = fit_dd_exact_points(pts, training.labels(), m, options);
    return DDClassifier(training, spec, std::move(fit.coefficients), fit.errors);
}

struct DDSmoothedOptions
{
    double t = 100.0;
    int starts = 100;
    int max_iterations = 500;
    RngSeed seed{};
};

/// Logistic surrogate of the training error: the indicator of a positive
/// margin is replaced by 1 / (1 + exp(-t margin)).
inline double dd_surrogate(std::span<const DDPoint> points, std::span<const int> labels,
                           std::span<const double> coefficients, double t)
{
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double margin = dd_curve(coefficients, points[i].d0) - points[i].d1;
        s += detail::logistic(labels[i] == 1 ? t * margin : -t * margin);
    }
    return s;
}

inline Eigen::VectorXd dd_surrogate_gradient(std::span<const DDPoint> points, std::span<const int> labels,
                                             std::span<const double> coefficients, double t)
{
    const auto m = static_cast<Eigen::Index>(coefficients.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double margin = dd_curve(coefficients, points[i].d0) - points[i].d1;
        const double sign = labels[i] == 1 ? 1.0 : -1.0;
        const double w = sign * t * detail::logistic_slope(sign * t * margin);
        double power = points[i].d0;
        for (Eigen::Index j = 0; j < m; ++j) {
            g[j] += w * power;
            power *= points[i].d0;
        }
    }
    return g;
}

/// Gradient descent with backtracking from `starts` standard-normal
/// coefficient vectors. Every iterate is scored by the exact training error
/// and the best one seen is returned.
inline DDFit fit_dd_smoothed_points(std::span<const DDPoint> points, std::span<const int> labels, int m,
                                    const DDSmoothedOptions& options = {})
{
    if (m < 1 || m > 3)
        throw ValidationError("fit_dd_smoothed: degree m must be 1, 2 or 3");
    if (!(options.t > 0))
        throw ValidationError("fit_dd_smoothed: t must be positive");
    if (options.starts < 1)
        throw ValidationError("fit_dd_smoothed: need at least one start");

    const auto mm = static_cast<std::size_t>(m);
    DDFit best;
    best.errors = std::numeric_limits<std::size_t>::max();
    Engine rng = make_engine(options.seed);

    auto visit = [&](const std::vector<double>& c) {
        ++best.candidates;
        const std::size_t err = dd_misclassification(points, labels, c);
        if (err < best.errors) {
            best.errors = err;
            best.coefficients = c;
        }
    };

    for (int start = 0; start < options.starts; ++start) {
        std::vector<double> c(mm);
        for (auto& v : c)
            v = standard_normal(rng);
        double f = dd_surrogate(points, labels, c, options.t);
        if (!std::isfinite(f))
            continue;
        visit(c);
        double step = 1.0;
        for (int it = 0; it < options.max_iterations; ++it) {
            const Eigen::VectorXd g = dd_surrogate_gradient(points, labels, c, options.t);
            const double gg = g.squaredNorm();
            if (!std::isfinite(gg) || gg < 1e-20)
                break;
            std::vector<double> trial(mm);
            double f_trial = f;
            bool accepted = false;
            for (int halving = 0; halving < 60; ++halving) {
                for (std::size_t j = 0; j < mm; ++j)
                    trial[j] = c[j] - step * g[static_cast<Eigen::Index>(j)];
                f_trial = dd_surrogate(points, labels, trial, options.t);
                if (std::isfinite(f_trial) && f_trial <= f - 1e-4 * step * gg) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                break;
            c = trial;
            f = f_trial;
            visit(c);
            step *= 2.0;
        }
    }
    if (best.coefficients.empty()) {
        best.coefficients.assign(mm, 0.0);
        best.coefficients[0] = 1.0;
        best.errors = dd_misclassification(points, labels, best.coefficients);
    }
    return best;
}

inline DDClassifier fit_dd_smoothed(const LabeledSample& training, const DepthSpec& spec, int m,
                                    const DDSmoothedOptions& options = {})
{
    const auto pts = dd_points(training, spec);
    auto fit = fit_dd_smoothed_points(pts, training.labels(), m, options);
    return DDClassifier(training, spec, std::move(fit.coefficients), fit.errors);
}

inline int classify_dd(const DDClassifier& model, const Point& x) { return model.classify(x); }

} // namespace dknn
