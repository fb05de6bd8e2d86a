#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace dknn;
using testing_support::P;

namespace
{

OutwardOrdering manual_ordering(std::vector<std::vector<std::size_t>> groups)
{
    OutwardOrdering o;
    o.groups = std::move(groups);
    for (std::size_t g = 0; g < o.groups.size(); ++g)
        o.depths.push_back(1.0 - 0.1 * static_cast<double>(g));
    return o;
}

std::vector<int> predict(const ClassifierSpec& spec, const LabeledSample& train, std::span<const Point> qs)
{
    return predict_all(fit(spec, train), qs);
}

ClassifierSpec spec_of(Method m, DepthKind kind = DepthKind::halfspace, std::size_t k = 1)
{
    ClassifierSpec s;
    s.method = m;
    s.depth.kind = kind;
    s.k = k;
    s.seed = {11, 0};
    return s;
}

} // namespace

TEST(Vote, Unanimous)
{
    const std::vector<int> labels{1, 1, 1};
    EXPECT_EQ(vote_by_groups(manual_ordering({{0}, {1}, {2}}), labels, 3, {}).label, 1);
}

TEST(Vote, Majority)
{
    const std::vector<int> labels{1, 1, 0, 1, 0};
    const auto v = vote_by_groups(manual_ordering({{0}, {1}, {2}, {3}, {4}}), labels, 4, {});
    EXPECT_EQ(v.label, 1);
    EXPECT_EQ(v.class1, 3u);
    EXPECT_FALSE(v.coin);
}

TEST(Vote, TieExpandsToNextRegion)
{
    // First region: 2 vs 2. Adding the next group gives 5 class-1 vs 3 class-0.
    const std::vector<int> labels{1, 1, 0, 0, 1, 1, 1, 0};
    const auto v = vote_by_groups(manual_ordering({{0, 1, 2, 3}, {4, 5, 6, 7}}), labels, 4, {});
    EXPECT_EQ(v.label, 1);
    EXPECT_EQ(v.regions, 2u);
    EXPECT_FALSE(v.coin);
}

TEST(Vote, FullTieUsesSeededCoin)
{
    const std::vector<int> labels{1, 0, 1, 0};
    const auto o = manual_ordering({{0, 1}, {2, 3}});
    int ones = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto v = vote_by_groups(o, labels, 2, {s, 0});
        EXPECT_TRUE(v.coin);
        EXPECT_EQ(v.label, vote_by_groups(o, labels, 2, {s, 0}).label);
        ones += v.label;
    }
    EXPECT_GT(ones, 70);
    EXPECT_LT(ones, 130);
}

TEST(Posterior, Counting)
{
    const LabeledSample s({P({1}), P({-1.5}), P({2}), P({-2.5}), P({10})}, {1, 0, 1, 0, 1});
    EXPECT_DOUBLE_EQ(dknn_posterior(P({0}), s, DepthSpec{}, 4), 0.5);
    const LabeledSample ones({P({0}), P({1}), P({2})}, {1, 1, 1});
    EXPECT_DOUBLE_EQ(dknn_posterior(P({0.5}), ones, DepthSpec{}, 2), 1.0);
}

TEST(Posterior, UnivariateEqualsEuclideanFraction)
{
    const auto s = testing_support::two_class(40, 1, {3, 0});
    const auto qs = testing_support::normal_points(20, 1, {3, 1});
    for (auto kind : {DepthKind::halfspace, DepthKind::simplicial, DepthKind::mahalanobis, DepthKind::projection}) {
        for (const auto& q : qs) {
            for (std::size_t k : {1u, 5u, 12u}) {
                const auto o = distance_ordering(q, s.points());
                const auto nb = neighborhood_from_ordering(q, o, k);
                double c1 = 0;
                for (auto i : nb.members)
                    c1 += s.label(i);
                EXPECT_DOUBLE_EQ(dknn_posterior(q, s, DepthSpec::of(kind), k), c1 / double(nb.realized_count));
            }
        }
    }
}

TEST(Posterior, PlugInIdentity)
{
    const auto s = testing_support::two_class(60, 2, {4, 0});
    const auto qs = testing_support::normal_points(40, 2, {4, 1});
    std::size_t checked = 0;
    for (const auto& q : qs) {
        for (std::size_t k : {3u, 7u, 20u}) {
            const auto v = dknn_vote(q, s, DepthSpec{}, k, {1, 0});
            if (v.regions > 1 || v.coin)
                continue;
            ++checked;
            EXPECT_EQ(v.label, dknn_posterior(q, s, DepthSpec{}, k) > 0.5 ? 1 : 0);
        }
    }
    EXPECT_GT(checked, 60u);
}

TEST(Dknn, OutsiderGetsLabel)
{
    const auto s = testing_support::two_class(50, 2, {5, 0});
    for (auto kind : {DepthKind::halfspace, DepthKind::simplicial, DepthKind::mahalanobis, DepthKind::projection}) {
        const int y = dknn_classify(P({1e3, -2e3}), s, DepthSpec::of(kind), 5, {});
        EXPECT_TRUE(y == 0 || y == 1);
    }
}

TEST(Dknn, RejectsBadInput)
{
    const auto s = testing_support::two_class(10, 2, {5, 0});
    EXPECT_THROW(dknn_classify(P({0, 0}), s, DepthSpec{}, 0, {}), ValidationError);
    EXPECT_THROW(dknn_classify(P({0, 0}), s, DepthSpec{}, 11, {}), ValidationError);
    EXPECT_THROW(dknn_classify(P({0, 0, 0}), s, DepthSpec{}, 1, {}), ValidationError);
    const LabeledSample one({P({0, 0}), P({1, 1})}, {1, 1});
    EXPECT_THROW(dknn_classify(P({0, 0}), one, DepthSpec{}, 1, {}), ValidationError);
}

TEST(EuclideanKnn, Examples)
{
    const LabeledSample s({P({0, 0}), P({3, 3}), P({4, 4})}, {0, 1, 1});
    EXPECT_EQ(euclidean_knn_classify(P({0, 0}), s, 1, {}), 0);
    const LabeledSample sym({P({-1, 0}), P({1, 0})}, {0, 1});
    EXPECT_EQ(euclidean_knn_classify(P({0.5, 0}), sym, 1, {}), 1);
}

TEST(EuclideanKnn, MatchesLinearScan)
{
    for (std::uint64_t f = 0; f < 100; ++f) {
        const auto s = testing_support::two_class(30, 2, {f, 31}, 0.8);
        // Rounded coordinates create distance ties.
        std::vector<Point> pts = s.points();
        for (auto& p : pts)
            p = (p * 2.0).array().round() / 2.0;
        const LabeledSample r(pts, s.labels());
        const Point q = testing_support::normal_points(1, 2, {f, 32}).front().array().round().matrix();
        for (std::size_t k : {1u, 4u, 9u}) {
            const RngSeed coin{f, k};
            EXPECT_EQ(euclidean_knn_classify(q, r, k, coin), oracle::knn_scan(q, r, k, coin)) << f;
        }
    }
}

TEST(AffineKnn, IsotropicDataMatchesEuclidean)
{
    auto s = testing_support::two_class(80, 2, {6, 0}, 1.0);
    const Matrix w = inverse_sqrt(pooled_covariance(s));
    const auto iso = apply_affine(AffineMap(w, Point::Zero(2)), s);
    const auto qs = testing_support::normal_points(50, 2, {6, 1});
    for (std::size_t k : {1u, 5u, 11u})
        for (std::size_t i = 0; i < qs.size(); ++i)
            EXPECT_EQ(affine_knn_classify(qs[i], iso, k, {i, 0}), euclidean_knn_classify(qs[i], iso, k, {i, 0}));
}

TEST(AffineInvariance, PredictionsUnchanged)
{
    std::size_t compared = 0;
    for (std::uint64_t f = 0; f < 6; ++f) {
        const auto s = testing_support::two_class(40, 2, {f, 41});
        const auto qs = testing_support::normal_points(15, 2, {f, 42});
        for (std::uint64_t a = 0; a < 3; ++a) {
            const auto map = testing_support::random_affine(2, {f * 10 + a, 43});
            const auto ts = apply_affine(map, s);
            const auto tq = apply_affine(map, qs);
            for (auto m : {Method::knnaff, Method::lda, Method::qda}) {
                EXPECT_EQ(predict(spec_of(m, DepthKind::halfspace, 5), s, qs),
                          predict(spec_of(m, DepthKind::halfspace, 5), ts, tq));
                ++compared;
            }
            for (auto kind : {DepthKind::halfspace, DepthKind::simplicial, DepthKind::mahalanobis}) {
                EXPECT_EQ(predict(spec_of(Method::dknn, kind, 5), s, qs),
                          predict(spec_of(Method::dknn, kind, 5), ts, tq))
                    << to_string(kind);
                ++compared;
            }
        }
    }
    EXPECT_EQ(compared, 108u);
}

TEST(AffineInvariance, EuclideanKnnIsNotInvariant)
{
    // Flat classes as in the third simulation setup; a strong shear breaks it.
    const auto s = generate(Setup::flat, 100, {1, 0});
    const auto qs = generate(Setup::flat, 100, {1, 1}).points();
    Matrix a(2, 2);
    a << 0.2, 0, 3, 5;
    const AffineMap map(a, P({1, -2}));
    const auto plain = predict(spec_of(Method::knn, DepthKind::halfspace, 5), s, qs);
    const auto moved = predict(spec_of(Method::knn, DepthKind::halfspace, 5), apply_affine(map, s),
                               apply_affine(map, std::span<const Point>(qs)));
    EXPECT_NE(plain, moved);
    const auto aff = predict(spec_of(Method::knnaff, DepthKind::halfspace, 5), s, qs);
    EXPECT_NE(plain, aff);
}

TEST(Gaussian, LdaSymmetricBoundary)
{
    std::vector<Point> pts;
    std::vector<int> ys;
    for (double dx : {-0.5, 0.5})
        for (double dy : {-0.5, 0.5}) {
            pts.push_back(P({-1 + dx, dy}));
            ys.push_back(0);
            pts.push_back(P({1 + dx, dy}));
            ys.push_back(1);
        }
    const LabeledSample s(pts, ys);
    const auto lda = fit_lda(s);
    EXPECT_EQ(lda.classify(P({0.1, 0})), 1);
    EXPECT_EQ(lda.classify(P({-0.1, 3})), 0);
    EXPECT_EQ(lda.classify(P({0, 0})), 0); // exact tie goes to class 0
}

TEST(Gaussian, QdaWithPooledCovarianceReproducesLda)
{
    const auto s = testing_support::two_class(80, 2, {7, 0});
    const auto lda = fit_lda(s);
    const Matrix pooled = within_class_covariance(s);
    const GaussianRule nested({lda.mean(0), lda.mean(1)}, {pooled, pooled}, {lda.prior(0), lda.prior(1)}, false);
    for (const auto& q : testing_support::normal_points(200, 2, {7, 1}))
        EXPECT_EQ(nested.classify(q), lda.classify(q));
}

TEST(Gaussian, SingularClassCovariance)
{
    const LabeledSample s({P({0, 0}), P({1, 1}), P({2, 2}), P({0, 1}), P({1, 0}), P({2, 3})}, {0, 0, 0, 1, 1, 1});
    EXPECT_THROW(fit_qda(s), SingularityError);
}

TEST(LabelSwap, FlipsEveryPrediction)
{
    const auto s = testing_support::two_class(50, 2, {8, 0});
    const auto sw = s.swapped_labels();
    const auto qs = testing_support::normal_points(40, 2, {8, 1});
    for (const auto& q : qs) {
        for (std::size_t k : {1u, 4u, 10u}) {
            const auto a = dknn_vote(q, s, DepthSpec{}, k, {1, 0});
            const auto b = dknn_vote(q, sw, DepthSpec{}, k, {1, 0});
            if (a.coin)
                EXPECT_EQ(a.label, b.label); // the swapped convention would flip the coin too
            else
                EXPECT_EQ(a.label, 1 - b.label);
        }
        EXPECT_EQ(fit_lda(s).classify(q), 1 - fit_lda(sw).classify(q));
    }
}

TEST(Univariate, DepthKnnEqualsEuclideanKnn)
{
    for (std::uint64_t f = 0; f < 20; ++f) {
        const auto s = testing_support::two_class(50, 1, {f, 51}, 0.7);
        const auto qs = testing_support::normal_points(20, 1, {f, 52});
        for (std::size_t k : {1u, 3u, 5u, 15u}) {
            auto base = spec_of(Method::knn, DepthKind::halfspace, k);
            const auto want = predict(base, s, qs);
            for (auto kind : {DepthKind::halfspace, DepthKind::simplicial, DepthKind::mahalanobis}) {
                auto sp = spec_of(Method::dknn, kind, k);
                EXPECT_EQ(predict(sp, s, qs), want) << to_string(kind) << " k=" << k;
            }
        }
    }
}

TEST(DDPoints, OutsiderOfOneClass)
{
    std::vector<Point> pts{P({0, 0}), P({1, 0}), P({0, 1}), P({1, 1}), P({0.5, 0.5})};
    std::vector<int> ys{0, 0, 0, 0, 0};
    for (const auto& p : {P({10, 10}), P({11, 10}), P({10, 11})}) {
        pts.push_back(p);
        ys.push_back(1);
    }
    const LabeledSample s(pts, ys);
    const auto dd = dd_points(s, DepthSpec{});
    EXPECT_GT(dd[4].d0, 0.0);
    EXPECT_EQ(dd[4].d1, 0.0);
    const auto sw = dd_points(s.swapped_labels(), DepthSpec{});
    for (std::size_t i = 0; i < dd.size(); ++i) {
        EXPECT_EQ(dd[i].d0, sw[i].d1);
        EXPECT_EQ(dd[i].d1, sw[i].d0);
    }
}

TEST(DDPoints, EqualScalarDepthCalls)
{
    const auto s = testing_support::two_class(10, 2, {9, 0});
    const auto dd = dd_points(s, DepthSpec{});
    const auto c0 = s.class_points(0), c1 = s.class_points(1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(dd[i].d0, halfspace_depth(s.point(i), c0));
        EXPECT_EQ(dd[i].d1, halfspace_depth(s.point(i), c1));
    }
}

TEST(DDExact, SeparableByDiagonal)
{
    const std::vector<DDPoint> pts{{0.1, 0.5}, {0.2, 0.4}, {0.5, 0.1}, {0.4, 0.0}};
    const std::vector<int> ys{1, 1, 0, 0};
    const auto f = fit_dd_exact_points(pts, ys, 1);
    EXPECT_EQ(f.errors, 0u);
    EXPECT_EQ(f.coefficients, std::vector<double>{1.0});
}

TEST(DDExact, DiagonalIsMaxDepthRule)
{
    const auto s = testing_support::two_class(40, 2, {10, 0});
    const DDClassifier diag(s, DepthSpec{}, {1.0}, 0);
    for (const auto& q : testing_support::normal_points(50, 2, {10, 1})) {
        const auto p = diag.dd_point(q);
        EXPECT_EQ(diag.classify(q), p.d1 > p.d0 ? 1 : 0);
    }
}

TEST(DDExact, MatchesBruteForceOverSinglePointCandidates)
{
    for (std::uint64_t f = 0; f < 20; ++f) {
        const auto s = testing_support::two_class(12, 2, {f, 61}, 0.7);
        const auto pts = dd_points(s, DepthSpec{});
        const auto& ys = s.labels();
        auto errors_of = [&](double slope) {
            std::size_t e = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double margin = slope * pts[i].d0 - pts[i].d1;
                e += ys[i] == 1 ? margin > 0 : margin < 0;
            }
            return e;
        };
        std::size_t best = errors_of(1.0);
        double best_slope = 1.0;
        for (const auto& p : pts) {
            if (p.d0 == 0.0)
                continue;
            const auto e = errors_of(p.d1 / p.d0);
            if (e < best) {
                best = e;
                best_slope = p.d1 / p.d0;
            }
        }
        const auto fit = fit_dd_exact_points(pts, ys, 1);
        EXPECT_EQ(fit.errors, best) << f;
        EXPECT_DOUBLE_EQ(fit.coefficients[0], best_slope) << f;
        EXPECT_LE(fit.errors, dd_misclassification(pts, ys, std::vector<double>{1.0}));
    }
}

TEST(DDExact, QuadraticMatchesBruteForceOverPairs)
{
    const auto s = testing_support::two_class(14, 2, {12, 0}, 0.6);
    const auto pts = dd_points(s, DepthSpec{});
    std::size_t best = dd_misclassification(pts, s.labels(), std::vector<double>{1.0, 0.0});
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double a = pts[i].d0, b = pts[j].d0;
            if (a == 0 || b == 0 || a == b)
                continue;
            // c1 a + c2 a^2 = y_a, c1 b + c2 b^2 = y_b
            const double det = a * b * b - b * a * a;
            const double c1 = (pts[i].d1 * b * b - pts[j].d1 * a * a) / det;
            const double c2 = (a * pts[j].d1 - b * pts[i].d1) / det;
            best = std::min(best, dd_misclassification(pts, s.labels(), std::vector<double>{c1, c2}));
        }
    EXPECT_EQ(fit_dd_exact_points(pts, s.labels(), 2).errors, best);
}

TEST(DDExact, CandidateCapSubsamples)
{
    const auto s = testing_support::two_class(40, 2, {13, 0});
    const auto pts = dd_points(s, DepthSpec{});
    const auto full = fit_dd_exact_points(pts, s.labels(), 2);
    const auto capped = fit_dd_exact_points(pts, s.labels(), 2, {.candidate_cap = 100, .seed = {1, 0}});
    EXPECT_LE(capped.candidates, 101u);
    EXPECT_GE(capped.errors, full.errors);
    const auto again = fit_dd_exact_points(pts, s.labels(), 2, {.candidate_cap = 100, .seed = {1, 0}});
    EXPECT_EQ(again.coefficients, capped.coefficients);
}

TEST(DDExact, OutsiderHasZeroDepthInBothClasses)
{
    const auto s = testing_support::two_class(40, 2, {14, 0});
    const auto dd = fit_dd_exact(s, DepthSpec{}, 1);
    const auto p = dd.dd_point(P({100, 100}));
    EXPECT_EQ(p.d0, 0.0);
    EXPECT_EQ(p.d1, 0.0);
    EXPECT_EQ(dd.classify(P({100, 100})), 0);
}

TEST(DDSmoothed, SeparableFixtureReachesZero)
{
    const std::vector<DDPoint> pts{{0.1, 0.5}, {0.2, 0.4}, {0.5, 0.1}, {0.4, 0.0}, {0.3, 0.35}, {0.35, 0.3}};
    const std::vector<int> ys{1, 1, 0, 0, 1, 0};
    EXPECT_EQ(fit_dd_smoothed_points(pts, ys, 1, {.starts = 10, .seed = {1, 0}}).errors, 0u);
    EXPECT_EQ(fit_dd_smoothed_points(pts, ys, 2, {.starts = 10, .seed = {1, 0}}).errors, 0u);
}

TEST(DDSmoothed, ExactOptimumBeatsZeroPolynomial)
{
    for (std::uint64_t f = 0; f < 10; ++f) {
        const auto s = testing_support::two_class(40, 2, {f, 71}, 0.8);
        const auto pts = dd_points(s, DepthSpec{});
        for (int m : {1, 2}) {
            const auto exact = fit_dd_exact_points(pts, s.labels(), m);
            const std::vector<double> zero(static_cast<std::size_t>(m), 0.0);
            EXPECT_LE(dd_surrogate(pts, s.labels(), exact.coefficients, 100.0),
                      dd_surrogate(pts, s.labels(), zero, 100.0));
        }
    }
}

TEST(DDSmoothed, LargeScaleSurrogateOptimumMatchesExactError)
{
    // For m = 1 the surrogate is a function of the slope alone. Between two
    // consecutive critical slopes d1/d0 the training error is constant, so
    // the midpoints cover every attainable error level. Mahalanobis depth
    // keeps the DD-points in general position (no two on one ray).
    for (std::uint64_t f = 0; f < 10; ++f) {
        const auto s = testing_support::two_class(40, 2, {f, 81}, 0.8);
        const auto pts = dd_points(s, DepthSpec::of(DepthKind::mahalanobis));
        std::vector<double> crit;
        for (const auto& p : pts)
            if (p.d0 > 0)
                crit.push_back(p.d1 / p.d0);
        std::sort(crit.begin(), crit.end());
        std::vector<double> probes{crit.front() - 1.0, crit.back() + 1.0};
        for (std::size_t i = 0; i + 1 < crit.size(); ++i)
            probes.push_back(0.5 * (crit[i] + crit[i + 1]));
        double best_value = std::numeric_limits<double>::infinity();
        std::size_t best_errors = 0;
        for (double c : probes) {
            const std::vector<double> coef{c};
            const double v = dd_surrogate(pts, s.labels(), coef, 1e4);
            if (v < best_value) {
                best_value = v;
                best_errors = dd_misclassification(pts, s.labels(), coef);
            }
        }
        EXPECT_EQ(best_errors, fit_dd_exact_points(pts, s.labels(), 1).errors) << f;
    }
}

TEST(DDExact, PointsOnTheCurveCountForNeitherClass)
{
    // Two DD-points on one ray with opposite labels: the curve through them
    // scores zero errors there, any other slope misclassifies one of them.
    const std::vector<DDPoint> pts{{0.2, 0.1}, {0.2, 0.1}, {0.5, 0.9}, {0.6, 0.1}};
    const std::vector<int> ys{0, 1, 1, 0};
    const auto f = fit_dd_exact_points(pts, ys, 1);
    EXPECT_EQ(f.errors, 0u);
    EXPECT_DOUBLE_EQ(f.coefficients[0], 0.5);
    for (double c : {0.49, 0.51})
        EXPECT_EQ(dd_misclassification(pts, ys, std::vector<double>{c}), 1u);
}

TEST(DDSmoothed, LocalSearchNeverBeatsExactForLinearCurves)
{
    for (std::uint64_t f = 0; f < 5; ++f) {
        const auto s = testing_support::two_class(40, 2, {f, 81}, 0.8);
        const auto pts = dd_points(s, DepthSpec{});
        const auto exact = fit_dd_exact_points(pts, s.labels(), 1);
        const auto smooth = fit_dd_smoothed_points(pts, s.labels(), 1, {.t = 100, .starts = 20, .seed = {f, 0}});
        EXPECT_GE(smooth.errors, exact.errors);
        EXPECT_EQ(smooth.errors, dd_misclassification(pts, s.labels(), smooth.coefficients));
    }
}

TEST(DDSmoothed, GradientMatchesFiniteDifferences)
{
    const auto s = testing_support::two_class(30, 2, {15, 0});
    const auto pts = dd_points(s, DepthSpec{});
    const std::vector<double> c{0.7, -0.4, 0.2};
    const auto g = dd_surrogate_gradient(pts, s.labels(), c, 5.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        auto up = c, down = c;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        const double fd =
            (dd_surrogate(pts, s.labels(), up, 5.0) - dd_surrogate(pts, s.labels(), down, 5.0)) / 2e-6;
        EXPECT_NEAR(g[static_cast<Eigen::Index>(j)], fd, 1e-5);
    }
}

TEST(ClassifierModel, NeighborModelUsesPerQueryCoin)
{
    const auto s = testing_support::two_class(30, 2, {16, 0});
    const auto qs = testing_support::normal_points(20, 2, {16, 1});
    auto spec = spec_of(Method::dknn, DepthKind::halfspace, 4);
    const auto pred = predict(spec, s, qs);
    for (std::size_t i = 0; i < qs.size(); ++i)
        EXPECT_EQ(pred[i], dknn_classify(qs[i], s, spec.depth, 4, tie_seed_for(spec.seed, i)));
    const NeighborOrderer orderer(Method::dknn, s, spec.depth);
    const std::vector<std::size_t> ks{1, 4, 9};
    const auto grid = predict_neighbor_grid(orderer, qs, ks, spec.seed);
    for (std::size_t j = 0; j < ks.size(); ++j) {
        spec.k = ks[j];
        EXPECT_EQ(grid[j], predict(spec, s, qs));
    }
}

TEST(ClassifierModel, NamesAndParsing)
{
    EXPECT_EQ(spec_of(Method::dknn, DepthKind::halfspace, 13).name(), "dknn-halfspace-k13");
    EXPECT_EQ(spec_of(Method::knn, DepthKind::halfspace, 5).name(), "knn-k5");
    auto dd = spec_of(Method::dd);
    dd.m = 2;
    EXPECT_EQ(dd.name(), "dd-halfspace-m2");
    EXPECT_EQ(parse_method("qda"), Method::qda);
    EXPECT_THROW(parse_method("svm"), ValidationError);
}

TEST(ClassifierModel, ConstantRule)
{
    const auto s = testing_support::two_class(10, 2, {17, 0});
    auto spec = spec_of(Method::constant);
    spec.constant_label = 1;
    const auto qs = testing_support::normal_points(5, 2, {17, 1});
    for (int y : predict(spec, s, qs))
        EXPECT_EQ(y, 1);
    spec.constant_label = 3;
    EXPECT_THROW(fit(spec, s), ValidationError);
}

TEST(ClassifierModel, ErrorPercent)
{
    const std::vector<int> p{1, 0, 1, 1}, t{1, 1, 1, 0};
    EXPECT_DOUBLE_EQ(error_percent(p, t), 50.0);
    EXPECT_THROW(error_percent(p, std::vector<int>{1}), ValidationError);
}
