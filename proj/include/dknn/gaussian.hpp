#pragma once

// Gaussian plug-in rules: LDA (common within-class covariance) and QDA
// (per-class covariances), with priors estimated by class frequencies.

#include "core.hpp"

#include <array>

namespace dknn
{

class GaussianRule
{
public:
    GaussianRule(std::array<Point, 2> means, std::array<Matrix, 2> covariances, std::array<double, 2> priors,
                 bool linear)
        : means_(std::move(means))
        , covs_(std::move(covariances))
        , priors_(priors)
        , linear_(linear)
    {
        if (!(priors_[0] > 0 && priors_[1] > 0) || std::abs(priors_[0] + priors_[1] - 1.0) > 1e-12)
            throw ValidationError("GaussianRule: priors must be positive and sum to 1");
        for (int j = 0; j < 2; ++j) {
            require_same_dim(means_[j].size(), covs_[j].rows(), "GaussianRule");
            factors_[j] = spd_factor(covs_[j], "GaussianRule");
            const auto& l = factors_[j].matrixL();
            double logdet = 0.0;
            for (Eigen::Index i = 0; i < covs_[j].rows(); ++i)
                logdet += 2.0 * std::log(l(i, i));
            log_dets_[j] = logdet;
        }
    }

    bool linear() const noexcept { return linear_; }
    const Point& mean(int j) const { return means_[j]; }
    const Matrix& covariance(int j) const { return covs_[j]; }
    double prior(int j) const { return priors_[j]; }

    /// log(pi_j f_j(x)) up to a constant shared by both classes.
    double score(int j, const Point& x) const
    {
        const Point z = factors_[j].matrixL().solve(x - means_[j]);
        return std::log(priors_[j]) - 0.5 * log_dets_[j] - 0.5 * z.squaredNorm();
    }

    /// 1 iff pi_1 f_1(x) > pi_0 f_0(x); exact ties go to 0.
    int classify(const Point& x) const
    {
        require_same_dim(x.size(), means_[0].size(), "GaussianRule");
        return score(1, x) > score(0, x) ? 1 : 0;
    }

private:
    std::array<Point, 2> means_;
    std::array<Matrix, 2> covs_;
    std::array<double, 2> priors_;
    bool linear_;
    std::array<Eigen::LLT<Matrix>, 2> factors_;
    std::array<double, 2> log_dets_{};
};

namespace detail
{
inline std::array<double, 2> frequency_priors(const LabeledSample& s)
{
    const double n = static_cast<double>(s.size());
    return {static_cast<double>(s.count(0)) / n, static_cast<double>(s.count(1)) / n};
}
} // namespace detail

/// Within-class pooled covariance: sum_j (n_j - 1) S_j / (n - 2).
inline Matrix within_class_covariance(const LabeledSample& training)
{
    const auto d = training.dim();
    Matrix s = Matrix::Zero(d, d);
    for (int j = 0; j < 2; ++j) {
        const auto pts = training.class_points(j);
        if (pts.empty())
            continue;
        const Point m = mean(pts);
        for (const auto& p : pts)
            s.noalias() += (p - m) * (p - m).transpose();
    }
    if (training.size() < 3)
        throw InsufficientDataError("within_class_covariance: need n >= 3");
    return s / static_cast<double>(training.size() - 2);
}

inline GaussianRule fit_lda(const LabeledSample& training)
{
    if (!training.has_both_classes())
        throw ValidationError("fit_lda: training sample must contain both classes");
    const Matrix pooled = within_class_covariance(training);
    return GaussianRule({mean(training.class_points(0)), mean(training.class_points(1))}, {pooled, pooled},
                        detail::frequency_priors(training), /*linear=*/true);
}

inline GaussianRule fit_qda(const LabeledSample& training)
{
    if (!training.has_both_classes())
        throw ValidationError("fit_qda: training sample must contain both classes");
    const auto d = static_cast<std::size_t>(training.dim());
    std::array<Point, 2> means;
    std::array<Matrix, 2> covs;
    for (int j = 0; j < 2; ++j) {
        const auto pts = training.class_points(j);
        if (pts.size() < d + 1)
            throw InsufficientDataError("fit_qda: class " + std::to_string(j) + " needs at least d+1 points");
        means[j] = mean(pts);
        covs[j] = covariance(pts);
    }
    return GaussianRule(std::move(means), std::move(covs), detail::frequency_priors(training), /*linear=*/false);
}

inline int classify_gaussian(const GaussianRule& model, const Point& x) { return model.classify(x); }

} // namespace dknn
