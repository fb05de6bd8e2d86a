#pragma once

// Shared data model: points, labeled samples, affine maps, seeded RNG streams,
// and the handful of dense linear-algebra helpers the rest of the library needs.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dknn
{

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors. ValidationError maps to CLI exit code 1, ComputationError to 2.

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error
{
public:
    using Error::Error;
};

class InsufficientDataError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

class ComputationError : public Error
{
public:
    using Error::Error;
};

class SingularityError : public ComputationError
{
public:
    SingularityError(const std::string& what, double eigenvalue)
        : ComputationError(what + " (eigenvalue " + std::to_string(eigenvalue) + ")")
        , eigenvalue_(eigenvalue)
    {
    }

    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

class DegenerateScaleError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

class DegenerateVolumeError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

// ---------------------------------------------------------------------------

inline void require_finite(const Point& p, const char* context)
{
    if (p.size() < 1)
        throw ValidationError(std::string(context) + ": point has dimension 0");
    if (!p.allFinite())
        throw ValidationError(std::string(context) + ": point has non-finite coordinates");
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* context)
{
    if (a != b)
        throw ValidationError(std::string(context) + ": dimension mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
}

inline Eigen::Index common_dimension(std::span<const Point> points, const char* context)
{
    if (points.empty())
        throw ValidationError(std::string(context) + ": empty point set");
    const Eigen::Index d = points.front().size();
    for (const auto& p : points)
        require_same_dim(p.size(), d, context);
    return d;
}

/// n points in R^d with binary labels. Immutable once built; the constructor
/// enforces n >= 1, a common dimension, finite coordinates and labels in {0,1}.
class LabeledSample
{
public:
    LabeledSample() = default;

    LabeledSample(std::vector<Point> points, std::vector<int> labels)
        : points_(std::move(points))
        , labels_(std::move(labels))
    {
        if (points_.empty())
            throw ValidationError("LabeledSample: need at least one observation");
        if (points_.size() != labels_.size())
            throw ValidationError("LabeledSample: " + std::to_string(points_.size()) + " points but " +
                                  std::to_string(labels_.size()) + " labels");
        const auto d = points_.front().size();
        for (const auto& p : points_) {
            require_same_dim(p.size(), d, "LabeledSample");
            require_finite(p, "LabeledSample");
        }
        for (int y : labels_)
            if (y != 0 && y != 1)
                throw ValidationError("LabeledSample: label " + std::to_string(y) + " not in {0,1}");
    }

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    Eigen::Index dim() const noexcept { return points_.empty() ? 0 : points_.front().size(); }

    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    int label(std::size_t i) const { return labels_[i]; }

    std::size_t count(int label) const
    {
        std::size_t c = 0;
        for (int y : labels_)
            c += (y == label);
        return c;
    }

    bool has_both_classes() const { return count(0) > 0 && count(1) > 0; }

    /// Points carrying the given label, in original order.
    std::vector<Point> class_points(int label) const
    {
        std::vector<Point> out;
        for (std::size_t i = 0; i < size(); ++i)
            if (labels_[i] == label)
                out.push_back(points_[i]);
        return out;
    }

    LabeledSample subset(std::span<const std::size_t> indices) const
    {
        std::vector<Point> pts;
        std::vector<int> ys;
        pts.reserve(indices.size());
        ys.reserve(indices.size());
        for (auto i : indices) {
            pts.push_back(points_.at(i));
            ys.push_back(labels_.at(i));
        }
        return LabeledSample(std::move(pts), std::move(ys));
    }

    /// Same points with labels 0 and 1 exchanged.
    LabeledSample swapped_labels() const
    {
        std::vector<int> ys(labels_.size());
        for (std::size_t i = 0; i < ys.size(); ++i)
            ys[i] = 1 - labels_[i];
        return LabeledSample(points_, std::move(ys));
    }

private:
    std::vector<Point> points_;
    std::vector<int> labels_;
};

/// x -> A x + b with A invertible.
class AffineMap
{
public:
    static constexpr double kDeterminantTolerance = 1e-12;

    AffineMap(Matrix matrix, Point shift)
        : matrix_(std::move(matrix))
        , shift_(std::move(shift))
    {
        if (matrix_.rows() != matrix_.cols())
            throw ValidationError("AffineMap: matrix must be square");
        require_same_dim(matrix_.rows(), shift_.size(), "AffineMap");
        if (std::abs(matrix_.determinant()) <= kDeterminantTolerance)
            throw ValidationError("AffineMap: matrix is not invertible");
    }

    static AffineMap identity(Eigen::Index d) { return {Matrix::Identity(d, d), Point::Zero(d)}; }

    const Matrix& matrix() const noexcept { return matrix_; }
    const Point& shift() const noexcept { return shift_; }
    Eigen::Index dim() const noexcept { return shift_.size(); }

    Point operator()(const Point& x) const
    {
        require_same_dim(x.size(), dim(), "AffineMap");
        return matrix_ * x + shift_;
    }

    AffineMap inverse() const
    {
        Matrix inv = matrix_.inverse();
        Point b = -(inv * shift_);
        return {std::move(inv), std::move(b)};
    }

private:
    Matrix matrix_;
    Point shift_;
};

inline std::vector<Point> apply_affine(const AffineMap& map, std::span<const Point> points)
{
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back(map(p));
    return out;
}

inline LabeledSample apply_affine(const AffineMap& map, const LabeledSample& sample)
{
    return LabeledSample(apply_affine(map, std::span<const Point>(sample.points())), sample.labels());
}

// ---------------------------------------------------------------------------
// Seeded RNG streams. A stream is keyed by (seed, stream-id); equal keys give
// bit-identical draws regardless of how many other streams were consumed.

namespace detail
{
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

struct RngSeed
{
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Independent child stream; used to carve per-purpose streams out of a
    /// replication stream (train draw, test draw, coin flips, Monte Carlo...).
    RngSeed substream(std::uint64_t tag) const noexcept
    {
        return {detail::splitmix64(seed ^ detail::splitmix64(stream + 0x632be59bd9b4e019ULL)), tag};
    }

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Engine = std::mt19937_64;

inline Engine make_engine(RngSeed s)
{
    const std::uint64_t a = detail::splitmix64(s.seed);
    const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(s.stream ^ 0xd1b54a32d192ed03ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Engine(seq);
}

/// Standard normal draw. Box-Muller on the engine's raw output keeps draws
/// identical across standard library implementations.
inline double standard_normal(Engine& rng)
{
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Uniform on [0,1).
inline double uniform01(Engine& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Engine& rng, std::size_t n)
{
    // Lemire-style rejection keeps the draw unbiased and implementation-independent.
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

inline bool fair_coin(Engine& rng) { return (rng() >> 63) != 0; }

// ---------------------------------------------------------------------------
// Moments and matrix helpers (dense, d small).

inline Point mean(std::span<const Point> points)
{
    const auto d = common_dimension(points, "mean");
    Point m = Point::Zero(d);
    for (const auto& p : points)
        m += p;
    return m / static_cast<double>(points.size());
}

/// Sample covariance, divisor n-1.
inline Matrix covariance(std::span<const Point> points)
{
    const auto d = common_dimension(points, "covariance");
    if (points.size() < 2)
        throw InsufficientDataError("covariance: need at least 2 points, got " +
                                    std::to_string(points.size()));
    const Point m = mean(points);
    Matrix s = Matrix::Zero(d, d);
    for (const auto& p : points) {
        const Point c = p - m;
        s.noalias() += c * c.transpose();
    }
    return s / static_cast<double>(points.size() - 1);
}

/// Covariance of all points, labels ignored.
inline Matrix pooled_covariance(const LabeledSample& sample)
{
    if (sample.size() < 2)
        throw InsufficientDataError("pooled_covariance: need n >= 2, got " + std::to_string(sample.size()));
    return covariance(sample.points());
}

inline constexpr double kEigenvalueFloor = 1e-12;

/// Symmetric M with M * sigma * M = I, via the symmetric eigendecomposition.
/// No regularization: an eigenvalue at or below the floor is an error.
inline Matrix inverse_sqrt(const Matrix& sigma)
{
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
        throw ValidationError("inverse_sqrt: matrix must be square and non-empty");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ValidationError("inverse_sqrt: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success)
        throw ComputationError("inverse_sqrt: eigendecomposition failed");
    const auto& vals = eig.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (!(vals[i] > kEigenvalueFloor))
            throw SingularityError("inverse_sqrt: matrix is singular or not positive definite", vals[i]);
    const Eigen::VectorXd inv_root = vals.cwiseSqrt().cwiseInverse();
    Matrix m = eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (m + m.transpose());
}

/// Cholesky factor of an SPD matrix, or SingularityError.
inline Eigen::LLT<Matrix> spd_factor(const Matrix& sigma, const char* context)
{
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (!(lo > kEigenvalueFloor))
        throw SingularityError(std::string(context) + ": covariance is singular", lo);
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw SingularityError(std::string(context) + ": covariance is not positive definite", lo);
    return llt;
}

inline double squared_distance(const Point& a, const Point& b) { return (a - b).squaredNorm(); }

} // namespace dknn
