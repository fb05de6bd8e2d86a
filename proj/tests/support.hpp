#pragma once

#include <dknn/dknn.hpp>

#include <filesystem>
#include <initializer_list>

namespace testing_support
{

using dknn::Point;

inline Point P(std::initializer_list<double> v)
{
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        p[i++] = x;
    return p;
}

/// n standard-normal points in R^d.
inline std::vector<Point> normal_points(std::size_t n, Eigen::Index d, dknn::RngSeed seed)
{
    auto rng = dknn::make_engine(seed);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(d);
        for (Eigen::Index j = 0; j < d; ++j)
            p[j] = dknn::standard_normal(rng);
        pts.push_back(p);
    }
    return pts;
}

/// Two shifted normal clouds with alternating labels.
inline dknn::LabeledSample two_class(std::size_t n, Eigen::Index d, dknn::RngSeed seed, double shift = 1.0)
{
    auto pts = normal_points(n, d, seed);
    std::vector<int> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = static_cast<int>(i % 2);
        if (ys[i] == 1)
            pts[i].array() += shift;
    }
    return {std::move(pts), std::move(ys)};
}

inline dknn::AffineMap random_affine(Eigen::Index d, dknn::RngSeed seed)
{
    auto rng = dknn::make_engine(seed);
    for (;;) {
        dknn::Matrix a(d, d);
        Point b(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            b[i] = 3.0 * dknn::standard_normal(rng);
            for (Eigen::Index j = 0; j < d; ++j)
                a(i, j) = dknn::standard_normal(rng);
        }
        if (std::abs(a.determinant()) > 0.1)
            return {a, b};
    }
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("dknn-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path source_dir() { return DKNN_SOURCE_DIR; }

} // namespace testing_support
