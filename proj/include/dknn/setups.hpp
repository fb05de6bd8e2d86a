#pragma once

// The six bivariate two-population simulation setups, each with a sampler and
// the exact class densities, plus a Monte Carlo estimate of the Bayes risk.

#include "core.hpp"

#include <array>
#include <functional>
#include <memory>
#include <numbers>

namespace dknn
{

enum class Setup
{
    gaussian = 1,  // normal, Sigma_1 = 4 Sigma_0
    cauchy = 2,    // elliptical Cauchy, same location/scatter
    flat = 3,      // normal, common covariance diag(25, 1)
    halfmoons = 4, // uniform on two half-moons
    rings = 5,     // uniform on two overlapping rings
    bimodal = 6,   // two-component normal mixtures
};

inline std::string_view to_string(Setup s)
{
    switch (s) {
    case Setup::gaussian: return "gaussian-1";
    case Setup::cauchy: return "cauchy-2";
    case Setup::flat: return "flat-3";
    case Setup::halfmoons: return "halfmoons-4";
    case Setup::rings: return "rings-5";
    case Setup::bimodal: return "bimodal-6";
    }
    return "?";
}

/// Accepts "1".."6" or the names above (with or without the numeric suffix).
inline Setup parse_setup(std::string_view s)
{
    for (int i = 1; i <= 6; ++i) {
        const auto setup = static_cast<Setup>(i);
        const auto name = to_string(setup);
        if (s == std::to_string(i) || s == name || s == name.substr(0, name.find('-')))
            return setup;
    }
    throw ValidationError("unknown setup '" + std::string(s) + "' (expected 1-6)");
}

/// One population: a sampler and its density.
struct Population
{
    std::function<Point(Engine&)> sample;
    std::function<double(const Point&)> density;
};

/// Two populations with prior P[Y = 1] = prior1.
struct TwoClassModel
{
    std::array<Population, 2> populations;
    double prior1 = 0.5;

    /// P[Y = 1 | X = x].
    double posterior(const Point& x) const
    {
        const double a = (1.0 - prior1) * populations[0].density(x);
        const double b = prior1 * populations[1].density(x);
        return a + b > 0 ? b / (a + b) : 0.5;
    }

    int bayes_classify(const Point& x) const
    {
        return prior1 * populations[1].density(x) > (1.0 - prior1) * populations[0].density(x) ? 1 : 0;
    }
};

namespace detail
{

inline Point vec2(double a, double b)
{
    Point p(2);
    p << a, b;
    return p;
}

inline Matrix mat2(double a, double b, double c, double d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

struct Elliptical
{
    Point mu;
    Matrix l;       // Cholesky factor of the scatter
    Matrix l_inv;
    double sqrt_det;

    Elliptical(Point m, const Matrix& sigma)
        : mu(std::move(m))
        , l(Eigen::LLT<Matrix>(sigma).matrixL())
        , l_inv(l.inverse())
        , sqrt_det(l.diagonal().prod())
    {
    }

    double q(const Point& x) const { return (l_inv * (x - mu)).squaredNorm(); }
};

inline Population gaussian(Point mu, const Matrix& sigma)
{
    const auto e = std::make_shared<Elliptical>(std::move(mu), sigma);
    const auto d = e->mu.size();
    return {[e, d](Engine& rng) {
                Point z(d);
                for (Eigen::Index i = 0; i < d; ++i)
                    z[i] = standard_normal(rng);
                return Point(e->mu + e->l * z);
            },
            [e, d](const Point& x) {
                return std::exp(-0.5 * e->q(x)) /
                       (std::pow(2.0 * std::numbers::pi, static_cast<double>(d) / 2.0) * e->sqrt_det);
            }};
}

/// Bivariate elliptical Cauchy: mu + Sigma^{1/2} Z / |W|.
inline Population cauchy(Point mu, const Matrix& sigma)
{
    const auto e = std::make_shared<Elliptical>(std::move(mu), sigma);
    return {[e](Engine& rng) {
                Point z(2);
                z[0] = standard_normal(rng);
                z[1] = standard_normal(rng);
                double w = 0.0;
                while (w == 0.0)
                    w = std::abs(standard_normal(rng));
                return Point(e->mu + e->l * z / w);
            },
            [e](const Point& x) {
                return 1.0 / (2.0 * std::numbers::pi * e->sqrt_det) * std::pow(1.0 + e->q(x), -1.5);
            }};
}

inline Population mixture(Population a, Population b)
{
    return {[a, b](Engine& rng) { return fair_coin(rng) ? b.sample(rng) : a.sample(rng); },
            [a, b](const Point& x) { return 0.5 * a.density(x) + 0.5 * b.density(x); }};
}

inline Population ring(double r_in, double r_out)
{
    const double area = std::numbers::pi * (r_out * r_out - r_in * r_in);
    return {[=](Engine& rng) {
                const double r = std::sqrt(r_in * r_in + uniform01(rng) * (r_out * r_out - r_in * r_in));
                const double a = 2.0 * std::numbers::pi * uniform01(rng);
                return vec2(r * std::cos(a), r * std::sin(a));
            },
            [=](const Point& x) {
                const double r = x.norm();
                return r >= r_in && r <= r_out ? 1.0 / area : 0.0;
            }};
}

/// (U, V) with U ~ Unif(-1, 1) and V | U = u ~ Unif(1 - u^2, 2(1 - u^2));
/// density 1 / (2 (1 - u^2)) on its support.
inline Point moon_draw(Engine& rng)
{
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double lo = 1.0 - u * u;
    return vec2(u, lo + uniform01(rng) * lo);
}

inline double moon_density(const Point& p)
{
    const double u = p[0], v = p[1];
    if (!(u > -1.0 && u < 1.0))
        return 0.0;
    const double lo = 1.0 - u * u;
    return v >= lo && v <= 2.0 * lo ? 1.0 / (2.0 * lo) : 0.0;
}

} // namespace detail

/// Linear part and shift of the map carrying the class-0 moon onto the class-1 moon.
inline AffineMap halfmoon_map()
{
    return AffineMap(detail::mat2(1.0, 0.5, 0.5, -1.0), detail::vec2(-0.5, 2.0));
}

inline TwoClassModel setup_model(Setup s)
{
    using detail::mat2;
    using detail::vec2;
    const Matrix sigma0 = mat2(1, 1, 1, 4);
    switch (s) {
    case Setup::gaussian:
        return {{detail::gaussian(vec2(0, 0), sigma0), detail::gaussian(vec2(1, 1), 4.0 * sigma0)}};
    case Setup::cauchy:
        return {{detail::cauchy(vec2(0, 0), sigma0), detail::cauchy(vec2(1, 1), 4.0 * sigma0)}};
    case Setup::flat: {
        const Matrix flat = mat2(25, 0, 0, 1);
        return {{detail::gaussian(vec2(0, 0), flat), detail::gaussian(vec2(1, 1), flat)}};
    }
    case Setup::halfmoons: {
        const AffineMap map = halfmoon_map();
        const AffineMap inv = map.inverse();
        const double jac = std::abs(map.matrix().determinant());
        Population p0{detail::moon_draw, detail::moon_density};
        Population p1{[map](Engine& rng) { return map(detail::moon_draw(rng)); },
                      [inv, jac](const Point& x) { return detail::moon_density(inv(x)) / jac; }};
        return {{std::move(p0), std::move(p1)}};
    }
    case Setup::rings: return {{detail::ring(1.0, 2.0), detail::ring(1.75, 2.5)}};
    case Setup::bimodal:
        return {{detail::mixture(detail::gaussian(vec2(0, 0), sigma0), detail::gaussian(vec2(3, 3), 4.0 * sigma0)),
                 detail::mixture(detail::gaussian(vec2(1.5, 1.5), mat2(4, 0, 0, 0.5)),
                                 detail::gaussian(vec2(4.5, 4.5), mat2(0.75, 0, 0, 5)))}};
    }
    throw ValidationError("setup_model: unknown setup");
}

/// n labeled draws: each label is a fair coin (or Bernoulli(prior1)), then
/// the point comes from that population.
inline LabeledSample generate(const TwoClassModel& model, std::size_t n, RngSeed seed)
{
    if (n < 1)
        throw ValidationError("generate: n must be >= 1");
    Engine rng = make_engine(seed);
    std::vector<Point> pts;
    std::vector<int> labels;
    pts.reserve(n);
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = model.prior1 == 0.5 ? (fair_coin(rng) ? 1 : 0) : (uniform01(rng) < model.prior1 ? 1 : 0);
        labels.push_back(y);
        pts.push_back(model.populations[y].sample(rng));
    }
    return LabeledSample(std::move(pts), std::move(labels));
}

inline LabeledSample generate(Setup s, std::size_t n, RngSeed seed) { return generate(setup_model(s), n, seed); }

struct RiskEstimate
{
    double value = 0.0;
    double standard_error = 0.0;
};

/// Monte Carlo estimate of P[m_Bayes(X) != Y] as the mean of
/// min(eta(X), 1 - eta(X)) over draws of X, using the exact densities.
inline RiskEstimate bayes_risk(const TwoClassModel& model, std::uint64_t budget, RngSeed seed)
{
    if (budget < 2)
        throw ValidationError("bayes_risk: budget must be >= 2");
    Engine rng = make_engine(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t b = 0; b < budget; ++b) {
        const int y = uniform01(rng) < model.prior1 ? 1 : 0;
        const Point x = model.populations[y].sample(rng);
        const double eta = model.posterior(x);
        const double r = std::min(eta, 1.0 - eta);
        sum += r;
        sum_sq += r * r;
    }
    const double nb = static_cast<double>(budget);
    const double m = sum / nb;
    const double var = std::max(0.0, (sum_sq - nb * m * m) / (nb - 1.0));
    return {m, std::sqrt(var / nb)};
}

inline RiskEstimate bayes_risk(Setup s, std::uint64_t budget, RngSeed seed)
{
    return bayes_risk(setup_model(s), budget, seed);
}

} // namespace dknn
