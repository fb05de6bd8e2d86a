#pragma once

// Monte Carlo benchmark driver: for every replication, draw fresh training
// and test samples from a setup, fit the roster and record test
// misclassification percentages. Replication r uses only streams derived from
// (seed, r), so the report is identical for any worker count.

#include "classifier.hpp"
#include "setups.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace dknn
{

/// Roster entry, e.g. "lda", "knn", "dknn:halfspace", "dd:simplicial:2",
/// "ddsm:mahalanobis:3", "constant:0". Neighbor methods expand over the beta grid.
struct RosterEntry
{
    Method method = Method::lda;
    DepthKind depth = DepthKind::halfspace;
    int m = 1;
    int constant_label = 0;

    std::string token() const
    {
        std::string s(to_string(method));
        if (uses_depth(method))
            s += ":" + std::string(to_string(depth));
        if (method == Method::dd || method == Method::ddsm)
            s += ":" + std::to_string(m);
        if (method == Method::constant)
            s += ":" + std::to_string(constant_label);
        return s;
    }

    static RosterEntry parse(std::string_view token)
    {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : token) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        RosterEntry e;
        e.method = parse_method(parts[0]);
        std::size_t next = 1;
        if (uses_depth(e.method))
            e.depth = next < parts.size() ? parse_depth_kind(parts[next++]) : DepthKind::halfspace;
        try {
            if (e.method == Method::dd || e.method == Method::ddsm)
                e.m = next < parts.size() ? std::stoi(parts[next++]) : 1;
            if (e.method == Method::constant)
                e.constant_label = next < parts.size() ? std::stoi(parts[next++]) : 0;
        } catch (const std::logic_error&) {
            throw ValidationError("roster entry '" + std::string(token) + "': bad integer field");
        }
        if (next != parts.size())
            throw ValidationError("roster entry '" + std::string(token) + "': unexpected fields");
        return e;
    }
};

inline std::vector<RosterEntry> default_roster()
{
    std::vector<RosterEntry> r;
    for (auto t : {"lda", "qda", "knn", "knnaff", "dknn:halfspace", "dknn:simplicial", "dknn:mahalanobis",
                   "dd:halfspace:1", "dd:halfspace:2"})
        r.push_back(RosterEntry::parse(t));
    return r;
}

struct BenchmarkConfig
{
    Setup setup = Setup::gaussian;
    std::size_t n_train = 200;
    std::size_t n_test = 100;
    std::size_t replications = 250;
    std::vector<double> betas{0.01, 0.05, 0.10, 0.40};
    std::vector<RosterEntry> roster = default_roster();
    RngSeed seed{};
    int directions = 500;
    double t = 100.0;
    int starts = 100;
    std::uint64_t dd_cap = 20'000;
    int workers = 1;

    void validate() const
    {
        if (n_train < 2 || n_test < 1 || replications < 1)
            throw ValidationError("benchmark: sizes and replication count must be positive (n_train >= 2)");
        for (double b : betas)
            if (!(b > 0 && b < 1))
                throw ValidationError("benchmark: betas must lie in (0,1)");
        if (roster.empty())
            throw ValidationError("benchmark: empty roster");
        if (workers < 1)
            throw ValidationError("benchmark: workers must be >= 1");
    }

    /// k for a beta on the training size: max(1, round(beta n)).
    std::size_t k_for(double beta) const
    {
        const double k = std::round(beta * static_cast<double>(n_train));
        return std::min<std::size_t>(n_train, static_cast<std::size_t>(std::max(1.0, k)));
    }

    /// Every classifier the roster expands to, in report order.
    std::vector<ClassifierSpec> classifiers() const
    {
        std::vector<ClassifierSpec> out;
        for (const auto& e : roster) {
            ClassifierSpec s;
            s.method = e.method;
            s.depth.kind = e.depth;
            s.depth.directions = directions;
            s.m = e.m;
            s.t = t;
            s.starts = starts;
            s.dd_cap = dd_cap;
            s.constant_label = e.constant_label;
            if (is_neighbor_method(e.method)) {
                for (double b : betas) {
                    s.k = k_for(b);
                    out.push_back(s);
                }
            } else {
                out.push_back(s);
            }
        }
        return out;
    }
};

// --- config file ------------------------------------------------------------

namespace detail
{
inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v)
{
    std::istringstream in(v);
    T x{};
    in >> x;
    if (in.fail() || !in.eof())
        throw ValidationError("config: bad value for '" + key + "': '" + v + "'");
    return x;
}
} // namespace detail

/// key = value lines; '#' starts a comment.
inline BenchmarkConfig parse_benchmark_config(std::istream& in)
{
    BenchmarkConfig c;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        if (detail::trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string v = detail::trim(line.substr(eq + 1));
        if (key == "setup")
            c.setup = parse_setup(v);
        else if (key == "n_train")
            c.n_train = detail::parse_number<std::size_t>(key, v);
        else if (key == "n_test")
            c.n_test = detail::parse_number<std::size_t>(key, v);
        else if (key == "replications")
            c.replications = detail::parse_number<std::size_t>(key, v);
        else if (key == "betas") {
            c.betas.clear();
            for (const auto& b : detail::split(v, ','))
                c.betas.push_back(detail::parse_number<double>(key, b));
        } else if (key == "roster") {
            c.roster.clear();
            for (const auto& r : detail::split(v, ','))
                c.roster.push_back(RosterEntry::parse(r));
        } else if (key == "seed")
            c.seed.seed = detail::parse_number<std::uint64_t>(key, v);
        else if (key == "stream")
            c.seed.stream = detail::parse_number<std::uint64_t>(key, v);
        else if (key == "directions")
            c.directions = detail::parse_number<int>(key, v);
        else if (key == "t")
            c.t = detail::parse_number<double>(key, v);
        else if (key == "starts")
            c.starts = detail::parse_number<int>(key, v);
        else if (key == "dd_cap")
            c.dd_cap = detail::parse_number<std::uint64_t>(key, v);
        else if (key == "workers")
            c.workers = detail::parse_number<int>(key, v);
        else
            throw ValidationError("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

inline BenchmarkConfig load_benchmark_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config: cannot open '" + path + "'");
    return parse_benchmark_config(in);
}

/// Every field, in the format parse_benchmark_config reads. `workers` is
/// included for completeness; it never changes results.
inline std::string format_benchmark_config(const BenchmarkConfig& c)
{
    std::ostringstream o;
    o.precision(17);
    o << "setup = " << static_cast<int>(c.setup) << "\n";
    o << "n_train = " << c.n_train << "\n";
    o << "n_test = " << c.n_test << "\n";
    o << "replications = " << c.replications << "\n";
    o << "betas = ";
    for (std::size_t i = 0; i < c.betas.size(); ++i)
        o << (i ? "," : "") << c.betas[i];
    o << "\nroster = ";
    for (std::size_t i = 0; i < c.roster.size(); ++i)
        o << (i ? "," : "") << c.roster[i].token();
    o << "\nseed = " << c.seed.seed << "\n";
    o << "stream = " << c.seed.stream << "\n";
    o << "directions = " << c.directions << "\n";
    o << "t = " << c.t << "\n";
    o << "starts = " << c.starts << "\n";
    o << "dd_cap = " << c.dd_cap << "\n";
    o << "workers = " << c.workers << "\n";
    return o.str();
}

// --- report -------------------------------------------------------------------

struct ReplicationResult
{
    std::size_t replication = 0;
    std::string classifier;
    double error_percent = 0.0; // NaN when the fit or prediction failed
    std::string failure;
};

struct SummaryStats
{
    std::size_t count = 0;
    std::size_t failures = 0;
    double mean = 0.0, sd = 0.0, min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Quantile with linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SummaryStats summarize(std::span<const double> values)
{
    SummaryStats s;
    std::vector<double> v;
    for (double x : values) {
        if (std::isnan(x))
            ++s.failures;
        else
            v.push_back(x);
    }
    s.count = v.size();
    if (v.empty()) {
        s.mean = s.sd = s.min = s.q1 = s.median = s.q3 = s.max = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double x : v)
        sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    return s;
}

struct ExperimentReport
{
    BenchmarkConfig config;
    std::vector<std::string> classifiers;   // report order
    std::vector<ReplicationResult> results; // replication-major, then classifier order

    std::vector<double> errors_of(const std::string& classifier) const
    {
        std::vector<double> v;
        for (const auto& r : results)
            if (r.classifier == classifier)
                v.push_back(r.error_percent);
        return v;
    }

    SummaryStats summary(const std::string& classifier) const { return summarize(errors_of(classifier)); }

    /// Long format: one row per replication per classifier.
    void write_csv(std::ostream& out) const
    {
        out << "setup,replication,classifier,error_percent,status\n";
        char buf[64];
        for (const auto& r : results) {
            out << to_string(config.setup) << ',' << r.replication << ',' << r.classifier << ',';
            if (std::isnan(r.error_percent)) {
                out << "NA,\"failed: ";
                for (char c : r.failure)
                    out << (c == '"' ? '\'' : c);
                out << "\"\n";
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", r.error_percent);
                out << buf << ",ok\n";
            }
        }
    }

    nlohmann::ordered_json summary_json() const
    {
        nlohmann::ordered_json j;
        j["config"] = {
            {"setup", std::string(to_string(config.setup))},
            {"n_train", config.n_train},
            {"n_test", config.n_test},
            {"replications", config.replications},
            {"betas", config.betas},
            {"seed", config.seed.seed},
            {"stream", config.seed.stream},
            {"directions", config.directions},
            {"t", config.t},
            {"starts", config.starts},
            {"dd_cap", config.dd_cap},
        };
        std::vector<std::string> roster;
        for (const auto& e : config.roster)
            roster.push_back(e.token());
        j["config"]["roster"] = roster;
        auto num = [](double v) { return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); };
        nlohmann::ordered_json cls = nlohmann::ordered_json::array();
        for (const auto& c : classifiers) {
            const auto s = summary(c);
            cls.push_back({{"classifier", c},
                           {"count", s.count},
                           {"failures", s.failures},
                           {"mean", num(s.mean)},
                           {"sd", num(s.sd)},
                           {"min", num(s.min)},
                           {"q1", num(s.q1)},
                           {"median", num(s.median)},
                           {"q3", num(s.q3)},
                           {"max", num(s.max)}});
        }
        j["classifiers"] = cls;
        return j;
    }
};

namespace detail
{

inline std::vector<ReplicationResult> run_replication(const BenchmarkConfig& config,
                                                      const std::vector<ClassifierSpec>& specs, std::size_t rep)
{
    const RngSeed rs = config.seed.substream(rep);
    const LabeledSample train = generate(config.setup, config.n_train, rs.substream(1));
    const LabeledSample test = generate(config.setup, config.n_test, rs.substream(2));
    const RngSeed fit_seed = rs.substream(3);

    std::vector<ReplicationResult> out(specs.size());
    std::vector<bool> done(specs.size(), false);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        out[i].replication = rep;
        out[i].classifier = specs[i].name();
    }
    auto fail = [&](std::size_t i, const std::string& what) {
        out[i].error_percent = std::numeric_limits<double>::quiet_NaN();
        out[i].failure = what;
        done[i] = true;
    };

    // Neighbor methods sharing an ordering are evaluated together.
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (done[i] || !is_neighbor_method(specs[i].method))
            continue;
        std::vector<std::size_t> family, ks;
        for (std::size_t j = i; j < specs.size(); ++j)
            if (!done[j] && specs[j].method == specs[i].method &&
                (specs[i].method != Method::dknn || specs[j].depth.kind == specs[i].depth.kind)) {
                family.push_back(j);
                ks.push_back(specs[j].k);
            }
        try {
            ClassifierSpec s = specs[i];
            s.depth.seed = fit_seed;
            const NeighborOrderer orderer(s.method, train, s.depth);
            const auto preds = predict_neighbor_grid(orderer, test.points(), ks, fit_seed);
            for (std::size_t f = 0; f < family.size(); ++f) {
                out[family[f]].error_percent = error_percent(preds[f], test.labels());
                done[family[f]] = true;
            }
        } catch (const Error& e) {
            for (auto j : family)
                fail(j, e.what());
        }
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (done[i])
            continue;
        try {
            ClassifierSpec s = specs[i];
            s.seed = fit_seed;
            s.depth.seed = fit_seed;
            const auto model = fit(s, train);
            out[i].error_percent = error_percent(predict_all(model, test.points()), test.labels());
        } catch (const Error& e) {
            fail(i, e.what());
        }
    }
    return out;
}

} // namespace detail

/// Runs every replication; `progress`, if given, is called after each one
/// completes (from the worker thread, serialized).
inline ExperimentReport run_benchmark(const BenchmarkConfig& config,
                                      const std::function<void(std::size_t done, std::size_t total)>& progress = {})
{
    config.validate();
    const auto specs = config.classifiers();
    ExperimentReport report;
    report.config = config;
    for (const auto& s : specs)
        report.classifiers.push_back(s.name());

    std::vector<std::vector<ReplicationResult>> per_rep(config.replications);
    std::atomic<std::size_t> next{0}, finished{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < config.replications;) {
            per_rep[r] = detail::run_replication(config, specs, r);
            const std::size_t f = ++finished;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(f, config.replications);
            }
        }
    };
    const auto nworkers = static_cast<std::size_t>(config.workers);
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(nworkers, config.replications); ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& rep : per_rep)
        for (auto& r : rep)
            report.results.push_back(std::move(r));
    return report;
}

} // namespace dknn
