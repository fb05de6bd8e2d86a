#pragma once

// Command-line front end. run() parses arguments, executes one subcommand and
// returns the exit code: 0 success, 1 invalid input or usage, 2 computational
// failure (singular scatter, degenerate volume, replay mismatch).
//
// Every subcommand given --output also writes "<output>.manifest.json"; `dknn
// replay` re-executes a manifest and checks the outputs match byte for byte.

#include "cv.hpp"
#include "estimators.hpp"
#include "manifest.hpp"
#include "realdata.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <memory>

namespace dknn::cli
{

/// Returns the body fetched from a URL; throws on failure.
using Downloader = std::function<std::string(const std::string& url)>;

namespace detail
{

using dknn::format_double;

struct DepthOptions
{
    std::string kind = "halfspace";
    int directions = 500;
    std::uint64_t max_enumeration = 200'000;

    void add(CLI::App* app)
    {
        app->add_option("--depth", kind, "Depth function: halfspace, simplicial, mahalanobis, projection")
            ->capture_default_str();
        app->add_option("--directions", directions, "Direction count for approximate depth modes")
            ->capture_default_str();
        app->add_option("--max-enumeration", max_enumeration, "Exact simplicial enumeration cap (d >= 3)")
            ->capture_default_str();
    }

    DepthSpec spec(RngSeed seed) const
    {
        DepthSpec s;
        s.kind = parse_depth_kind(kind);
        s.directions = directions;
        s.max_enumeration = max_enumeration;
        s.seed = seed;
        return s;
    }
};

/// Output files of one run and the manifest that describes them.
class Session
{
public:
    Session(std::ostream& out, std::ostream& err)
        : out_(out)
        , err_(err)
    {
    }

    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }
    RunManifest& manifest() { return manifest_; }

    void add_input(const std::filesystem::path& p) { inputs_.push_back(p); }

    /// Opens `path` for writing, or returns stdout when it is empty.
    std::ostream& open(const std::string& path)
    {
        if (path.empty())
            return out_;
        auto f = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*f)
            throw ValidationError("cannot write '" + path + "'");
        files_.push_back(std::move(f));
        outputs_.push_back(path);
        return *files_.back();
    }

    /// Closes outputs and, when --output was given, writes the manifest.
    void finish(const std::string& output_flag)
    {
        for (auto& f : files_)
            f->close();
        if (output_flag.empty())
            return;
        manifest_.output_flag = output_flag;
        for (const auto& p : inputs_)
            manifest_.inputs.push_back({p.string(), sha256_file(p)});
        for (const auto& p : outputs_)
            manifest_.outputs.push_back({p, sha256_file(p)});
        manifest_.write(manifest_path_for(output_flag));
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    RunManifest manifest_;
    std::vector<std::filesystem::path> inputs_;
    std::vector<std::string> outputs_;
    std::vector<std::unique_ptr<std::ofstream>> files_;
};

inline std::vector<std::size_t> parse_size_list(const std::string& text, const char* what)
{
    std::vector<std::size_t> out;
    for (const auto& f : csv::split_row(text, ',')) {
        double v;
        if (!csv::parse_double(f, v) || v < 1 || v != std::floor(v))
            throw ValidationError(std::string(what) + ": not a positive integer: '" + f + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    for (const auto& f : csv::split_row(text, ',')) {
        double v;
        if (!csv::parse_double(f, v))
            throw ValidationError(std::string(what) + ": not a number: '" + f + "'");
        out.push_back(v);
    }
    return out;
}

/// Points of a CSV; a labeled file has its last column dropped.
inline std::vector<Point> load_points(Session& s, const std::string& path, bool header, bool labeled)
{
    s.add_input(path);
    return labeled ? read_labeled_csv(path, header).points() : read_points_csv(path, header);
}

inline std::vector<Point> load_queries(Session& s, const std::string& query, const std::string& queries_path,
                                       bool header)
{
    if (!query.empty())
        return {parse_point(query)};
    if (!queries_path.empty())
        return load_points(s, queries_path, header, false);
    return {};
}

inline void write_summary_table(std::ostream& o, const std::vector<std::string>& labels,
                                const std::function<SummaryStats(std::size_t)>& stats)
{
    o << std::left << std::setw(28) << "classifier" << std::right << std::setw(9) << "mean" << std::setw(9) << "sd"
      << std::setw(9) << "median" << std::setw(7) << "fail" << "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto st = stats(i);
        o << std::left << std::setw(28) << labels[i] << std::right << std::fixed << std::setprecision(2)
          << std::setw(9) << st.mean << std::setw(9) << st.sd << std::setw(9) << st.median << std::setw(7)
          << st.failures << "\n";
        o.unsetf(std::ios::fixed);
    }
}

} // namespace detail

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Downloader& download = {});

namespace detail
{

// --- subcommands ----------------------------------------------------------------

struct DepthCmd
{
    std::string points, query, queries, output;
    bool header = false, labeled = false;
    std::uint64_t seed = 0;
    DepthOptions depth;

    void add(CLI::App* a)
    {
        a->add_option("--points", points, "Sample CSV")->required();
        a->add_flag("--header", header, "CSV files have a header row");
        a->add_flag("--labeled", labeled, "Last CSV column is a label (ignored)");
        a->add_option("--query", query, "Single query point x1,...,xd");
        a->add_option("--queries", queries, "CSV of query points");
        a->add_option("--seed", seed, "Seed for Monte Carlo simplicial depth")->capture_default_str();
        a->add_option("--output", output, "Output CSV (default stdout)");
        depth.add(a);
    }

    void exec(Session& s) const
    {
        const auto pts = load_points(s, points, header, labeled);
        auto qs = load_queries(s, query, queries, header);
        const bool self = qs.empty();
        const EmpiricalDepth dfun(pts, depth.spec({seed, 0}));
        auto& o = s.open(output);
        o << "index,depth\n";
        const auto& list = self ? pts : qs;
        for (std::size_t i = 0; i < list.size(); ++i)
            o << i << ',' << format_double(dfun(list[i])) << '\n';
    }
};

struct NeighborsCmd
{
    std::string points, query, output;
    bool header = false, labeled = false;
    std::size_t k = 0;
    DepthOptions depth;

    void add(CLI::App* a)
    {
        a->add_option("--points", points, "Sample CSV")->required();
        a->add_flag("--header", header, "CSV file has a header row");
        a->add_flag("--labeled", labeled, "Last CSV column is a label (ignored)");
        a->add_option("--query", query, "Query point x1,...,xd")->required();
        a->add_option("--k", k, "Neighborhood size (default: full ordering)");
        a->add_option("--output", output, "Output CSV (default stdout)");
        depth.add(a);
    }

    void exec(Session& s) const
    {
        const auto pts = load_points(s, points, header, labeled);
        const Point x = parse_point(query);
        const auto ordering = outward_ordering(x, pts, depth.spec({}));
        if (k > pts.size())
            throw ValidationError("neighbors: k exceeds the sample size");
        const std::size_t groups = k == 0 ? ordering.group_count() : ordering.groups_covering(k);
        auto& o = s.open(output);
        o << "group,index,depth\n";
        for (std::size_t g = 0; g < groups; ++g) {
            auto members = ordering.groups[g];
            std::sort(members.begin(), members.end());
            for (auto i : members)
                o << g + 1 << ',' << i << ',' << format_double(ordering.depths[g]) << '\n';
        }
    }
};

struct ClassifyCmd
{
    std::string train, test, dataset, method = "dknn", k = "auto", grid, output;
    bool header = false, no_verify = false;
    int m = 1, starts = 100;
    double t = 100.0;
    std::uint64_t cap = 20'000, seed = 0;
    DepthOptions depth;

    void add(CLI::App* a)
    {
        a->add_option("--train", train, "Training CSV (features then label)");
        a->add_option("--test", test, "Test CSV (features then label)");
        a->add_option("--dataset", dataset, "Use a verified dataset instead: ripley")
            ->check(CLI::IsMember({"ripley"}));
        a->add_flag("--header", header, "CSV files have a header row");
        a->add_flag("--no-verify", no_verify, "Skip dataset checksum verification");
        a->add_option("--method", method, "dknn, knn, knnaff, lda, qda, dd, ddsm")->capture_default_str();
        a->add_option("--k", k, "Neighbor count, or 'auto' for leave-one-out selection")->capture_default_str();
        a->add_option("--grid", grid, "Comma-separated k grid for --k auto (default beta = 0.01..0.50)");
        a->add_option("--m", m, "DD polynomial degree")->capture_default_str();
        a->add_option("--t", t, "Smoothed DD logistic scale")->capture_default_str();
        a->add_option("--starts", starts, "Smoothed DD random starts")->capture_default_str();
        a->add_option("--cap", cap, "Exact DD candidate cap")->capture_default_str();
        a->add_option("--seed", seed, "Seed for tie coins and randomized fits")->capture_default_str();
        a->add_option("--output", output, "Predictions CSV (default stdout)");
        depth.add(a);
    }

    void exec(Session& s) const
    {
        std::optional<LabeledSample> tr, te;
        if (!dataset.empty()) {
            const auto dir = data_directory() / "ripley";
            s.add_input(dir / "synth.tr.csv");
            s.add_input(dir / "synth.te.csv");
            auto [a, b] = load_ripley(dir / "synth.tr.csv", dir / "synth.te.csv", {.verify = !no_verify});
            tr = std::move(a);
            te = std::move(b);
        } else {
            if (train.empty() || test.empty())
                throw ValidationError("classify: give --train and --test, or --dataset");
            s.add_input(train);
            s.add_input(test);
            tr = read_labeled_csv(train, header);
            te = read_labeled_csv(test, header);
        }
        ClassifierSpec spec;
        spec.method = parse_method(method);
        spec.depth = depth.spec({seed, 0});
        spec.m = m;
        spec.t = t;
        spec.starts = starts;
        spec.dd_cap = cap;
        spec.seed = {seed, 0};
        if (is_neighbor_method(spec.method)) {
            if (k == "auto") {
                const auto g = grid.empty() ? default_k_grid(tr->size()) : parse_size_list(grid, "--grid");
                spec.k = loocv_select_k(*tr, spec, g);
            } else {
                spec.k = parse_size_list(k, "--k").at(0);
            }
        }
        const auto model = fit(spec, *tr);
        const auto pred = predict_all(model, te->points());
        auto& o = s.open(output);
        o << "index,label\n";
        for (std::size_t i = 0; i < pred.size(); ++i)
            o << i << ',' << pred[i] << '\n';
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            wrong += pred[i] != te->label(i);
        auto& summary = output.empty() ? s.err() : s.out();
        summary << spec.name() << ": misclassification " << std::fixed << std::setprecision(1)
                << error_percent(pred, te->labels()) << "% (" << wrong << "/" << pred.size() << ")\n";
        summary.unsetf(std::ios::fixed);
    }
};

struct EstimateCmd
{
    std::string task = "density", mode = "euclidean", points, query, queries, output;
    bool header = false;
    std::size_t k = 1;
    std::uint64_t budget = 200'000, seed = 0;
    DepthOptions depth;

    void add(CLI::App* a)
    {
        a->add_option("--task", task, "regress or density")
            ->check(CLI::IsMember({"regress", "density"}))
            ->capture_default_str();
        a->add_option("--mode", mode, "euclidean or depth")
            ->check(CLI::IsMember({"euclidean", "depth"}))
            ->capture_default_str();
        a->add_option("--points", points, "Sample CSV (regress: last column is the response)")->required();
        a->add_flag("--header", header, "CSV files have a header row");
        a->add_option("--k", k, "Neighbor count")->required();
        a->add_option("--query", query, "Single query point x1,...,xd");
        a->add_option("--queries", queries, "CSV of query points");
        a->add_option("--budget", budget, "Monte Carlo draws per depth-region volume")->capture_default_str();
        a->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
        a->add_option("--output", output, "Output CSV (default stdout)");
        depth.add(a);
    }

    void exec(Session& s) const
    {
        const EstimatorMode em = mode == "depth" ? EstimatorMode::depth_based(depth.spec({seed, 0}))
                                                 : EstimatorMode::euclidean();
        s.add_input(points);
        auto qs = load_queries(s, query, queries, header);
        auto& o = s.open(output);
        if (task == "regress") {
            const auto raw = read_points_csv(points, header);
            if (raw.front().size() < 2)
                throw ValidationError("estimate: regression CSV needs features and a response column");
            std::vector<Point> xs;
            std::vector<double> ys;
            for (const auto& r : raw) {
                xs.push_back(r.head(r.size() - 1));
                ys.push_back(r[r.size() - 1]);
            }
            const RegressionSample sample(std::move(xs), std::move(ys));
            if (qs.empty())
                qs = sample.points();
            o << "index,estimate\n";
            for (std::size_t i = 0; i < qs.size(); ++i)
                o << i << ',' << format_double(knn_regress(qs[i], sample, k, em)) << '\n';
        } else {
            const auto pts = read_points_csv(points, header);
            if (qs.empty())
                qs = pts;
            o << "index,density,volume,volume_se,count\n";
            for (std::size_t i = 0; i < qs.size(); ++i) {
                const auto est =
                    knn_density_estimate(qs[i], pts, k, em, {.budget = budget, .seed = RngSeed{seed, 0}.substream(i)});
                o << i << ',' << format_double(est.value) << ',' << format_double(est.volume.value) << ','
                  << format_double(est.volume.standard_error) << ',' << est.count << '\n';
            }
        }
    }
};

struct SimulateCmd
{
    std::string setup = "1", output;
    std::size_t n = 200;
    std::uint64_t seed = 0;

    void add(CLI::App* a)
    {
        a->add_option("--setup", setup, "Setup 1-6")->capture_default_str();
        a->add_option("--n", n, "Sample size")->capture_default_str();
        a->add_option("--seed", seed, "Seed")->capture_default_str();
        a->add_option("--output", output, "Output CSV (default stdout)");
    }

    void exec(Session& s) const
    {
        const auto sample = generate(parse_setup(setup), n, {seed, 0});
        write_labeled_csv(s.open(output), sample, /*header=*/true);
    }
};

struct BenchmarkCmd
{
    std::string config, setup, betas, roster, output;
    std::size_t n_train = 0, n_test = 0, replications = 0;
    std::uint64_t seed = 0, dd_cap = 0;
    int workers = 0, directions = 0, starts = 0;
    double t = 0.0;
    bool progress = false;
    CLI::App* app = nullptr;

    void add(CLI::App* a)
    {
        app = a;
        a->add_option("--config", config, "key = value configuration file");
        a->add_option("--setup", setup, "Setup 1-6 (default 1)");
        a->add_option("--n-train", n_train, "Training size (default 200)");
        a->add_option("--n-test", n_test, "Test size (default 100)");
        a->add_option("--replications", replications, "Replications (default 250)");
        a->add_option("--betas", betas, "Comma-separated k/n grid (default 0.01,0.05,0.10,0.40)");
        a->add_option("--roster", roster, "Comma-separated roster, e.g. lda,knn,dknn:halfspace,dd:halfspace:1");
        a->add_option("--seed", seed, "Seed (default 0)");
        a->add_option("--workers", workers, "Worker threads; results do not depend on it (default 1)");
        a->add_option("--directions", directions, "Direction count for approximate depths (default 500)");
        a->add_option("--t", t, "Smoothed DD logistic scale (default 100)");
        a->add_option("--starts", starts, "Smoothed DD random starts (default 100)");
        a->add_option("--dd-cap", dd_cap, "Exact DD candidate cap (default 20000)");
        a->add_option("--output", output, "Output prefix: writes <prefix>.csv, .json, .config");
        a->add_flag("--progress", progress, "Report progress on stderr");
    }

    bool given(const char* name) const { return app->get_option(name)->count() > 0; }

    void exec(Session& s) const
    {
        BenchmarkConfig c;
        if (!config.empty()) {
            s.add_input(config);
            c = load_benchmark_config(config);
        }
        if (given("--setup"))
            c.setup = parse_setup(setup);
        if (given("--n-train"))
            c.n_train = n_train;
        if (given("--n-test"))
            c.n_test = n_test;
        if (given("--replications"))
            c.replications = replications;
        if (given("--betas"))
            c.betas = parse_double_list(betas, "--betas");
        if (given("--roster")) {
            c.roster.clear();
            for (const auto& r : csv::split_row(roster, ','))
                c.roster.push_back(RosterEntry::parse(r));
        }
        if (given("--seed"))
            c.seed = {seed, 0};
        if (given("--workers"))
            c.workers = workers;
        if (given("--directions"))
            c.directions = directions;
        if (given("--t"))
            c.t = t;
        if (given("--starts"))
            c.starts = starts;
        if (given("--dd-cap"))
            c.dd_cap = dd_cap;
        c.validate();
        s.manifest().seed = c.seed.seed;

        std::function<void(std::size_t, std::size_t)> report_progress;
        if (progress)
            report_progress = [&s](std::size_t done, std::size_t total) {
                s.err() << "\rreplication " << done << "/" << total << std::flush;
                if (done == total)
                    s.err() << "\n";
            };
        const auto report = run_benchmark(c, report_progress);
        if (output.empty()) {
            report.write_csv(s.out());
        } else {
            report.write_csv(s.open(output + ".csv"));
            s.open(output + ".json") << report.summary_json().dump(2) << "\n";
            s.open(output + ".config") << format_benchmark_config(c);
        }
        write_summary_table(s.err(), report.classifiers,
                            [&](std::size_t i) { return report.summary(report.classifiers[i]); });
    }
};

struct TableCmd
{
    std::string dataset = "ripley", output;
    std::size_t splits = 100;
    std::uint64_t seed = 0;
    int workers = 1, directions = 500;
    bool no_verify = false, progress = false;

    void add(CLI::App* a)
    {
        a->add_option("--dataset", dataset, "ripley or transfusion")
            ->check(CLI::IsMember({"ripley", "transfusion"}))
            ->capture_default_str();
        a->add_option("--splits", splits, "Random partitions (transfusion)")->capture_default_str();
        a->add_option("--seed", seed, "Seed for partitions and tie coins")->capture_default_str();
        a->add_option("--workers", workers, "Worker threads")->capture_default_str();
        a->add_option("--directions", directions, "Direction count for approximate depths")
            ->capture_default_str();
        a->add_flag("--no-verify", no_verify, "Skip dataset checksum verification");
        a->add_flag("--progress", progress, "Report progress on stderr");
        a->add_option("--output", output, "Output CSV (default stdout)");
    }

    void exec(Session& s) const
    {
        const auto roster = real_data_roster(directions);
        const RngSeed rs{seed, 0};
        s.manifest().seed = seed;
        std::vector<std::string> labels;
        for (const auto& e : roster)
            labels.push_back(e.label);
        if (dataset == "ripley") {
            const auto dir = data_directory() / "ripley";
            s.add_input(dir / "synth.tr.csv");
            s.add_input(dir / "synth.te.csv");
            const auto [tr, te] = load_ripley(dir / "synth.tr.csv", dir / "synth.te.csv", {.verify = !no_verify});
            const auto res = evaluate_split(tr, te, roster, rs);
            auto& o = s.open(output);
            o << "classifier,k,error_percent,status\n";
            for (const auto& r : res)
                o << r.label << ',' << r.k << ','
                  << (std::isnan(r.error_percent) ? "NA,failed" : format_double(r.error_percent) + ",ok") << '\n';
            return;
        }
        const auto path = data_directory() / "transfusion" / "transfusion.csv";
        s.add_input(path);
        const auto sample = load_transfusion(path, {.verify = !no_verify});
        std::function<void(std::size_t, std::size_t)> report_progress;
        if (progress)
            report_progress = [&s](std::size_t done, std::size_t total) {
                s.err() << "\rsplit " << done << "/" << total << std::flush;
                if (done == total)
                    s.err() << "\n";
            };
        const auto rep = run_repeated_splits(sample, {400, 100}, splits, roster, rs, workers, report_progress);
        auto& o = s.open(output);
        o << "split,classifier,k,error_percent,status\n";
        for (std::size_t p = 0; p < rep.per_split.size(); ++p)
            for (const auto& r : rep.per_split[p])
                o << p << ',' << r.label << ',' << r.k << ','
                  << (std::isnan(r.error_percent) ? "NA,failed" : format_double(r.error_percent) + ",ok") << '\n';
        write_summary_table(s.err(), labels, [&](std::size_t i) { return rep.summary(i); });
    }
};

struct CvCmd
{
    std::string train, method = "dknn", grid, output;
    bool header = false;
    std::uint64_t seed = 0;
    DepthOptions depth;

    void add(CLI::App* a)
    {
        a->add_option("--train", train, "Training CSV (features then label)")->required();
        a->add_flag("--header", header, "CSV file has a header row");
        a->add_option("--method", method, "Neighbor method: dknn, knn, knnaff")->capture_default_str();
        a->add_option("--grid", grid, "Comma-separated k grid (default beta = 0.01..0.50)");
        a->add_option("--seed", seed, "Seed for tie coins")->capture_default_str();
        a->add_option("--output", output, "Output CSV (default stdout)");
        depth.add(a);
    }

    void exec(Session& s) const
    {
        s.add_input(train);
        const auto tr = read_labeled_csv(train, header);
        ClassifierSpec spec;
        spec.method = parse_method(method);
        spec.depth = depth.spec({seed, 0});
        spec.seed = {seed, 0};
        const auto g = grid.empty() ? default_k_grid(tr.size()) : parse_size_list(grid, "--grid");
        const auto errors = loocv_errors(tr, spec, g);
        auto& o = s.open(output);
        o << "k,loo_errors\n";
        std::size_t best = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            o << g[i] << ',' << errors[i] << '\n';
            if (errors[i] < errors[best] || (errors[i] == errors[best] && g[i] < g[best]))
                best = i;
        }
        (output.empty() ? s.err() : s.out()) << "selected k = " << g[best] << " (" << errors[best]
                                             << " leave-one-out errors)\n";
    }
};

struct BayesRiskCmd
{
    std::string setup = "1", output;
    std::uint64_t budget = 1'000'000, seed = 0;

    void add(CLI::App* a)
    {
        a->add_option("--setup", setup, "Setup 1-6")->capture_default_str();
        a->add_option("--budget", budget, "Monte Carlo draws")->capture_default_str();
        a->add_option("--seed", seed, "Seed")->capture_default_str();
        a->add_option("--output", output, "Output CSV (default stdout)");
    }

    void exec(Session& s) const
    {
        const auto su = parse_setup(setup);
        const auto r = bayes_risk(su, budget, {seed, 0});
        auto& o = s.open(output);
        o << "setup,risk,standard_error,budget\n"
          << to_string(su) << ',' << format_double(r.value) << ',' << format_double(r.standard_error) << ','
          << budget << '\n';
    }
};

struct FetchCmd
{
    std::string dataset = "all", data_dir;
    std::vector<std::string> from;
    bool offline = false;

    void add(CLI::App* a)
    {
        a->add_option("--dataset", dataset, "ripley, transfusion or all")
            ->check(CLI::IsMember({"ripley", "transfusion", "all"}))
            ->capture_default_str();
        a->add_flag("--offline", offline, "Do not download; convert --from files or verify existing ones");
        a->add_option("--from", from, "Local source files (ripley: train then test; transfusion: one file)");
        a->add_option("--data-dir", data_dir, "Target directory (default $DKNN_DATA_DIR or ./data)");
    }

    static void write_ripley(const LabeledSample& sample, const std::filesystem::path& path)
    {
        std::ofstream o(path, std::ios::binary);
        o << "xs,ys,yc\n";
        for (std::size_t i = 0; i < sample.size(); ++i)
            o << format_double(sample.point(i)[0]) << ',' << format_double(sample.point(i)[1]) << ','
              << sample.label(i) << '\n';
    }

    static void write_transfusion(const std::filesystem::path& raw, const std::filesystem::path& path)
    {
        // Re-emit the raw file with normalized header names; values are kept.
        std::ifstream in(raw);
        const auto t = csv::read_table(in, true);
        std::vector<std::size_t> order;
        for (const char* key : {"recency", "frequency", "monetary", "time"}) {
            for (std::size_t c = 0; c < t.header.size(); ++c)
                if (::dknn::detail::lower(t.header[c]).rfind(key, 0) == 0) {
                    order.push_back(c);
                    break;
                }
        }
        for (std::size_t c = 0; c < t.header.size(); ++c)
            if (std::find(order.begin(), order.end(), c) == order.end())
                order.push_back(c);
        std::ofstream o(path, std::ios::binary);
        o << "Recency,Frequency,Monetary,Time,Donated\n";
        for (const auto& row : t.rows) {
            for (std::size_t j = 0; j < order.size(); ++j)
                o << (j ? "," : "") << row.at(order[j]);
            o << '\n';
        }
    }

    void exec(Session& s, const Downloader& download) const
    {
        const std::filesystem::path dir = data_dir.empty() ? data_directory() : std::filesystem::path(data_dir);
        const bool want_r = dataset != "transfusion", want_t = dataset != "ripley";
        if (!from.empty() && dataset == "all")
            throw ValidationError("fetch-data: --from needs a single --dataset");
        auto fetch_raw = [&](const std::string& url, const std::filesystem::path& dest) {
            if (!download)
                throw ValidationError("fetch-data: downloads are not available in this build; use --offline --from");
            std::ofstream o(dest, std::ios::binary);
            o << download(url);
        };
        bool all_ok = true;
        if (want_r) {
            const auto desc = ripley_descriptor();
            const auto rdir = dir / "ripley";
            std::filesystem::create_directories(rdir);
            const auto tr = rdir / desc.file_names[0], te = rdir / desc.file_names[1];
            if (!offline || !from.empty()) {
                std::filesystem::path src_tr, src_te;
                if (!from.empty()) {
                    if (from.size() != 2)
                        throw ValidationError("fetch-data: ripley needs two --from files (train, test)");
                    src_tr = from[0];
                    src_te = from[1];
                } else {
                    src_tr = rdir / "synth.tr.raw";
                    src_te = rdir / "synth.te.raw";
                    fetch_raw(desc.source_urls[0], src_tr);
                    fetch_raw(desc.source_urls[1], src_te);
                }
                const auto [a, b] = load_ripley(src_tr, src_te, {.verify = false});
                write_ripley(a, tr);
                write_ripley(b, te);
            }
            for (std::size_t i = 0; i < 2; ++i) {
                const auto f = i == 0 ? tr : te;
                try {
                    verify_checksum(f, desc.checksums[i], desc.name);
                    s.out() << "verified " << f.string() << "\n";
                } catch (const ValidationError& e) {
                    s.err() << e.what() << "\n";
                    all_ok = false;
                }
            }
        }
        if (want_t) {
            const auto desc = transfusion_descriptor();
            const auto tdir = dir / "transfusion";
            std::filesystem::create_directories(tdir);
            const auto dest = tdir / desc.file_names[0];
            if (!offline || !from.empty()) {
                std::filesystem::path src;
                if (!from.empty()) {
                    if (from.size() != 1)
                        throw ValidationError("fetch-data: transfusion needs one --from file");
                    src = from[0];
                } else {
                    src = tdir / "transfusion.raw";
                    fetch_raw(desc.source_urls[0], src);
                }
                write_transfusion(src, dest);
                load_transfusion(dest, {.verify = false}); // schema, size and proportionality checks
                write_sidecar(dest);
            }
            try {
                if (!std::filesystem::exists(dest))
                    throw ValidationError("transfusion: '" + dest.string() +
                                          "' is missing; run fetch-data online or with --offline --from FILE");
                verify_checksum(dest, desc.checksums[0], desc.name);
                s.out() << "verified " << dest.string() << "\n";
            } catch (const ValidationError& e) {
                s.err() << e.what() << "\n";
                all_ok = false;
            }
        }
        if (!all_ok)
            throw ValidationError("fetch-data: some datasets are missing or unverified");
    }
};

struct ReplayCmd
{
    std::string manifest, output_dir;

    void add(CLI::App* a)
    {
        a->add_option("manifest", manifest, "Manifest JSON written next to an output")->required();
        a->add_option("--output-dir", output_dir, "Where to write the replayed outputs (default: a fresh temp dir)");
    }

    int exec(Session& s, const Downloader& download) const
    {
        const auto m = RunManifest::read(manifest);
        if (m.output_flag.empty())
            throw ValidationError("replay: manifest records no --output");
        if (m.version != kVersion)
            s.err() << "replay: manifest written by version " << m.version << ", running " << kVersion << "\n";
        for (const auto& in : m.inputs)
            if (sha256_file(in.path) != in.sha256)
                throw ValidationError("replay: input '" + in.path + "' changed since the recorded run");

        std::filesystem::path dir = output_dir;
        if (dir.empty()) {
            dir = std::filesystem::temp_directory_path() /
                  ("dknn-replay-" + std::to_string(std::hash<std::string>{}(manifest + m.output_flag)));
        }
        std::filesystem::create_directories(dir);
        const std::string new_out = (dir / std::filesystem::path(m.output_flag).filename()).string();

        std::vector<std::string> args = m.args;
        bool replaced = false;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--output" && i + 1 < args.size()) {
                args[i + 1] = new_out;
                replaced = true;
            } else if (args[i].rfind("--output=", 0) == 0) {
                args[i] = "--output=" + new_out;
                replaced = true;
            }
        }
        if (!replaced)
            throw ValidationError("replay: recorded arguments lack --output");
        std::ostringstream sink_out, sink_err;
        const int code = run(args, sink_out, sink_err, download);
        if (code != 0) {
            s.err() << sink_err.str();
            return code;
        }
        bool same = true;
        for (const auto& o : m.outputs) {
            const std::string replayed = new_out + o.path.substr(m.output_flag.size());
            const bool eq = std::filesystem::exists(replayed) && sha256_file(replayed) == o.sha256;
            s.out() << (eq ? "identical " : "DIFFERENT ") << o.path << " <-> " << replayed << "\n";
            same = same && eq;
        }
        return same ? 0 : 2;
    }
};

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Downloader& download)
{
    CLI::App app{"Depth-based nearest-neighbor classification and estimation", "dknn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    detail::DepthCmd depth_cmd;
    detail::NeighborsCmd neighbors_cmd;
    detail::ClassifyCmd classify_cmd;
    detail::EstimateCmd estimate_cmd;
    detail::SimulateCmd simulate_cmd;
    detail::BenchmarkCmd benchmark_cmd;
    detail::TableCmd table_cmd;
    detail::CvCmd cv_cmd;
    detail::BayesRiskCmd bayes_cmd;
    detail::FetchCmd fetch_cmd;
    detail::ReplayCmd replay_cmd;

    auto* depth_app = app.add_subcommand("depth", "Depth of points with respect to a sample");
    depth_cmd.add(depth_app);
    auto* neighbors_app = app.add_subcommand("neighbors", "Depth-based neighborhood of a query point");
    neighbors_cmd.add(neighbors_app);
    auto* classify_app = app.add_subcommand("classify", "Fit a classifier and label a test sample");
    classify_cmd.add(classify_app);
    auto* estimate_app = app.add_subcommand("estimate", "Nearest-neighbor regression or density estimation");
    estimate_cmd.add(estimate_app);
    auto* simulate_app = app.add_subcommand("simulate", "Draw a labeled sample from a simulation setup");
    simulate_cmd.add(simulate_app);
    auto* benchmark_app = app.add_subcommand("benchmark", "Monte Carlo comparison of classifiers on a setup");
    benchmark_cmd.add(benchmark_app);
    auto* table_app = app.add_subcommand("table", "Real-data comparison (Ripley split or transfusion partitions)");
    table_cmd.add(table_app);
    auto* cv_app = app.add_subcommand("cv", "Leave-one-out error counts over a k grid");
    cv_cmd.add(cv_app);
    auto* bayes_app = app.add_subcommand("bayes-risk", "Monte Carlo Bayes risk of a setup");
    bayes_cmd.add(bayes_app);
    auto* fetch_app = app.add_subcommand("fetch-data", "Download or import the benchmark datasets");
    fetch_cmd.add(fetch_app);
    auto* replay_app = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
    replay_cmd.add(replay_app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    detail::Session session(out, err);
    auto& man = session.manifest();
    man.args = args;
    try {
        for (auto* sub : app.get_subcommands()) {
            man.subcommand = sub->get_name();
            man.resolved_flags = sub->config_to_str(true, false);
        }
        std::string output;
        if (depth_app->parsed()) {
            depth_cmd.exec(session);
            man.seed = depth_cmd.seed;
            output = depth_cmd.output;
        } else if (neighbors_app->parsed()) {
            neighbors_cmd.exec(session);
            output = neighbors_cmd.output;
        } else if (classify_app->parsed()) {
            classify_cmd.exec(session);
            man.seed = classify_cmd.seed;
            output = classify_cmd.output;
        } else if (estimate_app->parsed()) {
            estimate_cmd.exec(session);
            man.seed = estimate_cmd.seed;
            output = estimate_cmd.output;
        } else if (simulate_app->parsed()) {
            simulate_cmd.exec(session);
            man.seed = simulate_cmd.seed;
            output = simulate_cmd.output;
        } else if (benchmark_app->parsed()) {
            benchmark_cmd.exec(session);
            output = benchmark_cmd.output;
        } else if (table_app->parsed()) {
            table_cmd.exec(session);
            output = table_cmd.output;
        } else if (cv_app->parsed()) {
            cv_cmd.exec(session);
            man.seed = cv_cmd.seed;
            output = cv_cmd.output;
        } else if (bayes_app->parsed()) {
            bayes_cmd.exec(session);
            man.seed = bayes_cmd.seed;
            output = bayes_cmd.output;
        } else if (fetch_app->parsed()) {
            fetch_cmd.exec(session, download);
        } else if (replay_app->parsed()) {
            return replay_cmd.exec(session, download);
        }
        session.finish(output);
        return 0;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace dknn::cli
