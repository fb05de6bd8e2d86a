#pragma once

// Loaders for the two real benchmark datasets, with checksum gating and the
// stratified train/test partition used for the transfusion benchmark.
//
// A file is accepted when its SHA-256 matches a digest on record: either one
// pinned in its DatasetDescriptor or the "<file>.sha256" sidecar written by
// `dknn fetch-data` when it downloaded the file.

#include "csv.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace dknn
{

struct DatasetDescriptor
{
    std::string name;
    std::vector<std::string> source_urls;
    std::vector<std::string> file_names;        // canonical names inside the data directory
    std::vector<std::vector<std::string>> checksums; // accepted SHA-256 digests per file
    std::string schema;
};

/// Ripley's synthetic two-class data (training and test files).
inline DatasetDescriptor ripley_descriptor()
{
    return {"ripley-synth",
            {"https://www.stats.ox.ac.uk/pub/PRNN/synth.tr", "https://www.stats.ox.ac.uk/pub/PRNN/synth.te"},
            {"synth.tr.csv", "synth.te.csv"},
            {{"bf8221a95c81dbe5b7c3158979f0785ea77d9c6280c003de91092445caa601e1",
              "99481daf2b900c6c9e82eea69623dcd5a0ca457745c7ddcc508895fa19b76143"},
             {"2af38fb634a1183e4a32de8210cfde52ebd8eeaf9d3c82f802b953fe703071f1",
              "b5095fb8181a86bb4acb4ac2f520252508885afbfd2edd709a07a604c9875511"}},
            "xs, ys: features; yc: label in {0,1}"};
}

/// UCI blood transfusion service center data. No digest is pinned; the
/// sidecar written at download time is the record.
inline DatasetDescriptor transfusion_descriptor()
{
    return {"transfusion",
            {"https://archive.ics.uci.edu/ml/machine-learning-databases/blood-transfusion/transfusion.data"},
            {"transfusion.csv"},
            {{}},
            "Recency, Frequency, Monetary, Time: features; donated in March 2007: label in {0,1}"};
}

/// Directory holding the data files: $DKNN_DATA_DIR, else "data".
inline std::filesystem::path data_directory()
{
    if (const char* env = std::getenv("DKNN_DATA_DIR"); env && *env)
        return env;
    return "data";
}

// --- checksums ----------------------------------------------------------------

inline std::string sha256_hex(std::istream& in)
{
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw ComputationError("sha256: digest initialization failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

inline std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    return sha256_hex(in);
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& file)
{
    return file.string() + ".sha256";
}

inline void write_sidecar(const std::filesystem::path& file)
{
    std::ofstream out(sidecar_path(file));
    out << sha256_file(file) << "  " << file.filename().string() << "\n";
}

/// Refuses `file` unless its digest is one of `known` or matches its sidecar.
inline void verify_checksum(const std::filesystem::path& file, const std::vector<std::string>& known,
                            const std::string& dataset)
{
    const std::string digest = sha256_file(file);
    std::vector<std::string> accepted = known;
    if (std::ifstream side(sidecar_path(file)); side) {
        std::string d;
        side >> d;
        if (!d.empty())
            accepted.push_back(d);
    }
    const std::string advice = "; run `dknn fetch-data` to obtain a verified copy, or pass --no-verify to use it "
                               "as is";
    if (accepted.empty())
        throw ValidationError(dataset + ": no checksum on record for '" + file.string() + "'" + advice);
    if (std::find(accepted.begin(), accepted.end(), digest) == accepted.end())
        throw ValidationError(dataset + ": checksum mismatch for '" + file.string() + "' (sha256 " + digest + ")" +
                              advice);
}

// --- Ripley -------------------------------------------------------------------

namespace detail
{

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool is_number(const std::string& s)
{
    double v;
    return csv::parse_double(s, v);
}

/// Reads a Ripley file in any of the layouts it circulates in: whitespace
/// separated with an "xs ys yc" header (original), comma separated with the
/// same header (canonical), or with a leading row-name column.
inline LabeledSample read_ripley(const std::filesystem::path& path, std::size_t expected_n)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("ripley: cannot open '" + path.string() + "'");
    std::string first;
    while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    in.clear();
    in.seekg(0);
    const char delim = first.find(',') != std::string::npos ? ',' : ' ';
    const auto header = csv::split_row(first, delim);
    const bool has_header = std::any_of(header.begin(), header.end(), [](const auto& f) { return !is_number(f); });
    const auto t = csv::read_table(in, has_header, delim);

    std::array<std::size_t, 3> col{0, 1, 2};
    std::size_t width = 3;
    if (has_header) {
        width = t.header.size();
        const std::array<const char*, 3> names{"xs", "ys", "yc"};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto it = std::find(t.header.begin(), t.header.end(), names[k]);
            if (it == t.header.end())
                throw ValidationError("ripley: '" + path.string() + "' lacks column '" + names[k] + "'");
            col[k] = static_cast<std::size_t>(it - t.header.begin());
        }
    } else if (!t.rows.empty()) {
        width = t.rows.front().size();
        if (width == 4)
            col = {1, 2, 3};
    }
    if (width != 3 && width != 4)
        throw ValidationError("ripley: '" + path.string() + "' should hold 2 features and a label");

    std::vector<Point> pts;
    std::vector<int> labels;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != width)
            throw ValidationError("ripley: row " + std::to_string(r + 1) + " of '" + path.string() + "' has " +
                                  std::to_string(row.size()) + " fields, expected " + std::to_string(width));
        Point p(2);
        p[0] = csv::to_double(row[col[0]], r + 1);
        p[1] = csv::to_double(row[col[1]], r + 1);
        pts.push_back(std::move(p));
        labels.push_back(csv::to_label(row[col[2]], r + 1));
    }
    if (pts.size() != expected_n)
        throw ValidationError("ripley: '" + path.string() + "' has " + std::to_string(pts.size()) +
                              " observations, expected " + std::to_string(expected_n));
    LabeledSample s(std::move(pts), std::move(labels));
    if (s.count(0) != s.count(1))
        throw ValidationError("ripley: '" + path.string() + "' is not divided equally between the classes");
    return s;
}

} // namespace detail

struct LoadOptions
{
    bool verify = true;
};

/// Training (250) and test (1000) samples.
inline std::pair<LabeledSample, LabeledSample> load_ripley(const std::filesystem::path& train_path,
                                                           const std::filesystem::path& test_path,
                                                           const LoadOptions& options = {})
{
    const auto desc = ripley_descriptor();
    if (options.verify) {
        verify_checksum(train_path, desc.checksums[0], desc.name);
        verify_checksum(test_path, desc.checksums[1], desc.name);
    }
    return {detail::read_ripley(train_path, 250), detail::read_ripley(test_path, 1000)};
}

inline std::pair<LabeledSample, LabeledSample> load_ripley(const LoadOptions& options = {})
{
    const auto dir = data_directory() / "ripley";
    return load_ripley(dir / "synth.tr.csv", dir / "synth.te.csv", options);
}

// --- transfusion ----------------------------------------------------------------

inline constexpr std::size_t kTransfusionSize = 748;
inline constexpr std::size_t kTransfusionDonors = 178;

/// Recency, Frequency, Time (monetary volume dropped) and the March 2007
/// donation label. Columns are located by header keywords, so their order is
/// free. The monetary column must be exactly proportional to Frequency.
inline LabeledSample load_transfusion(const std::filesystem::path& path, const LoadOptions& options = {})
{
    const auto desc = transfusion_descriptor();
    if (options.verify)
        verify_checksum(path, desc.checksums[0], desc.name);
    std::ifstream in(path);
    if (!in)
        throw ValidationError("transfusion: cannot open '" + path.string() + "'");
    const auto t = csv::read_table(in, /*has_header=*/true);

    // Features match by prefix ("Frequency (times)" must not match "time").
    auto find = [&](std::initializer_list<const char*> keys, bool prefix) -> std::size_t {
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            const auto h = detail::lower(t.header[c]);
            for (const char* k : keys)
                if (prefix ? h.rfind(k, 0) == 0 : h.find(k) != std::string::npos)
                    return c;
        }
        throw ValidationError("transfusion: header lacks a column matching '" + std::string(*keys.begin()) + "'");
    };
    const std::size_t recency = find({"recency"}, true);
    const std::size_t frequency = find({"frequency"}, true);
    const std::size_t monetary = find({"monetary"}, true);
    const std::size_t time = find({"time"}, true);
    const std::size_t label = find({"whether", "donated", "class", "target"}, false);
    if (t.header.size() != 5)
        throw ValidationError("transfusion: expected 4 features and a label, got " + std::to_string(t.header.size()) +
                              " columns");

    std::vector<Point> pts;
    std::vector<int> labels;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size())
            throw ValidationError("transfusion: row " + std::to_string(r + 1) + " has " +
                                  std::to_string(row.size()) + " fields, expected 5");
        const double f = csv::to_double(row[frequency], r + 1);
        const double m = csv::to_double(row[monetary], r + 1);
        if (!(f > 0))
            throw ValidationError("transfusion: row " + std::to_string(r + 1) + ": Frequency must be positive");
        if (std::isnan(ratio))
            ratio = m / f;
        else if (m != ratio * f)
            throw ValidationError("transfusion: monetary column is not proportional to Frequency (row " +
                                  std::to_string(r + 1) + ")");
        Point p(3);
        p << csv::to_double(row[recency], r + 1), f, csv::to_double(row[time], r + 1);
        pts.push_back(std::move(p));
        labels.push_back(csv::to_label(row[label], r + 1));
    }
    if (pts.size() != kTransfusionSize)
        throw ValidationError("transfusion: expected " + std::to_string(kTransfusionSize) + " donors, got " +
                              std::to_string(pts.size()));
    LabeledSample s(std::move(pts), std::move(labels));
    if (s.count(1) != kTransfusionDonors)
        throw ValidationError("transfusion: expected " + std::to_string(kTransfusionDonors) +
                              " positive donors, got " + std::to_string(s.count(1)));
    return s;
}

inline LabeledSample load_transfusion(const LoadOptions& options = {})
{
    return load_transfusion(data_directory() / "transfusion" / "transfusion.csv", options);
}

// --- partition ------------------------------------------------------------------

struct Partition
{
    LabeledSample train;
    LabeledSample test;
    std::vector<std::size_t> train_indices; // ascending
    std::vector<std::size_t> test_indices;  // ascending
};

/// Stratified split: `train_sizes[j]` points of label j go to training,
/// drawn uniformly without replacement; the rest form the test sample.
inline Partition partition(const LabeledSample& sample, std::array<std::size_t, 2> train_sizes, RngSeed seed)
{
    Engine rng = make_engine(seed);
    std::vector<std::size_t> train, test;
    for (int j = 0; j < 2; ++j) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < sample.size(); ++i)
            if (sample.label(i) == j)
                idx.push_back(i);
        if (train_sizes[j] > idx.size())
            throw ValidationError("partition: requested " + std::to_string(train_sizes[j]) + " training points of class " +
                                  std::to_string(j) + " but only " + std::to_string(idx.size()) + " exist");
        for (std::size_t a = 0; a < train_sizes[j]; ++a)
            std::swap(idx[a], idx[a + uniform_index(rng, idx.size() - a)]);
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_sizes[j]));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(train_sizes[j]), idx.end());
    }
    if (train.empty() || test.empty())
        throw ValidationError("partition: both parts must be nonempty");
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {sample.subset(train), sample.subset(test), std::move(train), std::move(test)};
}

} // namespace dknn
