#pragma once

// Run manifests: a JSON record written next to every output file, holding the
// exact arguments, seed, version and the SHA-256 of every input and output.

#include "ingest.hpp"

#include <json.hpp>

namespace dknn
{

inline constexpr std::string_view kVersion = "0.1.0";

struct FileRecord
{
    std::string path;
    std::string sha256;
};

struct RunManifest
{
    std::string subcommand;
    std::vector<std::string> args;  // argv after the program name
    std::string resolved_flags;     // every option with its effective value
    std::uint64_t seed = 0;
    std::string version{kVersion};
    std::vector<FileRecord> inputs;
    std::string output_flag;        // value given to --output
    std::vector<FileRecord> outputs;

    nlohmann::ordered_json to_json() const
    {
        auto files = [](const std::vector<FileRecord>& v) {
            nlohmann::ordered_json a = nlohmann::ordered_json::array();
            for (const auto& f : v)
                a.push_back({{"path", f.path}, {"sha256", f.sha256}});
            return a;
        };
        return {{"subcommand", subcommand}, {"args", args},          {"resolved_flags", resolved_flags},
                {"seed", seed},             {"version", version},    {"inputs", files(inputs)},
                {"output_flag", output_flag}, {"outputs", files(outputs)}};
    }

    static RunManifest from_json(const nlohmann::json& j)
    {
        try {
            RunManifest m;
            m.subcommand = j.at("subcommand").get<std::string>();
            m.args = j.at("args").get<std::vector<std::string>>();
            m.resolved_flags = j.value("resolved_flags", "");
            m.seed = j.value("seed", std::uint64_t{0});
            m.version = j.at("version").get<std::string>();
            m.output_flag = j.value("output_flag", "");
            for (const auto& f : j.at("inputs"))
                m.inputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
            for (const auto& f : j.at("outputs"))
                m.outputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("manifest: malformed: ") + e.what());
        }
    }

    void write(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw ValidationError("manifest: cannot write '" + path.string() + "'");
        out << to_json().dump(2) << "\n";
    }

    static RunManifest read(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ValidationError("manifest: cannot open '" + path.string() + "'");
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string("manifest: not JSON: ") + e.what());
        }
    }
};

/// Manifest path for an --output value: "<output>.manifest.json".
inline std::filesystem::path manifest_path_for(const std::string& output)
{
    return output + ".manifest.json";
}

} // namespace dknn
