#pragma once

// Run configuration: one JSON document capturing everything a search needs.
// Validation reports every problem at once.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <furnish/error.hpp>
#include <furnish/external_generator.hpp>
#include <furnish/generator.hpp>
#include <furnish/lsi.hpp>

namespace furnish {

struct GeneratorConfig {
    GeneratorKind kind = GeneratorKind::Builtin;
    SynthParams synth;
    std::string command;
    double timeout_s = 30.0;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path palette_path;
    GeneratorConfig generator;
    ArchiveConfig archive;
    int emitters = 5;
    int lambda = 0;
    double sigma0 = 0.5;
    long total_evaluations = 10000;
    int min_area = kDefaultMinArea;
    std::filesystem::path output_dir = "out";
    int heatmap_cell_px = 16;

    LsiConfig lsi() const { return {seed, emitters, lambda, sigma0, total_evaluations, min_area, archive}; }
};

class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : ValidationError(join(problems)), _problems(std::move(problems))
    {
    }

    const std::vector<std::string>& problems() const { return _problems; }

private:
    static std::string join(const std::vector<std::string>& p)
    {
        std::string s = "invalid configuration:";
        for (const auto& x : p)
            s += "\n  - " + x;
        return s;
    }

    std::vector<std::string> _problems;
};

namespace detail {

    class ConfigReader {
    public:
        std::vector<std::string> problems;

        void known_keys(const nlohmann::json& obj, const std::string& where, const std::set<std::string>& keys)
        {
            for (const auto& [k, v] : obj.items())
                if (!keys.contains(k))
                    problems.push_back(where + "unknown key '" + k + "'");
        }

        template <typename T>
        void number(const nlohmann::json& obj, const std::string& where, const std::string& key, T& out, double lo, double hi)
        {
            if (!obj.contains(key))
                return;
            const auto& v = obj[key];
            const bool integral = std::is_integral_v<T>;
            if (!v.is_number() || (integral && !v.is_number_integer())) {
                problems.push_back(where + key + " must be " + (integral ? "an integer" : "a number"));
                return;
            }
            const double d = v.get<double>();
            if (!(d >= lo && d <= hi)) {
                std::ostringstream msg;
                msg << where << key << " = " << v.dump() << " is outside [" << lo << ", " << hi << "]";
                problems.push_back(msg.str());
                return;
            }
            out = v.get<T>();
        }

        void text(const nlohmann::json& obj, const std::string& where, const std::string& key, std::string& out)
        {
            if (!obj.contains(key))
                return;
            if (!obj[key].is_string())
                problems.push_back(where + key + " must be a string");
            else
                out = obj[key].get<std::string>();
        }
    };

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {})
{
    detail::ConfigReader r;
    RunConfig c;
    if (!doc.is_object())
        throw ConfigError({"configuration must be a JSON object"});

    r.known_keys(doc, "",
        {"seed", "palette_path", "generator", "archive", "emitters", "lambda", "sigma0", "total_evaluations", "min_area", "output_dir",
            "heatmap_cell_px"});
    r.number(doc, "", "seed", c.seed, 0.0, 1.8e19);
    r.number(doc, "", "emitters", c.emitters, 1, 1000);
    r.number(doc, "", "lambda", c.lambda, 0, 100000);
    if (c.lambda == 1)
        r.problems.push_back("lambda must be 0 (automatic) or >= 2");
    r.number(doc, "", "sigma0", c.sigma0, 1e-9, 1e6);
    r.number(doc, "", "total_evaluations", c.total_evaluations, 1, 1e12);
    r.number(doc, "", "min_area", c.min_area, 1, 1e9);
    r.number(doc, "", "heatmap_cell_px", c.heatmap_cell_px, 1, 256);

    std::string palette, output;
    r.text(doc, "", "palette_path", palette);
    r.text(doc, "", "output_dir", output);
    if (!doc.contains("palette_path"))
        r.problems.push_back("palette_path is required");
    else if (doc["palette_path"].is_string()) {
        c.palette_path = std::filesystem::path(palette).is_absolute() ? std::filesystem::path(palette) : base_dir / palette;
        if (!std::filesystem::exists(c.palette_path))
            r.problems.push_back("palette_path '" + c.palette_path.string() + "' does not exist");
    }
    if (!output.empty())
        c.output_dir = std::filesystem::path(output).is_absolute() ? std::filesystem::path(output) : base_dir / output;
    else
        c.output_dir = base_dir / c.output_dir;

    if (doc.contains("archive")) {
        const auto& a = doc["archive"];
        if (!a.is_object())
            r.problems.push_back("archive must be an object");
        else {
            r.known_keys(a, "archive.", {"price_max", "price_bins", "count_max"});
            r.number(a, "archive.", "price_max", c.archive.price_max, 1e-9, 1e15);
            r.number(a, "archive.", "price_bins", c.archive.price_bins, 1, 100000);
            r.number(a, "archive.", "count_max", c.archive.count_max, 1, 100000);
        }
    }

    if (doc.contains("generator")) {
        const auto& g = doc["generator"];
        if (!g.is_object())
            r.problems.push_back("generator must be an object");
        else {
            std::string kind = "builtin";
            r.text(g, "generator.", "kind", kind);
            auto& s = c.generator.synth;
            if (kind == "builtin") {
                c.generator.kind = GeneratorKind::Builtin;
                r.known_keys(g, "generator.", {"kind", "latent_dim", "width", "height", "k_max", "min_side", "max_side", "noise_max", "noise_levels", "flip_max"});
                r.number(g, "generator.", "latent_dim", s.latent_dim, 4, 4096);
                r.number(g, "generator.", "width", s.width, 1, 4096);
                r.number(g, "generator.", "height", s.height, 1, 4096);
                r.number(g, "generator.", "k_max", s.k_max, 0, 1000);
                r.number(g, "generator.", "min_side", s.min_side, 1, 4096);
                r.number(g, "generator.", "max_side", s.max_side, 1, 4096);
                r.number(g, "generator.", "noise_max", s.noise_max, 0, 255);
                r.number(g, "generator.", "noise_levels", s.noise_levels, 1, 1 << 20);
                r.number(g, "generator.", "flip_max", s.flip_max, 0, 1 << 24);
                if (s.max_side < s.min_side)
                    r.problems.push_back("generator.max_side must be >= generator.min_side");
            }
            else if (kind == "external") {
                c.generator.kind = GeneratorKind::External;
                r.known_keys(g, "generator.", {"kind", "command", "timeout_s"});
                r.text(g, "generator.", "command", c.generator.command);
                if (c.generator.command.empty())
                    r.problems.push_back("generator.command is required for an external generator");
                r.number(g, "generator.", "timeout_s", c.generator.timeout_s, 1e-3, 86400);
            }
            else
                r.problems.push_back("generator.kind must be 'builtin' or 'external'");
        }
    }

    if (!r.problems.empty())
        throw ConfigError(std::move(r.problems));
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open configuration file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e) {
        throw ConfigError({std::string("configuration is not valid JSON: ") + e.what()});
    }
    return parse_run_config(doc, path.parent_path());
}

inline std::unique_ptr<Generator> make_generator(const RunConfig& config, const CategoryPalette& palette)
{
    if (config.generator.kind == GeneratorKind::Builtin)
        return std::make_unique<BuiltinGenerator>(palette, config.generator.synth);
    const auto timeout = std::chrono::milliseconds(std::llround(config.generator.timeout_s * 1000.0));
    return std::make_unique<ExternalGenerator>(config.generator.command, timeout);
}

} // namespace furnish
