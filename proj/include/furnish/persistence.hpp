#pragma once

// Text formats written by the pipeline: archive dumps, metrics logs and
// arrangement documents.

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <furnish/archive.hpp>
#include <furnish/csv.hpp>
#include <furnish/lsi.hpp>
#include <furnish/palette.hpp>
#include <furnish/repair.hpp>

namespace furnish {

inline void write_archive_csv(std::ostream& out, const Archive& archive, int latent_dim)
{
    out << "price_index,count_index,objective,total_price,furniture_count";
    for (int i = 0; i < latent_dim; ++i)
        out << ",z" << i;
    out << '\n';
    for (const auto& [cell, e] : archive.cells()) {
        if (int(e.latent.size()) != latent_dim)
            throw ValidationError("elite latent dimension does not match the archive dump dimension");
        out << cell.price << ',' << cell.count << ',' << csv::format_double(e.objective) << ',' << csv::format_double(e.measures.total_price)
            << ',' << e.measures.furniture_count;
        for (double v : e.latent)
            out << ',' << csv::format_double(v);
        out << '\n';
    }
}

inline std::vector<Elite> parse_archive_csv(std::istream& in)
{
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f) || f.size() < 5 || f[0] != "price_index" || f[1] != "count_index" || f[2] != "objective" || f[3] != "total_price"
        || f[4] != "furniture_count")
        throw ValidationError("archive file: header must start with price_index,count_index,objective,total_price,furniture_count");
    const std::size_t dim = f.size() - 5;
    for (std::size_t i = 0; i < dim; ++i)
        if (f[5 + i] != "z" + std::to_string(i))
            throw ValidationError("archive file: latent columns must be z0..z" + std::to_string(dim - 1));

    std::vector<Elite> elites;
    while (reader.next(f)) {
        const std::string row = "archive file row " + std::to_string(reader.line());
        if (f.size() != dim + 5)
            throw ValidationError(row + ": wrong field count");
        const auto pi = csv::parse_int(f[0]), ci = csv::parse_int(f[1]), count = csv::parse_int(f[4]);
        const auto obj = csv::parse_double(f[2]), price = csv::parse_double(f[3]);
        if (!pi || !ci || !count || !obj || !price)
            throw ValidationError(row + ": malformed field");
        Elite e;
        e.cell = {int(*pi), int(*ci)};
        e.objective = *obj;
        e.measures = {*price, int(*count)};
        for (std::size_t i = 0; i < dim; ++i) {
            const auto v = csv::parse_double(f[5 + i]);
            if (!v)
                throw ValidationError(row + ": malformed latent value");
            e.latent.push_back(*v);
        }
        elites.push_back(std::move(e));
    }
    return elites;
}

inline void write_metrics_header(std::ostream& out) { out << "evaluations,coverage,qd_score,best_objective\n"; }

inline void write_metrics_row(std::ostream& out, const MetricsRow& m)
{
    out << m.evaluations << ',' << m.coverage << ',' << csv::format_double(m.qd_score) << ',' << csv::format_double(m.best_objective) << '\n';
}

inline std::vector<MetricsRow> parse_metrics_csv(std::istream& in)
{
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f) || f != std::vector<std::string>{"evaluations", "coverage", "qd_score", "best_objective"})
        throw ValidationError("metrics file: bad header");
    std::vector<MetricsRow> rows;
    while (reader.next(f)) {
        const auto ev = f.size() == 4 ? csv::parse_int(f[0]) : std::nullopt;
        const auto cov = f.size() == 4 ? csv::parse_int(f[1]) : std::nullopt;
        const auto qd = f.size() == 4 ? csv::parse_double(f[2]) : std::nullopt;
        const auto best = f.size() == 4 ? csv::parse_double(f[3]) : std::nullopt;
        if (!ev || !cov || !qd || !best)
            throw ValidationError("metrics file row " + std::to_string(reader.line()) + ": malformed");
        rows.push_back({long(*ev), long(*cov), *qd, *best});
    }
    return rows;
}

inline nlohmann::ordered_json arrangement_to_json(const Arrangement& a, const CategoryPalette& palette)
{
    nlohmann::ordered_json placements = nlohmann::ordered_json::array();
    for (const auto& f : a.placements)
        placements.push_back({{"category_id", f.category_id}, {"name", palette[f.category_id].name}, {"x", f.rect.x}, {"y", f.rect.y},
            {"w", f.rect.w}, {"h", f.rect.h}, {"orientation", f.orientation}, {"fit_cost", f.fit_cost}});
    nlohmann::ordered_json overlaps = nlohmann::ordered_json::array();
    for (auto [i, j] : a.overlap_pairs)
        overlaps.push_back({i, j});
    return {{"placements", placements}, {"repair_cost", a.repair_cost}, {"overlap_pairs", overlaps}};
}

inline Arrangement arrangement_from_json(const nlohmann::json& doc)
{
    Arrangement a;
    try {
        for (const auto& p : doc.at("placements"))
            a.placements.push_back({p.at("category_id").get<int>(), {p.at("x").get<int>(), p.at("y").get<int>(), p.at("w").get<int>(), p.at("h").get<int>()},
                p.at("orientation").get<int>(), p.at("fit_cost").get<double>()});
        a.repair_cost = doc.at("repair_cost").get<double>();
        a.repair_cost_units = to_cost_units(a.repair_cost);
        for (const auto& pair : doc.at("overlap_pairs"))
            a.overlap_pairs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    }
    catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("arrangement document: ") + e.what());
    }
    return a;
}

inline nlohmann::ordered_json evaluation_to_json(const LatentVector& z, const Evaluation& e, const CategoryPalette& palette)
{
    return {{"latent", z}, {"objective", e.objective}, {"total_price", e.measures.total_price}, {"furniture_count", e.measures.furniture_count},
        {"price_index", e.cell.price}, {"count_index", e.cell.count}, {"arrangement", arrangement_to_json(e.arrangement, palette)}};
}

} // namespace furnish
