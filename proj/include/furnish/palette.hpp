#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <furnish/csv.hpp>
#include <furnish/error.hpp>
#include <furnish/image.hpp>
#include <furnish/tsne.hpp>

namespace furnish {

/// Category names with their high-dimensional text embeddings, in file order.
struct EmbeddingTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> vectors;

    std::size_t size() const { return names.size(); }
    std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }

    tsne::Matrix as_matrix() const
    {
        tsne::Matrix m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim()));
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                m(Eigen::Index(i), Eigen::Index(j)) = vectors[i][j];
        return m;
    }
};

inline TsneResult tsne_reduce(const EmbeddingTable& table, const TsneParams& params)
{
    return tsne_reduce(table.as_matrix(), params);
}

inline EmbeddingTable parse_embeddings(std::istream& in)
{
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields))
        throw ValidationError("embedding file: no entries");
    if (fields.size() < 2 || fields[0] != "name")
        throw ValidationError("embedding file: header must be name,e0,e1,...");
    for (std::size_t i = 1; i < fields.size(); ++i)
        if (fields[i] != "e" + std::to_string(i - 1))
            throw ValidationError("embedding file: header column " + std::to_string(i) + " must be e" + std::to_string(i - 1));
    const std::size_t dim = fields.size() - 1;

    EmbeddingTable table;
    std::set<std::string> seen;
    while (reader.next(fields)) {
        const std::string row = "embedding file row " + std::to_string(reader.line());
        if (fields.size() != dim + 1)
            throw ValidationError(row + ": expected " + std::to_string(dim) + " values, got " + std::to_string(fields.size() - 1));
        if (fields[0].empty())
            throw ValidationError(row + ": empty name");
        if (!seen.insert(fields[0]).second)
            throw ValidationError(row + ": duplicate name '" + fields[0] + "'");
        std::vector<double> v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const auto value = csv::parse_double(fields[i + 1]);
            if (!value || !std::isfinite(*value))
                throw ValidationError(row + ": malformed value '" + fields[i + 1] + "'");
            v[i] = *value;
        }
        table.names.push_back(fields[0]);
        table.vectors.push_back(std::move(v));
    }
    if (table.size() == 0)
        throw ValidationError("embedding file: no entries");
    if (table.size() < 4)
        throw ValidationError("embedding file: at least 4 entries required, got " + std::to_string(table.size()));
    return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open embedding file " + path.string());
    return parse_embeddings(in);
}

/// Per-category catalog data keyed by name.
struct CategoryInfo {
    double unit_price = 0.0;
    double default_aspect = 1.0;
};

inline std::map<std::string, CategoryInfo> parse_category_info(std::istream& in)
{
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields != std::vector<std::string>{"name", "unit_price", "default_aspect"})
        throw ValidationError("price file: header must be name,unit_price,default_aspect");
    std::map<std::string, CategoryInfo> info;
    while (reader.next(fields)) {
        const std::string row = "price file row " + std::to_string(reader.line());
        if (fields.size() != 3)
            throw ValidationError(row + ": expected 3 fields");
        const auto price = csv::parse_double(fields[1]);
        const auto aspect = csv::parse_double(fields[2]);
        if (!price || !(*price >= 0.0) || !std::isfinite(*price))
            throw ValidationError(row + ": unit_price must be a nonnegative number");
        if (!aspect || !(*aspect > 0.0) || !std::isfinite(*aspect))
            throw ValidationError(row + ": default_aspect must be a positive number");
        if (!info.emplace(fields[0], CategoryInfo{*price, *aspect}).second)
            throw ValidationError(row + ": duplicate name '" + fields[0] + "'");
    }
    return info;
}

inline std::map<std::string, CategoryInfo> load_category_info(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("missing price file " + path.string());
    return parse_category_info(in);
}

struct CategoryEntry {
    int id = 0;
    std::string name;
    Rgb color;
    double unit_price = 0.0;
    double default_aspect = 1.0;

    bool operator==(const CategoryEntry&) const = default;
};

inline constexpr int kBackground = -1;
inline constexpr double kDefaultMinSeparation = 20.0;

struct CategoryPalette {
    std::vector<CategoryEntry> categories;
    Rgb background{0, 0, 0};

    std::size_t size() const { return categories.size(); }
    const CategoryEntry& operator[](int id) const { return categories.at(std::size_t(id)); }

    /// Label color, BACKGROUND included.
    Rgb color(int label) const { return label == kBackground ? background : categories.at(std::size_t(label)).color; }

    bool operator==(const CategoryPalette&) const = default;
};

/// Lists every violated palette invariant; empty when valid.
inline std::vector<std::string> palette_violations(const CategoryPalette& palette, double min_separation = kDefaultMinSeparation)
{
    std::vector<std::string> out;
    const auto& cats = palette.categories;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        if (cats[i].id != int(i))
            out.push_back("category '" + cats[i].name + "' has id " + std::to_string(cats[i].id) + ", expected " + std::to_string(i));
        if (!(cats[i].unit_price >= 0.0))
            out.push_back("category '" + cats[i].name + "' has a negative price");
        if (!(cats[i].default_aspect > 0.0))
            out.push_back("category '" + cats[i].name + "' has a nonpositive aspect");
        if (distance(cats[i].color, palette.background) < min_separation)
            out.push_back("category '" + cats[i].name + "' is too close to the background color");
        for (std::size_t j = i + 1; j < cats.size(); ++j)
            if (distance(cats[i].color, cats[j].color) < min_separation)
                out.push_back("categories '" + cats[i].name + "' and '" + cats[j].name + "' are closer than " + csv::format_double(min_separation));
    }
    return out;
}

/// Independent per-channel min-max scaling to [0, 255], rounding half up.
/// A channel with zero range maps to 0.
inline std::vector<Rgb> scale_to_rgb(std::span<const Point3> points)
{
    Point3 lo{}, hi{};
    for (int c = 0; c < 3; ++c) {
        lo[c] = hi[c] = points.empty() ? 0.0 : points[0][c];
        for (const auto& p : points) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    std::vector<Rgb> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        std::array<std::uint8_t, 3> ch{};
        for (int c = 0; c < 3; ++c) {
            const double range = hi[c] - lo[c];
            if (range <= 0.0)
                continue;
            const double v = std::floor((p[c] - lo[c]) / range * 255.0 + 0.5);
            ch[c] = std::uint8_t(std::clamp(v, 0.0, 255.0));
        }
        out.push_back({ch[0], ch[1], ch[2]});
    }
    return out;
}

struct NearestLabel {
    int label = kBackground;
    double distance = 0.0;
};

/// Nearest label in color space; ties go to the background, then the lowest id.
inline NearestLabel nearest_category(Rgb pixel, const CategoryPalette& palette)
{
    int best = kBackground;
    int best_sq = squared_distance(pixel, palette.background);
    for (const auto& c : palette.categories) {
        const int sq = squared_distance(pixel, c.color);
        if (sq < best_sq) {
            best_sq = sq;
            best = c.id;
        }
    }
    return {best, std::sqrt(double(best_sq))};
}

struct PaletteBuildParams {
    TsneParams tsne;
    double min_separation = kDefaultMinSeparation;
    int max_retries = 10;
};

/// Colors for each category from a t-SNE embedding of the name vectors.
/// Retries with successive seeds until every color pair, and every color and
/// the background, are at least `min_separation` apart.
inline CategoryPalette build_palette(const EmbeddingTable& table, const std::map<std::string, double>& prices,
    const std::map<std::string, double>& aspects, const PaletteBuildParams& params = {})
{
    for (const auto& name : table.names) {
        if (!prices.contains(name))
            throw ValidationError("missing price for category '" + name + "'");
        if (!aspects.contains(name))
            throw ValidationError("missing aspect for category '" + name + "'");
    }
    const tsne::Matrix x = table.as_matrix();

    std::string last_problem;
    for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
        TsneParams tp = params.tsne;
        tp.seed = params.tsne.seed + std::uint64_t(attempt);
        const auto colors = scale_to_rgb(tsne_reduce(x, tp).points);

        CategoryPalette palette;
        for (std::size_t i = 0; i < table.size(); ++i)
            palette.categories.push_back({int(i), table.names[i], colors[i], prices.at(table.names[i]), aspects.at(table.names[i])});

        const auto clear_of = [&](Rgb bg) {
            return std::all_of(colors.begin(), colors.end(), [&](Rgb c) { return distance(c, bg) >= params.min_separation; });
        };
        if (clear_of(Rgb{0, 0, 0}))
            palette.background = Rgb{0, 0, 0};
        else if (clear_of(Rgb{255, 255, 255}))
            palette.background = Rgb{255, 255, 255};
        else {
            last_problem = "no background color is clear of the category colors";
            continue;
        }

        const auto violations = palette_violations(palette, params.min_separation);
        if (violations.empty())
            return palette;
        last_problem = violations.front();
    }
    throw RuntimeFailure("palette separation unachievable after " + std::to_string(params.max_retries) + " retries: " + last_problem);
}

inline CategoryPalette build_palette(const EmbeddingTable& table, const std::map<std::string, CategoryInfo>& info, const PaletteBuildParams& params = {})
{
    std::map<std::string, double> prices, aspects;
    for (const auto& [name, ci] : info) {
        prices[name] = ci.unit_price;
        aspects[name] = ci.default_aspect;
    }
    return build_palette(table, prices, aspects, params);
}

inline void write_palette(std::ostream& out, const CategoryPalette& palette)
{
    out << "id,name,r,g,b,unit_price,default_aspect\n";
    for (const auto& c : palette.categories) {
        csv::check_field(c.name);
        out << c.id << ',' << c.name << ',' << int(c.color.r) << ',' << int(c.color.g) << ',' << int(c.color.b) << ','
            << csv::format_double(c.unit_price) << ',' << csv::format_double(c.default_aspect) << '\n';
    }
    out << "BACKGROUND,," << int(palette.background.r) << ',' << int(palette.background.g) << ',' << int(palette.background.b) << ",,\n";
}

inline CategoryPalette parse_palette(std::istream& in)
{
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f) || f != std::vector<std::string>{"id", "name", "r", "g", "b", "unit_price", "default_aspect"})
        throw ValidationError("palette file: header must be id,name,r,g,b,unit_price,default_aspect");

    const auto channel = [&](const std::string& s) {
        const auto v = csv::parse_int(s);
        if (!v || *v < 0 || *v > 255)
            throw ValidationError("palette file row " + std::to_string(reader.line()) + ": bad color channel '" + s + "'");
        return std::uint8_t(*v);
    };

    CategoryPalette palette;
    bool have_background = false;
    while (reader.next(f)) {
        const std::string row = "palette file row " + std::to_string(reader.line());
        if (f.size() != 7)
            throw ValidationError(row + ": expected 7 fields");
        if (have_background)
            throw ValidationError(row + ": rows after BACKGROUND");
        if (f[0] == "BACKGROUND") {
            palette.background = {channel(f[2]), channel(f[3]), channel(f[4])};
            have_background = true;
            continue;
        }
        const auto id = csv::parse_int(f[0]);
        const auto price = csv::parse_double(f[5]);
        const auto aspect = csv::parse_double(f[6]);
        if (!id || *id != (long long)palette.size())
            throw ValidationError(row + ": ids must run 0..K-1 in order");
        if (!price || !aspect)
            throw ValidationError(row + ": malformed price or aspect");
        palette.categories.push_back({int(*id), f[1], {channel(f[2]), channel(f[3]), channel(f[4])}, *price, *aspect});
    }
    if (!have_background)
        throw ValidationError("palette file: missing BACKGROUND row");
    if (palette.categories.empty())
        throw ValidationError("palette file: no categories");
    return palette;
}

inline CategoryPalette load_palette(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open palette file " + path.string());
    return parse_palette(in);
}

inline void save_palette(const std::filesystem::path& path, const CategoryPalette& palette)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write palette file " + path.string());
    write_palette(out, palette);
}

} // namespace furnish
