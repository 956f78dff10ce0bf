// furnish: command-line driver for the arrangement pipeline.
//
//   furnish embed  --embeddings E.csv --prices P.csv [--out palette.csv]
//   furnish repair --grid G.png --palette palette.csv [--min-area 4]
//   furnish search --config run.json
//   furnish eval   --config run.json --latent "z0,z1,..."
//   furnish render --config run.json --archive archive.csv --cell P,C
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <furnish/furnish.hpp>

namespace fs = std::filesystem;
using namespace furnish;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

RunConfig load_config(const Globals& g)
{
    if (g.config.empty())
        throw ValidationError("--config is required for this command");
    RunConfig cfg = load_run_config(g.config);
    if (g.seed)
        cfg.seed = *g.seed;
    if (!g.out_dir.empty())
        cfg.output_dir = g.out_dir;
    return cfg;
}

fs::path out_dir_or(const Globals& g, const fs::path& fallback)
{
    const fs::path dir = g.out_dir.empty() ? fallback : fs::path(g.out_dir);
    if (!dir.empty())
        fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeFailure("cannot write " + path.string());
    out << text;
}

LatentVector parse_latent(std::string text)
{
    for (char& c : text)
        if (c == ',' || c == '[' || c == ']')
            c = ' ';
    std::istringstream in(text);
    LatentVector z;
    std::string tok;
    while (in >> tok) {
        const auto v = csv::parse_double(tok);
        if (!v)
            throw ValidationError("latent value '" + tok + "' is not a number");
        z.push_back(*v);
    }
    return z;
}

CellIndex parse_cell(const std::string& text)
{
    const auto parts = csv::split(text);
    const auto p = parts.size() == 2 ? csv::parse_int(parts[0]) : std::nullopt;
    const auto c = parts.size() == 2 ? csv::parse_int(parts[1]) : std::nullopt;
    if (!p || !c)
        throw ValidationError("--cell must look like PRICE_INDEX,COUNT_INDEX");
    return {int(*p), int(*c)};
}

int cmd_embed(const Globals& g, const std::string& embeddings, const std::string& prices, std::string out, TsneParams tsne)
{
    const auto table = load_embeddings(embeddings);
    const auto info = load_category_info(prices);
    PaletteBuildParams params;
    tsne.seed = g.seed.value_or(0);
    params.tsne = tsne;
    const auto palette = build_palette(table, info, params);
    if (out.empty())
        out = (out_dir_or(g, ".") / "palette.csv").string();
    else if (fs::path(out).has_parent_path())
        fs::create_directories(fs::path(out).parent_path());
    save_palette(out, palette);
    std::cout << "wrote " << out << " (" << palette.size() << " categories)\n";
    return 0;
}

int cmd_repair(const Globals& g, const std::string& grid_path, const std::string& palette_path, int min_area)
{
    const auto palette = load_palette(palette_path);
    const auto grid = read_png(grid_path);
    const auto arrangement = repair_grid(grid, palette, min_area);
    const fs::path dir = out_dir_or(g, ".");
    const std::string stem = fs::path(grid_path).stem().string();
    write_text(dir / (stem + "_arrangement.json"), arrangement_to_json(arrangement, palette).dump(2) + "\n");
    write_png(dir / (stem + "_annotated.png"), render_annotated(grid, arrangement));
    std::cout << "placements " << arrangement.placements.size() << ", repair_cost " << csv::format_double(arrangement.repair_cost) << ", overlaps "
              << arrangement.overlap_pairs.size() << "\n";
    return 0;
}

int cmd_search(const Globals& g)
{
    const RunConfig cfg = load_config(g);
    const auto palette = load_palette(cfg.palette_path);
    auto generator = make_generator(cfg, palette);
    const auto result = run_lsi(cfg.lsi(), palette, *generator);

    fs::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir / "archive.csv", std::ios::binary);
        write_archive_csv(out, result.archive, generator->latent_dim());
    }
    {
        std::ofstream out(cfg.output_dir / "metrics.csv", std::ios::binary);
        write_metrics_header(out);
        for (const auto& m : result.metrics)
            write_metrics_row(out, m);
    }
    write_png(cfg.output_dir / "heatmap.png", render_heatmap(result.archive, cfg.heatmap_cell_px));
    std::cout << "evaluations " << result.archive.stats().evaluations << ", coverage " << result.archive.coverage() << "/"
              << cfg.archive.cell_count() << ", qd_score " << csv::format_double(result.archive.qd_score()) << ", best_objective "
              << csv::format_double(result.archive.best_objective().value_or(0.0)) << ", restarts " << result.restarts << "\n";
    std::cout << "wrote " << (cfg.output_dir / "archive.csv").string() << ", metrics.csv, heatmap.png\n";
    return 0;
}

int cmd_eval(const Globals& g, const std::string& latent_text)
{
    const RunConfig cfg = load_config(g);
    const auto palette = load_palette(cfg.palette_path);
    auto generator = make_generator(cfg, palette);
    const LatentVector z = parse_latent(latent_text);
    check_latent(z, generator->latent_dim());
    const auto e = evaluate_latent(*generator, palette, z, cfg.min_area, cfg.archive);
    std::cout << evaluation_to_json(z, e, palette).dump() << "\n";
    return 0;
}

int cmd_render(const Globals& g, const std::string& archive_path, const std::string& cell_text)
{
    const RunConfig cfg = load_config(g);
    const auto palette = load_palette(cfg.palette_path);
    const CellIndex cell = parse_cell(cell_text);
    std::ifstream in(archive_path);
    if (!in)
        throw ValidationError("cannot open archive file " + archive_path);
    const Elite* elite = nullptr;
    const auto elites = parse_archive_csv(in);
    for (const auto& e : elites)
        if (e.cell == cell)
            elite = &e;
    if (!elite)
        throw ValidationError("cell (" + std::to_string(cell.price) + "," + std::to_string(cell.count) + ") is empty in " + archive_path);

    auto generator = make_generator(cfg, palette);
    const auto e = evaluate_latent(*generator, palette, elite->latent, cfg.min_area, cfg.archive);
    fs::create_directories(cfg.output_dir);
    const std::string stem = "cell_" + std::to_string(cell.price) + "_" + std::to_string(cell.count);
    write_png(cfg.output_dir / (stem + "_raw.png"), e.grid);
    write_png(cfg.output_dir / (stem + "_repaired.png"), paint_arrangement(e.arrangement.placements, palette, e.grid.width, e.grid.height));
    write_png(cfg.output_dir / (stem + "_annotated.png"), render_annotated(e.grid, e.arrangement));
    std::cout << evaluation_to_json(elite->latent, e, palette).dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Furniture arrangement generation: palette, repair and latent space illumination"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "Run configuration (JSON)");
    auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--out-dir", g.out_dir, "Output directory");

    std::string embeddings, prices, palette_out;
    TsneParams tsne;
    auto* embed = app.add_subcommand("embed", "Build the category color palette from name embeddings");
    embed->add_option("--embeddings", embeddings, "Embedding CSV (name,e0,...)")->required();
    embed->add_option("--prices", prices, "Price/aspect CSV (name,unit_price,default_aspect)")->required();
    embed->add_option("--out", palette_out, "Palette CSV to write");
    embed->add_option("--perplexity", tsne.perplexity, "t-SNE perplexity")->capture_default_str();
    embed->add_option("--iterations", tsne.iterations, "t-SNE iterations")->capture_default_str();

    std::string grid_path, palette_path;
    int min_area = kDefaultMinArea;
    auto* repair = app.add_subcommand("repair", "Fit furniture rectangles to an occupancy grid PNG");
    repair->add_option("--grid", grid_path, "RGB8 PNG occupancy grid")->required();
    repair->add_option("--palette", palette_path, "Palette CSV")->required();
    repair->add_option("--min-area", min_area, "Smallest accepted rectangle area")->capture_default_str()->check(CLI::PositiveNumber);

    auto* search = app.add_subcommand("search", "Run CMA-ME over the generator's latent space");

    std::string latent;
    auto* eval = app.add_subcommand("eval", "Evaluate a single latent vector");
    eval->add_option("--latent", latent, "Latent vector, comma separated")->required();

    std::string archive_path, cell;
    auto* render = app.add_subcommand("render", "Render the elite stored in an archive cell");
    render->add_option("--archive", archive_path, "Archive CSV")->required();
    render->add_option("--cell", cell, "PRICE_INDEX,COUNT_INDEX")->required();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    if (seed_opt->count() > 0)
        g.seed = seed;

    try {
        if (*embed)
            return cmd_embed(g, embeddings, prices, palette_out, tsne);
        if (*repair)
            return cmd_repair(g, grid_path, palette_path, min_area);
        if (*search)
            return cmd_search(g);
        if (*eval)
            return cmd_eval(g, latent);
        if (*render)
            return cmd_render(g, archive_path, cell);
    }
    catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
