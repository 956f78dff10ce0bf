#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include <furnish/furnish.hpp>

namespace fs = std::filesystem;
using namespace furnish;

namespace {

struct Run {
    int code = -1;
    std::string output; // stdout and stderr
};

Run cli(const std::string& args)
{
    const std::string cmd = std::string(FURNISH_CLI) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    Run r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Scratch {
public:
    Scratch()
    {
        std::random_device rd;
        _dir = fs::temp_directory_path() / ("furnish_cli_" + std::to_string(rd()));
        fs::create_directories(_dir);
    }
    ~Scratch() { fs::remove_all(_dir); }

    const fs::path& dir() const { return _dir; }
    fs::path operator/(const std::string& name) const { return _dir / name; }

private:
    fs::path _dir;
};

const std::string kData = FURNISH_DATA_DIR;

const CategoryPalette& bundled()
{
    static const CategoryPalette p = load_palette(kData + "/palette.csv");
    return p;
}

fs::path write_config(const Scratch& s, long evaluations, std::uint64_t seed = 3)
{
    auto doc = nlohmann::json::parse(slurp(kData + "/run.json"));
    doc["palette_path"] = kData + "/palette.csv";
    doc["output_dir"] = (s / "out").string();
    doc["total_evaluations"] = evaluations;
    doc["seed"] = seed;
    const fs::path path = s / "run.json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

int line_count(const std::string& text) { return int(std::count(text.begin(), text.end(), '\n')); }

} // namespace

TEST(Cli, UnknownSubcommandIsUsageError)
{
    EXPECT_EQ(cli("frobnicate").code, 1);
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(CliEmbed, WritesPalette)
{
    Scratch s;
    const auto r = cli("--seed 0 embed --embeddings " + kData + "/category_embeddings.csv --prices " + kData + "/category_info.csv --out "
        + (s / "p.csv").string());
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string text = slurp(s / "p.csv");
    EXPECT_EQ(line_count(text), 27); // header, 25 categories, background
    EXPECT_EQ(load_palette(s / "p.csv").size(), 25u);
    EXPECT_EQ(text, slurp(kData + "/palette.csv"));
}

TEST(CliEmbed, SameSeedSameBytes)
{
    Scratch s;
    const std::string base = " embed --embeddings " + kData + "/category_embeddings.csv --prices " + kData + "/category_info.csv --out ";
    ASSERT_EQ(cli("--seed 5" + base + (s / "a.csv").string()).code, 0);
    ASSERT_EQ(cli("--seed 5" + base + (s / "b.csv").string()).code, 0);
    EXPECT_EQ(slurp(s / "a.csv"), slurp(s / "b.csv"));
}

TEST(CliEmbed, MissingPriceFile)
{
    Scratch s;
    const auto r = cli("embed --embeddings " + kData + "/category_embeddings.csv --prices " + (s / "nope.csv").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("missing price file"), std::string::npos) << r.output;
}

TEST(CliRepair, AllBackground)
{
    Scratch s;
    write_png(s / "empty.png", OccupancyGrid(20, 10, bundled().background));
    const auto r = cli("--out-dir " + s.dir().string() + " repair --grid " + (s / "empty.png").string() + " --palette " + kData + "/palette.csv");
    ASSERT_EQ(r.code, 0) << r.output;
    const auto doc = nlohmann::json::parse(slurp(s / "empty_arrangement.json"));
    EXPECT_TRUE(doc["placements"].empty());
    EXPECT_EQ(doc["repair_cost"].get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(s / "empty_annotated.png"));
}

TEST(CliRepair, AlphaChannelIsRejected)
{
    Scratch s;
    std::vector<std::uint8_t> rgba(4 * 4 * 4, 255);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 4;
    image.height = 4;
    image.format = PNG_FORMAT_RGBA;
    ASSERT_TRUE(png_image_write_to_file(&image, (s / "alpha.png").c_str(), 0, rgba.data(), 0, nullptr));
    const auto r = cli("repair --grid " + (s / "alpha.png").string() + " --palette " + kData + "/palette.csv");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("RGB8 required"), std::string::npos) << r.output;
}

TEST(CliRepair, NoisyGridMatchesLibrary)
{
    Scratch s;
    LatentVector z(16, 0.0);
    z[0] = 1.5;
    const auto grid = synth_generate(z, bundled(), {});
    write_png(s / "noisy.png", grid);
    const auto r = cli("--out-dir " + s.dir().string() + " repair --grid " + (s / "noisy.png").string() + " --palette " + kData + "/palette.csv");
    ASSERT_EQ(r.code, 0) << r.output;
    const auto expected = arrangement_to_json(repair_grid(grid, bundled()), bundled());
    EXPECT_EQ(nlohmann::ordered_json::parse(slurp(s / "noisy_arrangement.json")), expected);
    EXPECT_GT(expected["placements"].size(), 0u);
    EXPECT_GT(expected["repair_cost"].get<double>(), 0.0);
}

TEST(CliSearch, ProducesArtifactsDeterministically)
{
    Scratch s;
    const auto cfg = write_config(s, 300);
    const auto first = cli("--config " + cfg.string() + " search");
    ASSERT_EQ(first.code, 0) << first.output;
    const std::string archive1 = slurp(s / "out/archive.csv");
    const std::string metrics1 = slurp(s / "out/metrics.csv");
    EXPECT_TRUE(fs::exists(s / "out/heatmap.png"));
    const auto heat = read_png(s / "out/heatmap.png");
    EXPECT_EQ(heat.width, 20 * 16);
    EXPECT_EQ(heat.height, 21 * 16);

    const auto second = cli("--config " + cfg.string() + " search");
    ASSERT_EQ(second.code, 0) << second.output;
    EXPECT_EQ(slurp(s / "out/archive.csv"), archive1);
    EXPECT_EQ(slurp(s / "out/metrics.csv"), metrics1);

    std::istringstream in(archive1);
    const auto elites = parse_archive_csv(in);
    EXPECT_GT(elites.size(), 1u);
    for (const auto& e : elites) {
        EXPECT_EQ(e.latent.size(), 16u);
        if (e.measures.furniture_count == 0) {
            EXPECT_EQ(e.measures.total_price, 0.0);
        }
        EXPECT_LE(e.objective, 0.0);
    }
    std::istringstream min(metrics1);
    EXPECT_EQ(parse_metrics_csv(min).back().evaluations, 300);

    const auto other = cli("--config " + cfg.string() + " --seed 4 search");
    ASSERT_EQ(other.code, 0);
    EXPECT_NE(slurp(s / "out/archive.csv"), archive1);
}

TEST(CliSearch, InvalidConfigListsProblems)
{
    Scratch s;
    std::ofstream(s / "bad.json") << R"({"palette_path": "missing.csv", "emitters": 0})";
    const auto r = cli("--config " + (s / "bad.json").string() + " search");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("palette_path"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("emitters"), std::string::npos) << r.output;
}

TEST(CliEval, MatchesLibrary)
{
    Scratch s;
    const auto cfg = write_config(s, 10);
    const LatentVector z{0.5, -1, 2, 0.25, 0, 0, 1, -0.75, 0.1, 0.2, 0.3, -0.4, 0.5, 1.5, 0.3, -0.2};
    std::string arg;
    for (double v : z)
        arg += (arg.empty() ? "" : ",") + csv::format_double(v);
    const auto r = cli("--config " + cfg.string() + " eval --latent " + arg);
    ASSERT_EQ(r.code, 0) << r.output;
    BuiltinGenerator gen(bundled());
    const auto e = evaluate_latent(gen, bundled(), z, kDefaultMinArea, {});
    EXPECT_EQ(nlohmann::ordered_json::parse(r.output), evaluation_to_json(z, e, bundled()));
}

TEST(CliEval, ZeroVector)
{
    Scratch s;
    const auto cfg = write_config(s, 10);
    const auto r = cli("--config " + cfg.string() + " eval --latent 0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
    ASSERT_EQ(r.code, 0) << r.output;
    const auto doc = nlohmann::json::parse(r.output);
    BuiltinGenerator gen(bundled());
    const auto e = evaluate_latent(gen, bundled(), LatentVector(16, 0.0), kDefaultMinArea, {});
    EXPECT_EQ(doc["furniture_count"].get<int>(), e.measures.furniture_count);
    EXPECT_EQ(doc["objective"].get<double>(), e.objective);
    // Three clean pieces (see the generator golden) plus noise blobs large enough to survive filtering.
    EXPECT_GE(doc["furniture_count"].get<int>(), 3);
    EXPECT_LT(doc["objective"].get<double>(), 0.0);
}

TEST(CliEval, WrongDimension)
{
    Scratch s;
    const auto cfg = write_config(s, 10);
    const auto r = cli("--config " + cfg.string() + " eval --latent 1,2,3");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("dimension"), std::string::npos) << r.output;
}

TEST(CliRender, OccupiedAndEmptyCells)
{
    Scratch s;
    const auto cfg = write_config(s, 300);
    ASSERT_EQ(cli("--config " + cfg.string() + " search").code, 0);
    std::istringstream in(slurp(s / "out/archive.csv"));
    const auto elites = parse_archive_csv(in);

    // Pick an elite whose placements repaint without touching one another.
    BuiltinGenerator gen(bundled());
    const Elite* chosen = nullptr;
    for (const auto& e : elites) {
        const auto ev = evaluate_latent(gen, bundled(), e.latent, kDefaultMinArea, {});
        bool clean = !ev.arrangement.placements.empty();
        for (const auto& a : ev.arrangement.placements)
            for (const auto& b : ev.arrangement.placements)
                if (&a != &b && (Rect{a.rect.x - 1, a.rect.y - 1, a.rect.w + 2, a.rect.h + 2}).intersects(b.rect))
                    clean = false;
        if (clean) {
            chosen = &e;
            break;
        }
    }
    ASSERT_NE(chosen, nullptr);
    const std::string cell = std::to_string(chosen->cell.price) + "," + std::to_string(chosen->cell.count);
    const auto r = cli("--config " + cfg.string() + " render --archive " + (s / "out/archive.csv").string() + " --cell " + cell);
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string stem = "cell_" + std::to_string(chosen->cell.price) + "_" + std::to_string(chosen->cell.count);
    for (const char* suffix : {"_raw.png", "_repaired.png", "_annotated.png"})
        EXPECT_TRUE(fs::exists(s / ("out/" + stem + suffix))) << suffix;
    EXPECT_EQ(nlohmann::json::parse(r.output)["objective"].get<double>(), chosen->objective);

    const auto repaired = read_png(s / ("out/" + stem + "_repaired.png"));
    EXPECT_EQ(repair_grid(repaired, bundled()).repair_cost, 0.0);

    // No pieces means no cost, so this cell can never be filled.
    const auto empty = cli("--config " + cfg.string() + " render --archive " + (s / "out/archive.csv").string() + " --cell 19,0");
    EXPECT_EQ(empty.code, 1);
    EXPECT_NE(empty.output.find("cell (19,0) is empty"), std::string::npos) << empty.output;
}
