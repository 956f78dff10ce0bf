#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <furnish/palette.hpp>

using namespace furnish;

namespace {

std::string embeddings_csv(const std::vector<std::string>& names, int dim, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    std::ostringstream out;
    out << "name";
    for (int i = 0; i < dim; ++i)
        out << ",e" << i;
    out << "\n";
    for (const auto& n : names) {
        out << n;
        for (int i = 0; i < dim; ++i)
            out << "," << normal(rng);
        out << "\n";
    }
    return out.str();
}

const EmbeddingTable& bundled_table()
{
    static const EmbeddingTable t = load_embeddings(FURNISH_DATA_DIR "/category_embeddings.csv");
    return t;
}

} // namespace

TEST(LoadEmbeddings, BundledFileHas25Categories)
{
    const auto& t = bundled_table();
    EXPECT_EQ(t.size(), 25u);
    EXPECT_EQ(t.dim(), 512u);
    EXPECT_EQ(t.names.front(), "bed");
    EXPECT_EQ(t.names.back(), "piano");
}

TEST(LoadEmbeddings, PreservesRowOrder)
{
    std::istringstream in(embeddings_csv({"d", "c", "b", "a"}, 3, 1));
    const auto t = parse_embeddings(in);
    EXPECT_EQ(t.names, (std::vector<std::string>{"d", "c", "b", "a"}));
}

TEST(LoadEmbeddings, EmptyFileIsRejected)
{
    std::istringstream in("");
    EXPECT_THROW(
        {
            try {
                parse_embeddings(in);
            }
            catch (const ValidationError& e) {
                EXPECT_NE(std::string(e.what()).find("no entries"), std::string::npos);
                throw;
            }
        },
        ValidationError);
    std::istringstream header_only("name,e0,e1\n");
    EXPECT_THROW(parse_embeddings(header_only), ValidationError);
}

TEST(LoadEmbeddings, DuplicateNameReportsRow)
{
    std::istringstream in("name,e0\na,1\nb,2\na,3\nc,4\n");
    try {
        parse_embeddings(in);
        FAIL() << "expected duplicate-name error";
    }
    catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("duplicate"), std::string::npos);
        EXPECT_NE(msg.find("row 4"), std::string::npos);
    }
}

TEST(LoadEmbeddings, MalformedAndInconsistentRows)
{
    std::istringstream bad_value("name,e0,e1\na,1,x\nb,1,2\nc,1,2\nd,1,2\n");
    EXPECT_THROW(parse_embeddings(bad_value), ValidationError);
    std::istringstream short_row("name,e0,e1\na,1,2\nb,1\nc,1,2\nd,1,2\n");
    try {
        parse_embeddings(short_row);
        FAIL();
    }
    catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
    }
    std::istringstream bad_header("label,e0\na,1\n");
    EXPECT_THROW(parse_embeddings(bad_header), ValidationError);
}

TEST(LoadEmbeddings, FewerThanFourEntries)
{
    std::istringstream in("name,e0\na,1\nb,2\n");
    EXPECT_THROW(parse_embeddings(in), ValidationError);
}

TEST(ScaleToRgb, EndpointsMapToExtremes)
{
    const std::vector<Point3> pts{{0, 0, 0}, {1, 2, 3}};
    EXPECT_EQ(scale_to_rgb(pts), (std::vector<Rgb>{{0, 0, 0}, {255, 255, 255}}));
}

TEST(ScaleToRgb, SinglePointIsBlack)
{
    const std::vector<Point3> pts{{3.5, -2, 7}};
    EXPECT_EQ(scale_to_rgb(pts), (std::vector<Rgb>{{0, 0, 0}}));
}

TEST(ScaleToRgb, ZeroRangeChannelsAndHalfUpRounding)
{
    // Middle point: 2/4 * 255 = 127.5, which rounds half up to 128.
    const std::vector<Point3> pts{{0, 0, 5}, {2, 0, 5}, {4, 0, 5}};
    EXPECT_EQ(scale_to_rgb(pts), (std::vector<Rgb>{{0, 0, 0}, {128, 0, 0}, {255, 0, 0}}));
}

TEST(ScaleToRgb, IdempotentOnScaledOutput)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Point3> pts(std::size_t(1 + trial % 30));
        for (auto& p : pts)
            p = {u(rng), u(rng), trial % 7 == 0 ? 1.0 : u(rng)};
        const auto once = scale_to_rgb(pts);
        std::vector<Point3> again;
        for (auto c : once)
            again.push_back({double(c.r), double(c.g), double(c.b)});
        EXPECT_EQ(scale_to_rgb(again), once);
    }
}

namespace {

CategoryPalette small_palette()
{
    CategoryPalette p;
    p.background = {0, 0, 0};
    for (int i = 0; i < 8; ++i)
        p.categories.push_back({i, "c" + std::to_string(i), {std::uint8_t(30 * i + 20), std::uint8_t(200 - 20 * i), 100}, 10.0 * i, 1.0});
    return p;
}

} // namespace

TEST(NearestCategory, ExactMatches)
{
    const auto p = small_palette();
    const auto hit = nearest_category(p.categories[7].color, p);
    EXPECT_EQ(hit.label, 7);
    EXPECT_EQ(hit.distance, 0.0);
    const auto bg = nearest_category(p.background, p);
    EXPECT_EQ(bg.label, kBackground);
    EXPECT_EQ(bg.distance, 0.0);
}

TEST(NearestCategory, TieGoesToLowestId)
{
    CategoryPalette p;
    p.background = {0, 0, 0};
    p.categories = {{0, "a", {200, 0, 0}, 0, 1}, {1, "b", {0, 200, 0}, 0, 1}, {2, "c", {100, 100, 200}, 0, 1},
        {3, "d", {0, 0, 200}, 0, 1}, {4, "e", {100, 140, 0}, 0, 1}, {5, "f", {100, 100, 0}, 0, 1}};
    // (100, 120, 0) is 20 from both e and f; c is id 2 and far away.
    const Rgb px{100, 120, 0};
    ASSERT_EQ(squared_distance(px, p.categories[4].color), squared_distance(px, p.categories[5].color));
    const auto hit = nearest_category(px, p);
    EXPECT_EQ(hit.label, 4);
    EXPECT_DOUBLE_EQ(hit.distance, 20.0);

    CategoryPalette q;
    q.background = {0, 0, 0};
    q.categories = {{0, "x", {0, 0, 0}, 0, 1}, {1, "y", {10, 0, 0}, 0, 1}, {2, "z", {0, 0, 10}, 0, 1}};
    EXPECT_EQ(nearest_category({5, 0, 0}, q).label, kBackground);
    // Equidistant between ids 1 and 2 only.
    EXPECT_EQ(nearest_category({10, 0, 10}, q).label, 1);
}

TEST(BuildPalette, BundledCategoriesAreSeparated)
{
    const auto info = load_category_info(FURNISH_DATA_DIR "/category_info.csv");
    const auto palette = build_palette(bundled_table(), info);
    ASSERT_EQ(palette.size(), 25u);
    EXPECT_TRUE(palette_violations(palette).empty());
    for (std::size_t i = 0; i < palette.size(); ++i)
        for (std::size_t j = i + 1; j < palette.size(); ++j)
            EXPECT_GE(distance(palette.categories[i].color, palette.categories[j].color), 20.0);
    for (const auto& c : palette.categories) {
        EXPECT_GE(distance(c.color, palette.background), 20.0);
        EXPECT_EQ(nearest_category(c.color, palette).label, c.id);
    }
    EXPECT_EQ(palette.categories[0].name, "bed");
    EXPECT_EQ(palette.categories[0].unit_price, 1500.0);
}

TEST(BuildPalette, DeterministicForSeed)
{
    const auto info = load_category_info(FURNISH_DATA_DIR "/category_info.csv");
    PaletteBuildParams params;
    params.tsne.seed = 11;
    const auto a = build_palette(bundled_table(), info, params);
    const auto b = build_palette(bundled_table(), info, params);
    EXPECT_EQ(a, b);
    std::ostringstream sa, sb;
    write_palette(sa, a);
    write_palette(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(BuildPalette, BundledPaletteFileMatchesRebuild)
{
    const auto info = load_category_info(FURNISH_DATA_DIR "/category_info.csv");
    EXPECT_EQ(build_palette(bundled_table(), info), load_palette(FURNISH_DATA_DIR "/palette.csv"));
}

TEST(BuildPalette, MissingPriceNamesCategory)
{
    std::map<std::string, double> prices, aspects;
    for (const auto& n : bundled_table().names) {
        prices[n] = 1.0;
        aspects[n] = 1.0;
    }
    prices.erase("stove");
    try {
        build_palette(bundled_table(), prices, aspects);
        FAIL();
    }
    catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("stove"), std::string::npos);
    }
}

TEST(BuildPalette, UnachievableSeparationFails)
{
    std::map<std::string, double> prices, aspects;
    for (const auto& n : bundled_table().names)
        prices[n] = aspects[n] = 1.0;
    PaletteBuildParams params;
    params.min_separation = 200.0;
    params.max_retries = 2;
    params.tsne.iterations = 50;
    EXPECT_THROW(build_palette(bundled_table(), prices, aspects, params), RuntimeFailure);
}

TEST(PaletteFile, RoundTripsAndEndsWithBackgroundRow)
{
    const auto p = small_palette();
    std::ostringstream out;
    write_palette(out, p);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "id,name,r,g,b,unit_price,default_aspect");
    EXPECT_NE(text.find("\nBACKGROUND,,0,0,0,,\n"), std::string::npos);
    std::istringstream in(text);
    EXPECT_EQ(parse_palette(in), p);
}

TEST(PaletteFile, RejectsMissingBackground)
{
    std::istringstream in("id,name,r,g,b,unit_price,default_aspect\n0,a,1,2,3,4,1\n");
    EXPECT_THROW(parse_palette(in), ValidationError);
}

TEST(CategoryInfo, ParsesAndValidates)
{
    std::istringstream good("name,unit_price,default_aspect\nbed,1500,0.75\n");
    const auto info = parse_category_info(good);
    EXPECT_EQ(info.at("bed").unit_price, 1500.0);
    EXPECT_EQ(info.at("bed").default_aspect, 0.75);
    std::istringstream negative("name,unit_price,default_aspect\nbed,-1,0.75\n");
    EXPECT_THROW(parse_category_info(negative), ValidationError);
    std::istringstream flat("name,unit_price,default_aspect\nbed,1,0\n");
    EXPECT_THROW(parse_category_info(flat), ValidationError);
}
