#pragma once

// Rectangle-sweep repair: turns a noisy occupancy grid into axis-aligned
// furniture placements and a total color-space repair cost.
//
// Costs are accumulated in fixed point (kCostScale units per RGB distance
// unit) so prefix-sum scoring and direct summation agree exactly, which makes
// the tie-break order well defined.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <furnish/image.hpp>
#include <furnish/palette.hpp>

namespace furnish {

using CostUnits = std::int64_t;

inline constexpr double kCostScale = 1048576.0; // 2^20

inline CostUnits to_cost_units(double rgb_distance) { return CostUnits(std::llround(rgb_distance * kCostScale)); }
inline double from_cost_units(CostUnits units) { return double(units) / kCostScale; }

/// Quantized Euclidean color distance, memoized over all squared distances.
inline CostUnits color_cost(Rgb a, Rgb b)
{
    static const std::vector<CostUnits> table = [] {
        std::vector<CostUnits> t(3 * 255 * 255 + 1);
        for (std::size_t sq = 0; sq < t.size(); ++sq)
            t[sq] = to_cost_units(std::sqrt(double(sq)));
        return t;
    }();
    return table[std::size_t(squared_distance(a, b))];
}

inline constexpr int kDefaultMinArea = 4;

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long area() const { return long(w) * long(h); }
    bool contains(int px, int py) const { return px >= x && py >= y && px < x + w && py < y + h; }
    bool intersects(const Rect& o) const { return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h; }

    auto operator<=>(const Rect&) const = default;
};

/// Per-pixel nearest labels and their color distances.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    std::vector<double> distances;

    int at(int x, int y) const { return labels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
};

inline LabelMap label_pixels(const OccupancyGrid& grid, const CategoryPalette& palette)
{
    LabelMap map{grid.width, grid.height, std::vector<int>(grid.size()), std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto nearest = nearest_category(grid.pixels[i], palette);
        map.labels[i] = nearest.label;
        map.distances[i] = nearest.distance;
    }
    return map;
}

struct Component {
    std::vector<std::size_t> pixels; // linear indices, raster order
    Rect bbox;
};

/// 4-connected components of `category`, ordered by their first pixel in raster order.
inline std::vector<Component> connected_components(const LabelMap& map, int category)
{
    std::vector<Component> out;
    std::vector<char> seen(map.labels.size(), 0);
    std::vector<std::size_t> stack;
    const auto w = std::size_t(map.width);

    for (std::size_t seed = 0; seed < map.labels.size(); ++seed) {
        if (seen[seed] || map.labels[seed] != category)
            continue;
        Component comp;
        int x0 = map.width, y0 = map.height, x1 = -1, y1 = -1;
        seen[seed] = 1;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            comp.pixels.push_back(p);
            const int px = int(p % w), py = int(p / w);
            x0 = std::min(x0, px);
            x1 = std::max(x1, px);
            y0 = std::min(y0, py);
            y1 = std::max(y1, py);
            const std::array<std::pair<int, int>, 4> nbrs{{{px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= map.width || ny >= map.height)
                    continue;
                const std::size_t q = std::size_t(ny) * w + std::size_t(nx);
                if (!seen[q] && map.labels[q] == category) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            }
        }
        std::sort(comp.pixels.begin(), comp.pixels.end());
        comp.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        out.push_back(std::move(comp));
    }
    return out;
}

struct SweepResult {
    Rect rect;
    CostUnits cost_units = 0;

    double fit_cost() const { return from_cost_units(cost_units); }
};

/// Strict order used to pick among equal-score rectangles: smaller area,
/// then top-most, then left-most, then narrower.
inline bool sweep_better(CostUnits score, const Rect& r, CostUnits best_score, const Rect& best)
{
    return std::tuple(score, r.area(), r.y, r.x, r.w) < std::tuple(best_score, best.area(), best.y, best.x, best.w);
}

/// Best rectangle (within the component's bounding box) to repaint in the
/// category color. The score charges every pixel inside the rectangle its
/// distance to the category color and every component pixel left outside its
/// distance to the background. Returns nullopt when the winner is smaller
/// than `min_area`.
inline std::optional<SweepResult> sweep_rectangle(const OccupancyGrid& grid, const Component& component, int category,
    const CategoryPalette& palette, int min_area = kDefaultMinArea)
{
    if (component.pixels.empty())
        return std::nullopt;
    const Rect box = component.bbox;
    const Rgb target = palette.color(category);
    const auto bw = std::size_t(box.w), bh = std::size_t(box.h);
    const auto gw = std::size_t(grid.width);

    // delta = inside cost - outside cost, so score(R) = outside_total + sum_R delta.
    std::vector<CostUnits> delta(bw * bh);
    for (std::size_t y = 0; y < bh; ++y)
        for (std::size_t x = 0; x < bw; ++x)
            delta[y * bw + x] = color_cost(grid.at(box.x + int(x), box.y + int(y)), target);
    CostUnits outside_total = 0;
    for (std::size_t p : component.pixels) {
        const CostUnits c = color_cost(grid.pixels[p], palette.background);
        outside_total += c;
        const std::size_t lx = p % gw - std::size_t(box.x), ly = p / gw - std::size_t(box.y);
        delta[ly * bw + lx] -= c;
    }

    // prefix[(y)*(bw+1) + x] = sum of delta over [0,x) x [0,y).
    const std::size_t pw = bw + 1;
    std::vector<CostUnits> prefix(pw * (bh + 1), 0);
    for (std::size_t y = 0; y < bh; ++y) {
        CostUnits row = 0;
        for (std::size_t x = 0; x < bw; ++x) {
            row += delta[y * bw + x];
            prefix[(y + 1) * pw + x + 1] = prefix[y * pw + x + 1] + row;
        }
    }

    Rect best{box.x, box.y, 1, 1};
    CostUnits best_score = outside_total + delta[0];
    for (std::size_t y0 = 0; y0 < bh; ++y0)
        for (std::size_t y1 = y0 + 1; y1 <= bh; ++y1) {
            const CostUnits* top = &prefix[y0 * pw];
            const CostUnits* bottom = &prefix[y1 * pw];
            for (std::size_t x0 = 0; x0 < bw; ++x0)
                for (std::size_t x1 = x0 + 1; x1 <= bw; ++x1) {
                    const CostUnits score = outside_total + bottom[x1] - bottom[x0] - top[x1] + top[x0];
                    if (score > best_score)
                        continue;
                    const Rect r{box.x + int(x0), box.y + int(y0), int(x1 - x0), int(y1 - y0)};
                    if (sweep_better(score, r, best_score, best)) {
                        best = r;
                        best_score = score;
                    }
                }
        }

    if (best.area() < min_area)
        return std::nullopt;
    return SweepResult{best, best_score};
}

/// 0 when the footprint's width/height ratio is at least as close to the
/// category's default aspect as the transposed ratio, else 90.
inline int infer_orientation(const Rect& rect, double default_aspect)
{
    const double upright = std::abs(double(rect.w) / double(rect.h) - default_aspect);
    const double turned = std::abs(double(rect.h) / double(rect.w) - default_aspect);
    return upright <= turned ? 0 : 90;
}

struct FurniturePlacement {
    int category_id = 0;
    Rect rect;
    int orientation = 0;
    double fit_cost = 0.0;

    bool operator==(const FurniturePlacement&) const = default;
};

struct Arrangement {
    std::vector<FurniturePlacement> placements;
    double repair_cost = 0.0;
    CostUnits repair_cost_units = 0;
    std::vector<std::pair<int, int>> overlap_pairs;
};

inline std::vector<std::pair<int, int>> find_overlaps(std::span<const FurniturePlacement> placements)
{
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < placements.size(); ++i)
        for (std::size_t j = i + 1; j < placements.size(); ++j)
            if (placements[i].rect.intersects(placements[j].rect))
                out.emplace_back(int(i), int(j));
    return out;
}

/// Repairs categories in the given order; the result does not depend on it.
inline Arrangement repair_grid(const OccupancyGrid& grid, const CategoryPalette& palette, int min_area, std::span<const int> category_order)
{
    const LabelMap labels = label_pixels(grid, palette);
    Arrangement result;
    std::vector<const Component*> filtered;
    std::vector<std::vector<Component>> all_components;
    all_components.reserve(category_order.size());

    for (int category : category_order) {
        all_components.push_back(connected_components(labels, category));
        for (const auto& comp : all_components.back()) {
            const auto fit = sweep_rectangle(grid, comp, category, palette, min_area);
            if (!fit) {
                filtered.push_back(&comp);
                continue;
            }
            const auto& entry = palette[category];
            result.placements.push_back({category, fit->rect, infer_orientation(fit->rect, entry.default_aspect), fit->fit_cost()});
            result.repair_cost_units += fit->cost_units;
        }
    }

    // Pixels of noise-filtered components are erased to background unless an
    // accepted rectangle already repaints them.
    for (const Component* comp : filtered)
        for (std::size_t p : comp->pixels) {
            const int px = int(p % std::size_t(grid.width)), py = int(p / std::size_t(grid.width));
            const bool covered = std::any_of(result.placements.begin(), result.placements.end(),
                [&](const FurniturePlacement& f) { return f.rect.contains(px, py); });
            if (!covered)
                result.repair_cost_units += color_cost(grid.pixels[p], palette.background);
        }

    std::sort(result.placements.begin(), result.placements.end(), [](const auto& a, const auto& b) {
        return std::tuple(a.category_id, a.rect.y, a.rect.x, a.rect.w, a.rect.h) < std::tuple(b.category_id, b.rect.y, b.rect.x, b.rect.w, b.rect.h);
    });
    result.repair_cost = from_cost_units(result.repair_cost_units);
    result.overlap_pairs = find_overlaps(result.placements);
    return result;
}

inline Arrangement repair_grid(const OccupancyGrid& grid, const CategoryPalette& palette, int min_area = kDefaultMinArea)
{
    std::vector<int> order(palette.size());
    std::iota(order.begin(), order.end(), 0);
    return repair_grid(grid, palette, min_area, order);
}

/// Clean rendering: placements painted in exact category colors, in list order, over the background.
inline OccupancyGrid paint_arrangement(std::span<const FurniturePlacement> placements, const CategoryPalette& palette, int width, int height)
{
    OccupancyGrid grid(width, height, palette.background);
    for (const auto& f : placements)
        for (int y = f.rect.y; y < f.rect.y + f.rect.h; ++y)
            for (int x = f.rect.x; x < f.rect.x + f.rect.w; ++x)
                if (grid.contains(x, y))
                    grid.at(x, y) = palette[f.category_id].color;
    return grid;
}

} // namespace furnish
