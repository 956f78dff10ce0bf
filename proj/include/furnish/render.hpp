#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <furnish/archive.hpp>
#include <furnish/image.hpp>
#include <furnish/palette.hpp>
#include <furnish/repair.hpp>

namespace furnish {

inline constexpr Rgb kEmptyCellColor{224, 224, 224};

/// Piecewise-linear dark-purple -> teal -> yellow ramp, t in [0, 1].
inline Rgb ramp_color(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
    }};
    t = std::clamp(t, 0.0, 1.0) * double(stops.size() - 1);
    const auto i = std::min(std::size_t(t), stops.size() - 2);
    const double f = t - double(i);
    std::array<std::uint8_t, 3> c{};
    for (std::size_t k = 0; k < 3; ++k)
        c[k] = std::uint8_t(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    return {c[0], c[1], c[2]};
}

/// Price bins along x, count bins along y (count 0 at the bottom). Occupied
/// cells are colored linearly from the worst stored objective to 0.
inline RgbImage render_heatmap(const Archive& archive, int cell_px = 16)
{
    const auto& cfg = archive.config();
    RgbImage img(cfg.price_bins * cell_px, cfg.count_bins() * cell_px, kEmptyCellColor);
    double worst = 0.0;
    for (const auto& [cell, elite] : archive.cells())
        worst = std::min(worst, elite.objective);
    for (const auto& [cell, elite] : archive.cells()) {
        const double t = worst < 0.0 ? 1.0 - elite.objective / worst : 1.0;
        const Rgb color = ramp_color(t);
        const int x0 = cell.price * cell_px;
        const int y0 = (cfg.count_max - cell.count) * cell_px;
        for (int y = y0; y < y0 + cell_px; ++y)
            for (int x = x0; x < x0 + cell_px; ++x)
                img.at(x, y) = color;
    }
    return img;
}

/// Upscaled copy of the grid with each placement's rectangle outlined.
inline RgbImage render_annotated(const OccupancyGrid& grid, const Arrangement& arrangement, int scale = 4)
{
    RgbImage img(grid.width * scale, grid.height * scale);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            img.at(x, y) = grid.at(x / scale, y / scale);
    for (const auto& f : arrangement.placements) {
        const int x0 = f.rect.x * scale, y0 = f.rect.y * scale;
        const int x1 = (f.rect.x + f.rect.w) * scale - 1, y1 = (f.rect.y + f.rect.h) * scale - 1;
        const Rgb outline = f.orientation == 0 ? Rgb{255, 255, 255} : Rgb{255, 0, 255};
        for (int x = x0; x <= x1; ++x) {
            img.at(x, y0) = outline;
            img.at(x, y1) = outline;
        }
        for (int y = y0; y <= y1; ++y) {
            img.at(x0, y) = outline;
            img.at(x1, y) = outline;
        }
    }
    return img;
}

} // namespace furnish
