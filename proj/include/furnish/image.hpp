#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <furnish/error.hpp>

namespace furnish {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    auto operator<=>(const Rgb&) const = default;
};

inline int squared_distance(Rgb a, Rgb b)
{
    const int dr = int(a.r) - int(b.r);
    const int dg = int(a.g) - int(b.g);
    const int db = int(a.b) - int(b.b);
    return dr * dr + dg * dg + db * db;
}

inline double distance(Rgb a, Rgb b) { return std::sqrt(double(squared_distance(a, b))); }

/// Row-major 8-bit RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill = {})
        : width(w), height(h)
    {
        if (w < 1 || h < 1)
            throw ValidationError("image dimensions must be positive");
        pixels.assign(std::size_t(w) * std::size_t(h), fill);
    }

    std::size_t size() const { return pixels.size(); }
    std::size_t index(int x, int y) const { return std::size_t(y) * std::size_t(width) + std::size_t(x); }
    Rgb& at(int x, int y) { return pixels[index(x, y)]; }
    Rgb at(int x, int y) const { return pixels[index(x, y)]; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    bool operator==(const RgbImage&) const = default;
};

/// Floor plan raster: each pixel's color encodes the furniture category occupying that cell.
using OccupancyGrid = RgbImage;

} // namespace furnish
