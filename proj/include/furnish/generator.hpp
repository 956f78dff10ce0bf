#pragma once

// Latent -> occupancy grid generation.
//
// The built-in generator is a deterministic procedural decoder. Its exact
// algorithm is written out in docs/synthetic_generator.md so an external
// process can reproduce it byte for byte.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <furnish/error.hpp>
#include <furnish/image.hpp>
#include <furnish/palette.hpp>
#include <furnish/repair.hpp>

namespace furnish {

using LatentVector = std::vector<double>;

enum class GeneratorKind { Builtin, External };

class Generator {
public:
    virtual ~Generator() = default;

    virtual GeneratorKind kind() const = 0;
    virtual int latent_dim() const = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;

    /// Same z, same grid.
    virtual OccupancyGrid generate(const LatentVector& z) = 0;
};

struct SynthParams {
    int latent_dim = 16;
    int width = 64;
    int height = 64;
    int k_max = 10;
    int min_side = 2;
    int max_side = 20;
    double noise_max = 25.0;
    int noise_levels = 16;
    int flip_max = 40;
};

/// SplitMix64; specified exactly so other implementations can match it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : _state(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (_state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Box-Muller, cosine branch only.
    double gaussian()
    {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t _state;
};

namespace synth {

    inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

    /// floor(u * n) clamped to [0, n-1].
    inline int pick(double u, int n) { return std::clamp(int(std::floor(u * double(n))), 0, n - 1); }

    /// Golden-ratio offset in [-2, 2) applied to attribute `slot` before squashing.
    inline double phase(int slot)
    {
        const double frac = std::fmod(double(slot) * 0.6180339887498949, 1.0);
        return frac * 4.0 - 2.0;
    }

    inline double unit_clamp(double t) { return std::clamp((t + 1.0) * 0.5, 0.0, 1.0); }

    /// FNV-1a over the little-endian bytes of each coordinate quantized to 1/64.
    inline std::uint64_t latent_hash(const LatentVector& z)
    {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (double v : z) {
            const double q = std::clamp(std::floor(v * 64.0), -1099511627776.0, 1099511627776.0);
            const auto bits = std::uint64_t(std::int64_t(q));
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xFFu;
                h *= 0x100000001B3ull;
            }
        }
        return h;
    }

} // namespace synth

struct SynthPiece {
    int category = 0;
    Rect rect;

    bool operator==(const SynthPiece&) const = default;
};

struct SynthLayout {
    OccupancyGrid grid; // uncorrupted
    std::vector<SynthPiece> pieces;
    double noise_std = 0.0;
    int flips = 0;
};

inline void check_latent(const LatentVector& z, int dim)
{
    if (int(z.size()) != dim)
        throw ValidationError("latent dimension mismatch: expected " + std::to_string(dim) + ", got " + std::to_string(z.size()));
    for (double v : z)
        if (!std::isfinite(v))
            throw ValidationError("latent vector has a non-finite entry");
}

/// Decodes z into clean furniture rectangles plus the corruption settings.
inline SynthLayout synth_layout(const LatentVector& z, const CategoryPalette& palette, const SynthParams& params)
{
    if (params.latent_dim < 4)
        throw ValidationError("synthetic generator needs latent_dim >= 4");
    check_latent(z, params.latent_dim);
    const int d = params.latent_dim;
    const int piece_dims = d - 3;
    const int categories = int(palette.size());

    SynthLayout layout;
    layout.grid = OccupancyGrid(params.width, params.height, palette.background);

    const int k = std::min(params.k_max, synth::pick(synth::sigmoid(2.0 * z[0]), params.k_max + 1));
    for (int j = 0; j < k; ++j) {
        const auto attr = [&](int a) {
            const int slot = 5 * j + a;
            return synth::sigmoid(z[std::size_t(1 + slot % piece_dims)] + synth::phase(slot));
        };
        const int category = synth::pick(attr(0), categories);
        const double aspect = palette[category].default_aspect;
        const int long_side = params.min_side + synth::pick(attr(3), params.max_side - params.min_side + 1);
        int w = long_side, h = long_side;
        if (aspect >= 1.0)
            h = std::max(params.min_side, int(std::floor(double(long_side) / aspect + 0.5)));
        else
            w = std::max(params.min_side, int(std::floor(double(long_side) * aspect + 0.5)));
        if (attr(4) >= 0.5)
            std::swap(w, h);
        w = std::min(w, params.width);
        h = std::min(h, params.height);
        const int x = synth::pick(attr(1), params.width - w + 1);
        const int y = synth::pick(attr(2), params.height - h + 1);
        const Rect rect{x, y, w, h};

        // Pieces keep a one-cell gap from each other.
        const Rect halo{x - 1, y - 1, w + 2, h + 2};
        const bool blocked = std::any_of(layout.pieces.begin(), layout.pieces.end(), [&](const SynthPiece& p) { return p.rect.intersects(halo); });
        if (blocked)
            continue;
        layout.pieces.push_back({category, rect});
        for (int py = y; py < y + h; ++py)
            for (int px = x; px < x + w; ++px)
                layout.grid.at(px, py) = palette[category].color;
    }

    const double level = std::floor(synth::unit_clamp(z[std::size_t(d - 2)]) * double(params.noise_levels));
    layout.noise_std = params.noise_max * std::min(level, double(params.noise_levels)) / double(params.noise_levels);
    layout.flips = int(std::floor(synth::unit_clamp(z[std::size_t(d - 1)]) * double(params.flip_max)));
    return layout;
}

/// Gaussian color noise and random-color pixel flips, seeded from z.
inline void corrupt(OccupancyGrid& grid, const LatentVector& z, double noise_std, int flips)
{
    SplitMix64 rng(synth::latent_hash(z));
    if (noise_std > 0.0)
        for (auto& px : grid.pixels)
            for (std::uint8_t* ch : {&px.r, &px.g, &px.b}) {
                const double v = std::floor(double(*ch) + noise_std * rng.gaussian() + 0.5);
                *ch = std::uint8_t(std::clamp(v, 0.0, 255.0));
            }
    for (int f = 0; f < flips; ++f) {
        const std::size_t idx = std::size_t(rng.next() % std::uint64_t(grid.size()));
        const std::uint64_t c = rng.next();
        grid.pixels[idx] = {std::uint8_t(c & 0xFF), std::uint8_t((c >> 8) & 0xFF), std::uint8_t((c >> 16) & 0xFF)};
    }
}

inline OccupancyGrid synth_generate(const LatentVector& z, const CategoryPalette& palette, const SynthParams& params)
{
    SynthLayout layout = synth_layout(z, palette, params);
    corrupt(layout.grid, z, layout.noise_std, layout.flips);
    return std::move(layout.grid);
}

class BuiltinGenerator final : public Generator {
public:
    BuiltinGenerator(CategoryPalette palette, SynthParams params = {})
        : _palette(std::move(palette)), _params(params)
    {
        if (_params.latent_dim < 4 || _params.width < 1 || _params.height < 1 || _params.k_max < 0 || _params.min_side < 1
            || _params.max_side < _params.min_side || _params.noise_max < 0.0 || _params.noise_levels < 1 || _params.flip_max < 0)
            throw ValidationError("invalid synthetic generator parameters");
        if (_palette.size() == 0)
            throw ValidationError("synthetic generator needs a nonempty palette");
    }

    GeneratorKind kind() const override { return GeneratorKind::Builtin; }
    int latent_dim() const override { return _params.latent_dim; }
    int width() const override { return _params.width; }
    int height() const override { return _params.height; }

    OccupancyGrid generate(const LatentVector& z) override { return synth_generate(z, _palette, _params); }

    const SynthParams& params() const { return _params; }

private:
    CategoryPalette _palette;
    SynthParams _params;
};

} // namespace furnish
