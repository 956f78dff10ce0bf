#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <string>

#include <furnish/error.hpp>
#include <furnish/palette.hpp>
#include <furnish/repair.hpp>

namespace furnish {

struct MeasureValue {
    double total_price = 0.0;
    int furniture_count = 0;

    bool operator==(const MeasureValue&) const = default;
};

/// Archive tessellation: price_bins equal intervals over [0, price_max] and
/// one count bin per integer in 0..count_max. Out-of-range values clamp.
struct ArchiveConfig {
    double price_max = 20000.0;
    int price_bins = 20;
    int count_max = 20;

    int count_bins() const { return count_max + 1; }
    int cell_count() const { return price_bins * count_bins(); }
};

struct CellIndex {
    int price = 0;
    int count = 0;

    auto operator<=>(const CellIndex&) const = default;
};

inline MeasureValue compute_measures(const Arrangement& arrangement, const CategoryPalette& palette)
{
    MeasureValue m;
    for (const auto& f : arrangement.placements) {
        if (f.category_id < 0 || std::size_t(f.category_id) >= palette.size())
            throw ValidationError("unknown category id " + std::to_string(f.category_id));
        m.total_price += palette[f.category_id].unit_price;
    }
    m.furniture_count = int(arrangement.placements.size());
    return m;
}

inline CellIndex bin_measures(const MeasureValue& value, const ArchiveConfig& config)
{
    const double width = config.price_max / double(config.price_bins);
    const double raw = std::floor(value.total_price / width);
    const int price = raw >= double(config.price_bins - 1) ? config.price_bins - 1 : std::max(0, int(raw));
    return {price, std::clamp(value.furniture_count, 0, config.count_max)};
}

} // namespace furnish
