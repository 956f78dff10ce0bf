#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>

#include <furnish/generator.hpp>
#include <furnish/measures.hpp>

namespace furnish {

struct Elite {
    LatentVector latent;
    double objective = 0.0; // -repair_cost
    MeasureValue measures;
    CellIndex cell;

    bool operator==(const Elite&) const = default;
};

enum class InsertStatus { NewCell, Improved, Rejected };

struct InsertResult {
    InsertStatus status = InsertStatus::Rejected;
    double delta = 0.0; // objective gain over the incumbent when Improved

    bool operator==(const InsertResult&) const = default;
};

/// Grid MAP-Elites archive over (price bin, count bin). Replacement requires
/// strict improvement.
class Archive {
public:
    static constexpr double kDefaultObjectiveFloor = -1e6;

    struct Stats {
        long evaluations = 0;
        long insertions = 0; // NewCell outcomes
        long improvements = 0;
    };

    explicit Archive(ArchiveConfig config = {}, double objective_floor = kDefaultObjectiveFloor)
        : _config(config), _floor(objective_floor)
    {
    }

    InsertResult insert(const Elite& candidate)
    {
        ++_stats.evaluations;
        auto it = _cells.find(candidate.cell);
        if (it == _cells.end()) {
            _cells.emplace(candidate.cell, candidate);
            ++_stats.insertions;
            return {InsertStatus::NewCell, 0.0};
        }
        if (candidate.objective > it->second.objective) {
            const double delta = candidate.objective - it->second.objective;
            it->second = candidate;
            ++_stats.improvements;
            return {InsertStatus::Improved, delta};
        }
        return {InsertStatus::Rejected, 0.0};
    }

    const ArchiveConfig& config() const { return _config; }
    double objective_floor() const { return _floor; }
    const Stats& stats() const { return _stats; }
    const std::map<CellIndex, Elite>& cells() const { return _cells; }

    std::size_t coverage() const { return _cells.size(); }
    bool empty() const { return _cells.empty(); }

    const Elite* find(CellIndex cell) const
    {
        auto it = _cells.find(cell);
        return it == _cells.end() ? nullptr : &it->second;
    }

    /// Sum over occupied cells of (objective - floor), in cell order.
    double qd_score() const
    {
        double sum = 0.0;
        for (const auto& [cell, elite] : _cells)
            sum += elite.objective - _floor;
        return sum;
    }

    std::optional<double> best_objective() const
    {
        if (_cells.empty())
            return std::nullopt;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [cell, elite] : _cells)
            best = std::max(best, elite.objective);
        return best;
    }

    /// The n-th elite in cell order.
    const Elite& elite_at(std::size_t n) const { return std::next(_cells.begin(), std::ptrdiff_t(n))->second; }

    /// Adds an elite read back from a dump without touching statistics.
    void restore(const Elite& elite) { _cells[elite.cell] = elite; }

private:
    ArchiveConfig _config;
    double _floor;
    std::map<CellIndex, Elite> _cells;
    Stats _stats;
};

} // namespace furnish
