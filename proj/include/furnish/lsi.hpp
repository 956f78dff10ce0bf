#pragma once

// Latent space illumination with CMA-ME: improvement emitters running
// CMA-ES over the generator's latent space, ranked by what each candidate
// did to the shared archive.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <furnish/archive.hpp>
#include <furnish/cmaes.hpp>
#include <furnish/generator.hpp>
#include <furnish/measures.hpp>
#include <furnish/repair.hpp>

namespace furnish {

struct Evaluation {
    OccupancyGrid grid;
    Arrangement arrangement;
    double objective = 0.0;
    MeasureValue measures;
    CellIndex cell;
};

/// generate -> repair -> measures. The objective is -repair_cost.
inline Evaluation evaluate_latent(Generator& generator, const CategoryPalette& palette, const LatentVector& z, int min_area,
    const ArchiveConfig& archive)
{
    Evaluation e;
    e.grid = generator.generate(z);
    e.arrangement = repair_grid(e.grid, palette, min_area);
    e.objective = 0.0 - e.arrangement.repair_cost;
    e.measures = compute_measures(e.arrangement, palette);
    e.cell = bin_measures(e.measures, archive);
    return e;
}

/// Indices ordered NEW_CELL (objective desc), then IMPROVED (delta desc),
/// then REJECTED (objective desc); ties by index.
inline std::vector<std::size_t> rank_by_improvement(std::span<const InsertResult> statuses, std::span<const double> objectives)
{
    const auto group = [](InsertStatus s) { return s == InsertStatus::NewCell ? 0 : s == InsertStatus::Improved ? 1 : 2; };
    std::vector<std::size_t> order(statuses.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int ga = group(statuses[a].status), gb = group(statuses[b].status);
        if (ga != gb)
            return ga < gb;
        const double ka = ga == 1 ? statuses[a].delta : objectives[a];
        const double kb = gb == 1 ? statuses[b].delta : objectives[b];
        return ka > kb;
    });
    return order;
}

struct EvaluationRecord {
    std::size_t emitter = 0;
    LatentVector latent;
    double objective = 0.0;
    MeasureValue measures;
    CellIndex cell;
    InsertResult insert;
};

/// Called after every archive insertion.
using InsertObserver = std::function<void(const Archive&, const EvaluationRecord&)>;

struct LsiConfig {
    std::uint64_t seed = 0;
    int emitters = 5;
    int lambda = 0; // 0: 4 + floor(3 ln d)
    double sigma0 = 0.5;
    long total_evaluations = 10000;
    int min_area = kDefaultMinArea;
    ArchiveConfig archive;
};

class ImprovementEmitter {
public:
    ImprovementEmitter(std::size_t index, int dim, double sigma0, int lambda, std::uint64_t seed)
        : _index(index), _sigma0(sigma0), _state(Eigen::VectorXd::Zero(dim), sigma0, lambda)
    {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index), 0x1a5u};
        _rng.seed(seq);
    }

    /// Samples a batch, inserts it in index order, then adapts. At most
    /// `budget` candidates are evaluated; a truncated batch inserts without
    /// adapting.
    std::vector<EvaluationRecord> step(Archive& archive, Generator& generator, const CategoryPalette& palette, int min_area,
        std::size_t budget = std::numeric_limits<std::size_t>::max(), const InsertObserver& observer = {})
    {
        const auto samples = cmaes_sample(_state, _rng);
        const std::size_t n = std::min(samples.size(), budget);

        std::vector<EvaluationRecord> records;
        records.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            LatentVector z(samples[i].data(), samples[i].data() + samples[i].size());
            const Evaluation e = evaluate_latent(generator, palette, z, min_area, archive.config());
            EvaluationRecord rec{_index, std::move(z), e.objective, e.measures, e.cell, {}};
            rec.insert = archive.insert({rec.latent, rec.objective, rec.measures, rec.cell});
            if (observer)
                observer(archive, rec);
            records.push_back(std::move(rec));
        }
        if (n < samples.size())
            return records;

        std::vector<InsertResult> statuses;
        std::vector<double> objectives;
        for (const auto& r : records) {
            statuses.push_back(r.insert);
            objectives.push_back(r.objective);
        }
        const auto order = rank_by_improvement(statuses, objectives);
        std::vector<Eigen::VectorXd> ranked;
        ranked.reserve(order.size());
        for (std::size_t i : order)
            ranked.push_back(samples[i]);

        const bool progressed = std::any_of(statuses.begin(), statuses.end(), [](const InsertResult& s) { return s.status != InsertStatus::Rejected; });
        const bool healthy = cmaes_update(_state, ranked);
        if (!progressed || !healthy)
            restart(archive);
        return records;
    }

    /// New mean from a uniformly chosen elite (zero if the archive is empty), identity covariance.
    void restart(const Archive& archive)
    {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(_state.dim);
        if (!archive.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, archive.coverage() - 1);
            const auto& latent = archive.elite_at(pick(_rng)).latent;
            mean = Eigen::Map<const Eigen::VectorXd>(latent.data(), Eigen::Index(latent.size()));
        }
        _state.reset(mean, _sigma0);
        ++_restarts;
    }

    const CmaEsState& state() const { return _state; }
    long restarts() const { return _restarts; }
    int lambda() const { return _state.lambda; }

private:
    std::size_t _index;
    double _sigma0;
    CmaEsState _state;
    std::mt19937_64 _rng;
    long _restarts = 0;
};

struct MetricsRow {
    long evaluations = 0;
    long coverage = 0;
    double qd_score = 0.0;
    double best_objective = 0.0;

    bool operator==(const MetricsRow&) const = default;
};

struct LsiResult {
    Archive archive;
    std::vector<MetricsRow> metrics;
    long batches = 0;
    long restarts = 0;
};

inline void validate(const LsiConfig& c)
{
    if (c.emitters < 1)
        throw ValidationError("emitters must be >= 1");
    if (c.lambda < 0 || c.lambda == 1)
        throw ValidationError("lambda must be 0 (automatic) or >= 2");
    if (!(c.sigma0 > 0.0))
        throw ValidationError("sigma0 must be positive");
    if (c.total_evaluations < 1)
        throw ValidationError("total_evaluations must be >= 1");
    if (c.min_area < 1)
        throw ValidationError("min_area must be >= 1");
    if (!(c.archive.price_max > 0.0) || c.archive.price_bins < 1 || c.archive.count_max < 1)
        throw ValidationError("archive bounds must be positive");
}

/// Round-robin over the emitters until exactly total_evaluations candidates
/// have been evaluated. Deterministic given config.seed.
inline LsiResult run_lsi(const LsiConfig& config, const CategoryPalette& palette, Generator& generator, const InsertObserver& observer = {})
{
    validate(config);
    LsiResult result{Archive(config.archive), {}, 0, 0};
    std::vector<ImprovementEmitter> emitters;
    for (int i = 0; i < config.emitters; ++i)
        emitters.emplace_back(std::size_t(i), generator.latent_dim(), config.sigma0, config.lambda, config.seed);

    long evaluations = 0;
    for (std::size_t turn = 0; evaluations < config.total_evaluations; ++turn) {
        auto& emitter = emitters[turn % emitters.size()];
        const auto budget = std::size_t(config.total_evaluations - evaluations);
        evaluations += long(emitter.step(result.archive, generator, palette, config.min_area, budget, observer).size());
        ++result.batches;
        result.metrics.push_back({evaluations, long(result.archive.coverage()), result.archive.qd_score(), result.archive.best_objective().value_or(0.0)});
    }
    for (const auto& e : emitters)
        result.restarts += e.restarts();
    return result;
}

} // namespace furnish
