#include "vl/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vl/parallel.hpp"
#include "vl/rng.hpp"

namespace vl {

void TuneConfig::validate() const {
    if (!(a_min > 0.0) || !(a_max > a_min) || !std::isfinite(a_max))
        throw ConfigError("time-scale bounds must satisfy 0 < a_min < a_max");
    if (multistart_count < 1) throw ConfigError("multistart_count must be >= 1");
    if (max_evaluations < 1) throw ConfigError("max_evaluations must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    if (!(validation_split >= 0.0 && validation_split < 1.0))
        throw ConfigError("validation_split must lie in [0, 1)");
    if (!(ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
}

double objective(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                 Eigen::Index rows, double ridge, double validation_split) {
    constexpr double rejected = std::numeric_limits<double>::infinity();
    try {
        const auto held_out = static_cast<Eigen::Index>(std::floor(rows * validation_split));
        const Eigen::Index train = rows - held_out;
        if (train < 1) return rejected;
        const auto model = fit(dataset, structure, start, train, ridge);
        if (held_out == 0) return std::isfinite(model.fit_stats.sse) ? model.fit_stats.sse : rejected;
        const Eigen::VectorXd predicted = predict(model, dataset, start + train, held_out);
        const double sse = (dataset.output.segment(start + train, held_out) - predicted).squaredNorm();
        return std::isfinite(sse) ? sse : rejected;
    } catch (const Error&) {
        return rejected;
    }
}

namespace {

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double scale = 1.0 / base;
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale /= base;
    }
    return result;
}

int nth_prime(int n) {
    int count = 0;
    for (int candidate = 2;; ++candidate) {
        bool prime = true;
        for (int d = 2; d * d <= candidate; ++d)
            if (candidate % d == 0) {
                prime = false;
                break;
            }
        if (prime && count++ == n) return candidate;
    }
}

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

class SimplexSearch {
public:
    SimplexSearch(const Dataset& dataset, const ModelStructure& structure, const TuneConfig& config,
                  Eigen::Index start, Eigen::Index rows, int start_id, int budget)
        : dataset_(dataset), structure_(structure), config_(config), start_(start), rows_(rows),
          start_id_(start_id), budget_(budget), lo_(std::log(config.a_min)),
          hi_(std::log(config.a_max)) {}

    void run(std::vector<double> origin) {
        const std::size_t dim = origin.size();
        const double step = 0.1 * (hi_ - lo_);
        std::vector<Vertex> simplex;
        simplex.reserve(dim + 1);
        if (!push(simplex, origin)) return;
        for (std::size_t j = 0; j < dim; ++j) {
            auto x = origin;
            x[j] = x[j] + step <= hi_ ? x[j] + step : x[j] - step;
            if (!push(simplex, x)) return;
        }

        const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
        while (true) {
            std::stable_sort(simplex.begin(), simplex.end(), by_value);
            if (converged(simplex)) return;

            std::vector<double> centroid(dim, 0.0);
            for (std::size_t v = 0; v < dim; ++v)
                for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[v].x[j] / dim;
            auto& worst = simplex.back();

            const auto along = [&](double t) {
                std::vector<double> x(dim);
                for (std::size_t j = 0; j < dim; ++j)
                    x[j] = centroid[j] + t * (worst.x[j] - centroid[j]);
                return x;
            };

            Vertex reflected;
            if (!eval(along(-1.0), reflected)) return;
            if (reflected.f < simplex.front().f) {
                Vertex expanded;
                if (!eval(along(-2.0), expanded)) return;
                worst = expanded.f < reflected.f ? expanded : reflected;
                continue;
            }
            if (reflected.f < simplex[dim - 1].f) {
                worst = reflected;
                continue;
            }
            const bool outside = reflected.f < worst.f;
            Vertex contracted;
            if (!eval(along(outside ? -0.5 : 0.5), contracted)) return;
            if (contracted.f < (outside ? reflected.f : worst.f)) {
                worst = contracted;
                continue;
            }
            // Shrink toward the best vertex.
            for (std::size_t v = 1; v <= dim; ++v) {
                std::vector<double> x(dim);
                for (std::size_t j = 0; j < dim; ++j)
                    x[j] = simplex[0].x[j] + 0.5 * (simplex[v].x[j] - simplex[0].x[j]);
                if (!eval(x, simplex[v])) return;
            }
        }
    }

    std::vector<TraceEntry> trace;
    int evaluations = 0;

private:
    bool push(std::vector<Vertex>& simplex, const std::vector<double>& x) {
        Vertex v;
        if (!eval(x, v)) return false;
        simplex.push_back(std::move(v));
        return true;
    }

    /// False once the budget is spent.
    bool eval(std::vector<double> x, Vertex& out) {
        if (evaluations >= budget_) return false;
        for (auto& c : x) c = std::clamp(c, lo_, hi_);
        std::vector<double> scales(x.size());
        std::transform(x.begin(), x.end(), scales.begin(), [&](double c) {
            return std::clamp(std::exp(c), config_.a_min, config_.a_max);
        });
        auto candidate = structure_;
        candidate.set_time_scales(scales);
        const double f = objective(dataset_, candidate, start_, rows_, config_.ridge,
                                   config_.validation_split);
        ++evaluations;
        trace.push_back({start_id_, evaluations, scales, f});
        out.x = std::move(x);
        out.f = f;
        return true;
    }

    bool converged(const std::vector<Vertex>& simplex) const {
        const double best = simplex.front().f;
        const double worst = simplex.back().f;
        if (!std::isfinite(best)) return true;
        if (std::isfinite(worst) && worst - best <= config_.tolerance * std::abs(best)) return true;
        double spread = 0.0;
        for (const auto& v : simplex)
            for (std::size_t j = 0; j < v.x.size(); ++j)
                spread = std::max(spread, std::abs(v.x[j] - simplex.front().x[j]));
        return spread < 1e-10;
    }

    const Dataset& dataset_;
    const ModelStructure& structure_;
    const TuneConfig& config_;
    Eigen::Index start_, rows_;
    int start_id_;
    int budget_;
    double lo_, hi_;
};

} // namespace

TuneResult tune_time_scales(const Dataset& dataset, const ModelStructure& structure,
                            const TuneConfig& config, Eigen::Index start, Eigen::Index rows) {
    config.validate();
    structure.validate();
    dataset.validate();

    const auto dim = structure.time_scales().size();
    const int starts = config.multistart_count;
    const double lo = std::log(config.a_min), hi = std::log(config.a_max);

    Rng rng(config.seed);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = rng.uniform();

    std::vector<std::vector<double>> origins(starts, std::vector<double>(dim));
    for (int s = 0; s < starts; ++s)
        for (std::size_t j = 0; j < dim; ++j) {
            const double u = std::fmod(radical_inverse(s + 1, nth_prime(static_cast<int>(j))) +
                                           shift[j], 1.0);
            origins[s][j] = lo + u * (hi - lo);
        }

    std::vector<int> budgets(starts, config.max_evaluations / starts);
    for (int s = 0; s < config.max_evaluations % starts; ++s) ++budgets[s];

    std::vector<SimplexSearch> searches;
    searches.reserve(starts);
    for (int s = 0; s < starts; ++s)
        searches.emplace_back(dataset, structure, config, start, rows, s, budgets[s]);
    parallel_for(starts, [&](std::size_t s) { searches[s].run(origins[s]); });

    TuneResult result;
    result.best_sse = std::numeric_limits<double>::infinity();
    result.best_start = -1;
    const TraceEntry* best = nullptr;
    for (auto& search : searches) {
        result.evaluations += search.evaluations;
        for (auto& entry : search.trace) result.trace.push_back(entry);
    }
    // Winner by (sse, start, iteration) so ties resolve deterministically.
    for (const auto& entry : result.trace)
        if (entry.sse < result.best_sse) {
            result.best_sse = entry.sse;
            best = &entry;
        }
    if (best == nullptr)
        throw TuningFailed("every candidate time scale was rejected by the objective",
                           result.trace);
    result.best_start = best->start;
    result.structure = structure;
    result.structure.set_time_scales(best->time_scales);
    return result;
}

} // namespace vl
