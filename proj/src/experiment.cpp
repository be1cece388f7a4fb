#include "vl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "vl/parallel.hpp"
#include "vl/rng.hpp"
#include "vl/tuner.hpp"

namespace vl {

std::string to_string(ExperimentMode mode) {
    return mode == ExperimentMode::Fixed ? "fixed" : "variable";
}

ExperimentMode parse_mode(const std::string& text) {
    if (text == "fixed") return ExperimentMode::Fixed;
    if (text == "variable") return ExperimentMode::Variable;
    throw ConfigError("experiment mode must be 'fixed' or 'variable', got '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (degree_min < 1 || degree_max < degree_min)
        throw ConfigError("degree domain must be a nonempty range of integers >= 1");
    if (order_min < 1 || order_max < order_min)
        throw ConfigError("order domain must be a nonempty range of integers >= 1");
    if (!(scale_min > 0.0) || !(scale_max >= scale_min) || !std::isfinite(scale_max))
        throw ConfigError("time-scale domain must be a nonempty positive range");
    if (memory < order_max)
        throw ConfigError("memory must be at least the largest Laguerre order");
    if (!(ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
    if (!(validation_split >= 0.0 && validation_split < 1.0))
        throw ConfigError("validation_split must lie in [0, 1)");
    if (forced) {
        if (forced->degree < 1 || forced->order < 1 || !(forced->time_scale > 0.0))
            throw ConfigError("forced parameters must be positive");
    }
}

ModelStructure uniform_structure(const std::vector<std::string>& input_names,
                                 const std::string& output_name, int memory,
                                 const UniformParameters& params) {
    ModelStructure s;
    s.memory_length = memory;
    s.input_names = input_names;
    s.output_name = output_name;
    s.degrees.assign(input_names.size(), params.degree);
    s.specs.assign(input_names.size(),
                   std::vector<LaguerreSeriesSpec>(params.degree,
                                                   {params.order, params.time_scale}));
    return s;
}

namespace {

constexpr std::uint64_t fixed_stream = 0xF1CED;
constexpr std::uint64_t variable_stream = 0x7A21AB1E;

ModelStructure draw_structure(const ExperimentConfig& config, ExperimentMode mode,
                              const Dataset& dataset, Rng& rng) {
    if (mode == ExperimentMode::Fixed) {
        UniformParameters p;
        if (config.forced) {
            p = *config.forced;
        } else {
            p.degree = static_cast<int>(rng.uniform_int(config.degree_min, config.degree_max));
            p.order = static_cast<int>(rng.uniform_int(config.order_min, config.order_max));
            p.time_scale = rng.uniform(config.scale_min, config.scale_max);
        }
        return uniform_structure(dataset.input_names, dataset.output_name, config.memory, p);
    }
    ModelStructure s;
    s.memory_length = config.memory;
    s.input_names = dataset.input_names;
    s.output_name = dataset.output_name;
    for (int i = 0; i < dataset.num_inputs(); ++i) {
        const int degree = static_cast<int>(rng.uniform_int(config.degree_min, config.degree_max));
        s.degrees.push_back(degree);
        std::vector<LaguerreSeriesSpec> specs;
        for (int n = 1; n <= degree; ++n) {
            LaguerreSeriesSpec spec;
            spec.order_count = static_cast<int>(rng.uniform_int(config.order_min, config.order_max));
            spec.time_scale = rng.uniform(config.scale_min, config.scale_max);
            specs.push_back(spec);
        }
        s.specs.push_back(std::move(specs));
    }
    return s;
}

} // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, ExperimentMode mode,
                                        const Dataset& dataset) {
    config.validate();
    dataset.validate();
    const Eigen::Index start = config.start.value_or(config.memory);
    const Eigen::Index rows = config.rows.value_or(feasible_rows(dataset, start));
    if (start < config.memory || rows < 1 || start + rows > dataset.length())
        throw ConfigError("experiment rows " + std::to_string(start) + ".." +
                          std::to_string(start + rows - 1) + " do not fit the dataset of length " +
                          std::to_string(dataset.length()) + " with memory " +
                          std::to_string(config.memory));
    const auto held_out = static_cast<Eigen::Index>(std::floor(rows * config.validation_split));
    const Eigen::Index fit_rows = rows - held_out;

    // Draws are sequential so the table depends only on the seed; fits run
    // in parallel afterwards.
    Rng rng = Rng::substream(config.seed,
                             mode == ExperimentMode::Fixed ? fixed_stream : variable_stream);
    std::vector<TrialRecord> table(config.trials);
    constexpr int max_resamples = 10000;
    for (int t = 0; t < config.trials; ++t) {
        auto& record = table[t];
        record.trial = t;
        record.mode = mode;
        while (true) {
            record.structure = draw_structure(config, mode, dataset, rng);
            record.structure.ridge = config.ridge;
            if (coefficient_count(record.structure) <= fit_rows) break;
            if (config.forced && mode == ExperimentMode::Fixed)
                throw ConfigError("forced parameters need more coefficients than rows");
            if (++record.resamples > max_resamples)
                throw ConfigError("could not draw a structure with at most " +
                                  std::to_string(fit_rows) + " coefficients");
        }
    }
    parallel_for(table.size(), [&](std::size_t t) {
        table[t].sse = objective(dataset, table[t].structure, start, rows, config.ridge,
                                 config.validation_split);
    });
    return table;
}

std::vector<SweepEntry> sweep_orders(const Dataset& dataset, const ModelStructure& base,
                                     const std::vector<int>& grid, Eigen::Index start,
                                     Eigen::Index rows, double ridge, double validation_split,
                                     std::int64_t max_candidates) {
    base.validate();
    if (grid.empty()) throw InvalidParameter("order grid is empty");
    for (int r : grid)
        if (r < 1) throw InvalidParameter("order grid values must be >= 1");

    std::vector<std::pair<int, int>> pairs;  // (input, term), canonical order
    for (int i = 0; i < base.num_inputs(); ++i)
        for (int n = 1; n <= base.degrees[i]; ++n) pairs.emplace_back(i, n);
    std::int64_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (__builtin_mul_overflow(total, static_cast<std::int64_t>(grid.size()), &total) ||
            total > max_candidates)
            throw InvalidParameter("order sweep exceeds " + std::to_string(max_candidates) +
                                   " candidates");

    const auto held_out = static_cast<Eigen::Index>(std::floor(rows * validation_split));
    std::vector<SweepEntry> out(static_cast<std::size_t>(total));
    for (std::int64_t c = 0; c < total; ++c) {
        auto& entry = out[c];
        entry.orders.resize(pairs.size());
        std::int64_t rest = c;
        // Last pair varies fastest.
        for (std::size_t k = pairs.size(); k-- > 0;) {
            entry.orders[k] = grid[rest % grid.size()];
            rest /= static_cast<std::int64_t>(grid.size());
        }
    }
    parallel_for(out.size(), [&](std::size_t c) {
        auto candidate = base;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            candidate.spec(pairs[k].second, pairs[k].first).order_count = out[c].orders[k];
        bool feasible = true;
        for (int r : out[c].orders) feasible = feasible && r <= candidate.memory_length;
        feasible = feasible && coefficient_count(candidate) <= rows - held_out;
        out[c].sse = feasible ? objective(dataset, candidate, start, rows, ridge, validation_split)
                              : std::numeric_limits<double>::infinity();
    });
    return out;
}

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

ExperimentSummary summarize(const std::vector<TrialRecord>& table, int bins) {
    if (table.empty()) throw InvalidParameter("cannot summarize an empty trial table");
    if (bins < 1) throw InvalidParameter("histogram needs at least one bin");

    std::map<ExperimentMode, std::vector<double>> by_mode;
    for (const auto& record : table)
        if (std::isfinite(record.sse)) by_mode[record.mode].push_back(record.sse);
    if (by_mode.empty()) throw InvalidParameter("no trial produced a finite SSE");

    ExperimentSummary summary;
    summary.global_min = std::numeric_limits<double>::infinity();
    summary.global_max = -std::numeric_limits<double>::infinity();
    for (const auto& [mode, values] : by_mode) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        summary.global_min = std::min(summary.global_min, *lo);
        summary.global_max = std::max(summary.global_max, *hi);
    }

    std::vector<double> edges(bins + 1);
    for (int b = 0; b <= bins; ++b)
        edges[b] = summary.global_min + (summary.global_max - summary.global_min) * b / bins;

    for (const auto& [mode, values] : by_mode) {
        ArmSummary arm;
        arm.mode = mode;
        arm.count = static_cast<int>(values.size());
        arm.mean = std::accumulate(values.begin(), values.end(), 0.0) / arm.count;
        arm.median = median_of(values);
        double ss = 0.0;
        for (double v : values) ss += (v - arm.mean) * (v - arm.mean);
        arm.std_dev = arm.count > 1 ? std::sqrt(ss / (arm.count - 1)) : 0.0;
        arm.min = *std::min_element(values.begin(), values.end());
        arm.max = *std::max_element(values.begin(), values.end());
        arm.normalized_mean = summary.global_min > 0.0 ? arm.mean / summary.global_min
                                                       : std::numeric_limits<double>::infinity();
        arm.histogram.edges = edges;
        arm.histogram.counts.assign(bins, 0);
        const double width = summary.global_max - summary.global_min;
        for (double v : values) {
            int b = width > 0.0 ? static_cast<int>((v - summary.global_min) / width * bins) : 0;
            arm.histogram.counts[std::clamp(b, 0, bins - 1)]++;
        }
        summary.arms.push_back(std::move(arm));
    }
    return summary;
}

} // namespace vl
