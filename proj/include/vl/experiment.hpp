#ifndef VL_EXPERIMENT_HPP
#define VL_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vl/model.hpp"
#include "vl/regressor.hpp"

namespace vl {

enum class ExperimentMode { Fixed, Variable };

std::string to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& text);

/// One (N, R, a) triple applied to every input and term.
struct UniformParameters {
    int degree = 1;
    int order = 2;
    double time_scale = 1.0;
};

struct ExperimentConfig {
    int trials = 200;
    int degree_min = 1, degree_max = 5;
    int order_min = 2, order_max = 4;
    double scale_min = 0.005, scale_max = 100.0;
    std::uint64_t seed = 0;
    int memory = 30;
    /// First row; defaults to `memory`.
    std::optional<Eigen::Index> start;
    /// Row count; defaults to every feasible row.
    std::optional<Eigen::Index> rows;
    double ridge = 0.0;
    double validation_split = 0.0;
    /// Fixed mode only: use these instead of sampling.
    std::optional<UniformParameters> forced;

    void validate() const;
};

struct TrialRecord {
    int trial = 0;
    ExperimentMode mode = ExperimentMode::Fixed;
    ModelStructure structure;
    double sse = 0.0;
    /// Draws discarded because they had more coefficients than rows.
    int resamples = 0;
};

/// Structure with the same (N, R, a) on every input and term.
ModelStructure uniform_structure(const std::vector<std::string>& input_names,
                                 const std::string& output_name, int memory,
                                 const UniformParameters& params);

/// Runs `config.trials` fits with structures sampled per `mode`. Fixed-mode
/// and variable-mode draws come from separate substreams of `config.seed`.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, ExperimentMode mode,
                                        const Dataset& dataset);

struct SweepEntry {
    /// R for every (n, i) pair, in the canonical time-scale order.
    std::vector<int> orders;
    double sse = 0.0;
};

/// Exhaustive sweep of every assignment of R values from `grid` to the
/// (n, i) pairs of `base`, keeping its time scales. Assignments with R above
/// the memory length or more coefficients than fit rows score +infinity.
/// Throws InvalidParameter when the sweep would exceed `max_candidates`.
std::vector<SweepEntry> sweep_orders(const Dataset& dataset, const ModelStructure& base,
                                     const std::vector<int>& grid, Eigen::Index start,
                                     Eigen::Index rows, double ridge = 0.0,
                                     double validation_split = 0.0,
                                     std::int64_t max_candidates = 100000);

struct Histogram {
    std::vector<double> edges;
    std::vector<int> counts;
};

struct ArmSummary {
    ExperimentMode mode = ExperimentMode::Fixed;
    int count = 0;
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// mean / smallest SSE over all arms.
    double normalized_mean = 0.0;
    Histogram histogram;
};

struct ExperimentSummary {
    double global_min = 0.0;
    double global_max = 0.0;
    std::vector<ArmSummary> arms;
};

/// Per-arm statistics over finite SSEs; histograms share `bins` equal-width
/// bins spanning the global SSE range.
ExperimentSummary summarize(const std::vector<TrialRecord>& table, int bins = 20);

} // namespace vl

#endif // VL_EXPERIMENT_HPP
