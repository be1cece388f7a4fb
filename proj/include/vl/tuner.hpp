#ifndef VL_TUNER_HPP
#define VL_TUNER_HPP

#include <cstdint>
#include <vector>

#include "vl/error.hpp"
#include "vl/model.hpp"
#include "vl/regressor.hpp"

namespace vl {

struct TuneConfig {
    double a_min = 0.005;
    double a_max = 100.0;
    int multistart_count = 8;
    int max_evaluations = 2000;
    /// Simplex stops when (worst - best) <= tolerance * |best|.
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
    /// Fraction of rows held out (contiguous tail) for the objective.
    double validation_split = 0.0;
    double ridge = 0.0;

    void validate() const;
};

struct TraceEntry {
    int start = 0;
    int iteration = 0;
    std::vector<double> time_scales;
    double sse = 0.0;
};

struct TuneResult {
    ModelStructure structure;
    double best_sse = 0.0;
    int best_start = 0;
    int evaluations = 0;
    std::vector<TraceEntry> trace;
};

class TuningFailed : public Error {
public:
    TuningFailed(const std::string& what, std::vector<TraceEntry> trace)
        : Error("TuningFailed", what), trace_(std::move(trace)) {}
    const std::vector<TraceEntry>& trace() const { return trace_; }

private:
    std::vector<TraceEntry> trace_;
};

/// SSE of the structure on rows start..start+rows-1. With validation_split
/// > 0 the model is fitted on the leading rows and scored on the held-out
/// tail. Any fitting error yields +infinity instead of propagating.
double objective(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                 Eigen::Index rows, double ridge = 0.0, double validation_split = 0.0);

/// Multistart Nelder-Mead over log(a_{n,i}), clamped to [a_min, a_max].
/// Starts are a seeded, rotated Halton design; the evaluation budget is
/// split evenly across starts and never exceeded.
TuneResult tune_time_scales(const Dataset& dataset, const ModelStructure& structure,
                            const TuneConfig& config, Eigen::Index start, Eigen::Index rows);

} // namespace vl

#endif // VL_TUNER_HPP
