#ifndef VL_SIMULATE_HPP
#define VL_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vl/model.hpp"
#include "vl/regressor.hpp"

namespace vl {

/// One additive path from a single input to the plant output.
struct PlantBranch {
    enum class Kind { FiniteVolterra, Wiener };

    Kind kind = Kind::Wiener;
    int input = 0;
    /// FiniteVolterra: kernels[n-1] holds h_n flattened row-major over
    /// (M+1)^n lags, first index slowest. Kernels must be symmetric.
    std::vector<Eigen::VectorXd> kernels;
    /// Wiener: linear filter followed by sum_k polynomial[k] * x^k.
    Eigen::VectorXd impulse_response;
    std::vector<double> polynomial;
};

struct SyntheticPlant {
    int memory = 0;
    double noise_std = 0.0;
    std::vector<PlantBranch> branches;

    void validate(int num_inputs = -1) const;
};

struct SimulationResult {
    Eigen::VectorXd output;
    /// Samples 0..warmup-1 lack full lag history (pre-record inputs read as 0).
    Eigen::Index warmup = 0;
};

/// Forward evaluation of the plant on `inputs` (one column per input), plus
/// zero-mean Gaussian noise of std `noise_std` drawn from Rng(seed).
SimulationResult simulate_plant(const SyntheticPlant& plant, const Eigen::MatrixXd& inputs,
                                std::uint64_t seed);

struct InputSignalSpec {
    enum class Kind { TwoLevel, FilteredNoise, Multisine };

    Kind kind = Kind::TwoLevel;
    Eigen::Index length = 0;
    // two-level
    double low = -1.0;
    double high = 1.0;
    int dwell = 5;
    // filtered noise: x[t] = pole x[t-1] + gain (1 - pole) w[t]
    double gain = 1.0;
    double pole = 0.9;
    // multisine: tones spread evenly over [band_low, band_high] cycles/sample
    int tones = 5;
    double band_low = 0.01;
    double band_high = 0.2;
    double amplitude = 1.0;
};

Eigen::VectorXd generate_input(const InputSignalSpec& spec, std::uint64_t seed);

/// One column per spec; column i uses substream i of `seed`.
Eigen::MatrixXd generate_inputs(const std::vector<InputSignalSpec>& specs, std::uint64_t seed);

struct Metrics {
    double sse = 0.0;
    double mse = 0.0;
    /// SSE / sum(y^2); meaningless when `normalized_defined` is false.
    double normalized_sse = 0.0;
    bool normalized_defined = false;
    Eigen::Index rows = 0;
};

Metrics evaluate(const FittedModel& model, const Dataset& dataset, Eigen::Index start,
                 Eigen::Index rows);

/// Metrics of a prediction against observations.
Metrics score(const Eigen::Ref<const Eigen::VectorXd>& observed,
              const Eigen::Ref<const Eigen::VectorXd>& predicted);

/// d(t) = y(t+1) - y(t); one sample shorter than the input.
Eigen::VectorXd difference_transform(const Eigen::Ref<const Eigen::VectorXd>& signal);

/// Inverse of difference_transform given the first sample.
Eigen::VectorXd inverse_cumulate(double initial, const Eigen::Ref<const Eigen::VectorXd>& diff);

} // namespace vl

#endif // VL_SIMULATE_HPP
