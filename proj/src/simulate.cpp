#include "vl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vl/rng.hpp"

namespace vl {

namespace {

Eigen::Index flat_size(int memory, int degree) {
    Eigen::Index size = 1;
    for (int n = 0; n < degree; ++n) size *= memory + 1;
    return size;
}

/// Lags of a flat kernel position, first index slowest.
void unflatten(Eigen::Index position, int memory, std::vector<int>& lags) {
    for (auto it = lags.rbegin(); it != lags.rend(); ++it) {
        *it = static_cast<int>(position % (memory + 1));
        position /= memory + 1;
    }
}

Eigen::Index flatten(const std::vector<int>& lags, int memory) {
    Eigen::Index position = 0;
    for (int lag : lags) position = position * (memory + 1) + lag;
    return position;
}

} // namespace

void SyntheticPlant::validate(int num_inputs) const {
    if (memory < 0) throw InvalidParameter("plant memory must be >= 0");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw InvalidParameter("plant noise_std must be finite and >= 0");
    if (branches.empty()) throw InvalidParameter("plant has no branches");
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& branch = branches[b];
        const std::string where = "plant branch " + std::to_string(b);
        if (branch.input < 0 || (num_inputs >= 0 && branch.input >= num_inputs))
            throw InvalidParameter(where + " refers to missing input " +
                                   std::to_string(branch.input));
        if (branch.kind == PlantBranch::Kind::Wiener) {
            if (branch.impulse_response.size() != memory + 1)
                throw InvalidParameter(where + ": impulse response needs memory + 1 taps");
            if (branch.polynomial.empty()) throw InvalidParameter(where + ": empty polynomial");
            continue;
        }
        std::vector<int> lags;
        for (std::size_t n = 1; n <= branch.kernels.size(); ++n) {
            const auto& h = branch.kernels[n - 1];
            if (h.size() != flat_size(memory, static_cast<int>(n)))
                throw InvalidParameter(where + ": kernel " + std::to_string(n) +
                                       " needs (memory + 1)^" + std::to_string(n) + " entries");
            lags.assign(n, 0);
            for (Eigen::Index p = 0; p < h.size(); ++p) {
                unflatten(p, memory, lags);
                auto sorted = lags;
                std::sort(sorted.begin(), sorted.end());
                if (h(p) != h(flatten(sorted, memory)))
                    throw InvalidParameter(where + ": kernel " + std::to_string(n) +
                                           " is not symmetric");
            }
        }
    }
}

SimulationResult simulate_plant(const SyntheticPlant& plant, const Eigen::MatrixXd& inputs,
                                std::uint64_t seed) {
    plant.validate(static_cast<int>(inputs.cols()));
    const Eigen::Index length = inputs.rows();
    if (length < plant.memory + 1)
        throw RangeError("plant with memory " + std::to_string(plant.memory) + " needs at least " +
                         std::to_string(plant.memory + 1) + " samples, got " +
                         std::to_string(length));
    const int memory = plant.memory;
    const auto lagged = [&](int input, Eigen::Index t, int lag) {
        return t - lag >= 0 ? inputs(t - lag, input) : 0.0;
    };

    SimulationResult result;
    result.warmup = memory;
    result.output = Eigen::VectorXd::Zero(length);
    for (const auto& branch : plant.branches) {
        if (branch.kind == PlantBranch::Kind::Wiener) {
            for (Eigen::Index t = 0; t < length; ++t) {
                double x = 0.0;
                for (int j = 0; j <= memory; ++j)
                    x += branch.impulse_response(j) * lagged(branch.input, t, j);
                double y = 0.0, power = 1.0;
                for (double c : branch.polynomial) {
                    y += c * power;
                    power *= x;
                }
                result.output(t) += y;
            }
            continue;
        }
        std::vector<int> lags;
        for (std::size_t n = 1; n <= branch.kernels.size(); ++n) {
            const auto& h = branch.kernels[n - 1];
            lags.assign(n, 0);
            for (Eigen::Index t = 0; t < length; ++t) {
                double sum = 0.0;
                for (Eigen::Index p = 0; p < h.size(); ++p) {
                    if (h(p) == 0.0) continue;
                    unflatten(p, memory, lags);
                    double term = h(p);
                    for (int lag : lags) term *= lagged(branch.input, t, lag);
                    sum += term;
                }
                result.output(t) += sum;
            }
        }
    }
    if (plant.noise_std > 0.0) {
        Rng rng(seed);
        for (Eigen::Index t = 0; t < length; ++t) result.output(t) += plant.noise_std * rng.normal();
    }
    return result;
}

Eigen::VectorXd generate_input(const InputSignalSpec& spec, std::uint64_t seed) {
    if (spec.length < 0) throw InvalidParameter("signal length must be >= 0");
    Rng rng(seed);
    Eigen::VectorXd out(spec.length);
    switch (spec.kind) {
    case InputSignalSpec::Kind::TwoLevel: {
        if (spec.dwell < 1) throw InvalidParameter("two-level dwell must be >= 1");
        double level = spec.low;
        for (Eigen::Index t = 0; t < spec.length; ++t) {
            // A trailing partial block keeps the previous level so every run
            // lasts at least `dwell` samples.
            const bool block_start = t % spec.dwell == 0;
            const bool full_block = t + spec.dwell <= spec.length;
            if (block_start && (full_block || t == 0))
                level = rng.uniform() < 0.5 ? spec.low : spec.high;
            out(t) = level;
        }
        break;
    }
    case InputSignalSpec::Kind::FilteredNoise: {
        if (!(std::abs(spec.pole) < 1.0)) throw InvalidParameter("filter pole must lie in (-1, 1)");
        double state = 0.0;
        for (Eigen::Index t = 0; t < spec.length; ++t) {
            state = spec.pole * state + spec.gain * (1.0 - spec.pole) * rng.normal();
            out(t) = state;
        }
        break;
    }
    case InputSignalSpec::Kind::Multisine: {
        if (spec.tones < 1) throw InvalidParameter("multisine needs at least one tone");
        out.setZero();
        const double scale = spec.amplitude / std::sqrt(static_cast<double>(spec.tones));
        for (int k = 0; k < spec.tones; ++k) {
            const double f = spec.tones == 1
                                 ? spec.band_low
                                 : spec.band_low + (spec.band_high - spec.band_low) * k /
                                                       (spec.tones - 1);
            const double phase = 2.0 * std::numbers::pi * rng.uniform();
            for (Eigen::Index t = 0; t < spec.length; ++t)
                out(t) += scale * std::sin(2.0 * std::numbers::pi * f * t + phase);
        }
        break;
    }
    }
    return out;
}

Eigen::MatrixXd generate_inputs(const std::vector<InputSignalSpec>& specs, std::uint64_t seed) {
    if (specs.empty()) return {};
    const Eigen::Index length = specs.front().length;
    Eigen::MatrixXd out(length, static_cast<Eigen::Index>(specs.size()));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].length != length)
            throw InvalidParameter("all generated inputs must share one length");
        out.col(i) = generate_input(specs[i], Rng::substream(seed, i).next_u64());
    }
    return out;
}

Metrics score(const Eigen::Ref<const Eigen::VectorXd>& observed,
              const Eigen::Ref<const Eigen::VectorXd>& predicted) {
    if (observed.size() != predicted.size())
        throw DataError("observed and predicted lengths differ");
    Metrics m;
    m.rows = observed.size();
    m.sse = (observed - predicted).squaredNorm();
    m.mse = m.rows > 0 ? m.sse / static_cast<double>(m.rows) : 0.0;
    const double energy = observed.squaredNorm();
    m.normalized_defined = energy > 0.0;
    m.normalized_sse = m.normalized_defined ? m.sse / energy : 0.0;
    return m;
}

Metrics evaluate(const FittedModel& model, const Dataset& dataset, Eigen::Index start,
                 Eigen::Index rows) {
    const Eigen::VectorXd predicted = predict(model, dataset, start, rows);
    return score(dataset.output.segment(start, rows), predicted);
}

Eigen::VectorXd difference_transform(const Eigen::Ref<const Eigen::VectorXd>& signal) {
    if (signal.size() < 2)
        throw RangeError("differencing needs at least 2 samples, got " +
                         std::to_string(signal.size()));
    return signal.tail(signal.size() - 1) - signal.head(signal.size() - 1);
}

Eigen::VectorXd inverse_cumulate(double initial, const Eigen::Ref<const Eigen::VectorXd>& diff) {
    Eigen::VectorXd out(diff.size() + 1);
    out(0) = initial;
    for (Eigen::Index t = 0; t < diff.size(); ++t) out(t + 1) = out(t) + diff(t);
    return out;
}

} // namespace vl
