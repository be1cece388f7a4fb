#ifndef VL_TESTS_SUPPORT_HPP
#define VL_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vl/model.hpp"
#include "vl/regressor.hpp"
#include "vl/rng.hpp"
#include "vl/simulate.hpp"

namespace vl::test {

inline ModelStructure siso(int memory, std::vector<LaguerreSeriesSpec> terms) {
    ModelStructure s;
    s.memory_length = memory;
    s.input_names = {"u"};
    s.degrees = {static_cast<int>(terms.size())};
    s.specs = {std::move(terms)};
    return s;
}

inline Dataset make_dataset(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& output) {
    Dataset d;
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) d.input_names.push_back("u" + std::to_string(i + 1));
    if (inputs.cols() == 1) d.input_names = {"u"};
    d.inputs = inputs;
    d.output = output;
    return d;
}

inline Eigen::MatrixXd random_inputs(Eigen::Index length, int count, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd u(length, count);
    for (Eigen::Index t = 0; t < length; ++t)
        for (int i = 0; i < count; ++i) u(t, i) = rng.uniform(-1.0, 1.0);
    return u;
}

/// y(t) = sum_j gain * exp(-pole j) u(t-j), j = 0..memory.
inline SyntheticPlant exponential_plant(int memory, double pole, double gain = 1.0) {
    SyntheticPlant plant;
    plant.memory = memory;
    PlantBranch b;
    b.kind = PlantBranch::Kind::Wiener;
    b.impulse_response.resize(memory + 1);
    for (int j = 0; j <= memory; ++j) b.impulse_response(j) = gain * std::exp(-pole * j);
    b.polynomial = {0.0, 1.0};
    plant.branches.push_back(b);
    return plant;
}

inline InputSignalSpec two_level(Eigen::Index length, int dwell = 5) {
    InputSignalSpec s;
    s.kind = InputSignalSpec::Kind::TwoLevel;
    s.length = length;
    s.dwell = dwell;
    return s;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

} // namespace vl::test

#endif // VL_TESTS_SUPPORT_HPP
