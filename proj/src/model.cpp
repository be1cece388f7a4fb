#include "vl/model.hpp"

#include <algorithm>
#include <string>

namespace vl {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw OverflowError(std::string(what) + " overflows 64-bit integers");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw OverflowError(std::string(what) + " overflows 64-bit integers");
    return out;
}

std::int64_t checked_pow(std::int64_t base, int exponent, const char* what) {
    std::int64_t out = 1;
    for (int e = 0; e < exponent; ++e) out = checked_mul(out, base, what);
    return out;
}

std::string pair_name(int term, int input) {
    return "(term " + std::to_string(term) + ", input " + std::to_string(input) + ")";
}

} // namespace

int ModelStructure::max_degree() const {
    return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

const LaguerreSeriesSpec& ModelStructure::spec(int term, int input) const {
    if (input < 0 || input >= num_inputs() || term < 1 || term > degrees[input])
        throw InvalidParameter("no Laguerre series for " + pair_name(term, input));
    return specs[input][term - 1];
}

LaguerreSeriesSpec& ModelStructure::spec(int term, int input) {
    return const_cast<LaguerreSeriesSpec&>(std::as_const(*this).spec(term, input));
}

std::vector<int> ModelStructure::active_inputs(int term) const {
    std::vector<int> out;
    for (int i = 0; i < num_inputs(); ++i)
        if (degrees[i] >= term) out.push_back(i);
    return out;
}

int ModelStructure::term_width(int term) const {
    int width = 0;
    for (int i : active_inputs(term)) width += spec(term, i).order_count;
    return width;
}

std::vector<double> ModelStructure::time_scales() const {
    std::vector<double> out;
    for (int i = 0; i < num_inputs(); ++i)
        for (int n = 1; n <= degrees[i]; ++n) out.push_back(spec(n, i).time_scale);
    return out;
}

void ModelStructure::set_time_scales(const std::vector<double>& scales) {
    std::size_t k = 0;
    for (int i = 0; i < num_inputs(); ++i)
        for (int n = 1; n <= degrees[i]; ++n) {
            if (k >= scales.size()) throw InvalidParameter("too few time scales");
            spec(n, i).time_scale = scales[k++];
        }
    if (k != scales.size()) throw InvalidParameter("too many time scales");
}

void ModelStructure::validate() const {
    if (num_inputs() < 1) throw InvalidParameter("structure needs at least one input");
    if (memory_length < 0) throw InvalidParameter("memory length must be >= 0");
    if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
        throw InvalidParameter("sample interval must be finite and > 0");
    if (!(ridge >= 0.0) || !std::isfinite(ridge))
        throw InvalidParameter("ridge must be finite and >= 0");
    if (static_cast<int>(specs.size()) != num_inputs())
        throw InvalidParameter("specs must have one entry per input");
    if (!input_names.empty() && static_cast<int>(input_names.size()) != num_inputs())
        throw InvalidParameter("input_names must have one entry per input");
    for (int i = 0; i < num_inputs(); ++i) {
        if (degrees[i] < 1)
            throw InvalidParameter("input " + std::to_string(i) + " has degree < 1");
        if (static_cast<int>(specs[i].size()) != degrees[i])
            throw InvalidParameter("input " + std::to_string(i) + " must have exactly " +
                                   std::to_string(degrees[i]) + " Laguerre series");
        for (int n = 1; n <= degrees[i]; ++n) {
            const auto& s = specs[i][n - 1];
            s.validate();
            if (s.order_count > memory_length)
                throw InvalidParameter("series " + pair_name(n, i) + " has R = " +
                                       std::to_string(s.order_count) +
                                       " > memory length " + std::to_string(memory_length));
        }
    }
}

Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
multiset_indices(int length, int power) {
    if (length < 1) throw InvalidParameter("multiset base length must be >= 1");
    if (power < 1) throw InvalidParameter("multiset size must be >= 1");
    const auto count = binomial(length + power - 1, power);
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(count, power);
    std::vector<int> cur(power, 0);
    for (Eigen::Index row = 0; row < count; ++row) {
        for (int c = 0; c < power; ++c) out(row, c) = cur[c];
        // Advance to the next nondecreasing tuple.
        int pos = power - 1;
        while (pos >= 0 && cur[pos] == length - 1) --pos;
        if (pos < 0) break;
        const int v = cur[pos] + 1;
        for (int c = pos; c < power; ++c) cur[c] = v;
    }
    return out;
}

std::vector<CoefficientIndex> coefficient_index(const ModelStructure& structure) {
    structure.validate();
    std::vector<CoefficientIndex> out;
    if (structure.constant_column) out.push_back({0, {}});
    for (int n = 1; n <= structure.max_degree(); ++n) {
        std::vector<std::pair<int, int>> positions;
        for (int i : structure.active_inputs(n))
            for (int r = 0; r < structure.spec(n, i).order_count; ++r) positions.emplace_back(i, r);
        const auto idx = multiset_indices(static_cast<int>(positions.size()), n);
        for (Eigen::Index row = 0; row < idx.rows(); ++row) {
            CoefficientIndex entry{n, {}};
            for (int c = 0; c < n; ++c) entry.factors.push_back(positions[idx(row, c)]);
            out.push_back(std::move(entry));
        }
    }
    return out;
}

std::int64_t coefficient_count(const ModelStructure& structure) {
    structure.validate();
    std::int64_t total = structure.constant_column ? 1 : 0;
    for (int n = 1; n <= structure.max_degree(); ++n)
        total = checked_add(total, binomial(structure.term_width(n) + n - 1, n),
                            "coefficient count");
    return total;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t out = 1;
    for (std::int64_t j = 1; j <= k; ++j) {
        // out * (n - k + j) is divisible by j after the multiply.
        out = checked_mul(out, n - k + j, "binomial coefficient") / j;
    }
    return out;
}

std::int64_t volterra_param_count(int degree, int memory) {
    if (degree < 0) throw InvalidParameter("degree must be >= 0");
    if (memory < 1) throw InvalidParameter("memory must be >= 1");
    const auto power = checked_pow(memory + 1, degree + 1, "Volterra parameter count");
    return (power - 1) / memory;
}

std::int64_t volterra_param_count_approx(int degree, int memory) {
    if (degree < 0) throw InvalidParameter("degree must be >= 0");
    if (memory < 1) throw InvalidParameter("memory must be >= 1");
    return checked_pow(memory, degree, "Volterra parameter count");
}

std::int64_t vl_param_count_paper(int degree, int order) {
    if (degree < 1) throw InvalidParameter("degree must be >= 1");
    if (order < 1) throw InvalidParameter("order must be >= 1");
    return checked_pow(order, degree, "Volterra-Laguerre parameter count");
}

std::int64_t vl_param_count_reduced(int degree, int order) {
    if (degree < 1) throw InvalidParameter("degree must be >= 1");
    if (order < 1) throw InvalidParameter("order must be >= 1");
    std::int64_t total = 0;
    for (int n = 1; n <= degree; ++n)
        total = checked_add(total, binomial(order + n - 1, n), "Volterra-Laguerre parameter count");
    return total;
}

} // namespace vl
