#ifndef VL_MODEL_HPP
#define VL_MODEL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vl/error.hpp"
#include "vl/laguerre.hpp"

namespace vl {

/// Multi-input, single-output Volterra-Laguerre structure.
///
/// Input i has nonlinear degree `degrees[i]` and, for every term
/// n = 1..degrees[i], its own Laguerre series `specs[i][n-1]`. Term n of the
/// model is built only from the inputs whose degree reaches n.
struct ModelStructure {
    int memory_length = 0;
    double sample_interval = 1.0;
    std::vector<std::string> input_names;
    std::string output_name = "y";
    std::vector<int> degrees;
    std::vector<std::vector<LaguerreSeriesSpec>> specs;
    bool constant_column = false;
    double ridge = 0.0;

    int num_inputs() const { return static_cast<int>(degrees.size()); }
    int max_degree() const;

    /// Series for term n (1-based) of input i (0-based).
    const LaguerreSeriesSpec& spec(int term, int input) const;
    LaguerreSeriesSpec& spec(int term, int input);

    /// Inputs contributing to term n, ascending.
    std::vector<int> active_inputs(int term) const;

    /// Length of the filtered vector that term n raises to its reduced power.
    int term_width(int term) const;

    /// Time scales in canonical order (input-major, then term) and back.
    std::vector<double> time_scales() const;
    void set_time_scales(const std::vector<double>& scales);

    /// Throws InvalidParameter describing the first violated invariant.
    void validate() const;

    friend bool operator==(const ModelStructure&, const ModelStructure&) = default;
};

/// Identity of one coefficient: term n and the sorted multiset of
/// (input, basis order) factors whose filtered signals it multiplies.
/// The optional constant column is term 0 with no factors.
struct CoefficientIndex {
    int term = 0;
    std::vector<std::pair<int, int>> factors;

    friend bool operator==(const CoefficientIndex&, const CoefficientIndex&) = default;
    friend auto operator<=>(const CoefficientIndex&, const CoefficientIndex&) = default;
};

struct FitStats {
    double sse = 0.0;
    std::int64_t num_rows = 0;
    double condition_estimate = 0.0;
    std::int64_t rank = 0;
    /// Fewer rows than coefficients without ridge regularization.
    bool underdetermined = false;

    friend bool operator==(const FitStats&, const FitStats&) = default;
};

struct FittedModel {
    ModelStructure structure;
    Eigen::VectorXd theta;
    std::vector<CoefficientIndex> index;
    FitStats fit_stats;
};

/// Column bookkeeping for the design matrix of `structure`, in column order.
std::vector<CoefficientIndex> coefficient_index(const ModelStructure& structure);

/// Number of design-matrix columns: sum over n of C(rho_n + n - 1, n).
std::int64_t coefficient_count(const ModelStructure& structure);

/// All index multisets j1 <= ... <= jn over 0..length-1, in lexicographic
/// order, one per row.
Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
multiset_indices(int length, int power);

/// Reduced Kronecker power: every degree-n monomial of v exactly once,
/// in lexicographic order of the index multiset.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
reduced_kronecker(const Eigen::MatrixBase<Derived>& v, int power) {
    using Scalar = typename Derived::Scalar;
    if (v.size() < 1) throw InvalidParameter("reduced_kronecker of an empty vector");
    if (power < 1) throw InvalidParameter("reduced_kronecker power must be >= 1");
    const auto idx = multiset_indices(static_cast<int>(v.size()), power);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(idx.rows());
    for (Eigen::Index row = 0; row < idx.rows(); ++row) {
        Scalar p = v(idx(row, 0));
        for (int c = 1; c < power; ++c) p *= v(idx(row, c));
        out(row) = p;
    }
    return out;
}

/// C(n, k) with overflow detection.
std::int64_t binomial(std::int64_t n, std::int64_t k);

/// Exact full Volterra parameter count ((M+1)^(N+1) - 1) / M.
std::int64_t volterra_param_count(int degree, int memory);

/// The M^N approximation to the full Volterra count.
std::int64_t volterra_param_count_approx(int degree, int memory);

/// R^N, the reduced-model count as usually tabulated. It over-counts the
/// distinct coefficients of a symmetric model; see vl_param_count_reduced.
std::int64_t vl_param_count_paper(int degree, int order);

/// Distinct reduced-Kronecker coefficients for one input with equal R:
/// sum_{n=1}^{N} C(R + n - 1, n).
std::int64_t vl_param_count_reduced(int degree, int order);

} // namespace vl

#endif // VL_MODEL_HPP
