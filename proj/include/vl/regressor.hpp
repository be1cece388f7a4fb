#ifndef VL_REGRESSOR_HPP
#define VL_REGRESSOR_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vl/error.hpp"
#include "vl/model.hpp"

namespace vl {

/// Uniformly sampled multi-input, single-output record. Column i of
/// `inputs` is input i; rows are samples.
struct Dataset {
    double sample_interval = 1.0;
    std::vector<std::string> input_names;
    std::string output_name = "y";
    Eigen::MatrixXd inputs;
    Eigen::VectorXd output;

    Eigen::Index length() const { return inputs.rows(); }
    int num_inputs() const { return static_cast<int>(inputs.cols()); }

    /// Throws DataError on ragged or non-finite data.
    void validate() const;
};

/// Rows d = 0..D-1 hold [u(k+d), u(k+d-1), ..., u(k+d-M)].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
build_lag_matrix(const Eigen::MatrixBase<Derived>& signal, Eigen::Index start, Eigen::Index rows,
                 int memory) {
    if (memory < 0) throw InvalidParameter("memory length must be >= 0");
    if (rows < 1) throw RangeError("row count must be >= 1, got " + std::to_string(rows));
    if (start < memory)
        throw RangeError("start index " + std::to_string(start) + " leaves fewer than " +
                         std::to_string(memory) + " samples of history (need start >= memory)");
    if (start + rows > signal.size())
        throw RangeError("rows end at index " + std::to_string(start + rows - 1) +
                         " but signal length is " + std::to_string(signal.size()));
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(rows, memory + 1);
    for (int lag = 0; lag <= memory; ++lag)
        out.col(lag) = signal.derived().segment(start - lag, rows);
    return out;
}

struct DesignMatrix {
    ModelStructure structure;
    Eigen::MatrixXd rows;
    /// Sample index of row 0; row d corresponds to sample first_row + d.
    Eigen::Index first_row = 0;
    std::vector<CoefficientIndex> column_index;
};

/// Number of rows available from `start` to the end of the record.
Eigen::Index feasible_rows(const Dataset& dataset, Eigen::Index start);

/// Generalized design matrix [U^[1], ..., U^[N]]: for each term n the lagged
/// active inputs are filtered through their own Laguerre bases, concatenated,
/// and raised to the reduced Kronecker power n row by row.
DesignMatrix assemble(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                      Eigen::Index rows);

/// Minimizes ||y - X theta||^2 + ridge ||theta||^2 by complete orthogonal
/// decomposition; minimum-norm when X is rank deficient.
FittedModel fit(const DesignMatrix& design, const Eigen::Ref<const Eigen::VectorXd>& y,
                double ridge = 0.0);

/// assemble + fit on output samples start..start+rows-1.
FittedModel fit(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                Eigen::Index rows, double ridge = 0.0);

Eigen::VectorXd predict(const FittedModel& model, const Dataset& dataset, Eigen::Index start,
                        Eigen::Index rows);

} // namespace vl

#endif // VL_REGRESSOR_HPP
