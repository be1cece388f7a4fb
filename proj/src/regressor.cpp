#include "vl/regressor.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace vl {

void Dataset::validate() const {
    if (inputs.cols() < 1) throw DataError("dataset has no inputs");
    if (output.size() != inputs.rows())
        throw DataError("output length " + std::to_string(output.size()) +
                        " differs from input length " + std::to_string(inputs.rows()));
    if (!input_names.empty() && static_cast<Eigen::Index>(input_names.size()) != inputs.cols())
        throw DataError("dataset has " + std::to_string(inputs.cols()) + " inputs but " +
                        std::to_string(input_names.size()) + " names");
    if (!inputs.allFinite()) throw DataError("dataset inputs contain non-finite values");
    if (!output.allFinite()) throw DataError("dataset output contains non-finite values");
}

Eigen::Index feasible_rows(const Dataset& dataset, Eigen::Index start) {
    return std::max<Eigen::Index>(0, dataset.length() - start);
}

namespace {

void check_names(const Dataset& dataset, const ModelStructure& structure) {
    if (dataset.num_inputs() != structure.num_inputs())
        throw SchemaError("model expects " + std::to_string(structure.num_inputs()) +
                          " inputs, dataset has " + std::to_string(dataset.num_inputs()));
    if (!structure.input_names.empty() && !dataset.input_names.empty() &&
        structure.input_names != dataset.input_names)
        throw SchemaError("dataset input names do not match the model's inputs");
}

} // namespace

DesignMatrix assemble(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                      Eigen::Index rows) {
    structure.validate();
    check_names(dataset, structure);
    const int memory = structure.memory_length;

    std::vector<Eigen::MatrixXd> lags(structure.num_inputs());
    for (int i = 0; i < structure.num_inputs(); ++i)
        lags[i] = build_lag_matrix(dataset.inputs.col(i), start, rows, memory);

    DesignMatrix design;
    design.structure = structure;
    design.first_row = start;
    design.column_index = coefficient_index(structure);
    design.rows.resize(rows, static_cast<Eigen::Index>(design.column_index.size()));

    Eigen::Index col = 0;
    if (structure.constant_column) design.rows.col(col++).setOnes();

    for (int n = 1; n <= structure.max_degree(); ++n) {
        // U^n B^n with B^n block diagonal, computed block by block.
        Eigen::MatrixXd filtered(rows, structure.term_width(n));
        Eigen::Index offset = 0;
        for (int i : structure.active_inputs(n)) {
            const auto basis = build_basis_matrix<double>(structure.spec(n, i), memory);
            filtered.middleCols(offset, basis.samples.cols()).noalias() = lags[i] * basis.samples;
            offset += basis.samples.cols();
        }
        const auto idx = multiset_indices(static_cast<int>(filtered.cols()), n);
        for (Eigen::Index m = 0; m < idx.rows(); ++m, ++col) {
            auto column = design.rows.col(col);
            column = filtered.col(idx(m, 0));
            for (int c = 1; c < n; ++c) column.array() *= filtered.col(idx(m, c)).array();
        }
    }
    assert(col == design.rows.cols());
    return design;
}

FittedModel fit(const DesignMatrix& design, const Eigen::Ref<const Eigen::VectorXd>& y,
                double ridge) {
    const auto& x = design.rows;
    if (y.size() != x.rows())
        throw DataError("output slice has " + std::to_string(y.size()) + " samples for " +
                        std::to_string(x.rows()) + " design rows");
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidParameter("ridge must be >= 0");
    if (!x.allFinite()) throw DataError("design matrix contains non-finite values");
    if (!y.allFinite()) throw DataError("output contains non-finite values");

    const Eigen::Index p = x.cols();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    FittedModel model;
    if (ridge > 0.0) {
        // Ridge as an augmented least-squares system keeps the orthogonal solver.
        Eigen::MatrixXd augmented(x.rows() + p, p);
        augmented << x, Eigen::MatrixXd::Identity(p, p) * std::sqrt(ridge);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(x.rows() + p);
        rhs.head(x.rows()) = y;
        cod.compute(augmented);
        model.theta = cod.solve(rhs);
    } else {
        cod.compute(x);
        model.theta = cod.solve(y);
        model.fit_stats.underdetermined = x.rows() < p;
    }
    model.structure = design.structure;
    model.index = design.column_index;
    model.fit_stats.rank = cod.rank();
    model.fit_stats.sse = (y - x * model.theta).squaredNorm();
    model.fit_stats.num_rows = x.rows();
    if (cod.rank() == 0) {
        model.fit_stats.condition_estimate = 0.0;
    } else if (cod.rank() < p) {
        model.fit_stats.condition_estimate = std::numeric_limits<double>::infinity();
    } else {
        const Eigen::VectorXd diag = cod.matrixT().diagonal().head(p).cwiseAbs();
        model.fit_stats.condition_estimate = diag.maxCoeff() / diag.minCoeff();
    }
    return model;
}

FittedModel fit(const Dataset& dataset, const ModelStructure& structure, Eigen::Index start,
                Eigen::Index rows, double ridge) {
    dataset.validate();
    const auto design = assemble(dataset, structure, start, rows);
    return fit(design, dataset.output.segment(start, rows), ridge);
}

Eigen::VectorXd predict(const FittedModel& model, const Dataset& dataset, Eigen::Index start,
                        Eigen::Index rows) {
    const auto design = assemble(dataset, model.structure, start, rows);
    if (design.rows.cols() != model.theta.size())
        throw IntegrityError("model has " + std::to_string(model.theta.size()) +
                             " coefficients, structure implies " +
                             std::to_string(design.rows.cols()));
    return design.rows * model.theta;
}

} // namespace vl
