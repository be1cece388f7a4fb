#ifndef VL_LAGUERRE_HPP
#define VL_LAGUERRE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "vl/error.hpp"

/**
 * Orthonormal Laguerre functions on [0, inf),
 *
 *     l_n(t) = sqrt(2a) * exp(-a t) * L_n(2 a t),
 *
 * where L_n is the degree-n Laguerre polynomial and `a` the time scale.
 * Time is measured in samples, so `a` is a rate per sample.
 *
 * The frequently reprinted closed form with an extra 2^(n-k) factor in each
 * term is not orthonormal (its l_1 has squared norm 5); the form above is.
 */
namespace vl {

/// One Laguerre series: `order_count` functions l_0..l_{R-1} at rate `time_scale`.
struct LaguerreSeriesSpec {
    int order_count = 1;
    double time_scale = 1.0;

    void validate() const {
        if (order_count < 1)
            throw InvalidParameter("Laguerre order_count must be >= 1, got " +
                                   std::to_string(order_count));
        if (!std::isfinite(time_scale) || time_scale <= 0.0)
            throw InvalidParameter("Laguerre time_scale must be finite and > 0, got " +
                                   std::to_string(time_scale));
    }

    friend bool operator==(const LaguerreSeriesSpec&, const LaguerreSeriesSpec&) = default;
};

template <typename Scalar>
inline void check_time_scale(Scalar a) {
    if (!(a > Scalar(0)) || !std::isfinite(static_cast<double>(a)))
        throw InvalidParameter("Laguerre time scale must be finite and > 0");
}

/// Degree-n Laguerre polynomial by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
template <typename Scalar>
Scalar laguerre_polynomial(int n, Scalar x) {
    if (n < 0) throw InvalidParameter("Laguerre degree must be nonnegative");
    Scalar prev(1);
    if (n == 0) return prev;
    Scalar cur = Scalar(1) - x;
    for (int k = 1; k < n; ++k) {
        const Scalar next = ((Scalar(2 * k + 1) - x) * cur - Scalar(k) * prev) / Scalar(k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// l_n(t) at rate a; zero for t < 0.
template <typename Scalar>
Scalar eval_laguerre(int n, Scalar t, std::type_identity_t<Scalar> a) {
    check_time_scale(a);
    if (n < 0) throw InvalidParameter("Laguerre order must be nonnegative");
    if (t < Scalar(0)) return Scalar(0);
    using std::exp;
    using std::sqrt;
    return sqrt(Scalar(2) * a) * exp(-a * t) * laguerre_polynomial(n, Scalar(2) * a * t);
}

/// l_0(t)..l_{R-1}(t) in one recurrence pass.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> eval_laguerre_all(int order_count, Scalar t, std::type_identity_t<Scalar> a) {
    check_time_scale(a);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out(order_count);
    if (t < Scalar(0)) {
        out.setZero();
        return out;
    }
    using std::exp;
    using std::sqrt;
    const Scalar x = Scalar(2) * a * t;
    const Scalar envelope = sqrt(Scalar(2) * a) * exp(-a * t);
    Scalar prev(0), cur(1);
    for (int k = 0; k < order_count; ++k) {
        out(k) = envelope * cur;
        const Scalar next = ((Scalar(2 * k + 1) - x) * cur - Scalar(k) * prev) / Scalar(k + 1);
        prev = cur;
        cur = next;
    }
    return out;
}

/// Basis sampled at t = 0..M: entry (t, r) = l_r(t).
template <typename Scalar = double>
struct BasisMatrix {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> samples;
    int memory_length = 0;
    LaguerreSeriesSpec spec;
};

template <typename Scalar = double>
BasisMatrix<Scalar> build_basis_matrix(const LaguerreSeriesSpec& spec, int memory_length) {
    spec.validate();
    if (memory_length < 0) throw InvalidParameter("memory length must be >= 0");
    BasisMatrix<Scalar> basis;
    basis.memory_length = memory_length;
    basis.spec = spec;
    basis.samples.resize(memory_length + 1, spec.order_count);
    const Scalar a(spec.time_scale);
    for (int t = 0; t <= memory_length; ++t)
        basis.samples.row(t) = eval_laguerre_all<Scalar>(spec.order_count, Scalar(t), a);
    return basis;
}

/// Trapezoid weights for `count` samples spaced `dt` apart.
inline Eigen::VectorXd trapezoid_weights(Eigen::Index count, double dt) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(count, dt);
    if (count > 0) {
        w(0) *= 0.5;
        w(count - 1) *= 0.5;
    }
    return w;
}

/// |integral_0^T l_m l_n dt - delta_mn| by the trapezoid rule with step dt.
inline double continuous_orthonormality_defect(int m, int n, double a, double dt, double horizon) {
    check_time_scale(a);
    if (!(dt > 0.0)) throw InvalidParameter("quadrature step must be > 0");
    const auto steps = static_cast<Eigen::Index>(std::llround(horizon / dt));
    const int orders = std::max(m, n) + 1;
    double sum = 0.0;
    for (Eigen::Index j = 0; j <= steps; ++j) {
        const auto l = eval_laguerre_all<double>(orders, static_cast<double>(j) * dt, a);
        const double w = (j == 0 || j == steps) ? 0.5 * dt : dt;
        sum += w * l(m) * l(n);
    }
    return std::abs(sum - (m == n ? 1.0 : 0.0));
}

struct ProjectionResult {
    Eigen::VectorXd coefficients;
    double residual_sse = 0.0;
    /// Squared norm of the signal in the same (possibly weighted) inner product.
    double signal_energy = 0.0;
    bool rank_deficient = false;
};

namespace detail {
inline ProjectionResult weighted_projection(const Eigen::MatrixXd& basis,
                                            const Eigen::VectorXd& signal,
                                            const Eigen::VectorXd& weights) {
    const Eigen::VectorXd root_w = weights.cwiseSqrt();
    const Eigen::MatrixXd a = root_w.asDiagonal() * basis;
    const Eigen::VectorXd b = root_w.cwiseProduct(signal);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    ProjectionResult out;
    out.coefficients = cod.solve(b);
    out.rank_deficient = cod.rank() < a.cols();
    out.residual_sse = (b - a * out.coefficients).squaredNorm();
    out.signal_energy = b.squaredNorm();
    return out;
}
} // namespace detail

/// Least-squares coefficients of `signal` (sampled at t = 0..M) on the basis.
/// Rank-deficient samples fall back to the minimum-norm solution and set
/// `rank_deficient`.
inline ProjectionResult project_onto_basis(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                           const LaguerreSeriesSpec& spec) {
    spec.validate();
    if (signal.size() < 1) throw InvalidParameter("cannot project an empty signal");
    if (signal.size() < spec.order_count)
        throw InvalidParameter("projection needs at least order_count samples");
    const auto basis = build_basis_matrix<double>(spec, static_cast<int>(signal.size()) - 1);
    return detail::weighted_projection(basis.samples, signal,
                                       Eigen::VectorXd::Ones(signal.size()));
}

/// Projection in the trapezoid-weighted L2 inner product on a fine grid
/// t_j = j*dt. Approximates the continuous expansion, so `signal_energy`
/// approximates the integral of f^2.
inline ProjectionResult project_onto_basis_continuous(
        const Eigen::Ref<const Eigen::VectorXd>& samples, double dt,
        const LaguerreSeriesSpec& spec) {
    spec.validate();
    if (!(dt > 0.0)) throw InvalidParameter("grid step must be > 0");
    if (samples.size() < spec.order_count)
        throw InvalidParameter("projection needs at least order_count samples");
    Eigen::MatrixXd basis(samples.size(), spec.order_count);
    for (Eigen::Index j = 0; j < samples.size(); ++j)
        basis.row(j) = eval_laguerre_all<double>(spec.order_count, static_cast<double>(j) * dt,
                                                 spec.time_scale);
    return detail::weighted_projection(basis, samples, trapezoid_weights(samples.size(), dt));
}

} // namespace vl

#endif // VL_LAGUERRE_HPP
