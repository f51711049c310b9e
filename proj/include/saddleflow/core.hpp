#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "saddleflow/error.hpp"

namespace saddleflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

/// Regression data (X, y) for the quadratic loss L(b) = |Xb - y|^2 / (2n).
///
/// Construction validates the data (finite entries, no all-zero column) and
/// caches the normalised Gram matrix H = X^T X / n and the moment vector
/// X^T y / n, which every solver in the library works from.
class Dataset {
public:
    Dataset(Matrix x, Vector y);

    /// Builds a design whose Gram matrix X^T X / n equals `gram` exactly up to
    /// rounding (X = sqrt(n) R with R^T R = gram), with y = X beta_star.
    static Dataset from_gram(const Matrix& gram, const Vector& beta_star);

    [[nodiscard]] const Matrix& x() const noexcept { return x_; }
    [[nodiscard]] const Vector& y() const noexcept { return y_; }
    [[nodiscard]] const Matrix& gram() const noexcept { return gram_; }
    [[nodiscard]] const Vector& moment() const noexcept { return moment_; }
    [[nodiscard]] Index n() const noexcept { return x_.rows(); }
    [[nodiscard]] Index d() const noexcept { return x_.cols(); }

    /// max(1, |X^T y / n|_inf): the scale every absolute gradient tolerance is
    /// multiplied by.
    [[nodiscard]] double grad_scale() const noexcept { return grad_scale_; }

private:
    Matrix x_;
    Vector y_;
    Matrix gram_;
    Vector moment_;
    double grad_scale_ = 1.0;
};

/// Sign constraints of the inner problem: coordinates in `plus` are >= 0,
/// coordinates in `minus` are <= 0, every other coordinate is pinned to 0.
class SignPattern {
public:
    SignPattern() = default;
    SignPattern(IndexSet plus, IndexSet minus);

    /// Pattern read off a dual vector: s_i >= 1 - tol goes to `plus`,
    /// s_i <= -1 + tol goes to `minus`.
    static SignPattern from_dual(const Vector& s, double tol);

    [[nodiscard]] const IndexSet& plus() const noexcept { return plus_; }
    [[nodiscard]] const IndexSet& minus() const noexcept { return minus_; }
    /// plus and minus merged, sorted.
    [[nodiscard]] IndexSet allowed() const;
    [[nodiscard]] bool empty() const noexcept { return plus_.empty() && minus_.empty(); }

private:
    IndexSet plus_;
    IndexSet minus_;
};

struct SolveReport {
    Vector beta;
    Vector grad;
    IndexSet active;
    int iterations = 0;
    double kkt_residual = 0.0;
};

[[nodiscard]] double loss(const Dataset& data, const Vector& beta);
[[nodiscard]] Vector grad_loss(const Dataset& data, const Vector& beta);

/// Default absolute KKT tolerance, before scaling by Dataset::grad_scale().
inline constexpr double kDefaultKktTol = 1e-10;

/// Minimises L over the sign-constrained face described by `pattern`.
///
/// Columns in the minus set are negated so the problem becomes a
/// non-negative least squares over the allowed coordinates, which is solved
/// with the Lawson-Hanson active-set method on the restricted Gram matrix.
/// `tol` is absolute and is scaled by data.grad_scale().
///
/// Throws RankDeficient when a restricted normal matrix has a pivot below
/// 1e-10 of its largest, and MaxIterations when the active-set loop cycles.
[[nodiscard]] SolveReport constrained_lsq(const Dataset& data, const SignPattern& pattern,
                                          double tol = kDefaultKktTol);

/// Solves H_SS b_S = (X^T y / n)_S on the support S and zeros the rest.
/// Throws RankDeficient under the same pivot rule as constrained_lsq.
[[nodiscard]] Vector support_least_squares(const Dataset& data, const IndexSet& support);

struct GeneralPositionWitness {
    int k = 0;
    IndexSet subset;
    std::vector<int> signs;
    Index column = -1;
    int column_sign = 1;
};

struct GeneralPositionResult {
    bool holds = true;
    std::optional<GeneralPositionWitness> witness;
};

/// Checks that no signed column lies in the affine span of k other signed
/// columns, for every k <= k_max. The cost is exponential in k_max; pass a
/// negative k_max to use min(n, d, 6).
[[nodiscard]] GeneralPositionResult general_position_check(const Dataset& data, int k_max = -1,
                                                           double tol = 1e-9);

/// True when |beta| (.) grad L(beta) vanishes and grad L is zero on supp(beta).
[[nodiscard]] bool critical_point_check(const Dataset& data, const Vector& beta, double tol);

/// Indices i with beta_i != 0.
[[nodiscard]] IndexSet support_of(const Vector& beta);

}  // namespace saddleflow
