#pragma once

#include <vector>

#include "saddleflow/core.hpp"

namespace saddleflow {

/// Piecewise-linear Lasso regularisation path, knots ordered from
/// lambda_max = |grad L(0)|_inf down to the requested lambda_min.
struct LassoPath {
    std::vector<double> lambdas;
    std::vector<Vector> vertices;
    std::vector<double> kkt_residuals;

    /// Vertex at the smallest lambda reached.
    [[nodiscard]] const Vector& endpoint() const { return vertices.back(); }
    /// Linear interpolation between the bracketing knots.
    [[nodiscard]] Vector at(double lambda) const;
};

/// Exact homotopy (LARS with drop steps) for min L(b) + lambda |b|_1.
///
/// Each knot's KKT residual is checked against 1e-10 * grad_scale; a failure,
/// or a singular equicorrelation block, raises Degenerate.
[[nodiscard]] LassoPath lasso_homotopy(const Dataset& data, double lambda_min = 0.0);

/// Orthogonal matching pursuit: k greedy selections of the column with the
/// largest normalised correlation to the residual, each followed by a least
/// squares refit on the selected support.
[[nodiscard]] Vector omp(const Dataset& data, int k);

}  // namespace saddleflow
