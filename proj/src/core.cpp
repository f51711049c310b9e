#include "saddleflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace saddleflow {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
    if (!ok) throw Error(code, msg);
}

// Pivoted LDL^T of a restricted Gram block with the library's rank rule.
Eigen::LDLT<Matrix> factor_restricted(const Matrix& block) {
    Eigen::LDLT<Matrix> ldlt(block);
    const Vector pivots = ldlt.vectorD().cwiseAbs();
    const double largest = pivots.size() > 0 ? pivots.maxCoeff() : 0.0;
    if (ldlt.info() != Eigen::Success || pivots.size() == 0 || largest <= 0.0 ||
        pivots.minCoeff() < 1e-10 * largest || (ldlt.vectorD().array() < 0.0).any()) {
        throw Error(ErrorCode::RankDeficient,
                    "restricted normal matrix of size " + std::to_string(block.rows()) +
                        " is singular");
    }
    return ldlt;
}

Matrix submatrix(const Matrix& m, const IndexSet& rows, const IndexSet& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

Vector subvector(const Vector& v, const IndexSet& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
    return out;
}

}  // namespace

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    require(x_.rows() > 0 && x_.cols() > 0, ErrorCode::InvalidData, "empty feature matrix");
    require(y_.size() == x_.rows(), ErrorCode::DimensionMismatch,
            "y has " + std::to_string(y_.size()) + " entries, X has " +
                std::to_string(x_.rows()) + " rows");
    require(x_.allFinite(), ErrorCode::InvalidData, "X has non-finite entries");
    require(y_.allFinite(), ErrorCode::InvalidData, "y has non-finite entries");
    for (Index j = 0; j < x_.cols(); ++j) {
        require((x_.col(j).array() != 0.0).any(), ErrorCode::InvalidData,
                "column " + std::to_string(j) + " of X is identically zero");
    }
    const double n = static_cast<double>(x_.rows());
    gram_ = (x_.transpose() * x_) / n;
    moment_ = (x_.transpose() * y_) / n;
    grad_scale_ = std::max(1.0, moment_.cwiseAbs().maxCoeff());
}

Dataset Dataset::from_gram(const Matrix& gram, const Vector& beta_star) {
    require(gram.rows() == gram.cols() && gram.rows() == beta_star.size(),
            ErrorCode::DimensionMismatch, "gram/beta_star shapes disagree");
    Eigen::LLT<Matrix> llt(gram);
    require(llt.info() == Eigen::Success, ErrorCode::InvalidData,
            "Gram matrix is not positive definite");
    const double n = static_cast<double>(gram.rows());
    Matrix x = std::sqrt(n) * Matrix(llt.matrixU());
    Vector y = x * beta_star;
    return Dataset(std::move(x), std::move(y));
}

SignPattern::SignPattern(IndexSet plus, IndexSet minus)
    : plus_(std::move(plus)), minus_(std::move(minus)) {
    std::sort(plus_.begin(), plus_.end());
    std::sort(minus_.begin(), minus_.end());
    plus_.erase(std::unique(plus_.begin(), plus_.end()), plus_.end());
    minus_.erase(std::unique(minus_.begin(), minus_.end()), minus_.end());
    IndexSet both;
    std::set_intersection(plus_.begin(), plus_.end(), minus_.begin(), minus_.end(),
                          std::back_inserter(both));
    require(both.empty(), ErrorCode::InvalidArgument, "plus and minus sets overlap");
}

SignPattern SignPattern::from_dual(const Vector& s, double tol) {
    IndexSet plus, minus;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) >= 1.0 - tol) plus.push_back(i);
        else if (s(i) <= -1.0 + tol) minus.push_back(i);
    }
    return SignPattern(std::move(plus), std::move(minus));
}

IndexSet SignPattern::allowed() const {
    IndexSet out;
    std::merge(plus_.begin(), plus_.end(), minus_.begin(), minus_.end(), std::back_inserter(out));
    return out;
}

double loss(const Dataset& data, const Vector& beta) {
    require(beta.size() == data.d(), ErrorCode::DimensionMismatch, "beta has wrong length");
    const Vector residual = data.x() * beta - data.y();
    return residual.squaredNorm() / (2.0 * static_cast<double>(data.n()));
}

Vector grad_loss(const Dataset& data, const Vector& beta) {
    require(beta.size() == data.d(), ErrorCode::DimensionMismatch, "beta has wrong length");
    const Vector residual = data.x() * beta - data.y();
    return data.x().transpose() * residual / static_cast<double>(data.n());
}

Vector support_least_squares(const Dataset& data, const IndexSet& support) {
    Vector beta = Vector::Zero(data.d());
    if (support.empty()) return beta;
    const auto ldlt = factor_restricted(submatrix(data.gram(), support, support));
    const Vector sol = ldlt.solve(subvector(data.moment(), support));
    for (std::size_t i = 0; i < support.size(); ++i) beta(support[i]) = sol(static_cast<Index>(i));
    return beta;
}

SolveReport constrained_lsq(const Dataset& data, const SignPattern& pattern, double tol) {
    for (const Index i : pattern.allowed()) {
        require(i >= 0 && i < data.d(), ErrorCode::DimensionMismatch, "pattern index out of range");
    }
    const double abs_tol = tol * data.grad_scale();

    // Flipped problem over the allowed coordinates: minimise
    // 1/2 z^T G z - c^T z subject to z >= 0, with G = D H_II D and c = D m_I.
    const IndexSet allowed = pattern.allowed();
    const auto m = static_cast<Index>(allowed.size());
    Vector flip(m);
    for (Index a = 0; a < m; ++a) {
        const bool negative =
            std::binary_search(pattern.minus().begin(), pattern.minus().end(), allowed[a]);
        flip(a) = negative ? -1.0 : 1.0;
    }
    const Matrix g = flip.asDiagonal() * submatrix(data.gram(), allowed, allowed) * flip.asDiagonal();
    const Vector c = flip.cwiseProduct(subvector(data.moment(), allowed));

    Vector z = Vector::Zero(m);
    std::vector<bool> passive(static_cast<std::size_t>(m), false);
    const int max_outer = 3 * static_cast<int>(m) + 30;
    int iterations = 0;

    auto solve_passive = [&](IndexSet& ids) {
        ids.clear();
        for (Index a = 0; a < m; ++a)
            if (passive[static_cast<std::size_t>(a)]) ids.push_back(a);
        Vector full = Vector::Zero(m);
        if (ids.empty()) return full;
        const auto ldlt = factor_restricted(submatrix(g, ids, ids));
        const Vector sol = ldlt.solve(subvector(c, ids));
        for (std::size_t i = 0; i < ids.size(); ++i) full(ids[i]) = sol(static_cast<Index>(i));
        return full;
    };

    IndexSet ids;
    while (true) {
        const Vector w = c - g * z;  // negative gradient in flipped coordinates
        Index best = -1;
        double best_w = abs_tol;
        for (Index a = 0; a < m; ++a) {
            if (!passive[static_cast<std::size_t>(a)] && w(a) > best_w) {
                best_w = w(a);
                best = a;
            }
        }
        if (best < 0) break;
        if (++iterations > max_outer) {
            throw Error(ErrorCode::MaxIterations, "active-set loop exceeded " +
                                                      std::to_string(max_outer) + " iterations");
        }
        passive[static_cast<std::size_t>(best)] = true;

        int inner = 0;
        while (true) {
            Vector trial = solve_passive(ids);
            bool feasible = true;
            for (const Index a : ids) feasible = feasible && trial(a) > 0.0;
            if (feasible) {
                z = trial;
                break;
            }
            if (++inner > max_outer) {
                throw Error(ErrorCode::MaxIterations, "inner active-set loop did not settle");
            }
            // Move towards the trial point until the first coordinate hits zero.
            double step = 1.0;
            Index blocking = -1;
            for (const Index a : ids) {
                if (trial(a) <= 0.0) {
                    const double ratio = z(a) / (z(a) - trial(a));
                    if (blocking < 0 || ratio < step) {
                        step = ratio;
                        blocking = a;
                    }
                }
            }
            z += step * (trial - z);
            z(blocking) = 0.0;
            for (const Index a : ids) {
                if (z(a) <= 0.0) {
                    z(a) = 0.0;
                    passive[static_cast<std::size_t>(a)] = false;
                }
            }
        }
    }

    SolveReport report;
    report.beta = Vector::Zero(data.d());
    for (Index a = 0; a < m; ++a) report.beta(allowed[a]) = flip(a) * z(a);
    report.grad = grad_loss(data, report.beta);
    report.iterations = iterations;
    double kkt = 0.0;
    for (Index a = 0; a < m; ++a) {
        const double flipped_grad = flip(a) * report.grad(allowed[a]);
        if (z(a) > 0.0) {
            report.active.push_back(allowed[a]);
            kkt = std::max(kkt, std::abs(flipped_grad));
        } else {
            kkt = std::max(kkt, std::max(0.0, -flipped_grad));
        }
    }
    report.kkt_residual = kkt;
    if (kkt > abs_tol) {
        // Only reachable on badly conditioned faces; the passive solve already
        // cleared the pivot test, so report it as a rank problem.
        throw Error(ErrorCode::RankDeficient,
                    "KKT residual " + std::to_string(kkt) + " above tolerance after solve");
    }
    return report;
}

IndexSet support_of(const Vector& beta) {
    IndexSet out;
    for (Index i = 0; i < beta.size(); ++i)
        if (beta(i) != 0.0) out.push_back(i);
    return out;
}

bool critical_point_check(const Dataset& data, const Vector& beta, double tol) {
    const Vector g = grad_loss(data, beta);
    if (beta.cwiseAbs().cwiseProduct(g).cwiseAbs().maxCoeff() > tol) return false;
    for (const Index i : support_of(beta))
        if (std::abs(g(i)) > tol) return false;
    return true;
}

}  // namespace saddleflow
