#include "saddleflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace saddleflow {

namespace {

struct Equicorrelation {
    IndexSet set;
    std::vector<double> signs;
};

// Solves H_AA x = rhs; a singular block means the path is not unique.
Vector solve_block(const Matrix& gram, const IndexSet& set, const Vector& rhs) {
    const auto m = static_cast<Index>(set.size());
    Matrix block(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b) block(a, b) = gram(set[a], set[b]);
    Eigen::LDLT<Matrix> ldlt(block);
    const Vector pivots = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || pivots.minCoeff() < 1e-10 * pivots.maxCoeff() ||
        (ldlt.vectorD().array() < 0.0).any()) {
        throw Error(ErrorCode::Degenerate, "equicorrelation block of size " + std::to_string(m) +
                                               " is rank deficient");
    }
    return ldlt.solve(rhs);
}

double knot_kkt(const Dataset& data, const Vector& beta, double lambda, const Equicorrelation& eq) {
    const Vector c = data.moment() - data.gram() * beta;
    double worst = 0.0;
    std::vector<bool> in_set(static_cast<std::size_t>(data.d()), false);
    for (std::size_t a = 0; a < eq.set.size(); ++a) {
        const Index i = eq.set[a];
        in_set[static_cast<std::size_t>(i)] = true;
        worst = std::max(worst, std::abs(c(i) - lambda * eq.signs[a]));
        if (beta(i) * eq.signs[a] < 0.0) worst = std::max(worst, std::abs(beta(i)));
    }
    for (Index j = 0; j < data.d(); ++j) {
        if (!in_set[static_cast<std::size_t>(j)]) {
            worst = std::max(worst, std::abs(c(j)) - lambda);
            if (beta(j) != 0.0) worst = std::max(worst, std::abs(beta(j)));
        }
    }
    return std::max(worst, 0.0);
}

}  // namespace

Vector LassoPath::at(double lambda) const {
    if (lambda >= lambdas.front()) return vertices.front();
    for (std::size_t k = 1; k < lambdas.size(); ++k) {
        if (lambda >= lambdas[k]) {
            const double span = lambdas[k - 1] - lambdas[k];
            const double w = span > 0.0 ? (lambdas[k - 1] - lambda) / span : 1.0;
            return (1.0 - w) * vertices[k - 1] + w * vertices[k];
        }
    }
    return vertices.back();
}

LassoPath lasso_homotopy(const Dataset& data, double lambda_min) {
    if (!(lambda_min >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_min must be >= 0");
    const Index d = data.d();
    const Vector& b = data.moment();
    const Matrix& gram = data.gram();
    const double tol = 1e-10 * data.grad_scale();

    LassoPath path;
    Vector beta = Vector::Zero(d);
    double lambda = b.cwiseAbs().maxCoeff();
    Equicorrelation eq;

    auto record = [&](double lam) {
        const double kkt = knot_kkt(data, beta, lam, eq);
        if (kkt > tol) {
            throw Error(ErrorCode::Degenerate,
                        "KKT residual " + std::to_string(kkt) + " at lambda " + std::to_string(lam));
        }
        path.lambdas.push_back(lam);
        path.vertices.push_back(beta);
        path.kkt_residuals.push_back(kkt);
    };

    if (lambda <= lambda_min) {
        path.lambdas.push_back(lambda_min);
        path.vertices.push_back(beta);
        path.kkt_residuals.push_back(0.0);
        return path;
    }
    for (Index j = 0; j < d; ++j) {
        if (std::abs(b(j)) >= lambda * (1.0 - 1e-12)) {
            eq.set.push_back(j);
            eq.signs.push_back(b(j) > 0.0 ? 1.0 : -1.0);
        }
    }
    record(lambda);

    Index last_joined = -1;
    Index last_dropped = -1;
    double dropped_sign = 0.0;
    const int max_steps = 50 * static_cast<int>(d) + 100;
    const double step_floor = 1e-14 * lambda;
    for (int step = 0; step < max_steps; ++step) {
        const auto m = static_cast<Index>(eq.set.size());
        Vector sign_vec(m);
        for (Index a = 0; a < m; ++a) sign_vec(a) = eq.signs[static_cast<std::size_t>(a)];
        // beta_A(lambda - gamma) = beta_A(lambda) + gamma * dir
        const Vector dir = solve_block(gram, eq.set, sign_vec);
        Vector dir_full = Vector::Zero(d);
        for (Index a = 0; a < m; ++a) dir_full(eq.set[a]) = dir(a);
        const Vector slope = gram * dir_full;
        const Vector c = b - gram * beta;

        // Events within step_floor of lambda_min are the end of the path: as
        // lambda -> 0 every inactive correlation reaches the boundary there.
        double gamma = lambda - lambda_min;
        enum class Event { End, Join, Drop } event = Event::End;
        Index who = -1;

        std::vector<bool> in_set(static_cast<std::size_t>(d), false);
        for (const Index i : eq.set) in_set[static_cast<std::size_t>(i)] = true;

        // With |A| = n the residual is proportional to lambda, so every
        // inactive |c_j| / lambda is frozen below 1 and only drops can occur.
        const bool saturated = m >= data.n();
        for (Index j = 0; j < d && !saturated; ++j) {
            if (in_set[static_cast<std::size_t>(j)]) continue;
            for (const double side : {1.0, -1.0}) {
                // A variable that just dropped sits on its old boundary; it may
                // only re-enter through the opposite one.
                if (j == last_dropped && side == dropped_sign) continue;
                // c_j - g * slope_j = side * (lambda - g)
                const double denom = side - slope(j);
                if (denom == 0.0) continue;
                const double g = (side * lambda - c(j)) / denom;
                if (g > step_floor && g < gamma - step_floor) {
                    gamma = g;
                    event = Event::Join;
                    who = j;
                }
            }
        }
        for (Index a = 0; a < m; ++a) {
            const Index i = eq.set[a];
            if (i == last_joined || dir(a) == 0.0) continue;
            const double g = -beta(i) / dir(a);
            if (g > step_floor && g < gamma - step_floor) {
                gamma = g;
                event = Event::Drop;
                who = i;
            }
        }

        lambda = event == Event::End ? lambda_min : lambda - gamma;
        last_joined = -1;
        last_dropped = -1;
        if (event == Event::Join) {
            const double cj = c(who) - gamma * slope(who);
            eq.set.push_back(who);
            eq.signs.push_back(cj > 0.0 ? 1.0 : -1.0);
            last_joined = who;
        } else if (event == Event::Drop) {
            const auto pos = std::find(eq.set.begin(), eq.set.end(), who) - eq.set.begin();
            dropped_sign = eq.signs[static_cast<std::size_t>(pos)];
            eq.set.erase(eq.set.begin() + pos);
            eq.signs.erase(eq.signs.begin() + pos);
            last_dropped = who;
        }

        // Re-derive the vertex from (set, signs, lambda) instead of stepping,
        // so rounding does not accumulate along the path.
        beta.setZero();
        if (!eq.set.empty()) {
            const auto mm = static_cast<Index>(eq.set.size());
            Vector rhs(mm);
            for (Index a = 0; a < mm; ++a)
                rhs(a) = b(eq.set[a]) - lambda * eq.signs[static_cast<std::size_t>(a)];
            const Vector sol = solve_block(gram, eq.set, rhs);
            for (Index a = 0; a < mm; ++a) beta(eq.set[a]) = sol(a);
        }
        record(lambda);
        if (event == Event::End) return path;
    }
    throw Error(ErrorCode::Degenerate, "homotopy did not reach lambda_min");
}

Vector omp(const Dataset& data, int k) {
    const Index cap = std::min(data.n(), data.d());
    if (k < 0 || k > cap)
        throw Error(ErrorCode::InvalidArgument, "k must lie in [0, min(n, d)]");
    const Vector norms = data.x().colwise().norm();
    Vector beta = Vector::Zero(data.d());
    IndexSet support;
    for (int round = 0; round < k; ++round) {
        const Vector residual = data.y() - data.x() * beta;
        const Vector corr = (data.x().transpose() * residual).cwiseQuotient(norms).cwiseAbs();
        Index best = -1;
        for (Index j = 0; j < data.d(); ++j) {
            if (std::find(support.begin(), support.end(), j) != support.end()) continue;
            if (best < 0 || corr(j) > corr(best)) best = j;
        }
        support.push_back(best);
        std::sort(support.begin(), support.end());
        beta = support_least_squares(data, support);
    }
    return beta;
}

}  // namespace saddleflow
