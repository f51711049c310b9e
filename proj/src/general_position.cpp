#include <algorithm>
#include <cmath>
#include <numeric>

#include "saddleflow/core.hpp"

namespace saddleflow {

namespace {

// Calls visit(subset) for each k-subset of {0..d-1} in lexicographic order
// until visit returns false. Returns false when stopped early.
template <class Visit>
bool for_each_subset(Index d, int k, Visit&& visit) {
    IndexSet subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), Index{0});
    while (true) {
        if (!visit(subset)) return false;
        int pos = k - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == d - k + pos) --pos;
        if (pos < 0) return true;
        ++subset[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < k; ++q)
            subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
    }
}

}  // namespace

GeneralPositionResult general_position_check(const Dataset& data, int k_max, double tol) {
    const Index n = data.n();
    const Index d = data.d();
    const Matrix& x = data.x();
    const int cap = static_cast<int>(std::min(n, d));
    if (k_max < 0) k_max = std::min(cap, 6);
    k_max = std::min(k_max, cap);

    const double scale = x.colwise().norm().maxCoeff();
    const double abs_tol = tol * std::max(scale, 1e-300);

    GeneralPositionResult result;
    for (int k = 1; k <= k_max; ++k) {
        const bool finished = for_each_subset(d, k, [&](const IndexSet& subset) {
            // Flipping every sign negates the affine span, and candidates are
            // tested with both signs, so the first sign can be fixed to +1.
            const unsigned patterns = 1u << static_cast<unsigned>(k - 1);
            for (unsigned mask = 0; mask < patterns; ++mask) {
                std::vector<int> signs(static_cast<std::size_t>(k), 1);
                for (int q = 1; q < k; ++q)
                    if (mask & (1u << static_cast<unsigned>(q - 1))) signs[static_cast<std::size_t>(q)] = -1;

                const Vector anchor = x.col(subset[0]);
                Matrix directions(n, k - 1);
                for (int q = 1; q < k; ++q)
                    directions.col(q - 1) =
                        signs[static_cast<std::size_t>(q)] * x.col(subset[static_cast<std::size_t>(q)]) - anchor;
                Eigen::ColPivHouseholderQR<Matrix> qr;
                if (k > 1) qr.compute(directions);

                for (Index j = 0; j < d; ++j) {
                    if (std::find(subset.begin(), subset.end(), j) != subset.end()) continue;
                    for (const int sign : {1, -1}) {
                        const Vector target = sign * x.col(j) - anchor;
                        double residual = target.norm();
                        if (k > 1) residual = (target - directions * qr.solve(target)).norm();
                        if (residual <= abs_tol) {
                            result.holds = false;
                            result.witness = GeneralPositionWitness{k, subset, signs, j, sign};
                            return false;
                        }
                    }
                }
            }
            return true;
        });
        if (!finished) return result;
    }
    return result;
}

}  // namespace saddleflow
