#include "saddleflow/saddle_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace saddleflow {

HitEvent hitting_time(const Vector& s, const Vector& grad, const IndexSet& active, double tie_tol) {
    if (s.size() != grad.size())
        throw Error(ErrorCode::DimensionMismatch, "dual and gradient lengths differ");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> roots(active.size(), inf);
    double best = inf;
    for (std::size_t q = 0; q < active.size(); ++q) {
        const Index i = active[q];
        const double g = grad(i);
        if (g == 0.0) continue;
        // s_i - delta * g moves towards +1 when g < 0 and towards -1 when g > 0.
        const double delta = g < 0.0 ? (1.0 - s(i)) / -g : (s(i) + 1.0) / g;
        if (delta > 0.0 && std::isfinite(delta)) {
            roots[q] = delta;
            best = std::min(best, delta);
        }
    }
    if (!std::isfinite(best))
        throw Error(ErrorCode::NoFiniteHit, "no active coordinate reaches the boundary");

    HitEvent event;
    event.delta = best;
    for (std::size_t q = 0; q < active.size(); ++q) {
        if (roots[q] <= best * (1.0 + tie_tol)) {
            event.coords.push_back(active[q]);
            event.signs.push_back(grad(active[q]) < 0.0 ? 1 : -1);
        }
    }
    return event;
}

double loop_bound(Index n, Index d) {
    constexpr double cap = 1e18;
    const double two_d = d >= 60 ? cap : std::ldexp(1.0, static_cast<int>(d));
    double sum = 0.0;
    double binom = 1.0;
    for (Index k = 0; k <= std::min(n, d); ++k) {
        sum += binom;
        if (sum >= cap) return std::min(two_d, cap);
        binom = binom * static_cast<double>(d - k) / static_cast<double>(k + 1);
    }
    return std::min({two_d, sum, cap});
}

SaddlePath run(const Dataset& data, const PathConfig& cfg) {
    const Index d = data.d();
    const double tol_grad = cfg.tol_grad * data.grad_scale();
    const double bound = loop_bound(data.n(), d);
    const double max_loops =
        cfg.max_loops >= 0 ? static_cast<double>(cfg.max_loops) : std::min(bound, 1e6);

    SaddlePath path;
    double t = 0.0;
    Vector beta = Vector::Zero(d);
    Vector s = Vector::Zero(d);
    path.times.push_back(t);
    path.saddles.push_back(beta);
    path.duals.push_back(s);
    path.losses.push_back(loss(data, beta));

    Vector grad = grad_loss(data, beta);
    while (grad.cwiseAbs().maxCoeff() > tol_grad) {
        if (static_cast<double>(path.loops()) >= max_loops) {
            throw Error(ErrorCode::MaxLoops, "exceeded " + std::to_string(max_loops) + " loops");
        }
        IndexSet active;
        for (Index j = 0; j < d; ++j)
            if (std::abs(grad(j)) > tol_grad) active.push_back(j);

        HitEvent hit = hitting_time(s, grad, active, cfg.tie_tol);
        if (hit.delta > 1e12) {
            std::ostringstream msg;
            msg << "loop " << path.loops() << ": stay of " << hit.delta
                << " at a saddle suggests near-degenerate data";
            path.warnings.push_back(msg.str());
        }
        t += hit.delta;
        s -= hit.delta * grad;
        for (std::size_t q = 0; q < hit.coords.size(); ++q)
            s(hit.coords[q]) = static_cast<double>(hit.signs[q]);

        const SignPattern pattern = SignPattern::from_dual(s, cfg.tie_tol);
        for (const Index i : pattern.plus()) s(i) = 1.0;
        for (const Index i : pattern.minus()) s(i) = -1.0;

        beta = constrained_lsq(data, pattern, cfg.tol_kkt).beta;
        grad = grad_loss(data, beta);

        path.hits.push_back(std::move(hit));
        path.times.push_back(t);
        path.saddles.push_back(beta);
        path.duals.push_back(s);
        path.losses.push_back(loss(data, beta));
    }

    if (cfg.check_postconditions) {
        const auto violations = audit_path(path, data);
        if (!violations.empty())
            throw Error(ErrorCode::PostconditionFailed, violations.front());
    }
    return path;
}

std::vector<std::string> audit_path(const SaddlePath& path, const Dataset& data, double tol) {
    std::vector<std::string> out;
    auto fail = [&](int k, const std::string& what) {
        out.push_back("saddle " + std::to_string(k) + ": " + what);
    };

    const std::size_t count = path.times.size();
    if (count == 0 || path.saddles.size() != count || path.duals.size() != count ||
        path.hits.size() + 1 != count) {
        out.emplace_back("path arrays have inconsistent lengths");
        return out;
    }
    const auto max_support = static_cast<std::size_t>(std::min(data.n(), data.d()));
    if (static_cast<double>(path.loops()) > loop_bound(data.n(), data.d()))
        out.emplace_back("loop count above the theoretical bound");

    for (std::size_t k = 0; k < count; ++k) {
        const int kk = static_cast<int>(k);
        const Vector& beta = path.saddles[k];
        const Vector& s = path.duals[k];
        if (k > 0 && !(path.times[k] > path.times[k - 1])) fail(kk, "jump times not increasing");
        if (s.cwiseAbs().maxCoeff() > 1.0 + tol) fail(kk, "dual leaves [-1, 1]");
        for (Index i = 0; i < beta.size(); ++i) {
            if (beta(i) > 0.0 && std::abs(s(i) - 1.0) > tol) fail(kk, "positive entry without s = +1");
            if (beta(i) < 0.0 && std::abs(s(i) + 1.0) > tol) fail(kk, "negative entry without s = -1");
        }
        if (support_of(beta).size() > max_support) fail(kk, "support larger than min(n, d)");
        if (k > 0) {
            const double prev = loss(data, path.saddles[k - 1]);
            const double curr = loss(data, beta);
            if (!(curr < prev)) fail(kk, "loss did not strictly decrease");
            const HitEvent& hit = path.hits[k - 1];
            for (std::size_t q = 0; q < hit.coords.size(); ++q) {
                if (!(hit.signs[q] * beta(hit.coords[q]) > 0.0))
                    fail(kk, "hit coordinate " + std::to_string(hit.coords[q]) + " did not activate");
            }
        }
    }
    const Vector g_final = grad_loss(data, path.saddles.back());
    if (g_final.cwiseAbs().maxCoeff() > tol * data.grad_scale())
        out.emplace_back("final gradient does not vanish");
    return out;
}

const Vector& saddle_at(const SaddlePath& path, double t) {
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - path.times.begin() - 1, 0));
    return path.saddles[k];
}

std::vector<double> default_time_grid(const SaddlePath& path, std::size_t count) {
    const double end = path.loops() > 0 ? 1.25 * path.times.back() : 1.0;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = count > 1 ? end * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    return grid;
}

KeyEquationReport verify_key_equation(const SaddlePath& path, const Dataset& data,
                                      const std::vector<double>& grid, double tol) {
    const std::size_t count = path.times.size();
    std::vector<Vector> grads;
    grads.reserve(count);
    for (const auto& beta : path.saddles) grads.push_back(grad_loss(data, beta));

    // s at each jump time, accumulated from gradients only (not from path.duals).
    std::vector<Vector> s_at_jump(count, Vector::Zero(data.d()));
    for (std::size_t k = 1; k < count; ++k)
        s_at_jump[k] = s_at_jump[k - 1] - (path.times[k] - path.times[k - 1]) * grads[k - 1];

    KeyEquationReport report;
    for (const double t : grid) {
        const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
        const auto k =
            static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - path.times.begin() - 1, 0));
        const Vector s = s_at_jump[k] - (t - path.times[k]) * grads[k];
        const Vector& beta = path.saddles[k];
        ++report.samples;
        bool bad = false;
        for (Index i = 0; i < beta.size(); ++i) {
            const double si = s(i);
            const double bi = beta(i);
            const double v1 = std::max(std::abs(si) - 1.0, 0.0);
            double v2 = 0.0;
            if (si >= 1.0 - tol) v2 = std::max(v2, -bi);
            if (si <= -1.0 + tol) v2 = std::max(v2, bi);
            const double v3 = std::abs(si) < 1.0 - tol ? std::abs(bi) : 0.0;
            double v4 = 0.0;
            if (bi > 0.0) v4 = std::abs(si - 1.0);
            if (bi < 0.0) v4 = std::abs(si + 1.0);
            report.k1 = std::max(report.k1, v1);
            report.k2 = std::max(report.k2, v2);
            report.k3 = std::max(report.k3, v3);
            report.k4 = std::max(report.k4, v4);
            bad = bad || v1 > tol || v2 > 0.0 || v3 > 0.0 || v4 > tol;
        }
        if (bad) ++report.violations;
    }
    return report;
}

}  // namespace saddleflow
