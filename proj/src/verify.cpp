#include "saddleflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "saddleflow/baselines.hpp"
#include "saddleflow/random.hpp"

namespace saddleflow {

namespace {

double spectral_deviation(const Matrix& gram, const IndexSet& subset) {
    const auto m = static_cast<Index>(subset.size());
    Matrix block(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b) block(a, b) = gram(subset[a], subset[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    return std::max(std::abs(ev(m - 1) - 1.0), std::abs(1.0 - ev(0)));
}

RipCheck make_check(std::string name, double value, double lo, double hi) {
    return RipCheck{std::move(name), value, lo, hi, value >= lo && value <= hi};
}

}  // namespace

double subset_count(Index d, int s) {
    if (s < 0 || s > d) return 0.0;
    double c = 1.0;
    for (int k = 0; k < s; ++k) c = c * static_cast<double>(d - k) / static_cast<double>(k + 1);
    return std::round(c);
}

double rip_constant(const Dataset& data, int s, RipMode mode, std::size_t samples, std::uint64_t seed) {
    const Index d = data.d();
    if (s < 1 || s > d) throw Error(ErrorCode::InvalidArgument, "subset size must lie in [1, d]");
    const Matrix& gram = data.gram();
    double worst = 0.0;
    if (mode == RipMode::Exact) {
        if (subset_count(d, s) > kMaxRipSubsets)
            throw Error(ErrorCode::TooManySubsets, "C(d, s) exceeds the exact enumeration guard");
        IndexSet subset(static_cast<std::size_t>(s));
        std::iota(subset.begin(), subset.end(), Index{0});
        while (true) {
            worst = std::max(worst, spectral_deviation(gram, subset));
            int pos = s - 1;
            while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == d - s + pos) --pos;
            if (pos < 0) break;
            ++subset[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < s; ++q)
                subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
        }
        return worst;
    }
    Rng rng(seed);
    IndexSet pool(static_cast<std::size_t>(d));
    for (std::size_t draw = 0; draw < samples; ++draw) {
        std::iota(pool.begin(), pool.end(), Index{0});
        for (int k = 0; k < s; ++k) {
            const auto pick = static_cast<std::size_t>(k) + rng.below(static_cast<std::uint64_t>(d - k));
            std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
        }
        IndexSet subset(pool.begin(), pool.begin() + s);
        std::sort(subset.begin(), subset.end());
        worst = std::max(worst, spectral_deviation(gram, subset));
    }
    return worst;
}

bool RipReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const RipCheck& c) { return c.pass; });
}

RipReport rip_experiment(const Dataset& data, const Vector& beta_star) {
    if (beta_star.size() != data.d())
        throw Error(ErrorCode::DimensionMismatch, "beta_star has the wrong length");
    const Vector fit = data.x() * beta_star - data.y();
    if (fit.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, data.y().cwiseAbs().maxCoeff()))
        throw Error(ErrorCode::InvalidArgument, "y is not X beta_star");

    RipReport rep;
    for (Index i = 0; i < beta_star.size(); ++i)
        if (beta_star(i) != 0.0) rep.order.push_back(i);
    std::stable_sort(rep.order.begin(), rep.order.end(),
                     [&](Index a, Index b) { return std::abs(beta_star(a)) > std::abs(beta_star(b)); });
    rep.r = static_cast<int>(rep.order.size());
    rep.beta_norm = beta_star.norm();

    if (rep.r > 0) {
        const int s = static_cast<int>(std::min<Index>(2 * rep.r, data.d()));
        if (subset_count(data.d(), s) <= kMaxRipSubsets) {
            rep.eps_tilde = rip_constant(data, s, RipMode::Exact);
        } else {
            rep.eps_tilde = rip_constant(data, s, RipMode::Sampled, 4000, 0);
            rep.eps_exact = false;
        }
        rep.gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rep.r; ++i) {
            const double next = i + 1 < rep.r ? std::abs(beta_star(rep.order[static_cast<std::size_t>(i + 1)])) : 0.0;
            rep.gap = std::min(rep.gap, std::abs(beta_star(rep.order[static_cast<std::size_t>(i)])) - next);
        }
    }
    rep.eps = 5.0 * rep.eps_tilde;
    const double radius = rep.eps * rep.beta_norm;

    if (!rep.eps_exact) {
        rep.assumption_failed = true;
        rep.assumption_note = "RIP constant is only a sampled lower bound";
    } else if (!(rep.eps_tilde < std::sqrt(2.0) - 1.0)) {
        rep.assumption_failed = true;
        rep.assumption_note = "eps_tilde >= sqrt(2) - 1";
    } else if (rep.r > 0 && !(radius < rep.gap / 2.0)) {
        rep.assumption_failed = true;
        rep.assumption_note = "gap condition 5 eps_tilde |beta*| < gap / 2 fails";
    }

    SaddlePath path;
    try {
        path = run(data);
    } catch (const Error& e) {
        if (!rep.assumption_failed)
            rep.checks.push_back(RipCheck{std::string("recursion: ") + e.what(), 0.0, 0.0, 0.0, false});
        return rep;
    }
    rep.loops_observed = path.loops();
    rep.times_observed.assign(path.times.begin() + 1, path.times.end());
    rep.saddles_observed.assign(path.saddles.begin() + 1, path.saddles.end());
    if (rep.assumption_failed) return rep;

    const double slack = 1e-12 * std::max(1.0, rep.beta_norm);
    rep.checks.push_back(make_check("loops", rep.loops_observed, rep.r, rep.r));
    const int shared = std::min(rep.r, rep.loops_observed);
    for (int k = 1; k <= shared; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Vector& saddle = path.saddles[kk];
        IndexSet prefix(rep.order.begin(), rep.order.begin() + k);
        std::sort(prefix.begin(), prefix.end());
        const bool prefix_ok = support_of(saddle) == prefix;
        rep.checks.push_back(RipCheck{"support of saddle " + std::to_string(k), prefix_ok ? 1.0 : 0.0, 1.0, 1.0,
                                      prefix_ok});

        const double mag = std::abs(beta_star(rep.order[kk - 1]));
        const double t_lo = 1.0 / (mag + radius);
        const double t_hi = mag > radius ? 1.0 / (mag - radius) : std::numeric_limits<double>::infinity();
        rep.checks.push_back(make_check("time " + std::to_string(k), path.times[kk], t_lo * (1.0 - 1e-12),
                                        t_hi * (1.0 + 1e-12)));

        if (k < rep.r) {
            for (int i = 0; i < k; ++i) {
                const Index c = rep.order[static_cast<std::size_t>(i)];
                rep.checks.push_back(make_check(
                    "saddle " + std::to_string(k) + " coord " + std::to_string(c), saddle(c),
                    beta_star(c) - radius - slack, beta_star(c) + radius + slack));
            }
        } else {
            const double err = (saddle - beta_star).cwiseAbs().maxCoeff();
            rep.checks.push_back(
                make_check("final saddle equals beta_star", err, 0.0, 1e-9 * std::max(1.0, beta_star.cwiseAbs().maxCoeff())));
        }
    }
    return rep;
}

AuditReport termination_audit(const SaddlePath& path, const Dataset& data, double l1_tol) {
    AuditReport rep;
    rep.loop_bound = loop_bound(data.n(), data.d());
    rep.loops = path.loops();
    rep.violations = audit_path(path, data);
    const double tol = 1e-9 * data.grad_scale();
    for (std::size_t k = 0; k < path.saddles.size(); ++k) {
        if (!critical_point_check(data, path.saddles[k], tol))
            rep.violations.push_back("saddle " + std::to_string(k) + ": not a critical point");
    }
    try {
        const LassoPath lasso = lasso_homotopy(data, 0.0);
        rep.min_l1_gap = (lasso.endpoint() - path.saddles.back()).cwiseAbs().maxCoeff();
        if (rep.min_l1_gap > l1_tol)
            rep.violations.push_back("final saddle differs from the homotopy endpoint by " +
                                     std::to_string(rep.min_l1_gap));
    } catch (const Error& e) {
        rep.violations.push_back(std::string("homotopy failed: ") + e.what());
    }
    return rep;
}

namespace {

bool non_increasing(const std::vector<SweepRow>& rows, double SweepRow::*field, double noise) {
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].*field > rows[k - 1].*field + noise) return false;
    return true;
}

Vector interpolate(const FlowTrajectory& traj, double t) {
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    if (it == traj.times.begin()) return traj.beta.front();
    if (it == traj.times.end()) return traj.beta.back();
    const auto k = static_cast<std::size_t>(it - traj.times.begin());
    const double w = (t - traj.times[k - 1]) / (traj.times[k] - traj.times[k - 1]);
    return (1.0 - w) * traj.beta[k - 1] + w * traj.beta[k];
}

}  // namespace

bool SweepTable::sup_monotone(double noise) const { return non_increasing(rows, &SweepRow::sup_max, noise); }

bool SweepTable::hausdorff_monotone(double noise) const {
    return non_increasing(rows, &SweepRow::hausdorff, noise);
}

SweepTable convergence_sweep(const Dataset& data, const SaddlePath& path, const SweepConfig& cfg) {
    SweepTable table;
    const int p = path.loops();
    table.t_end = cfg.t_end > 0.0 ? cfg.t_end : (p > 0 ? 1.25 * path.times.back() : 1.0);
    table.shrink = cfg.shrink;
    for (int k = 0; k <= p; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double lo = path.times[kk];
        const double hi = k < p ? path.times[kk + 1] : table.t_end;
        const double w = hi - lo;
        table.window_lo.push_back(lo + cfg.shrink * w);
        table.window_hi.push_back(hi - cfg.shrink * w);
    }
    const HybridPath hybrid = build_hybrid_path(data, path, cfg.orbit);
    const std::vector<Polyline> graph = hybrid.graph();

    auto measure = [&](double log10_alpha) {
        SweepRow row;
        row.log10_alpha = log10_alpha;
        const FlowTrajectory traj = simulate(data, log10_alpha * std::log(10.0), table.t_end, cfg.flow);
        row.samples = traj.times.size();
        row.final_loss = traj.loss.back();
        row.window_sup.assign(table.window_lo.size(), 0.0);
        for (std::size_t j = 0; j < traj.times.size(); ++j) {
            const double t = traj.times[j];
            for (std::size_t k = 0; k < table.window_lo.size(); ++k) {
                if (t >= table.window_lo[k] && t <= table.window_hi[k]) {
                    row.window_sup[k] =
                        std::max(row.window_sup[k], (traj.beta[j] - path.saddles[k]).cwiseAbs().maxCoeff());
                }
            }
        }
        for (std::size_t k = 0; k < table.window_lo.size(); ++k) {
            const double mid = 0.5 * (table.window_lo[k] + table.window_hi[k]);
            row.mid_dist.push_back((interpolate(traj, mid) - path.saddles[k]).cwiseAbs().maxCoeff());
        }
        row.sup_max = *std::max_element(row.window_sup.begin(), row.window_sup.end());
        if (p >= 1) {
            const double t1 = path.times[1];
            const double half = 0.25 * std::min(t1, p >= 2 ? path.times[2] - t1 : table.t_end - t1);
            for (std::size_t j = 0; j < traj.times.size(); ++j) {
                const double t = traj.times[j];
                if (t < t1 - half || t > t1 + half) continue;
                row.jump_window_sup = std::max(row.jump_window_sup,
                                               (traj.beta[j] - saddle_at(path, t)).cwiseAbs().maxCoeff());
            }
        }
        row.hausdorff = hausdorff_distance({traj.beta}, graph);
        return row;
    };

    const auto policy = cfg.parallel ? std::launch::async : std::launch::deferred;
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(cfg.log10_alphas.size());
    for (const double a : cfg.log10_alphas) jobs.push_back(std::async(policy, measure, a));
    for (auto& job : jobs) table.rows.push_back(job.get());
    return table;
}

BoundReport check_flow_bounds(const Dataset& data, const FlowTrajectory& traj, const Vector& beta_l1) {
    BoundReport rep;
    rep.alpha_threshold = alpha_threshold(beta_l1);
    rep.applicable = traj.log_alpha < std::log(rep.alpha_threshold);
    rep.beta_bound = 3.0 * beta_l1.lpNorm<1>() + 1.0;
    if (!rep.applicable) return rep;
    const double l_star = loss(data, beta_l1);
    const double phi = potential(beta_l1, traj.log_alpha, true);
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        const double t = traj.times[j];
        ++rep.samples;
        const double m = traj.beta[j].cwiseAbs().maxCoeff();
        rep.max_abs_beta = std::max(rep.max_abs_beta, m);
        if (m > rep.beta_bound) ++rep.box_violations;
        if (t <= 0.0) continue;
        const double excess = traj.loss[j] - l_star;
        const double bound = phi / (2.0 * t);
        // Rounding slack on the loss evaluation only.
        if (excess > bound * (1.0 + 1e-9) + 1e-15 * std::max(traj.loss.front(), 1e-300)) ++rep.rate_violations;
        if (bound > 0.0) rep.worst_rate_ratio = std::max(rep.worst_rate_ratio, excess / bound);
    }
    return rep;
}

double duality_residual(const FlowTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.beta.size(); ++j) {
        const Vector r = rescaled_potential_grad(traj.beta[j], traj.log_alpha) + traj.grad_integral[j];
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace saddleflow
