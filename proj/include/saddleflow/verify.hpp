#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saddleflow/core.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/saddle_path.hpp"

namespace saddleflow {

enum class RipMode { Exact, Sampled };

/// Largest subset count exact mode will enumerate.
inline constexpr double kMaxRipSubsets = 1e6;

/// C(d, s) in floating point.
[[nodiscard]] double subset_count(Index d, int s);

/// max over s-column subsets S of the spectral deviation max(|l_max - 1|, |1 - l_min|)
/// of H_SS. Exact mode enumerates every subset (TooManySubsets beyond
/// kMaxRipSubsets); sampled mode draws `samples` random subsets and so only
/// returns a lower bound.
[[nodiscard]] double rip_constant(const Dataset& data, int s, RipMode mode = RipMode::Exact,
                                  std::size_t samples = 2000, std::uint64_t seed = 0);

struct RipCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct RipReport {
    int r = 0;
    double eps_tilde = 0.0;
    bool eps_exact = true;  // false: eps_tilde is a sampled lower bound
    double eps = 0.0;       // 5 eps_tilde
    double gap = 0.0;       // min_i |b*_i| - |b*_{i+1}| over the sorted support, b*_{r+1} = 0
    double beta_norm = 0.0;
    bool assumption_failed = false;
    std::string assumption_note;
    IndexSet order;  // support of beta_star, |beta_star| decreasing
    int loops_observed = 0;
    std::vector<double> times_observed;
    std::vector<Vector> saddles_observed;
    std::vector<RipCheck> checks;

    [[nodiscard]] bool pass() const;
};

/// Runs the saddle recursion on (data, y = X beta_star) and compares it with
/// the loop, support, box and time predictions implied by the measured
/// 2r-RIP constant. Boxes are only asserted when eps_tilde < sqrt(2) - 1 and
/// 5 eps_tilde |beta_star|_2 < gap / 2 hold with an exact constant; otherwise
/// assumption_failed is set and only the observations are recorded.
[[nodiscard]] RipReport rip_experiment(const Dataset& data, const Vector& beta_star);

struct AuditReport {
    double loop_bound = 0.0;
    int loops = 0;
    double min_l1_gap = 0.0;  // |final saddle - homotopy endpoint|_inf
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Structural audit of a path plus the critical-point property at every saddle
/// and agreement of the final saddle with the Lasso homotopy endpoint.
[[nodiscard]] AuditReport termination_audit(const SaddlePath& path, const Dataset& data,
                                            double l1_tol = 1e-8);

struct SweepConfig {
    std::vector<double> log10_alphas{-2.0, -4.0, -8.0, -16.0};
    double t_end = -1.0;  // <= 0: 1.25 t_p (1 when the path is trivial)
    double shrink = 0.05;
    FlowConfig flow;
    OrbitConfig orbit;
    bool parallel = true;
};

struct SweepRow {
    double log10_alpha = 0.0;
    std::vector<double> window_sup;  // per window, sup |beta_t - beta_k|_inf
    std::vector<double> mid_dist;    // per window, distance at the window midpoint
    double sup_max = 0.0;
    double hausdorff = 0.0;
    double jump_window_sup = 0.0;  // negative control around t_1
    double final_loss = 0.0;
    std::size_t samples = 0;
};

struct SweepTable {
    double t_end = 0.0;
    double shrink = 0.0;
    std::vector<double> window_lo;
    std::vector<double> window_hi;
    std::vector<SweepRow> rows;  // in the order of cfg.log10_alphas

    /// Successive rows never increase by more than `noise` (absolute).
    [[nodiscard]] bool sup_monotone(double noise = 0.0) const;
    [[nodiscard]] bool hausdorff_monotone(double noise = 0.0) const;
};

/// Simulates the flow at each alpha (concurrently when cfg.parallel) and
/// measures the distance to the limiting process on shrunk inter-jump windows
/// and to the hybrid saddle/orbit graph.
[[nodiscard]] SweepTable convergence_sweep(const Dataset& data, const SaddlePath& path,
                                           const SweepConfig& cfg = {});

struct BoundReport {
    bool applicable = false;  // alpha below the threshold
    double alpha_threshold = 0.0;
    std::size_t samples = 0;
    std::size_t rate_violations = 0;
    std::size_t box_violations = 0;
    double worst_rate_ratio = 0.0;  // max (L - L*) / (phi(b) / 2t)
    double max_abs_beta = 0.0;
    double beta_bound = 0.0;

    [[nodiscard]] bool ok() const noexcept { return rate_violations == 0 && box_violations == 0; }
};

/// Checks L(beta_t) - L* <= phi_alpha(beta_l1) / (2t) and
/// |beta_t|_inf <= 3 |beta_l1|_1 + 1 on every sample of a trajectory.
[[nodiscard]] BoundReport check_flow_bounds(const Dataset& data, const FlowTrajectory& traj,
                                            const Vector& beta_l1);

/// max over samples of |grad phi_tilde(beta_t) + int_0^t grad L|_inf.
[[nodiscard]] double duality_residual(const FlowTrajectory& traj);

}  // namespace saddleflow
