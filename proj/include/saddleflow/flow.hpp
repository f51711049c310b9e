#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "saddleflow/core.hpp"
#include "saddleflow/saddle_path.hpp"

namespace saddleflow {

using Polyline = std::vector<Vector>;

/// Sampled accelerated-time trajectory of the mirror flow at scale alpha.
/// The integrated state is zeta = asinh(beta / alpha^2); beta and the loss are
/// stored alongside so callers never rebuild them from zeta.
struct FlowTrajectory {
    double log_alpha = 0.0;
    std::vector<double> times;
    std::vector<Vector> zeta;
    std::vector<Vector> beta;
    std::vector<double> loss;
    /// Running integral of grad L(beta_s) ds, integrated with the same stages.
    std::vector<Vector> grad_integral;
    bool saturated = false;
    long long rejected_steps = 0;
};

struct FlowConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    long long max_steps = 5'000'000;
    /// Largest step; <= 0 picks t_end / 1000.
    double max_dt = 0.0;
    /// A stored sample may move beta by at most sample_rel * |beta|_inf + sample_abs.
    double sample_rel = 0.01;
    double sample_abs = 1e-4;
    /// Slack in the per-step loss comparison: L_new <= L_old (1 + slack) + 1e-300.
    double loss_slack = 1e-12;
};

/// Integrates d zeta / dt = 2 ln(alpha) grad L(beta(zeta)) from zeta = 0 up to
/// t_end with a Dormand-Prince 5(4) pair and PI step control on zeta.
///
/// Throws InvalidArgument unless log_alpha < 0 and t_end > 0, StepUnderflow
/// when the step collapses, and Diverged when no step can keep the loss from
/// increasing.
[[nodiscard]] FlowTrajectory simulate(const Dataset& data, double log_alpha, double t_end,
                                      const FlowConfig& cfg = {});

/// beta(zeta) = alpha^2 sinh(zeta), evaluated in log space. Sets *saturated when
/// an exponent had to be clamped.
[[nodiscard]] Vector beta_from_zeta(const Vector& zeta, double log_alpha, bool* saturated = nullptr);

/// asinh(beta / alpha^2) in log space.
[[nodiscard]] Vector zeta_from_beta(const Vector& beta, double log_alpha);

/// Gradient of the rescaled potential, asinh(beta / alpha^2) / (2 ln(1 / alpha)).
[[nodiscard]] Vector rescaled_potential_grad(const Vector& beta, double log_alpha);

/// The weights (u, v) with u * v = beta and u^2 - v^2 = 2 alpha^2, u > 0.
[[nodiscard]] std::pair<Vector, Vector> weights_from_beta(const Vector& beta, double log_alpha);

/// Hyperbolic entropy phi_alpha(beta); divided by ln(1 / alpha) when rescaled.
[[nodiscard]] double potential(const Vector& beta, double log_alpha, bool rescaled);

/// min{1, sqrt(|b|_1), 1 / (2 |b|_1), exp(-d / 2)} for b = beta_l1: the scale
/// below which the potential and iterate bounds are asserted.
[[nodiscard]] double alpha_threshold(const Vector& beta_l1);

/// tau_k = t_k + sum of |beta_{j+1} - beta_j|_2 over the first k segments,
/// and the inverse map back to accelerated time.
struct ArcLength {
    std::vector<double> tau;
    std::vector<double> t;

    [[nodiscard]] double time_at(double tau_query) const;
};

/// Throws NonMonotone if the stored times do not increase.
[[nodiscard]] ArcLength arc_length_reparametrize(const FlowTrajectory& traj);

/// Number of maximal runs of samples whose speed |d beta / dt| exceeds
/// `factor` times the mean speed (total length / duration).
[[nodiscard]] int count_jumps(const FlowTrajectory& traj, double factor = 10.0);

struct OrbitConfig {
    double eps0 = -1.0;  // < 0: 1e-8 * max(1, |saddle|_inf)
    double tol_stop = 1e-10;
    double max_len = 1e4;
    long long max_steps = 2'000'000;
};

struct Orbit {
    Polyline points;
    double length = 0.0;
};

/// Follows the heteroclinic orbit leaving `saddle` through the coordinates in
/// `entering` (each nudged by eps0 * sign) until |beta| * grad L(beta) falls
/// below tol_stop * grad_scale.
///
/// The orbit is traced with the unnormalised field -|beta| * grad L, which has
/// the same trajectory as the unit-speed flow and reaches the next saddle
/// smoothly; the polyline is then measured by arc length. Points are kept only
/// where the loss strictly decreases.
///
/// Throws InvalidArgument when `saddle` is not critical or an entering
/// direction does not descend, and Stalled when max_len or max_steps is hit.
[[nodiscard]] Orbit heteroclinic_orbit(const Dataset& data, const Vector& saddle,
                                       const std::vector<std::pair<Index, int>>& entering,
                                       const OrbitConfig& cfg = {});

struct HybridSegment {
    enum class Kind { Saddle, Orbit };
    Kind kind = Kind::Saddle;
    Polyline points;  // one point for a saddle
    double tau_in = 0.0;
    double tau_out = 0.0;
};

struct HybridPath {
    std::vector<HybridSegment> segments;
    double total_length = 0.0;  // summed orbit arc length

    /// Saddle points and orbit polylines as a polyline set.
    [[nodiscard]] std::vector<Polyline> graph() const;
};

/// Stitches saddle plateaus (tau duration = time spent at the saddle) and
/// heteroclinic orbits entered through each HitEvent. The last plateau has
/// tau_out = +inf. Throws SaddleMismatch when an orbit ends farther than
/// match_tol * max(1, |next saddle|_inf) from the next saddle.
[[nodiscard]] HybridPath build_hybrid_path(const Dataset& data, const SaddlePath& path,
                                           const OrbitConfig& cfg = {}, double match_tol = 1e-6);

/// Symmetric Hausdorff distance between two unions of polylines (single
/// points allowed). Segments are subdivided until an upper bound on the
/// distance over each piece is within 1e-4 (relative) of the running maximum.
[[nodiscard]] double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b);

}  // namespace saddleflow
