#pragma once

#include <string>
#include <vector>

#include "saddleflow/core.hpp"

namespace saddleflow {

/// Time spent at a saddle before the dual vector leaves [-1, 1]^d, and the
/// coordinate(s) that reach the boundary first.
struct HitEvent {
    double delta = 0.0;
    IndexSet coords;
    std::vector<int> signs;  // boundary value (+1 or -1) reached by each coord
};

/// Output of the saddle-to-saddle recursion: jump times t_0 = 0 < t_1 < ...,
/// the saddles visited, and the dual vector s at each jump. hits[k] is the
/// event that ended the stay at saddles[k].
struct SaddlePath {
    std::vector<double> times;
    std::vector<Vector> saddles;
    std::vector<Vector> duals;
    std::vector<double> losses;
    std::vector<HitEvent> hits;
    std::vector<std::string> warnings;

    [[nodiscard]] int loops() const noexcept { return static_cast<int>(times.size()) - 1; }
};

struct PathConfig {
    double tol_grad = 1e-10;  // scaled by Dataset::grad_scale()
    double tol_kkt = 1e-10;   // scaled by Dataset::grad_scale()
    double tie_tol = 1e-9;
    long long max_loops = -1;  // < 0: theoretical bound, capped at 1e6
    bool check_postconditions = true;
};

/// Smallest delta > 0 with |s_i - delta * grad_i| = 1 for some i in `active`.
/// Coordinates within a relative tie_tol of the minimum are reported together.
[[nodiscard]] HitEvent hitting_time(const Vector& s, const Vector& grad, const IndexSet& active,
                                    double tie_tol = 1e-9);

/// min(2^d, sum_{k<=n} C(d, k)), saturated at 1e18.
[[nodiscard]] double loop_bound(Index n, Index d);

/// Runs the recursion from (t, beta, s) = (0, 0, 0) until the gradient vanishes.
///
/// Each loop admits the coordinates whose dual entry reaches +-1 first,
/// rebuilds the sign pattern from s, and re-solves the sign-constrained least
/// squares. The output is audited before returning (see audit_path) and
/// PostconditionFailed is thrown on any violation.
[[nodiscard]] SaddlePath run(const Dataset& data, const PathConfig& cfg = {});

/// Structural invariants of a path, collected as human readable violations.
[[nodiscard]] std::vector<std::string> audit_path(const SaddlePath& path, const Dataset& data,
                                                  double tol = 1e-9);

struct KeyEquationReport {
    std::size_t samples = 0;
    double k1 = 0.0;  // max(|s_t[i]| - 1, 0)
    double k2 = 0.0;  // sign violations where s_t[i] = +-1
    double k3 = 0.0;  // |beta_t[i]| where |s_t[i]| < 1
    double k4 = 0.0;  // |s_t[i] - sign(beta_t[i])| where beta_t[i] != 0
    std::size_t violations = 0;

    [[nodiscard]] bool ok() const noexcept { return violations == 0; }
};

/// Evaluates the piecewise-constant process and the dual
/// s_t = -sum_k dt_k grad L(beta_k) rebuilt from the gradients alone, and
/// checks s_t in the l1 subdifferential of beta_t at every grid time.
[[nodiscard]] KeyEquationReport verify_key_equation(const SaddlePath& path, const Dataset& data,
                                                    const std::vector<double>& grid, double tol);

/// `count` evenly spaced times covering [0, 1.25 t_p] (or [0, 1] if p = 0).
[[nodiscard]] std::vector<double> default_time_grid(const SaddlePath& path, std::size_t count);

/// The saddle in force at time t (right-continuous at jump times).
[[nodiscard]] const Vector& saddle_at(const SaddlePath& path, double t);

}  // namespace saddleflow
