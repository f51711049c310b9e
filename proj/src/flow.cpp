#include "saddleflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dopri5.hpp"

namespace saddleflow {

namespace {

const double kExpCeiling = 0.9 * std::log(std::numeric_limits<double>::max());

// ln(1 + sqrt(1 + z^2)) without overflow for moderate z.
double log1p_hypot(double z) { return std::log1p(std::hypot(1.0, z)); }

}  // namespace

Vector beta_from_zeta(const Vector& zeta, double log_alpha, bool* saturated) {
    Vector beta(zeta.size());
    for (Index i = 0; i < zeta.size(); ++i) {
        const double z = std::abs(zeta(i));
        double e = z + 2.0 * log_alpha - std::log(2.0);
        if (e > kExpCeiling) {
            e = kExpCeiling;
            if (saturated != nullptr) *saturated = true;
        }
        const double mag = std::exp(e) * -std::expm1(-2.0 * z);
        beta(i) = zeta(i) < 0.0 ? -mag : mag;
    }
    return beta;
}

Vector zeta_from_beta(const Vector& beta, double log_alpha) {
    Vector zeta(beta.size());
    for (Index i = 0; i < beta.size(); ++i) {
        const double b = std::abs(beta(i));
        if (b == 0.0) {
            zeta(i) = 0.0;
            continue;
        }
        const double lr = std::log(b) - 2.0 * log_alpha;  // ln(|beta| / alpha^2)
        const double z = lr < 0.0 ? std::asinh(std::exp(lr)) : lr + log1p_hypot(std::exp(-lr));
        zeta(i) = beta(i) < 0.0 ? -z : z;
    }
    return zeta;
}

Vector rescaled_potential_grad(const Vector& beta, double log_alpha) {
    return zeta_from_beta(beta, log_alpha) / (-2.0 * log_alpha);
}

std::pair<Vector, Vector> weights_from_beta(const Vector& beta, double log_alpha) {
    const Index d = beta.size();
    Vector u(d);
    Vector v(d);
    for (Index i = 0; i < d; ++i) {
        const double b = std::abs(beta(i));
        double log_u = 0.0;
        if (b == 0.0) {
            log_u = log_alpha + 0.5 * std::log(2.0);
        } else {
            const double lr = std::log(b) - 2.0 * log_alpha;
            if (lr <= 0.0) {
                log_u = log_alpha + 0.5 * std::log1p(std::hypot(1.0, std::exp(lr)));
            } else {
                const double inv_r = std::exp(-lr);
                log_u = 0.5 * std::log(b) + 0.5 * std::log(inv_r + std::hypot(1.0, inv_r));
            }
        }
        u(i) = std::exp(log_u);
        const double mag = b == 0.0 ? 0.0 : std::exp(std::log(b) - log_u);
        v(i) = beta(i) < 0.0 ? -mag : mag;
    }
    return {u, v};
}

double potential(const Vector& beta, double log_alpha, bool rescaled) {
    // Each summand |b| asinh(r) - (sqrt(b^2 + alpha^4) - alpha^2), r = |b| / alpha^2,
    // written as |b| (asinh(r) - q) with q free of alpha^2.
    double total = 0.0;
    for (Index i = 0; i < beta.size(); ++i) {
        const double b = std::abs(beta(i));
        if (b == 0.0) continue;
        const double lr = std::log(b) - 2.0 * log_alpha;
        double asinh_r = 0.0;
        double q = 0.0;
        if (lr <= 0.0) {
            const double r = std::exp(lr);
            asinh_r = std::asinh(r);
            q = r / (1.0 + std::hypot(1.0, r));
        } else {
            const double inv_r = std::exp(-lr);
            asinh_r = lr + log1p_hypot(inv_r);
            q = std::hypot(1.0, inv_r) - inv_r;
        }
        total += b * std::max(asinh_r - q, 0.0);
    }
    total *= 0.5;
    return rescaled ? total / -log_alpha : total;
}

double alpha_threshold(const Vector& beta_l1) {
    const double l1 = beta_l1.lpNorm<1>();
    double a0 = std::min(1.0, std::exp(-0.5 * static_cast<double>(beta_l1.size())));
    if (l1 > 0.0) a0 = std::min({a0, std::sqrt(l1), 1.0 / (2.0 * l1)});
    return a0;
}

FlowTrajectory simulate(const Dataset& data, double log_alpha, double t_end, const FlowConfig& cfg) {
    if (!(log_alpha < 0.0) || !std::isfinite(log_alpha))
        throw Error(ErrorCode::InvalidArgument, "log_alpha must be finite and negative");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw Error(ErrorCode::InvalidArgument, "t_end must be finite and positive");

    const Matrix& gram = data.gram();
    const Vector& moment = data.moment();
    const double rate = 2.0 * log_alpha;  // d zeta / dt = rate * grad L
    bool saturated = false;
    auto field = [&](const Vector& zeta) -> Vector {
        const Vector beta = beta_from_zeta(zeta, log_alpha, &saturated);
        return rate * (gram * beta - moment);
    };

    FlowTrajectory traj;
    traj.log_alpha = log_alpha;
    Vector zeta = Vector::Zero(data.d());
    Vector beta = Vector::Zero(data.d());
    Vector integral = Vector::Zero(data.d());
    double t = 0.0;
    double current_loss = loss(data, beta);
    traj.times.push_back(t);
    traj.zeta.push_back(zeta);
    traj.beta.push_back(beta);
    traj.loss.push_back(current_loss);
    traj.grad_integral.push_back(integral);

    Vector k1 = field(zeta);
    if (k1.cwiseAbs().maxCoeff() == 0.0) {
        // Stationary from the start: the origin is the global minimiser.
        traj.times.push_back(t_end);
        traj.zeta.push_back(zeta);
        traj.beta.push_back(beta);
        traj.loss.push_back(current_loss);
        traj.grad_integral.push_back(integral);
        return traj;
    }

    const double max_dt = cfg.max_dt > 0.0 ? cfg.max_dt : t_end / 1000.0;
    double h = std::min(max_dt, 0.1 / k1.cwiseAbs().maxCoeff());
    detail::PiController controller;
    long long steps = 0;
    int loss_rejects = 0;

    while (t < t_end) {
        if (++steps > cfg.max_steps)
            throw Error(ErrorCode::StepUnderflow, "step budget exhausted at t = " + std::to_string(t));
        const bool last = std::min(h, max_dt) >= t_end - t;
        const double step = last ? t_end - t : std::min(h, max_dt);
        if (step < 1e-14 * std::max(t, 1.0)) {
            if (loss_rejects > 0)
                throw Error(ErrorCode::Diverged, "loss increases for every step at t = " + std::to_string(t));
            throw Error(ErrorCode::StepUnderflow, "step size underflow at t = " + std::to_string(t));
        }

        detail::RkResult res = detail::dopri5_step(field, zeta, k1, step);
        const double err = detail::error_norm(res.err, zeta, res.y, cfg.abs_tol, cfg.rel_tol);
        if (!(err <= 1.0)) {
            h = step * (std::isfinite(err) ? controller.reject(err) : 0.2);
            ++traj.rejected_steps;
            continue;
        }
        const Vector beta_new = beta_from_zeta(res.y, log_alpha, &saturated);
        const double moved = (beta_new - beta).cwiseAbs().maxCoeff();
        const double allowed =
            cfg.sample_rel * std::max(beta_new.cwiseAbs().maxCoeff(), beta.cwiseAbs().maxCoeff()) +
            cfg.sample_abs;
        if (moved > allowed) {
            h = step * std::max(0.1, 0.9 * allowed / moved);
            ++traj.rejected_steps;
            continue;
        }
        const double new_loss = loss(data, beta_new);
        if (!std::isfinite(new_loss))
            throw Error(ErrorCode::Diverged, "non-finite loss at t = " + std::to_string(t));
        if (new_loss > current_loss * (1.0 + cfg.loss_slack) + 1e-300) {
            h = step * 0.5;
            ++loss_rejects;
            ++traj.rejected_steps;
            continue;
        }

        const double fac = controller.accept(err);
        loss_rejects = 0;
        integral += (res.y - zeta) / rate;
        zeta = res.y;
        beta = beta_new;
        k1 = res.f_end;
        current_loss = new_loss;
        t = last ? t_end : t + step;
        h = step * fac;

        traj.times.push_back(t);
        traj.zeta.push_back(zeta);
        traj.beta.push_back(beta);
        traj.loss.push_back(current_loss);
        traj.grad_integral.push_back(integral);
    }
    traj.saturated = saturated;
    return traj;
}

double ArcLength::time_at(double tau_query) const {
    if (tau.empty()) return 0.0;
    if (tau_query <= tau.front()) return t.front();
    if (tau_query >= tau.back()) return t.back() + (tau_query - tau.back());
    const auto it = std::upper_bound(tau.begin(), tau.end(), tau_query);
    const auto k = static_cast<std::size_t>(it - tau.begin());
    const double w = (tau_query - tau[k - 1]) / (tau[k] - tau[k - 1]);
    return t[k - 1] + w * (t[k] - t[k - 1]);
}

ArcLength arc_length_reparametrize(const FlowTrajectory& traj) {
    ArcLength out;
    if (traj.times.empty()) return out;
    out.tau.push_back(traj.times.front());
    out.t.push_back(traj.times.front());
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double dt = traj.times[k] - traj.times[k - 1];
        if (!(dt > 0.0))
            throw Error(ErrorCode::NonMonotone, "sample times do not increase at index " + std::to_string(k));
        out.tau.push_back(out.tau.back() + dt + (traj.beta[k] - traj.beta[k - 1]).norm());
        out.t.push_back(traj.times[k]);
    }
    return out;
}

int count_jumps(const FlowTrajectory& traj, double factor) {
    const std::size_t m = traj.times.size();
    if (m < 2) return 0;
    double length = 0.0;
    for (std::size_t k = 1; k < m; ++k) length += (traj.beta[k] - traj.beta[k - 1]).norm();
    const double duration = traj.times.back() - traj.times.front();
    if (length == 0.0 || duration <= 0.0) return 0;
    const double threshold = factor * length / duration;
    int jumps = 0;
    bool inside = false;
    for (std::size_t k = 1; k < m; ++k) {
        const double speed = (traj.beta[k] - traj.beta[k - 1]).norm() / (traj.times[k] - traj.times[k - 1]);
        const bool fast = speed > threshold;
        if (fast && !inside) ++jumps;
        inside = fast;
    }
    return jumps;
}

}  // namespace saddleflow
