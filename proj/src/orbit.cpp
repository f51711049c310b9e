#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dopri5.hpp"
#include "saddleflow/flow.hpp"

namespace saddleflow {

namespace {

double weighted_grad_norm(const Vector& beta, const Vector& grad) {
    return beta.cwiseAbs().cwiseProduct(grad).norm();
}

// Least squares on the clear support of beta, accepted when it is a critical
// point close to beta with no sign change. Coordinates that leave the support
// at a degenerate endpoint (e.g. an interpolating minimiser) decay only
// algebraically, so integrating them down to tol_stop is not practical.
std::optional<Vector> snap_to_critical(const Dataset& data, const Vector& beta) {
    const double ref = std::max(1.0, beta.cwiseAbs().maxCoeff());
    IndexSet support;
    for (Index i = 0; i < beta.size(); ++i)
        if (std::abs(beta(i)) > 1e-6 * ref) support.push_back(i);
    if (support.empty()) return std::nullopt;
    Vector snapped;
    try {
        snapped = support_least_squares(data, support);
    } catch (const Error&) {
        return std::nullopt;  // singular support: keep integrating
    }
    for (Index i = 0; i < snapped.size(); ++i)
        if (std::abs(snapped(i)) <= 1e-12 * ref) snapped(i) = 0.0;
    if (!critical_point_check(data, snapped, 1e-9 * data.grad_scale())) return std::nullopt;
    if ((snapped - beta).cwiseAbs().maxCoeff() >= 1e-4 * ref) return std::nullopt;
    if (((snapped.array() * beta.array()) < 0.0).any()) return std::nullopt;
    return snapped;
}

}  // namespace

Orbit heteroclinic_orbit(const Dataset& data, const Vector& saddle,
                         const std::vector<std::pair<Index, int>>& entering, const OrbitConfig& cfg) {
    if (saddle.size() != data.d())
        throw Error(ErrorCode::DimensionMismatch, "saddle has the wrong length");
    if (entering.empty()) throw Error(ErrorCode::InvalidArgument, "no entering coordinate");
    const double scale = data.grad_scale();
    if (!critical_point_check(data, saddle, 1e-8 * scale))
        throw Error(ErrorCode::InvalidArgument, "orbit must start at a critical point");

    const Matrix& gram = data.gram();
    const Vector& moment = data.moment();
    const Vector g0 = gram * saddle - moment;
    const double eps0 = cfg.eps0 > 0.0 ? cfg.eps0 : 1e-8 * std::max(1.0, saddle.cwiseAbs().maxCoeff());

    Vector beta = saddle;
    for (const auto& [coord, sign] : entering) {
        if (coord < 0 || coord >= data.d() || (sign != 1 && sign != -1))
            throw Error(ErrorCode::InvalidArgument, "bad entering coordinate");
        if (!(sign * -g0(coord) > 0.0))
            throw Error(ErrorCode::InvalidArgument,
                        "coordinate " + std::to_string(coord) + " does not descend in the given direction");
        beta(coord) += eps0 * sign;
    }

    auto field = [&](const Vector& b) -> Vector {
        return -(b.cwiseAbs().cwiseProduct(gram * b - moment));
    };

    Orbit orbit;
    orbit.points.push_back(saddle);
    double last_loss = loss(data, saddle);
    auto record = [&](const Vector& b) {
        const double l = loss(data, b);
        if (!(l < last_loss)) return;
        orbit.length += (b - orbit.points.back()).norm();
        orbit.points.push_back(b);
        last_loss = l;
    };
    record(beta);

    const double stop = cfg.tol_stop * scale;
    constexpr double rel_tol = 1e-10;
    constexpr double abs_tol = 1e-13;
    Vector k1 = field(beta);
    double h = 0.1 / std::max(g0.cwiseAbs().maxCoeff(), 1e-300);
    detail::PiController controller;
    long long steps = 0;

    const double near_critical = 1e-6 * scale;
    while (true) {
        const double wgn = weighted_grad_norm(beta, gram * beta - moment);
        if (wgn < stop) break;
        if (steps % 1000 == 0 && wgn < near_critical) {
            if (auto snapped = snap_to_critical(data, beta); snapped && loss(data, *snapped) < last_loss) {
                record(*snapped);
                return orbit;
            }
        }
        if (++steps > cfg.max_steps) throw Error(ErrorCode::Stalled, "orbit step budget exhausted");
        if (orbit.length > cfg.max_len)
            throw Error(ErrorCode::Stalled, "orbit longer than " + std::to_string(cfg.max_len));
        if (!(h > 1e-300)) throw Error(ErrorCode::Stalled, "orbit step size underflow");

        detail::RkResult res = detail::dopri5_step(field, beta, k1, h);
        const double ref = std::max(1.0, beta.cwiseAbs().maxCoeff());
        const double err = detail::error_norm(res.err, beta, res.y, abs_tol * ref, rel_tol);
        if (!(err <= 1.0)) {
            h *= std::isfinite(err) ? controller.reject(err) : 0.2;
            continue;
        }
        // The exact flow never changes a sign, and polyline points stay close.
        const bool flipped = ((res.y.array() * beta.array()) < 0.0).any();
        const double moved = (res.y - beta).cwiseAbs().maxCoeff();
        if (flipped || moved > 1e-2 * ref) {
            h *= 0.5;
            continue;
        }
        h *= controller.accept(err);
        beta = res.y;
        k1 = res.f_end;
        record(beta);
    }

    // Coordinates that decay towards zero are still O(tol_stop) away; end on
    // the exact critical point when the fit on the clear support is one.
    if (auto snapped = snap_to_critical(data, beta)) record(*snapped);
    return orbit;
}

std::vector<Polyline> HybridPath::graph() const {
    std::vector<Polyline> out;
    out.reserve(segments.size());
    for (const auto& seg : segments) out.push_back(seg.points);
    return out;
}

HybridPath build_hybrid_path(const Dataset& data, const SaddlePath& path, const OrbitConfig& cfg,
                             double match_tol) {
    HybridPath hybrid;
    double tau = 0.0;
    const int p = path.loops();
    for (int k = 0; k < p; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        HybridSegment plateau;
        plateau.kind = HybridSegment::Kind::Saddle;
        plateau.points = {path.saddles[kk]};
        plateau.tau_in = tau;
        tau += path.times[kk + 1] - path.times[kk];
        plateau.tau_out = tau;
        hybrid.segments.push_back(std::move(plateau));

        const HitEvent& hit = path.hits[kk];
        std::vector<std::pair<Index, int>> entering;
        for (std::size_t q = 0; q < hit.coords.size(); ++q) entering.emplace_back(hit.coords[q], hit.signs[q]);
        Orbit orbit = heteroclinic_orbit(data, path.saddles[kk], entering, cfg);

        const Vector& next = path.saddles[kk + 1];
        const double gap = (orbit.points.back() - next).cwiseAbs().maxCoeff();
        if (gap > match_tol * std::max(1.0, next.cwiseAbs().maxCoeff())) {
            throw Error(ErrorCode::SaddleMismatch, "orbit " + std::to_string(k) + " ends " + std::to_string(gap) +
                                                       " away from the next saddle");
        }
        HybridSegment seg;
        seg.kind = HybridSegment::Kind::Orbit;
        seg.points = std::move(orbit.points);
        seg.tau_in = tau;
        tau += orbit.length;
        seg.tau_out = tau;
        hybrid.total_length += orbit.length;
        hybrid.segments.push_back(std::move(seg));
    }
    HybridSegment last;
    last.kind = HybridSegment::Kind::Saddle;
    last.points = {path.saddles.back()};
    last.tau_in = tau;
    last.tau_out = std::numeric_limits<double>::infinity();
    hybrid.segments.push_back(std::move(last));
    return hybrid;
}

}  // namespace saddleflow
