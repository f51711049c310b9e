#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "saddleflow/flow.hpp"

namespace saddleflow {

namespace {

// Points stored column-wise; segment k joins columns start[k] and end[k].
struct SegmentSoup {
    Matrix pts;
    std::vector<std::pair<Index, Index>> segs;
};

SegmentSoup flatten(const std::vector<Polyline>& lines) {
    Index count = 0;
    Index dim = -1;
    for (const auto& line : lines) {
        count += static_cast<Index>(line.size());
        for (const auto& p : line) {
            if (dim < 0) dim = p.size();
            if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "polyline points differ in length");
        }
    }
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "empty polyline set");
    SegmentSoup soup;
    soup.pts.resize(dim, count);
    Index col = 0;
    for (const auto& line : lines) {
        const Index first = col;
        for (const auto& p : line) soup.pts.col(col++) = p;
        if (line.size() == 1) soup.segs.emplace_back(first, first);
        for (Index k = first + 1; k < col; ++k) soup.segs.emplace_back(k - 1, k);
    }
    return soup;
}

double point_segment_sq(const double* p, const double* a, const double* b, Index dim) {
    double ab2 = 0.0;
    double dot = 0.0;
    for (Index i = 0; i < dim; ++i) {
        const double ab = b[i] - a[i];
        ab2 += ab * ab;
        dot += (p[i] - a[i]) * ab;
    }
    const double w = ab2 > 0.0 ? std::clamp(dot / ab2, 0.0, 1.0) : 0.0;
    double dist2 = 0.0;
    for (Index i = 0; i < dim; ++i) {
        const double diff = p[i] - (a[i] + w * (b[i] - a[i]));
        dist2 += diff * diff;
    }
    return dist2;
}

double distance_to(const Vector& p, const SegmentSoup& soup) {
    const Index dim = soup.pts.rows();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s, e] : soup.segs)
        best = std::min(best, point_segment_sq(p.data(), soup.pts.col(s).data(), soup.pts.col(e).data(), dim));
    return std::sqrt(best);
}

// Distance to one segment is convex along a line, so on [p, q] the distance to
// B never exceeds min over segments S of max(d(p, S), d(q, S)). This is exact
// when a single segment of B covers the piece (e.g. identical polylines).
double cover_bound(const Vector& p, const Vector& q, const SegmentSoup& soup) {
    const Index dim = soup.pts.rows();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s, e] : soup.segs) {
        const double* a = soup.pts.col(s).data();
        const double* b = soup.pts.col(e).data();
        best = std::min(best, std::max(point_segment_sq(p.data(), a, b, dim), point_segment_sq(q.data(), a, b, dim)));
    }
    return std::sqrt(best);
}

// sup over A of dist(., B), refining A's segments until the better of the
// Lipschitz bound (d_p + d_q + |pq|) / 2 and cover_bound no longer exceeds the
// running maximum by more than tol.
double directed(const SegmentSoup& a, const SegmentSoup& b, double floor, double rel) {
    std::vector<double> vertex_dist(static_cast<std::size_t>(a.pts.cols()));
    double best = 0.0;
    for (Index k = 0; k < a.pts.cols(); ++k) {
        vertex_dist[static_cast<std::size_t>(k)] = distance_to(a.pts.col(k), b);
        best = std::max(best, vertex_dist[static_cast<std::size_t>(k)]);
    }
    struct Piece {
        Vector p, q;
        double dp, dq;
    };
    std::vector<Piece> stack;
    for (const auto& [s, e] : a.segs) {
        if (s == e) continue;
        stack.push_back({a.pts.col(s), a.pts.col(e), vertex_dist[static_cast<std::size_t>(s)],
                         vertex_dist[static_cast<std::size_t>(e)]});
        while (!stack.empty()) {
            Piece piece = std::move(stack.back());
            stack.pop_back();
            const double len = (piece.q - piece.p).norm();
            const double tol = std::max(rel * best, floor);
            if (len <= tol || 0.5 * (piece.dp + piece.dq + len) <= best + tol) continue;
            if (cover_bound(piece.p, piece.q, b) <= best + tol) continue;
            Vector mid = 0.5 * (piece.p + piece.q);
            const double dm = distance_to(mid, b);
            best = std::max(best, dm);
            stack.push_back({piece.p, mid, piece.dp, dm});
            stack.push_back({std::move(mid), std::move(piece.q), dm, piece.dq});
        }
    }
    return best;
}

}  // namespace

double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
    const SegmentSoup sa = flatten(a);
    const SegmentSoup sb = flatten(b);
    if (sa.pts.rows() != sb.pts.rows())
        throw Error(ErrorCode::DimensionMismatch, "polyline sets live in different dimensions");
    Matrix all(sa.pts.rows(), sa.pts.cols() + sb.pts.cols());
    all << sa.pts, sb.pts;
    const double diameter = (all.rowwise().maxCoeff() - all.rowwise().minCoeff()).norm();
    const double floor = 1e-12 * std::max(diameter, 1e-300);
    constexpr double rel = 1e-4;
    return std::max(directed(sa, sb, floor, rel), directed(sb, sa, floor, rel));
}

}  // namespace saddleflow
