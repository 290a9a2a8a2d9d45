#pragma once

/**
 * @file contour.hpp
 * @brief Contour tracing over edge maps and Ramer-Douglas-Peucker polyline
 *        simplification.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "laminascope/morphology.hpp"

namespace laminascope {

struct PixelPoint {
    int x = 0;
    int y = 0;
    bool operator==(const PixelPoint&) const = default;
};

struct Polyline {
    std::vector<PixelPoint> points;
    bool closed = false;
};

namespace contour_detail {

// Moore neighbourhood, clockwise starting west.
inline constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

inline double point_segment_distance(const PixelPoint& p, const PixelPoint& a,
                                     const PixelPoint& b) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double apx = p.x - a.x, apy = p.y - a.y;
    const double len2 = abx * abx + aby * aby;
    if (len2 == 0.0) return std::hypot(apx, apy);
    const double t = std::clamp((apx * abx + apy * aby) / len2, 0.0, 1.0);
    const double cx = a.x + t * abx - p.x;
    const double cy = a.y + t * aby - p.y;
    return std::hypot(cx, cy);
}

// Recursive RDP over points[first..last], marking kept indices.
inline void rdp_mark(const std::vector<PixelPoint>& pts, size_t first, size_t last,
                     double eps, std::vector<uint8_t>& keep) {
    if (last <= first + 1) return;
    double max_d = -1.0;
    size_t max_i = first;
    for (size_t i = first + 1; i < last; ++i) {
        const double d = point_segment_distance(pts[i], pts[first], pts[last]);
        if (d > max_d) {
            max_d = d;
            max_i = i;
        }
    }
    if (max_d > eps) {
        keep[max_i] = 1;
        rdp_mark(pts, first, max_i, eps, keep);
        rdp_mark(pts, max_i, last, eps, keep);
    }
}

inline std::vector<PixelPoint> rdp_open(const std::vector<PixelPoint>& pts, double eps) {
    std::vector<uint8_t> keep(pts.size(), 0);
    keep.front() = keep.back() = 1;
    rdp_mark(pts, 0, pts.size() - 1, eps, keep);
    std::vector<PixelPoint> out;
    for (size_t i = 0; i < pts.size(); ++i)
        if (keep[i]) out.push_back(pts[i]);
    return out;
}

}  // namespace contour_detail

/**
 * 8-connected border following over the true pixels of an edge map.
 * Each connected component contributes one contour (traced once, starting at
 * its topmost-leftmost pixel); contours shorter than 8 points are discarded.
 */
inline std::vector<Polyline> trace_contours(const BinaryImage& edges) {
    using namespace contour_detail;
    const int w = edges.width, h = edges.height;
    std::vector<int> label(static_cast<size_t>(w) * h, -1);
    std::vector<Polyline> contours;

    auto idx = [w](int x, int y) { return static_cast<size_t>(y) * w + x; };

    int next_label = 0;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!edges.at(sx, sy) || label[idx(sx, sy)] >= 0) continue;

            // flood-fill the component so it is traced exactly once
            const int comp = next_label++;
            std::vector<PixelPoint> stack{{sx, sy}};
            label[idx(sx, sy)] = comp;
            while (!stack.empty()) {
                const PixelPoint p = stack.back();
                stack.pop_back();
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d], ny = p.y + kDy[d];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    if (!edges.at(nx, ny) || label[idx(nx, ny)] >= 0) continue;
                    label[idx(nx, ny)] = comp;
                    stack.push_back({nx, ny});
                }
            }

            // Moore border following from the topmost-leftmost pixel, entered
            // from the west; stops when the first move is about to repeat.
            Polyline c;
            c.closed = true;
            const PixelPoint start{sx, sy};
            PixelPoint cur = start;
            int back = 0;  // direction index pointing at the backtrack neighbour
            PixelPoint first_next{-1, -1};
            const size_t guard = 4 * edges.bits.size() + 16;

            c.points.push_back(start);
            while (c.points.size() < guard) {
                PixelPoint next{-1, -1};
                int next_back = back;
                for (int k = 1; k <= 8; ++k) {
                    const int d = (back + k) % 8;
                    const int nx = cur.x + kDx[d], ny = cur.y + kDy[d];
                    if (nx >= 0 && nx < w && ny >= 0 && ny < h && edges.at(nx, ny)) {
                        // new backtrack: the neighbour checked just before d,
                        // seen from the new pixel
                        const int prev = (d + 7) % 8;
                        const int bx = cur.x + kDx[prev] - nx;
                        const int by = cur.y + kDy[prev] - ny;
                        for (int m = 0; m < 8; ++m)
                            if (kDx[m] == bx && kDy[m] == by) next_back = m;
                        next = {nx, ny};
                        break;
                    }
                }
                if (next.x < 0) break;  // isolated pixel
                if (first_next.x < 0) {
                    first_next = next;
                } else if (cur == start && next == first_next) {
                    break;  // Jacob's stopping criterion
                }
                c.points.push_back(next);
                cur = next;
                back = next_back;
            }
            if (c.points.size() > 1 && c.points.back() == c.points.front()) c.points.pop_back();

            if (c.points.size() >= 8) contours.push_back(std::move(c));
        }
    }
    return contours;
}

/**
 * Ramer-Douglas-Peucker simplification: interior points are dropped when
 * they lie within eps of the anchor chord, otherwise the farthest point is
 * kept and both halves are simplified recursively. Endpoints are always
 * preserved; the output is an order-preserving subset of the input.
 *
 * Closed polylines are cut at the topmost-leftmost point, split at the point
 * farthest from it, and re-closed afterwards.
 */
inline Polyline rdp_simplify(const Polyline& p, double eps) {
    using namespace contour_detail;
    if (eps <= 0.0) throw std::invalid_argument("rdp_simplify: eps must be positive");
    if (p.points.size() < 2)
        throw std::invalid_argument("rdp_simplify: polyline needs at least 2 points");

    if (!p.closed) {
        Polyline out;
        out.closed = false;
        out.points = rdp_open(p.points, eps);
        return out;
    }

    // rotate so the topmost-leftmost point leads
    std::vector<PixelPoint> ring = p.points;
    const auto lead = std::min_element(
        ring.begin(), ring.end(), [](const PixelPoint& a, const PixelPoint& b) {
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
    std::rotate(ring.begin(), lead, ring.end());

    // split at the point farthest from the lead anchor
    size_t far_i = 1;
    double far_d = -1.0;
    for (size_t i = 1; i < ring.size(); ++i) {
        const double d = std::hypot(double(ring[i].x - ring[0].x),
                                    double(ring[i].y - ring[0].y));
        if (d > far_d) {
            far_d = d;
            far_i = i;
        }
    }

    std::vector<PixelPoint> half1(ring.begin(), ring.begin() + far_i + 1);
    std::vector<PixelPoint> half2(ring.begin() + far_i, ring.end());
    half2.push_back(ring.front());

    const auto s1 = rdp_open(half1, eps);
    const auto s2 = rdp_open(half2, eps);

    Polyline out;
    out.closed = true;
    out.points = s1;
    out.points.insert(out.points.end(), s2.begin() + 1, s2.end() - 1);
    return out;
}

/// Bresenham raster of one segment, including both endpoints.
inline void rasterize_segment(const PixelPoint& a, const PixelPoint& b,
                              std::vector<PixelPoint>& out) {
    int x = a.x, y = a.y;
    const int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    while (true) {
        out.push_back({x, y});
        if (x == b.x && y == b.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

/// Re-rasterizes a polyline into a deduplicated point set (for Hough voting).
inline std::vector<PixelPoint> rasterize_polyline(const Polyline& p) {
    std::vector<PixelPoint> pts;
    if (p.points.empty()) return pts;
    for (size_t i = 0; i + 1 < p.points.size(); ++i)
        rasterize_segment(p.points[i], p.points[i + 1], pts);
    if (p.closed && p.points.size() > 2)
        rasterize_segment(p.points.back(), p.points.front(), pts);

    std::sort(pts.begin(), pts.end(), [](const PixelPoint& a, const PixelPoint& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace laminascope
