#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "scalp/types.hpp"

namespace scalp {

/// Pixels on the straight-line path from a pixel toward a cluster center,
/// ordered p-side first. Excludes p itself, includes the center pixel; the
/// degenerate p == center case yields the single-element path {p}.
struct LinearPath {
    std::vector<PixelPos> pixels;

    std::size_t size() const { return pixels.size(); }
    bool empty() const { return pixels.empty(); }
};

/// Integer Bresenham walk from (x0,y0) to (x1,y1), both endpoints included,
/// traced in that orientation. Calls f(x, y) for every line pixel.
template <typename F>
inline void walk_line(int x0, int y0, int x1, int y1, F&& f) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
        f(x, y);
        if (x == x1 && y == y1)
            break;
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

/// Walks the linear-path contract from p toward the integer center (cx,cy):
/// p itself is skipped, the center pixel is emitted last, and the degenerate
/// p == center case emits just p. Calls f(x, y) per path pixel.
template <typename F>
inline void for_each_path_pixel(int px, int py, int cx, int cy, F&& f) {
    if (px == cx && py == cy) {
        f(px, py);
        return;
    }
    bool first = true;
    walk_line(px, py, cx, cy, [&](int x, int y) {
        if (first) {
            first = false;
            return;
        }
        f(x, y);
    });
}

inline long round_half_away(double v) { return std::llround(v); }

/// Bresenham path from p to the rounded center, within a width x height image.
inline LinearPath linear_path(PixelPos p, double center_x, double center_y, int width,
                              int height) {
    const int cx = static_cast<int>(round_half_away(center_x));
    const int cy = static_cast<int>(round_half_away(center_y));
    if (!in_bounds(p.x, p.y, width, height) || !in_bounds(cx, cy, width, height))
        throw ScalpError(ErrorKind::OutOfBounds, "linear_path endpoint outside the image");
    LinearPath path;
    path.pixels.reserve(static_cast<std::size_t>(std::max(std::abs(cx - p.x), std::abs(cy - p.y))) + 1);
    for_each_path_pixel(p.x, p.y, cx, cy,
                        [&](int x, int y) { path.pixels.push_back({x, y}); });
    return path;
}

/// Effective center of a cluster: the barycenter when its rounded pixel still
/// carries the cluster's label, otherwise the member pixel nearest to the
/// barycenter (ties broken by smallest row-major index).
inline std::pair<double, double> project_center(const Cluster& cluster, const LabelMap& labels) {
    if (cluster.size <= 0)
        throw ScalpError(ErrorKind::EmptyCluster, "project_center on an empty cluster");
    const int rx = static_cast<int>(round_half_away(cluster.cx));
    const int ry = static_cast<int>(round_half_away(cluster.cy));
    if (in_bounds(rx, ry, labels.width, labels.height) && labels.at(rx, ry) == cluster.id)
        return {cluster.cx, cluster.cy};

    double best = std::numeric_limits<double>::infinity();
    int best_x = -1, best_y = -1;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            if (labels.at(x, y) != cluster.id)
                continue;
            const double dx = x - cluster.cx;
            const double dy = y - cluster.cy;
            const double d = dx * dx + dy * dy;
            if (d < best) {
                best = d;
                best_x = x;
                best_y = y;
            }
        }
    }
    if (best_x < 0)
        throw ScalpError(ErrorKind::EmptyCluster, "cluster has no member pixels in the label map");
    return {static_cast<double>(best_x), static_cast<double>(best_y)};
}

} // namespace scalp
