#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include "scalp/color.hpp"
#include "scalp/path.hpp"
#include "scalp/types.hpp"

namespace scalp {

/// Working state of the iterative clustering: per-pixel best distance so far,
/// the label map under construction, the cluster list, and the effective
/// center each cluster exposes for windowing and path computation.
struct AssignmentState {
    std::vector<double> best_dist;
    LabelMap labels;
    std::vector<Cluster> clusters;
    std::vector<std::pair<double, double>> effective_centers;

    void reset_distances() {
        std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::infinity());
    }
};

struct Decomposition {
    LabelMap labels;
    std::vector<Cluster> clusters;
};

/// Squared CIELab distance between a pixel and a cluster mean.
inline double point_color_dist(const LabPixel& p, const Cluster& c) {
    const double dl = p.l - c.l;
    const double da = p.a - c.a;
    const double db = p.b - c.b;
    return dl * dl + da * da + db * db;
}

/// Squared spatial distance between a pixel and the cluster barycenter.
inline double spatial_dist(PixelPos p, const Cluster& c) {
    const double dx = p.x - c.cx;
    const double dy = p.y - c.cy;
    return dx * dx + dy * dy;
}

namespace detail {

inline double combine_path_color(double point_dist, double path_sum, std::size_t path_len,
                                 double lambda) {
    return lambda * point_dist + (1.0 - lambda) * (path_sum / static_cast<double>(path_len));
}

inline double combine_contour(double weight_sum, std::size_t path_len, double gamma) {
    return 1.0 + gamma * (weight_sum / static_cast<double>(path_len));
}

inline double contour_term(double c, double sigma) {
    return 1.0 - std::exp(-(c * c) / (sigma * sigma));
}

} // namespace detail

/// Color distance blending the pixel's own distance with the mean distance of
/// the path pixels to the cluster color.
inline double path_color_dist(const LabPixel& p, const Cluster& c, const LinearPath& path,
                              const LabImage& lab, double lambda) {
    double sum = 0.0;
    for (const PixelPos& q : path.pixels)
        sum += point_color_dist(lab.at(q.x, q.y), c);
    return detail::combine_path_color(point_color_dist(p, c), sum, path.pixels.size(), lambda);
}

/// Multiplicative penalty accumulated from contour intensity along the path.
/// Always in [1, 1 + gamma].
inline double contour_weight(const LinearPath& path, const ContourMap& contour, double gamma,
                             double sigma) {
    double sum = 0.0;
    for (const PixelPos& q : path.pixels)
        sum += detail::contour_term(contour.at(q.x, q.y), sigma);
    return detail::combine_contour(sum, path.pixels.size(), gamma);
}

/// Full assignment distance: path-weighted color distance scaled by the
/// contour penalty, plus the compactness-weighted spatial distance. With
/// lambda = 1 and gamma = 0 this is the plain color + m^2/r^2 spatial rule.
inline double total_dist(const LabPixel& p_feat, PixelPos p_pos, const Cluster& c,
                         const LinearPath& path, const LabImage& lab,
                         const ContourMap* contour, const ScalpParams& params, double r) {
    const double gamma = params.gamma_factor * r;
    double dc;
    if (params.lambda == 1.0)
        dc = point_color_dist(p_feat, c);
    else
        dc = path_color_dist(p_feat, c, path, lab, params.lambda);
    double weight = 1.0;
    if (gamma > 0.0 && contour != nullptr)
        weight = contour_weight(path, *contour, gamma, params.sigma);
    const double spatial_scale = (params.m * params.m) / (r * r);
    return dc * weight + spatial_dist(p_pos, c) * spatial_scale;
}

/// Regular-grid initialization: ceil(w/r) x ceil(h/r) rectangular blocks, the
/// last row/column absorbing the remainder. Returns one cluster per block and
/// the matching block label map; the actual cluster count may differ from the
/// requested k.
inline std::pair<std::vector<Cluster>, LabelMap> init_grid(const LabImage& lab, int k) {
    const std::int64_t n = static_cast<std::int64_t>(lab.width) * lab.height;
    if (k < 1 || k > n)
        throw_out_of_range("k", "must be in [1, pixel count]");
    const double r = grid_interval(lab.width, lab.height, k);

    const int gw = static_cast<int>(std::ceil(lab.width / r));
    const int gh = static_cast<int>(std::ceil(lab.height / r));
    std::vector<int> xs(gw + 1), ys(gh + 1);
    for (int i = 0; i <= gw; ++i)
        xs[i] = std::min(lab.width, static_cast<int>(std::floor(i * r)));
    for (int j = 0; j <= gh; ++j)
        ys[j] = std::min(lab.height, static_cast<int>(std::floor(j * r)));
    xs[gw] = lab.width;
    ys[gh] = lab.height;

    LabelMap labels(lab.width, lab.height, gw * gh);
    std::vector<Cluster> clusters(static_cast<std::size_t>(gw) * gh);
    for (int by = 0; by < gh; ++by) {
        for (int bx = 0; bx < gw; ++bx) {
            const int id = by * gw + bx;
            Cluster& c = clusters[id];
            c.id = id;
            double sl = 0.0, sa = 0.0, sb = 0.0, sx = 0.0, sy = 0.0;
            for (int y = ys[by]; y < ys[by + 1]; ++y) {
                for (int x = xs[bx]; x < xs[bx + 1]; ++x) {
                    labels.at(x, y) = id;
                    const LabPixel& px = lab.at(x, y);
                    sl += px.l;
                    sa += px.a;
                    sb += px.b;
                    sx += x;
                    sy += y;
                    ++c.size;
                }
            }
            c.l = sl / c.size;
            c.a = sa / c.size;
            c.b = sb / c.size;
            c.cx = sx / c.size;
            c.cy = sy / c.size;
        }
    }
    return {std::move(clusters), std::move(labels)};
}

/// Recomputes every cluster's mean color and barycenter from its current
/// member pixels. Clusters that lost all pixels keep their previous center
/// and mean and are flagged with size = 0.
inline void update_clusters(const LabelMap& labels, const LabImage& lab,
                            std::vector<Cluster>& clusters) {
    struct Acc {
        double l = 0.0, a = 0.0, b = 0.0, x = 0.0, y = 0.0;
        std::int64_t n = 0;
    };
    std::vector<Acc> acc(clusters.size());
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            Acc& a = acc[labels.at(x, y)];
            const LabPixel& px = lab.at(x, y);
            a.l += px.l;
            a.a += px.a;
            a.b += px.b;
            a.x += x;
            a.y += y;
            ++a.n;
        }
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        Cluster& c = clusters[i];
        c.size = acc[i].n;
        if (acc[i].n == 0)
            continue;
        c.l = acc[i].l / acc[i].n;
        c.a = acc[i].a / acc[i].n;
        c.b = acc[i].b / acc[i].n;
        c.cx = acc[i].x / acc[i].n;
        c.cy = acc[i].y / acc[i].n;
    }
}

namespace detail {

template <typename F>
inline void parallel_rows(int height, int threads, F&& body) {
    if (threads <= 1) {
        body(0, height);
        return;
    }
    threads = std::min(threads, height);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int y0 = static_cast<int>(static_cast<std::int64_t>(height) * t / threads);
        const int y1 = static_cast<int>(static_cast<std::int64_t>(height) * (t + 1) / threads);
        pool.emplace_back([&body, y0, y1] { body(y0, y1); });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace detail

/// One windowed assignment sweep. Every pixel inside a cluster's search window
/// (side 2*ceil(r)+1, centered on the rounded effective center) is tested and
/// relabeled when its distance strictly improves. Candidate clusters are
/// visited in ascending id order, so ties keep the lowest id regardless of the
/// worker count.
inline void assignment_pass(AssignmentState& state, const LabImage& lab,
                            const ContourMap* contour, const ScalpParams& params,
                            int threads = 1) {
    const int w = lab.width;
    const int h = lab.height;
    if (state.effective_centers.size() != state.clusters.size() ||
        state.best_dist.size() != lab.size() || state.labels.width != w ||
        state.labels.height != h)
        throw ScalpError(ErrorKind::DimensionMismatch, "inconsistent assignment state");
    const double r = grid_interval(w, h, params.k);
    const double gamma = params.gamma_factor * r;
    const double spatial_scale = (params.m * params.m) / (r * r);
    const int radius = static_cast<int>(std::ceil(r));
    const bool walk_paths = params.lambda < 1.0 || (gamma > 0.0 && contour != nullptr);
    const bool use_contour = gamma > 0.0 && contour != nullptr;

    // Per-pixel contour term, so the exp is evaluated once per pixel per pass.
    std::vector<double> contour_term;
    if (use_contour) {
        contour_term.resize(contour->values.size());
        for (std::size_t i = 0; i < contour_term.size(); ++i)
            contour_term[i] = detail::contour_term(contour->values[i], params.sigma);
    }

    struct Window {
        int cx, cy;     // rounded effective center
        int x0, x1, y0, y1;
    };
    const int nk = static_cast<int>(state.clusters.size());
    std::vector<Window> windows(nk);
    for (int k = 0; k < nk; ++k) {
        const auto [ex, ey] = state.effective_centers[k];
        Window& win = windows[k];
        win.cx = static_cast<int>(round_half_away(ex));
        win.cy = static_cast<int>(round_half_away(ey));
        win.x0 = std::max(0, win.cx - radius);
        win.x1 = std::min(w - 1, win.cx + radius);
        win.y0 = std::max(0, win.cy - radius);
        win.y1 = std::min(h - 1, win.cy + radius);
    }

    // Coarse tile index over cluster windows so each pixel only scans nearby
    // clusters. Lists are built in ascending id order.
    const int tile = std::max(1, radius);
    const int tx = (w + tile - 1) / tile;
    const int ty = (h + tile - 1) / tile;
    std::vector<std::vector<std::int32_t>> tiles(static_cast<std::size_t>(tx) * ty);
    for (int k = 0; k < nk; ++k) {
        if (state.clusters[k].size == 0)
            continue;
        const Window& win = windows[k];
        if (win.x0 > win.x1 || win.y0 > win.y1)
            continue;
        for (int tj = win.y0 / tile; tj <= win.y1 / tile; ++tj)
            for (int ti = win.x0 / tile; ti <= win.x1 / tile; ++ti)
                tiles[static_cast<std::size_t>(tj) * tx + ti].push_back(k);
    }

    detail::parallel_rows(h, threads, [&](int row0, int row1) {
        for (int y = row0; y < row1; ++y) {
            const int tj = y / tile;
            for (int x = 0; x < w; ++x) {
                const std::size_t pi = static_cast<std::size_t>(y) * w + x;
                const LabPixel& pf = lab.pixels[pi];
                double best = state.best_dist[pi];
                std::int32_t best_k = state.labels.labels[pi];
                bool improved = false;
                for (std::int32_t k : tiles[static_cast<std::size_t>(tj) * tx + x / tile]) {
                    const Window& win = windows[k];
                    if (x < win.x0 || x > win.x1 || y < win.y0 || y > win.y1)
                        continue;
                    const Cluster& c = state.clusters[k];
                    double dc;
                    double weight = 1.0;
                    if (!walk_paths) {
                        dc = point_color_dist(pf, c);
                    } else {
                        double sum_dc = 0.0;
                        double sum_w = 0.0;
                        std::size_t len = 0;
                        for_each_path_pixel(x, y, win.cx, win.cy, [&](int qx, int qy) {
                            const std::size_t qi = static_cast<std::size_t>(qy) * w + qx;
                            sum_dc += point_color_dist(lab.pixels[qi], c);
                            if (use_contour)
                                sum_w += contour_term[qi];
                            ++len;
                        });
                        if (params.lambda == 1.0)
                            dc = point_color_dist(pf, c);
                        else
                            dc = detail::combine_path_color(point_color_dist(pf, c), sum_dc,
                                                            len, params.lambda);
                        if (use_contour)
                            weight = detail::combine_contour(sum_w, len, gamma);
                    }
                    const double d =
                        dc * weight + spatial_dist({x, y}, c) * spatial_scale;
                    if (d < best) {
                        best = d;
                        best_k = k;
                        improved = true;
                    }
                }
                if (improved) {
                    state.best_dist[pi] = best;
                    state.labels.labels[pi] = best_k;
                }
            }
        }
    });
}

namespace detail {

struct Component {
    std::int32_t label = 0;
    std::size_t first = 0;       // smallest row-major pixel index
    std::vector<std::size_t> pixels;
};

inline std::vector<Component> connected_components(const LabelMap& map) {
    const int w = map.width;
    const int h = map.height;
    std::vector<std::int32_t> comp(map.size(), -1);
    std::vector<Component> comps;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < map.size(); ++start) {
        if (comp[start] >= 0)
            continue;
        const std::int32_t label = map.labels[start];
        const std::int32_t id = static_cast<std::int32_t>(comps.size());
        Component c;
        c.label = label;
        c.first = start;
        comp[start] = id;
        stack.assign(1, start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            c.pixels.push_back(p);
            const int x = static_cast<int>(p % w);
            const int y = static_cast<int>(p / w);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int i = 0; i < 4; ++i) {
                if (!in_bounds(nx[i], ny[i], w, h))
                    continue;
                const std::size_t q = static_cast<std::size_t>(ny[i]) * w + nx[i];
                if (comp[q] < 0 && map.labels[q] == label) {
                    comp[q] = id;
                    stack.push_back(q);
                }
            }
        }
        comps.push_back(std::move(c));
    }
    return comps;
}

} // namespace detail

/// Makes every label's pixel set 4-connected. Per label the largest component
/// keeps the label (ties: smallest first pixel); every other component is
/// relabeled to the adjacent label sharing the longest border, smallest label
/// id on ties. Repeats until no fragment remains.
inline LabelMap enforce_connectivity(const LabelMap& input) {
    LabelMap map = input;
    const int w = map.width;
    const int h = map.height;
    std::vector<std::uint8_t> own(map.size(), 0);
    while (true) {
        auto comps = detail::connected_components(map);

        // Largest component per label; earliest first pixel wins ties.
        std::vector<std::int32_t> keeper(map.k, -1);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::int32_t l = comps[i].label;
            if (keeper[l] < 0 || comps[i].pixels.size() > comps[keeper[l]].pixels.size())
                keeper[l] = static_cast<std::int32_t>(i);
        }

        bool changed = false;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (keeper[comps[i].label] == static_cast<std::int32_t>(i))
                continue;
            // Border length (4-adjacency edge count) against each current label.
            for (std::size_t p : comps[i].pixels)
                own[p] = 1;
            std::vector<std::int64_t> border;
            const std::int32_t own_label = map.labels[comps[i].pixels.front()];
            for (std::size_t p : comps[i].pixels) {
                const int x = static_cast<int>(p % w);
                const int y = static_cast<int>(p / w);
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int d = 0; d < 4; ++d) {
                    if (!in_bounds(nx[d], ny[d], w, h))
                        continue;
                    const std::size_t q = static_cast<std::size_t>(ny[d]) * w + nx[d];
                    if (own[q])
                        continue;
                    const std::int32_t ql = map.labels[q];
                    if (static_cast<std::size_t>(ql) >= border.size())
                        border.resize(ql + 1, 0);
                    ++border[ql];
                }
            }
            std::int32_t target = -1;
            std::int64_t best = 0;
            for (std::int32_t l = 0; l < static_cast<std::int32_t>(border.size()); ++l) {
                if (border[l] > best) {
                    best = border[l];
                    target = l;
                }
            }
            for (std::size_t p : comps[i].pixels)
                own[p] = 0;
            if (target < 0 || target == own_label)
                continue; // absorbed by an earlier merge this round
            for (std::size_t p : comps[i].pixels)
                map.labels[p] = target;
            changed = true;
        }
        if (!changed)
            return map;
    }
}

/// Full decomposition of a CIELab image: grid init, iterated windowed
/// assignment + cluster update + center projection, connectivity enforcement,
/// and a final cluster update describing the returned map. A null contour is
/// treated as an all-zero prior.
inline Decomposition decompose(const LabImage& lab, const ContourMap* contour,
                               const ScalpParams& params, int threads = 1) {
    validate_params(params, lab.width, lab.height);
    if (contour != nullptr && (contour->width != lab.width || contour->height != lab.height))
        throw ScalpError(ErrorKind::DimensionMismatch,
                         "contour map dimensions do not match the image");

    AssignmentState state;
    auto [clusters, labels] = init_grid(lab, params.k);
    state.clusters = std::move(clusters);
    state.labels = std::move(labels);
    state.best_dist.resize(lab.size());
    state.effective_centers.resize(state.clusters.size());
    for (std::size_t i = 0; i < state.clusters.size(); ++i)
        state.effective_centers[i] = {state.clusters[i].cx, state.clusters[i].cy};

    for (int it = 0; it < params.iterations; ++it) {
        state.reset_distances();
        assignment_pass(state, lab, contour, params, threads);
        update_clusters(state.labels, lab, state.clusters);
        for (std::size_t i = 0; i < state.clusters.size(); ++i) {
            const Cluster& c = state.clusters[i];
            if (c.size == 0)
                continue;
            const int rx = static_cast<int>(round_half_away(c.cx));
            const int ry = static_cast<int>(round_half_away(c.cy));
            if (in_bounds(rx, ry, lab.width, lab.height) && state.labels.at(rx, ry) == c.id)
                state.effective_centers[i] = {c.cx, c.cy};
            else
                state.effective_centers[i] = project_center(c, state.labels);
        }
    }

    Decomposition out;
    out.labels = enforce_connectivity(state.labels);
    out.clusters = std::move(state.clusters);
    update_clusters(out.labels, lab, out.clusters);
    return out;
}

/// Convenience overload converting from sRGB first.
inline Decomposition decompose(const RgbImage& rgb, const ContourMap* contour,
                               const ScalpParams& params, int threads = 1) {
    return decompose(srgb_to_lab(rgb), contour, params, threads);
}

} // namespace scalp
