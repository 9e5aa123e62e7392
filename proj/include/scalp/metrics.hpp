#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "scalp/types.hpp"

namespace scalp {

/// A ground truth segmentation is carried in the same structure as a
/// superpixel decomposition.
using GroundTruth = LabelMap;

struct BoundaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;

    BoundaryMask() = default;
    BoundaryMask(int w, int h) : width(w), height(h) {
        mask.assign(static_cast<std::size_t>(w) * h, 0);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool at(int x, int y) const { return mask[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { mask[index(x, y)] = v ? 1 : 0; }
};

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct MetricReport {
    struct PerGt {
        double br = 0.0;
        double asa = 0.0;
        double ue = 0.0;
    };

    double br = 0.0;
    double asa = 0.0;
    double ue = 0.0;
    double co = 0.0;
    std::vector<PerGt> per_gt;
};

/// A pixel is a boundary pixel iff one of its in-bounds 4-neighbors carries a
/// different label. Image-border pixels get no free boundary status.
inline BoundaryMask extract_boundaries(const LabelMap& map) {
    BoundaryMask out(map.width, map.height);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const std::int32_t l = map.at(x, y);
            const bool b = (x > 0 && map.at(x - 1, y) != l) ||
                           (x + 1 < map.width && map.at(x + 1, y) != l) ||
                           (y > 0 && map.at(x, y - 1) != l) ||
                           (y + 1 < map.height && map.at(x, y + 1) != l);
            if (b)
                out.set(x, y);
        }
    }
    return out;
}

namespace detail {

// Offsets (dx,dy) with Euclidean norm strictly below epsilon.
inline std::vector<std::pair<int, int>> disk_offsets(double epsilon) {
    std::vector<std::pair<int, int>> out;
    const int r = static_cast<int>(std::ceil(epsilon));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy < epsilon * epsilon)
                out.emplace_back(dx, dy);
    return out;
}

inline void check_same_dims(int w1, int h1, int w2, int h2) {
    if (w1 != w2 || h1 != h2)
        throw ScalpError(ErrorKind::DimensionMismatch, "map dimensions do not match");
}

// Contingency counts between two label maps: counts[s_label][g_label].
inline std::vector<std::vector<std::int64_t>> overlap_counts(const LabelMap& s,
                                                             const GroundTruth& g) {
    check_same_dims(s.width, s.height, g.width, g.height);
    std::vector<std::vector<std::int64_t>> counts(s.k, std::vector<std::int64_t>(g.k, 0));
    for (std::size_t i = 0; i < s.labels.size(); ++i)
        ++counts[s.labels[i]][g.labels[i]];
    return counts;
}

} // namespace detail

/// Fraction of ground-truth boundary pixels with a decomposition boundary
/// pixel strictly closer than epsilon (Euclidean).
inline double boundary_recall(const BoundaryMask& s, const BoundaryMask& g, double epsilon) {
    detail::check_same_dims(s.width, s.height, g.width, g.height);
    std::int64_t total = 0, matched = 0;
    const auto offsets = detail::disk_offsets(epsilon);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            if (!g.at(x, y))
                continue;
            ++total;
            for (const auto& [dx, dy] : offsets) {
                const int qx = x + dx, qy = y + dy;
                if (in_bounds(qx, qy, s.width, s.height) && s.at(qx, qy)) {
                    ++matched;
                    break;
                }
            }
        }
    }
    if (total == 0)
        throw ScalpError(ErrorKind::EmptyGroundTruthBoundary,
                         "ground truth has no boundary pixels");
    return static_cast<double>(matched) / static_cast<double>(total);
}

/// Achievable segmentation accuracy: every superpixel votes for its best
/// overlapping ground-truth region.
inline double asa(const LabelMap& s, const GroundTruth& g) {
    const auto counts = detail::overlap_counts(s, g);
    std::int64_t sum = 0;
    for (const auto& row : counts)
        sum += *std::max_element(row.begin(), row.end());
    return static_cast<double>(sum) / static_cast<double>(s.labels.size());
}

/// Undersegmentation error: pixels leaking outside each ground-truth region a
/// superpixel touches, normalized by the pixel count.
inline double undersegmentation_error(const LabelMap& s, const GroundTruth& g) {
    const auto counts = detail::overlap_counts(s, g);
    std::vector<std::int64_t> sp_size(s.k, 0);
    for (std::size_t i = 0; i < s.labels.size(); ++i)
        ++sp_size[s.labels[i]];
    std::int64_t sum = 0;
    for (int k = 0; k < s.k; ++k)
        for (int i = 0; i < g.k; ++i)
            if (counts[k][i] > 0)
                sum += sp_size[k] - counts[k][i];
    return static_cast<double>(sum) / static_cast<double>(s.labels.size());
}

/// Area-weighted isoperimetric quotient. Perimeter counts the unit edges a
/// member pixel shares with a differently-labeled 4-neighbor or the image
/// border; exact square superpixels score pi/4.
inline double compactness(const LabelMap& s) {
    std::vector<std::int64_t> area(s.k, 0), perimeter(s.k, 0);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const std::int32_t l = s.at(x, y);
            ++area[l];
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int d = 0; d < 4; ++d)
                if (!in_bounds(nx[d], ny[d], s.width, s.height) || s.at(nx[d], ny[d]) != l)
                    ++perimeter[l];
        }
    }
    double sum = 0.0;
    for (int k = 0; k < s.k; ++k) {
        if (area[k] == 0)
            continue;
        const double a = static_cast<double>(area[k]);
        const double p = static_cast<double>(perimeter[k]);
        sum += 4.0 * std::numbers::pi * a * a / (p * p);
    }
    return sum / static_cast<double>(s.labels.size());
}

/// Per-pixel mean of the decompositions' boundary masks.
inline ContourMap average_boundary_map(const std::vector<LabelMap>& maps) {
    if (maps.empty())
        throw ScalpError(ErrorKind::DimensionMismatch, "no label maps given");
    ContourMap out(maps[0].width, maps[0].height, 0.0);
    std::vector<std::int32_t> hits(out.size(), 0);
    for (const LabelMap& m : maps) {
        detail::check_same_dims(m.width, m.height, out.width, out.height);
        const BoundaryMask b = extract_boundaries(m);
        for (std::size_t i = 0; i < hits.size(); ++i)
            hits[i] += b.mask[i] ? 1 : 0;
    }
    for (std::size_t i = 0; i < hits.size(); ++i)
        out.values[i] = static_cast<double>(hits[i]) / static_cast<double>(maps.size());
    return out;
}

inline double f_measure(double p, double r) {
    if (p == 0.0 && r == 0.0)
        return 0.0;
    return 2.0 * p * r / (p + r);
}

/// Precision/recall of a boundary confidence map against one or more ground
/// truths, swept over the given ascending thresholds. Matching reuses the
/// strict epsilon = 2 convention. An empty prediction scores P = 1, R = 0.
inline std::vector<PrPoint> pr_curve(const ContourMap& confidence,
                                     const std::vector<GroundTruth>& gts,
                                     const std::vector<double>& thresholds,
                                     double epsilon = 2.0) {
    const int w = confidence.width;
    const int h = confidence.height;
    const auto offsets = detail::disk_offsets(epsilon);

    // Pixels close to any ground-truth boundary; threshold-independent.
    std::vector<std::uint8_t> near_gt(confidence.size(), 0);
    // Per ground truth: the max confidence inside each boundary pixel's disk.
    // A boundary pixel is recalled at threshold t iff that max is >= t.
    std::vector<std::vector<double>> disk_max;
    for (const GroundTruth& g : gts) {
        detail::check_same_dims(g.width, g.height, w, h);
        const BoundaryMask b = extract_boundaries(g);
        std::vector<double> maxima;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!b.at(x, y))
                    continue;
                double m = 0.0;
                bool any = false;
                for (const auto& [dx, dy] : offsets) {
                    const int qx = x + dx, qy = y + dy;
                    if (!in_bounds(qx, qy, w, h))
                        continue;
                    near_gt[confidence.index(qx, qy)] = 1;
                    m = std::max(m, confidence.at(qx, qy));
                    any = true;
                }
                maxima.push_back(any ? m : -1.0);
            }
        }
        if (!maxima.empty())
            disk_max.push_back(std::move(maxima));
    }

    std::vector<PrPoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        PrPoint pt;
        pt.threshold = t;
        std::int64_t pred = 0, good = 0;
        for (std::size_t i = 0; i < confidence.size(); ++i) {
            if (confidence.values[i] >= t) {
                ++pred;
                good += near_gt[i];
            }
        }
        pt.precision = pred == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(pred);
        double recall_sum = 0.0;
        for (const auto& maxima : disk_max) {
            std::int64_t hit = 0;
            for (double m : maxima)
                hit += m >= t ? 1 : 0;
            recall_sum += static_cast<double>(hit) / static_cast<double>(maxima.size());
        }
        pt.recall = disk_max.empty() ? 0.0 : recall_sum / static_cast<double>(disk_max.size());
        out.push_back(pt);
    }
    return out;
}

inline double max_f_measure(const std::vector<PrPoint>& curve) {
    double best = 0.0;
    for (const PrPoint& p : curve)
        best = std::max(best, f_measure(p.precision, p.recall));
    return best;
}

/// 99 evenly spaced thresholds strictly inside (0,1).
inline std::vector<double> default_thresholds() {
    std::vector<double> out;
    out.reserve(99);
    for (int i = 1; i <= 99; ++i)
        out.push_back(i / 100.0);
    return out;
}

/// Geometric ladder of superpixel counts from lo to hi inclusive.
inline std::vector<int> scale_ladder(int lo, int hi, int n) {
    if (lo < 1 || hi < lo || n < 1)
        throw_out_of_range("scales", "need 1 <= lo <= hi and n >= 1");
    std::vector<int> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    const double ratio = static_cast<double>(hi) / lo;
    for (int j = 0; j < n; ++j)
        out.push_back(static_cast<int>(std::llround(lo * std::pow(ratio, static_cast<double>(j) / (n - 1)))));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// BR/ASA/UE averaged over the ground truths, plus the map's compactness.
inline MetricReport compute_metrics(const LabelMap& s, const std::vector<GroundTruth>& gts,
                                    double epsilon = 2.0) {
    MetricReport report;
    report.co = compactness(s);
    if (gts.empty())
        return report;
    const BoundaryMask sb = extract_boundaries(s);
    for (const GroundTruth& g : gts) {
        MetricReport::PerGt row;
        row.br = boundary_recall(sb, extract_boundaries(g), epsilon);
        row.asa = asa(s, g);
        row.ue = undersegmentation_error(s, g);
        report.per_gt.push_back(row);
        report.br += row.br;
        report.asa += row.asa;
        report.ue += row.ue;
    }
    const double n = static_cast<double>(report.per_gt.size());
    report.br /= n;
    report.asa /= n;
    report.ue /= n;
    return report;
}

} // namespace scalp
