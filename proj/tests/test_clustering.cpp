#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "scalp/clustering.hpp"

using namespace scalp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LabImage random_lab(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> ul(0.0, 100.0);
    std::uniform_real_distribution<double> uab(-40.0, 40.0);
    LabImage img(w, h);
    for (auto& p : img.pixels) {
        p.l = ul(rng);
        p.a = uab(rng);
        p.b = uab(rng);
    }
    return img;
}

ContourMap random_contour(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ContourMap map(w, h);
    for (auto& v : map.values)
        v = u(rng);
    return map;
}

// Number of 4-connected regions in a label map (flood-fill oracle).
int count_regions(const LabelMap& map) {
    std::vector<char> seen(map.size(), 0);
    int regions = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < map.size(); ++s) {
        if (seen[s])
            continue;
        ++regions;
        seen[s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(p % map.width);
            const int y = static_cast<int>(p / map.width);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int d = 0; d < 4; ++d) {
                if (!in_bounds(nx[d], ny[d], map.width, map.height))
                    continue;
                const std::size_t q = map.index(nx[d], ny[d]);
                if (!seen[q] && map.labels[q] == map.labels[p]) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    return regions;
}

bool labels_connected(const LabelMap& map) {
    const int regions = count_regions(map);
    std::set<std::int32_t> present(map.labels.begin(), map.labels.end());
    return regions == static_cast<int>(present.size());
}

Cluster make_cluster(int id, double l, double a, double b, double cx, double cy,
                     std::int64_t size = 1) {
    Cluster c;
    c.id = id;
    c.l = l;
    c.a = a;
    c.b = b;
    c.cx = cx;
    c.cy = cy;
    c.size = size;
    return c;
}

} // namespace

TEST_CASE("init_grid partitions a 10x10 image into exact 5x5 blocks") {
    LabImage img(10, 10, {50.0, 0.0, 0.0});
    auto [clusters, labels] = init_grid(img, 4);
    REQUIRE(clusters.size() == 4);
    REQUIRE(labels.k == 4);
    for (const Cluster& c : clusters)
        CHECK(c.size == 25);
    CHECK(clusters[0].cx == 2.0);
    CHECK(clusters[0].cy == 2.0);
    CHECK(clusters[1].cx == 7.0);
    CHECK(clusters[1].cy == 2.0);
    CHECK(clusters[2].cx == 2.0);
    CHECK(clusters[2].cy == 7.0);
    CHECK(clusters[3].cx == 7.0);
    CHECK(clusters[3].cy == 7.0);
    CHECK(labels.at(0, 0) == 0);
    CHECK(labels.at(9, 0) == 1);
    CHECK(labels.at(0, 9) == 2);
    CHECK(labels.at(9, 9) == 3);
}

TEST_CASE("init_grid actual count follows the ceil rule at BSD scale") {
    LabImage img(321, 481);
    auto [clusters, labels] = init_grid(img, 200);
    CHECK(clusters.size() == 216); // 12 x 18 grid
    CHECK(labels.k == 216);
    // Full coverage with in-range labels.
    for (std::int32_t l : labels.labels) {
        CHECK(l >= 0);
        CHECK(l < 216);
    }
}

TEST_CASE("init_grid handles the degenerate 1x1 image") {
    LabImage img(1, 1, {10.0, 1.0, -1.0});
    auto [clusters, labels] = init_grid(img, 1);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].cx == 0.0);
    CHECK(clusters[0].cy == 0.0);
    CHECK(clusters[0].size == 1);
    CHECK(labels.at(0, 0) == 0);
}

TEST_CASE("init_grid rejects a bad k") {
    LabImage img(4, 4);
    CHECK_THROWS_AS(init_grid(img, 0), ScalpError);
    CHECK_THROWS_AS(init_grid(img, 17), ScalpError);
}

TEST_CASE("init_grid block means equal a from-scratch recomputation") {
    std::mt19937 rng(3);
    LabImage img = random_lab(13, 9, rng);
    auto [clusters, labels] = init_grid(img, 6);
    std::vector<Cluster> rec = clusters;
    update_clusters(labels, img, rec);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK_THAT(clusters[i].l, WithinRel(rec[i].l, 1e-9));
        CHECK_THAT(clusters[i].cx, WithinRel(rec[i].cx, 1e-9));
        CHECK_THAT(clusters[i].cy, WithinRel(rec[i].cy, 1e-9));
        CHECK(clusters[i].size == rec[i].size);
    }
}

TEST_CASE("point_color_dist is the squared CIELab distance") {
    const Cluster c = make_cluster(0, 53.0, 4.0, 0.0, 0.0, 0.0);
    CHECK(point_color_dist({53.0, 4.0, 0.0}, c) == 0.0);
    CHECK(point_color_dist({50.0, 0.0, 0.0}, c) == 25.0);
    // Symmetry of the squared difference.
    const Cluster swapped = make_cluster(0, 50.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(point_color_dist({53.0, 4.0, 0.0}, swapped) ==
          point_color_dist({50.0, 0.0, 0.0}, c));
}

TEST_CASE("spatial_dist is the squared Euclidean distance") {
    const Cluster c = make_cluster(0, 0, 0, 0, 0.0, 0.0);
    CHECK(spatial_dist({0, 0}, c) == 0.0);
    CHECK(spatial_dist({3, 4}, c) == 25.0);
    const Cluster shifted = make_cluster(0, 0, 0, 0, 2.0, 2.0);
    CHECK(spatial_dist({5, 6}, shifted) == spatial_dist({3, 4}, c));
}

TEST_CASE("path_color_dist blends point and path-mean distances") {
    LabImage img(4, 1);
    img.at(0, 0) = {10.0, 0.0, 0.0};
    img.at(1, 0) = {50.0 + std::sqrt(2.0), 0.0, 0.0}; // d_c = 2
    img.at(2, 0) = {52.0, 0.0, 0.0};                  // d_c = 4
    const Cluster c = make_cluster(0, 50.0, 0.0, 0.0, 2.0, 0.0);
    LinearPath path;
    path.pixels = {{1, 0}, {2, 0}};
    const LabPixel p{50.0 + std::sqrt(10.0), 0.0, 0.0}; // d_c(p) = 10

    SECTION("lambda = 1 collapses to the point distance") {
        CHECK_THAT(path_color_dist(p, c, path, img, 1.0),
                   WithinRel(point_color_dist(p, c), 1e-15));
    }
    SECTION("lambda = 0.5 gives the stated convex combination") {
        CHECK_THAT(path_color_dist(p, c, path, img, 0.5), WithinRel(6.5, 1e-12));
    }
    SECTION("constant-color image makes the blend trivial") {
        LabImage flat(4, 1, {30.0, 5.0, -5.0});
        const Cluster fc = make_cluster(0, 20.0, 5.0, -5.0, 2.0, 0.0);
        const LabPixel fp = flat.at(0, 0);
        for (double lambda : {0.0, 0.25, 0.5, 1.0})
            CHECK_THAT(path_color_dist(fp, fc, path, flat, lambda),
                       WithinRel(point_color_dist(fp, fc), 1e-12));
    }
}

TEST_CASE("contour_weight follows the stated exponential form") {
    LinearPath path;
    path.pixels = {{0, 0}};
    ContourMap zero(3, 1, 0.0);
    CHECK(contour_weight(path, zero, 8.0, 0.25) == 1.0);

    ContourMap any(3, 1, 0.7);
    CHECK(contour_weight(path, any, 0.0, 0.25) == 1.0);

    ContourMap half(3, 1, 0.5);
    const double expected = 1.0 + 2.0 * (1.0 - std::exp(-4.0));
    CHECK_THAT(contour_weight(path, half, 2.0, 0.25), WithinRel(expected, 1e-12));
    CHECK_THAT(contour_weight(path, half, 2.0, 0.25), WithinAbs(2.9634, 5e-5));

    // Range bound over random paths.
    std::mt19937 rng(11);
    ContourMap rnd = random_contour(6, 6, rng);
    LinearPath longer;
    longer.pixels = {{0, 0}, {1, 1}, {2, 1}, {3, 2}};
    for (double gamma : {0.0, 1.0, 7.5}) {
        const double wgt = contour_weight(longer, rnd, gamma, 0.25);
        CHECK(wgt >= 1.0);
        CHECK(wgt <= 1.0 + gamma);
    }
}

TEST_CASE("total_dist reduces to the plain distance at lambda=1, gamma=0") {
    LabImage img(4, 4, {50.0, 0.0, 0.0});
    const Cluster c = make_cluster(0, 55.0, 0.0, 0.0, 0.0, 0.0);
    LinearPath path;
    path.pixels = {{0, 0}};
    ScalpParams params;
    params.k = 1;
    params.lambda = 1.0;
    params.gamma_factor = 0.0;
    params.m = 10.0;
    // d_c = 25, d_s = 100, m = 10, r = 10 -> 25 + 100 * (100/100) = 125
    const double d = total_dist(img.at(0, 0), {6, 8}, c, path, img, nullptr, params, 10.0);
    CHECK_THAT(d, WithinRel(125.0, 1e-12));
}

TEST_CASE("total_dist vanishes for a pixel at the barycenter of a flat image") {
    LabImage img(4, 4, {50.0, 0.0, 0.0});
    const Cluster c = make_cluster(0, 50.0, 0.0, 0.0, 2.0, 2.0);
    ContourMap zero(4, 4, 0.0);
    LinearPath path;
    path.pixels = {{2, 2}};
    ScalpParams params;
    params.k = 4;
    const double d = total_dist(img.at(2, 2), {2, 2}, c, path, img, &zero, params, 2.0);
    CHECK(d == 0.0);
}

TEST_CASE("raising contour intensity strictly increases total_dist") {
    LabImage img(4, 1, {50.0, 0.0, 0.0});
    const Cluster c = make_cluster(0, 60.0, 0.0, 0.0, 3.0, 0.0);
    LinearPath path;
    path.pixels = {{1, 0}, {2, 0}};
    ScalpParams params;
    params.k = 2;
    params.lambda = 0.5;
    ContourMap low(4, 1, 0.0);
    ContourMap high(4, 1, 1.0);
    const double d_low = total_dist(img.at(0, 0), {0, 0}, c, path, img, &low, params, 2.0);
    const double d_high = total_dist(img.at(0, 0), {0, 0}, c, path, img, &high, params, 2.0);
    CHECK(d_high > d_low);
}

TEST_CASE("assignment_pass with one whole-image cluster labels everything 0") {
    LabImage img(6, 6, {42.0, 0.0, 0.0});
    AssignmentState state;
    auto [clusters, labels] = init_grid(img, 1);
    REQUIRE(clusters.size() == 1);
    state.clusters = std::move(clusters);
    state.labels = std::move(labels);
    state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
    state.effective_centers = {{state.clusters[0].cx, state.clusters[0].cy}};
    ScalpParams params;
    params.k = 1;
    assignment_pass(state, img, nullptr, params);
    for (std::int32_t l : state.labels.labels)
        CHECK(l == 0);
    for (double d : state.best_dist)
        CHECK(d < std::numeric_limits<double>::infinity());
}

TEST_CASE("assignment_pass rejects inconsistent state") {
    LabImage img(6, 6, {42.0, 0.0, 0.0});
    AssignmentState state;
    auto [clusters, labels] = init_grid(img, 4);
    state.clusters = std::move(clusters);
    state.labels = std::move(labels);
    state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
    state.effective_centers = {{0.0, 0.0}}; // too short
    ScalpParams params;
    params.k = 4;
    CHECK_THROWS_AS(assignment_pass(state, img, nullptr, params), ScalpError);
}

TEST_CASE("assignment_pass follows the color split on a two-tone image") {
    // 8x4, colors split at column 3: block boundary sits at column 4, so the
    // first pass must move the boundary one column left.
    LabImage img(8, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 8; ++x)
            img.at(x, y) = {x < 3 ? 30.0 : 80.0, 0.0, 0.0};
    AssignmentState state;
    auto [clusters, labels] = init_grid(img, 2);
    REQUIRE(clusters.size() == 2);
    state.clusters = std::move(clusters);
    state.labels = std::move(labels);
    state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
    state.effective_centers = {{state.clusters[0].cx, state.clusters[0].cy},
                               {state.clusters[1].cx, state.clusters[1].cy}};
    ScalpParams params;
    params.k = 2;
    params.lambda = 1.0;
    params.gamma_factor = 0.0;
    assignment_pass(state, img, nullptr, params);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(state.labels.at(x, y) == (x < 3 ? 0 : 1));
}

TEST_CASE("assignment_pass ties keep the lowest cluster id") {
    LabImage img(5, 5, {50.0, 0.0, 0.0});
    AssignmentState state;
    state.labels = LabelMap(5, 5, 2, 0);
    state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
    state.clusters = {make_cluster(0, 50.0, 0.0, 0.0, 1.0, 2.0, 5),
                      make_cluster(1, 50.0, 0.0, 0.0, 3.0, 2.0, 5)};
    state.effective_centers = {{1.0, 2.0}, {3.0, 2.0}};
    ScalpParams params;
    params.k = 1; // r = 5 so both windows cover the whole image
    assignment_pass(state, img, nullptr, params);
    // Column 2 is exactly equidistant: the first writer must win.
    for (int y = 0; y < 5; ++y) {
        CHECK(state.labels.at(2, y) == 0);
        CHECK(state.labels.at(0, y) == 0);
        CHECK(state.labels.at(4, y) == 1);
    }
}

TEST_CASE("pixels outside every window keep their label and infinite distance") {
    LabImage img(9, 1, {10.0, 0.0, 0.0});
    AssignmentState state;
    state.labels = LabelMap(9, 1, 2, 1);
    state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
    state.clusters = {make_cluster(0, 10.0, 0.0, 0.0, 0.0, 0.0, 3),
                      make_cluster(1, 0.0, 0.0, 0.0, 0.0, 0.0, 0)};
    state.effective_centers = {{0.0, 0.0}, {0.0, 0.0}};
    ScalpParams params;
    params.k = 9; // r = 1 -> window radius 1 around x = 0
    assignment_pass(state, img, nullptr, params);
    CHECK(state.labels.at(0, 0) == 0);
    CHECK(state.labels.at(1, 0) == 0);
    for (int x = 2; x < 9; ++x) {
        CHECK(state.labels.at(x, 0) == 1);
        CHECK(state.best_dist[x] == std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("assignment_pass agrees with the exhaustive per-pixel argmin oracle") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const int w = 8 + static_cast<int>(rng() % 9);
        const int h = 8 + static_cast<int>(rng() % 9);
        LabImage img = random_lab(w, h, rng);
        ContourMap contour = random_contour(w, h, rng);
        ScalpParams params;
        params.k = 3 + static_cast<int>(rng() % 6);
        params.lambda = (trial % 3 == 0) ? 1.0 : 0.5;
        params.gamma_factor = (trial % 4 == 0) ? 0.0 : 2.0;
        const ContourMap* cptr = (trial % 2 == 0) ? &contour : nullptr;

        AssignmentState state;
        auto [clusters, labels] = init_grid(img, params.k);
        state.clusters = std::move(clusters);
        state.labels = std::move(labels);
        state.best_dist.assign(img.size(), std::numeric_limits<double>::infinity());
        for (const Cluster& c : state.clusters)
            state.effective_centers.push_back({c.cx, c.cy});
        const LabelMap initial = state.labels;

        assignment_pass(state, img, cptr, params);

        const double r = grid_interval(w, h, params.k);
        const int radius = static_cast<int>(std::ceil(r));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double best = std::numeric_limits<double>::infinity();
                std::int32_t best_k = -1;
                for (const Cluster& c : state.clusters) {
                    if (c.size == 0)
                        continue;
                    const auto [ex, ey] = state.effective_centers[c.id];
                    const int wx = static_cast<int>(std::llround(ex));
                    const int wy = static_cast<int>(std::llround(ey));
                    if (std::abs(x - wx) > radius || std::abs(y - wy) > radius)
                        continue;
                    const LinearPath path = linear_path({x, y}, static_cast<double>(wx),
                                                        static_cast<double>(wy), w, h);
                    const double d =
                        total_dist(img.at(x, y), {x, y}, c, path, img, cptr, params, r);
                    // Engine never stores a distance above any covering D.
                    CHECK(state.best_dist[img.index(x, y)] <= d);
                    if (d < best) {
                        best = d;
                        best_k = c.id;
                    }
                }
                if (best_k < 0) {
                    CHECK(state.labels.at(x, y) == initial.at(x, y));
                    CHECK(state.best_dist[img.index(x, y)] ==
                          std::numeric_limits<double>::infinity());
                } else {
                    CHECK(state.labels.at(x, y) == best_k);
                    CHECK(state.best_dist[img.index(x, y)] == best);
                }
            }
        }
    }
}

TEST_CASE("update_clusters recomputes means exactly") {
    SECTION("single-pixel superpixel") {
        LabImage img(2, 1);
        img.at(0, 0) = {10.0, 1.0, 2.0};
        img.at(1, 0) = {90.0, -3.0, 4.0};
        LabelMap labels(2, 1, 2, 0);
        labels.at(1, 0) = 1;
        std::vector<Cluster> clusters(2);
        clusters[0].id = 0;
        clusters[1].id = 1;
        update_clusters(labels, img, clusters);
        CHECK(clusters[1].l == 90.0);
        CHECK(clusters[1].a == -3.0);
        CHECK(clusters[1].b == 4.0);
        CHECK(clusters[1].cx == 1.0);
        CHECK(clusters[1].cy == 0.0);
        CHECK(clusters[1].size == 1);
    }

    SECTION("2x2 block at the origin has barycenter (0.5, 0.5)") {
        LabImage img(4, 4, {20.0, 0.0, 0.0});
        LabelMap labels(4, 4, 2, 1);
        labels.at(0, 0) = 0;
        labels.at(1, 0) = 0;
        labels.at(0, 1) = 0;
        labels.at(1, 1) = 0;
        std::vector<Cluster> clusters(2);
        clusters[0].id = 0;
        clusters[1].id = 1;
        update_clusters(labels, img, clusters);
        CHECK(clusters[0].cx == 0.5);
        CHECK(clusters[0].cy == 0.5);
        CHECK(clusters[0].size == 4);
    }

    SECTION("random labelings match a brute-force accumulation oracle") {
        std::mt19937 rng(23);
        for (int trial = 0; trial < 10; ++trial) {
            LabImage img = random_lab(16, 16, rng);
            const int k = 4;
            LabelMap labels(16, 16, k, 0);
            for (auto& l : labels.labels)
                l = static_cast<std::int32_t>(rng() % k);
            std::vector<Cluster> clusters(k);
            for (int i = 0; i < k; ++i)
                clusters[i].id = i;
            update_clusters(labels, img, clusters);
            for (int i = 0; i < k; ++i) {
                double sl = 0, sx = 0, sy = 0;
                std::int64_t n = 0;
                for (int y = 0; y < 16; ++y)
                    for (int x = 0; x < 16; ++x)
                        if (labels.at(x, y) == i) {
                            sl += img.at(x, y).l;
                            sx += x;
                            sy += y;
                            ++n;
                        }
                REQUIRE(clusters[i].size == n);
                if (n > 0) {
                    CHECK_THAT(clusters[i].l, WithinRel(sl / n, 1e-9));
                    CHECK_THAT(clusters[i].cx + 1.0, WithinRel(sx / n + 1.0, 1e-9));
                    CHECK_THAT(clusters[i].cy + 1.0, WithinRel(sy / n + 1.0, 1e-9));
                }
            }
        }
    }

    SECTION("empty clusters keep their previous center and mean") {
        LabImage img(3, 3, {60.0, 0.0, 0.0});
        LabelMap labels(3, 3, 2, 0); // label 1 never appears
        std::vector<Cluster> clusters(2);
        clusters[1] = make_cluster(1, 12.0, 3.0, -4.0, 2.5, 1.5, 9);
        update_clusters(labels, img, clusters);
        CHECK(clusters[1].size == 0);
        CHECK(clusters[1].l == 12.0);
        CHECK(clusters[1].cx == 2.5);
        CHECK(clusters[1].cy == 1.5);
    }
}

TEST_CASE("enforce_connectivity leaves connected maps unchanged") {
    LabelMap map(6, 4, 2, 0);
    for (int y = 0; y < 4; ++y)
        for (int x = 3; x < 6; ++x)
            map.at(x, y) = 1;
    const LabelMap out = enforce_connectivity(map);
    CHECK(out == map);
}

TEST_CASE("enforce_connectivity merges an orphan into its only neighbor") {
    // Label 0: a 9-pixel block plus an isolated corner pixel surrounded by 1.
    LabelMap map(6, 6, 2, 1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            map.at(x, y) = 0;
    map.at(5, 5) = 0;
    const LabelMap out = enforce_connectivity(map);
    CHECK(out.at(5, 5) == 1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            CHECK(out.at(x, y) == 0);
    CHECK(labels_connected(out));
}

TEST_CASE("enforce_connectivity resolves a pixel checkerboard") {
    LabelMap map(4, 4, 2, 0);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            map.at(x, y) = (x + y) % 2;
    const LabelMap out = enforce_connectivity(map);
    CHECK(out.size() == map.size());
    CHECK(count_regions(out) <= 2);
    CHECK(labels_connected(out));
}

TEST_CASE("enforce_connectivity is idempotent and label-preserving on random maps") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 4 + static_cast<int>(rng() % 10);
        const int h = 4 + static_cast<int>(rng() % 10);
        const int k = 2 + static_cast<int>(rng() % 4);
        LabelMap map(w, h, k, 0);
        for (auto& l : map.labels)
            l = static_cast<std::int32_t>(rng() % k);
        const LabelMap out = enforce_connectivity(map);
        CHECK(labels_connected(out));
        for (std::int32_t l : out.labels) {
            CHECK(l >= 0);
            CHECK(l < k);
        }
        CHECK(enforce_connectivity(out) == out);
    }
}

TEST_CASE("decompose keeps the grid on a constant image") {
    RgbImage rgb(20, 20, {90, 130, 170});
    ScalpParams params;
    params.k = 4;
    const Decomposition dec = decompose(rgb, nullptr, params);
    auto [clusters, grid] = init_grid(srgb_to_lab(rgb), 4);
    CHECK(dec.labels == grid);
    for (const Cluster& c : dec.clusters)
        CHECK(c.size == 100);
}

TEST_CASE("decompose with iterations = 0 returns the connectivity-enforced grid") {
    std::mt19937 rng(41);
    LabImage img = random_lab(17, 11, rng);
    ScalpParams params;
    params.k = 6;
    params.iterations = 0;
    const Decomposition dec = decompose(img, nullptr, params);
    auto [clusters, grid] = init_grid(img, 6);
    CHECK(dec.labels == enforce_connectivity(grid));
    CHECK(dec.labels == grid); // grid blocks are already connected
}

TEST_CASE("decompose output covers every pixel with an in-range label") {
    std::mt19937 rng(43);
    LabImage img = random_lab(24, 18, rng);
    ScalpParams params;
    params.k = 7;
    const Decomposition dec = decompose(img, nullptr, params);
    REQUIRE(dec.labels.k == static_cast<int>(dec.clusters.size()));
    std::vector<std::int64_t> count(dec.labels.k, 0);
    for (std::int32_t l : dec.labels.labels) {
        REQUIRE(l >= 0);
        REQUIRE(l < dec.labels.k);
        ++count[l];
    }
    CHECK(labels_connected(dec.labels));
    // Returned clusters describe the final map.
    for (const Cluster& c : dec.clusters)
        CHECK(c.size == count[c.id]);
}

TEST_CASE("contour maps are irrelevant when gamma is zero") {
    std::mt19937 rng(47);
    LabImage img = random_lab(20, 20, rng);
    ContourMap noisy = random_contour(20, 20, rng);
    ContourMap zero(20, 20, 0.0);
    ScalpParams params;
    params.k = 5;
    params.gamma_factor = 0.0;
    const Decomposition a = decompose(img, &noisy, params);
    const Decomposition b = decompose(img, &zero, params);
    const Decomposition c = decompose(img, nullptr, params);
    CHECK(a.labels == b.labels);
    CHECK(a.labels == c.labels);
}

TEST_CASE("decompose is bit-identical across worker counts") {
    std::mt19937 rng(53);
    LabImage img = random_lab(26, 22, rng);
    ContourMap contour = random_contour(26, 22, rng);
    ScalpParams params;
    params.k = 8;
    const Decomposition t1 = decompose(img, &contour, params, 1);
    const Decomposition t2 = decompose(img, &contour, params, 2);
    const Decomposition t8 = decompose(img, &contour, params, 8);
    CHECK(t1.labels == t2.labels);
    CHECK(t1.labels == t8.labels);
}

TEST_CASE("cluster means returned by decompose match a from-scratch recomputation") {
    std::mt19937 rng(59);
    LabImage img = random_lab(19, 16, rng);
    ScalpParams params;
    params.k = 5;
    const Decomposition dec = decompose(img, nullptr, params);
    std::vector<Cluster> rec = dec.clusters;
    update_clusters(dec.labels, img, rec);
    for (std::size_t i = 0; i < rec.size(); ++i) {
        CHECK(dec.clusters[i].size == rec[i].size);
        if (rec[i].size > 0) {
            CHECK_THAT(dec.clusters[i].l, WithinRel(rec[i].l, 1e-9));
            CHECK_THAT(dec.clusters[i].a + 100.0, WithinRel(rec[i].a + 100.0, 1e-9));
            CHECK_THAT(dec.clusters[i].b + 100.0, WithinRel(rec[i].b + 100.0, 1e-9));
        }
    }
}
