#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scalp/color.hpp"

using namespace scalp;
using Catch::Matchers::WithinAbs;

namespace {

// Scalar oracle: textbook sRGB -> XYZ(D65) -> Lab, written independently of
// the library pipeline.
void oracle_lab(int r8, int g8, int b8, double& L, double& a, double& b) {
    auto lin = [](double v) {
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    };
    const double r = lin(r8 / 255.0), g = lin(g8 / 255.0), bb = lin(b8 / 255.0);
    const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * bb;
    const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * bb;
    const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * bb;
    const double Xn = 0.95047, Yn = 1.0, Zn = 1.08883;
    auto f = [](double t) {
        return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0;
    };
    const double fx = f(X / Xn), fy = f(Y / Yn), fz = f(Z / Zn);
    L = 116.0 * fy - 16.0;
    a = 500.0 * (fx - fy);
    b = 200.0 * (fy - fz);
}

} // namespace

TEST_CASE("black and white hit the Lab anchors") {
    const LabPixel black = srgb_to_lab(Rgb8{0, 0, 0});
    CHECK_THAT(black.l, WithinAbs(0.0, 1e-9));
    CHECK_THAT(black.a, WithinAbs(0.0, 1e-9));
    CHECK_THAT(black.b, WithinAbs(0.0, 1e-9));

    const LabPixel white = srgb_to_lab(Rgb8{255, 255, 255});
    CHECK_THAT(white.l, WithinAbs(100.0, 1e-9));
    CHECK(std::abs(white.a) < 0.01);
    CHECK(std::abs(white.b) < 0.01);
}

TEST_CASE("mid gray lands near L = 50 on the neutral axis") {
    const LabPixel mid = srgb_to_lab(Rgb8{119, 119, 119});
    double L, a, b;
    oracle_lab(119, 119, 119, L, a, b);
    CHECK_THAT(mid.l, WithinAbs(L, 0.05));
    CHECK_THAT(mid.l, WithinAbs(50.0, 0.1));
    CHECK(std::abs(mid.a) < 0.01);
    CHECK(std::abs(mid.b) < 0.01);
}

TEST_CASE("library conversion tracks the scalar oracle on sampled colors") {
    for (int r = 0; r <= 255; r += 51) {
        for (int g = 0; g <= 255; g += 51) {
            for (int b = 0; b <= 255; b += 51) {
                const LabPixel got = srgb_to_lab(
                    Rgb8{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                         static_cast<std::uint8_t>(b)});
                double L, a, bb;
                oracle_lab(r, g, b, L, a, bb);
                CHECK_THAT(got.l, WithinAbs(L, 0.05));
                CHECK_THAT(got.a, WithinAbs(a, 0.05));
                CHECK_THAT(got.b, WithinAbs(bb, 0.05));
            }
        }
    }
}

TEST_CASE("neutral inputs stay neutral and L is monotone in gray level") {
    double prev = -1.0;
    for (int g = 0; g <= 255; ++g) {
        const LabPixel p =
            srgb_to_lab(Rgb8{static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(g),
                             static_cast<std::uint8_t>(g)});
        CHECK(std::abs(p.a) < 0.01);
        CHECK(std::abs(p.b) < 0.01);
        CHECK(p.l >= prev);
        CHECK(p.l >= 0.0);
        CHECK(p.l <= 100.0);
        prev = p.l;
    }
}

TEST_CASE("constant images convert to constant Lab images") {
    RgbImage img(5, 3, Rgb8{40, 90, 200});
    const LabImage lab = srgb_to_lab(img);
    REQUIRE(lab.width == 5);
    REQUIRE(lab.height == 3);
    for (const LabPixel& p : lab.pixels) {
        CHECK(p.l == lab.pixels[0].l);
        CHECK(p.a == lab.pixels[0].a);
        CHECK(p.b == lab.pixels[0].b);
    }
}
