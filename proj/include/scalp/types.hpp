#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scalp {

enum class ErrorKind {
    OutOfRange,
    DimensionMismatch,
    OutOfBounds,
    EmptyCluster,
    EmptyGroundTruthBoundary,
    Io,
    UnsupportedFormat,
    CorruptFile,
    RaggedCsv,
};

class ScalpError : public std::runtime_error {
public:
    ScalpError(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_out_of_range(const std::string& field, const std::string& detail) {
    throw ScalpError(ErrorKind::OutOfRange, "out of range: " + field + " (" + detail + ")");
}

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb8&) const = default;
};

/// 8-bit sRGB image, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb8> pixels;

    RgbImage() = default;
    RgbImage(int w, int h, Rgb8 fill = {}) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw_out_of_range("dimensions", "width and height must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    Rgb8& at(int x, int y) { return pixels[index(x, y)]; }
    const Rgb8& at(int x, int y) const { return pixels[index(x, y)]; }
    std::size_t size() const { return pixels.size(); }
};

struct LabPixel {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// CIELab image, row-major. L in [0,100].
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<LabPixel> pixels;

    LabImage() = default;
    LabImage(int w, int h, LabPixel fill = {}) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw_out_of_range("dimensions", "width and height must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    LabPixel& at(int x, int y) { return pixels[index(x, y)]; }
    const LabPixel& at(int x, int y) const { return pixels[index(x, y)]; }
    std::size_t size() const { return pixels.size(); }
};

/// 0-based pixel position, x = column, y = row.
struct PixelPos {
    int x = 0;
    int y = 0;

    bool operator==(const PixelPos&) const = default;
};

/// Running state of one superpixel: mean CIELab color and spatial barycenter.
struct Cluster {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    std::int64_t size = 0;
    int id = 0;
};

/// Per-pixel superpixel assignment. Labels are in [0, k).
struct LabelMap {
    int width = 0;
    int height = 0;
    int k = 0;
    std::vector<std::int32_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h, int num_labels, std::int32_t fill = 0)
        : width(w), height(h), k(num_labels) {
        if (w < 1 || h < 1)
            throw_out_of_range("dimensions", "width and height must be >= 1");
        labels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    std::int32_t& at(int x, int y) { return labels[index(x, y)]; }
    std::int32_t at(int x, int y) const { return labels[index(x, y)]; }
    std::size_t size() const { return labels.size(); }

    bool operator==(const LabelMap& o) const {
        return width == o.width && height == o.height && k == o.k && labels == o.labels;
    }
};

/// Soft contour prior, values in [0,1], row-major.
struct ContourMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ContourMap() = default;
    ContourMap(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw_out_of_range("dimensions", "width and height must be >= 1");
        values.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double& at(int x, int y) { return values[index(x, y)]; }
    double at(int x, int y) const { return values[index(x, y)]; }
    std::size_t size() const { return values.size(); }
};

struct ScalpParams {
    int k = 0;                  ///< requested superpixel count
    int iterations = 5;        ///< clustering passes
    double lambda = 0.5;       ///< point vs path color blend, in [0,1]
    double sigma = 0.25;       ///< contour sensitivity, > 0
    double gamma_factor = 2.0; ///< contour weight is gamma_factor * r
    double m = 10.0;           ///< compactness weight
};

/// Block size r derived from the pixel count and the requested superpixel count.
inline double grid_interval(int width, int height, int k) {
    return std::sqrt(static_cast<double>(width) * height / k);
}

inline bool in_bounds(int x, int y, int width, int height) {
    return x >= 0 && x < width && y >= 0 && y < height;
}

inline ScalpParams validate_params(const ScalpParams& params, int width, int height) {
    const std::int64_t n = static_cast<std::int64_t>(width) * height;
    if (width < 1 || height < 1)
        throw_out_of_range("dimensions", "width and height must be >= 1");
    if (params.k < 1)
        throw_out_of_range("k", "must be >= 1");
    if (params.k > n)
        throw ScalpError(ErrorKind::DimensionMismatch,
                         "k = " + std::to_string(params.k) + " exceeds pixel count " +
                             std::to_string(n));
    if (params.iterations < 0)
        throw_out_of_range("iterations", "must be >= 0");
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
        throw_out_of_range("lambda", "must be in [0,1]");
    if (!(params.sigma > 0.0))
        throw_out_of_range("sigma", "must be > 0");
    if (!(params.gamma_factor >= 0.0))
        throw_out_of_range("gamma_factor", "must be >= 0");
    if (!(params.m >= 0.0))
        throw_out_of_range("m", "must be >= 0");
    const double r = grid_interval(width, height, params.k);
    if (!std::isfinite(r) || r < 1.0)
        throw_out_of_range("k", "derived block size is not representable");
    return params;
}

} // namespace scalp
