#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "scalp/color.hpp"
#include "scalp/metrics.hpp"
#include "scalp/types.hpp"

namespace scalp::io {

struct DatasetEntry {
    std::string image;
    std::vector<std::string> ground_truths;
    std::string contour; // empty when absent
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScalpError(ErrorKind::Io, "cannot open " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline bool is_png(const std::vector<std::uint8_t>& data) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return data.size() >= 8 && std::memcmp(data.data(), sig, 8) == 0;
}

// --- PNM (P5/P6) ---

struct PnmHeader {
    char type = 0; // '5' or '6'
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

inline PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& data,
                                  const std::string& path) {
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
        throw ScalpError(ErrorKind::UnsupportedFormat, path + ": not a P5/P6 PNM file");
    PnmHeader h;
    h.type = static_cast<char>(data[1]);
    std::size_t pos = 2;
    int fields[3];
    for (int f = 0; f < 3; ++f) {
        // skip whitespace and '#' comments
        while (pos < data.size()) {
            if (std::isspace(data[pos])) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n')
                    ++pos;
            } else {
                break;
            }
        }
        if (pos >= data.size() || !std::isdigit(data[pos]))
            throw ScalpError(ErrorKind::CorruptFile, path + ": truncated PNM header");
        long v = 0;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos] - '0');
            if (v > 1 << 30)
                throw ScalpError(ErrorKind::CorruptFile, path + ": header value overflow");
            ++pos;
        }
        fields[f] = static_cast<int>(v);
    }
    if (pos >= data.size() || !std::isspace(data[pos]))
        throw ScalpError(ErrorKind::CorruptFile, path + ": malformed PNM header");
    ++pos; // single whitespace before raster
    h.width = fields[0];
    h.height = fields[1];
    h.maxval = fields[2];
    h.data_offset = pos;
    if (h.width < 1 || h.height < 1 || h.maxval < 1 || h.maxval > 65535)
        throw ScalpError(ErrorKind::CorruptFile, path + ": bad PNM dimensions");
    return h;
}

// --- PNG via libpng ---

struct PngImage {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    int channels = 0; // after transforms
    bool gray = false;
    std::vector<std::uint8_t> rows; // packed, big-endian for 16-bit
};

struct PngReadCtx {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + len > ctx->size)
        png_error(png, "unexpected end of file");
    std::memcpy(out, ctx->data + ctx->pos, len);
    ctx->pos += len;
}

// expand_to_rgb8: palette/gray/alpha are normalized to 8-bit RGB (16-bit input
// rejected). Without it, gray 8/16-bit data is returned as-is.
inline PngImage read_png(const std::vector<std::uint8_t>& data, const std::string& path,
                         bool expand_to_rgb8) {
    PngImage out;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw ScalpError(ErrorKind::Io, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ScalpError(ErrorKind::Io, "libpng init failed");
    }
    PngReadCtx ctx{data.data(), data.size(), 0};
    std::vector<png_bytep> row_ptrs;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ScalpError(ErrorKind::CorruptFile, path + ": corrupt PNG");
    }
    png_set_read_fn(png, &ctx, png_mem_read);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));

    if (expand_to_rgb8) {
        if (bit_depth == 16) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw ScalpError(ErrorKind::UnsupportedFormat, path + ": 16-bit PNG not supported here");
        }
        png_set_expand(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        png_set_strip_alpha(png);
        out.bit_depth = 8;
        out.channels = 3;
    } else {
        if (color_type != PNG_COLOR_TYPE_GRAY) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw ScalpError(ErrorKind::UnsupportedFormat, path + ": expected a grayscale PNG");
        }
        if (bit_depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        out.bit_depth = bit_depth == 16 ? 16 : 8;
        out.channels = 1;
        out.gray = true;
    }
    png_read_update_info(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    out.rows.resize(row_bytes * out.height);
    row_ptrs.resize(out.height);
    for (int y = 0; y < out.height; ++y)
        row_ptrs[y] = out.rows.data() + row_bytes * y;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

inline void write_png(const std::string& path, int width, int height, int bit_depth,
                      int color_type, const std::vector<std::uint8_t>& packed_rows) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw ScalpError(ErrorKind::Io, "cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw ScalpError(ErrorKind::Io, "libpng init failed");
    }
    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t row_bytes =
        static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y)
        row_ptrs[y] = const_cast<png_bytep>(packed_rows.data() + row_bytes * y);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw ScalpError(ErrorKind::Io, "PNG write failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace detail

/// Loads an 8-bit color image from PNG or binary PPM (P6). 16-bit data is
/// rejected rather than truncated.
inline RgbImage load_image(const std::string& path) {
    const auto data = detail::read_file(path);
    if (detail::is_png(data)) {
        const auto png = detail::read_png(data, path, true);
        RgbImage img(png.width, png.height);
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = {png.rows[3 * i], png.rows[3 * i + 1], png.rows[3 * i + 2]};
        return img;
    }
    const auto h = detail::parse_pnm_header(data, path);
    if (h.type != '6')
        throw ScalpError(ErrorKind::UnsupportedFormat, path + ": expected a P6 PPM");
    if (h.maxval > 255)
        throw ScalpError(ErrorKind::UnsupportedFormat, path + ": 16-bit PPM not supported");
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
    if (data.size() - h.data_offset < need)
        throw ScalpError(ErrorKind::CorruptFile, path + ": truncated pixel data");
    RgbImage img(h.width, h.height);
    const std::uint8_t* src = data.data() + h.data_offset;
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = {src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    return img;
}

/// Loads a grayscale PNG or PGM (P5) as a contour prior; sample values are
/// divided by the storage maximum (255 or 65535).
inline ContourMap load_contour_map(const std::string& path) {
    const auto data = detail::read_file(path);
    if (detail::is_png(data)) {
        const auto png = detail::read_png(data, path, false);
        ContourMap map(png.width, png.height);
        if (png.bit_depth == 16) {
            for (std::size_t i = 0; i < map.values.size(); ++i) {
                const int v = (png.rows[2 * i] << 8) | png.rows[2 * i + 1];
                map.values[i] = v / 65535.0;
            }
        } else {
            for (std::size_t i = 0; i < map.values.size(); ++i)
                map.values[i] = png.rows[i] / 255.0;
        }
        return map;
    }
    const auto h = detail::parse_pnm_header(data, path);
    if (h.type != '5')
        throw ScalpError(ErrorKind::UnsupportedFormat, path + ": expected a P5 PGM");
    const bool wide = h.maxval > 255;
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height * (wide ? 2 : 1);
    if (data.size() - h.data_offset < need)
        throw ScalpError(ErrorKind::CorruptFile, path + ": truncated pixel data");
    ContourMap map(h.width, h.height);
    const std::uint8_t* src = data.data() + h.data_offset;
    if (wide) {
        for (std::size_t i = 0; i < map.values.size(); ++i)
            map.values[i] = ((src[2 * i] << 8) | src[2 * i + 1]) / 65535.0;
    } else {
        for (std::size_t i = 0; i < map.values.size(); ++i)
            map.values[i] = src[i] / 255.0;
    }
    return map;
}

namespace detail {

// Compacts arbitrary label values to [0, k) by ascending value, so maps whose
// labels already form [0, k) load back unchanged.
inline LabelMap compact_labels(int width, int height, const std::vector<std::int64_t>& raw) {
    std::vector<std::int64_t> values(raw);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    LabelMap map(width, height, static_cast<int>(values.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto it = std::lower_bound(values.begin(), values.end(), raw[i]);
        map.labels[i] = static_cast<std::int32_t>(it - values.begin());
    }
    return map;
}

} // namespace detail

/// Loads a label map from 16-bit (or 8-bit) grayscale PNG or a CSV of
/// integers. Labels are compacted to [0, k).
inline LabelMap load_label_map(const std::string& path) {
    const auto data = detail::read_file(path);
    if (detail::is_png(data)) {
        const auto png = detail::read_png(data, path, false);
        std::vector<std::int64_t> raw(static_cast<std::size_t>(png.width) * png.height);
        if (png.bit_depth == 16) {
            for (std::size_t i = 0; i < raw.size(); ++i)
                raw[i] = (png.rows[2 * i] << 8) | png.rows[2 * i + 1];
        } else {
            for (std::size_t i = 0; i < raw.size(); ++i)
                raw[i] = png.rows[i];
        }
        return detail::compact_labels(png.width, png.height, raw);
    }

    // CSV: one row per image row, comma-separated integers.
    std::string text(data.begin(), data.end());
    std::istringstream in(text);
    std::vector<std::int64_t> raw;
    std::string line;
    int width = -1, height = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        int cols = 0;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                raw.push_back(std::stoll(cell));
            } catch (const std::exception&) {
                throw ScalpError(ErrorKind::CorruptFile, path + ": non-integer CSV cell");
            }
            ++cols;
        }
        if (width < 0)
            width = cols;
        else if (cols != width)
            throw ScalpError(ErrorKind::RaggedCsv, path + ": ragged CSV row");
        ++height;
    }
    if (width < 1 || height < 1)
        throw ScalpError(ErrorKind::CorruptFile, path + ": empty CSV label map");
    return detail::compact_labels(width, height, raw);
}

/// Writes a label map as 16-bit grayscale PNG (or CSV when the path ends in
/// .csv). Labels must fit in 16 bits.
inline void save_label_map(const std::string& path, const LabelMap& map) {
    if (detail::has_suffix(path, ".csv")) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ScalpError(ErrorKind::Io, "cannot write " + path);
        for (int y = 0; y < map.height; ++y) {
            for (int x = 0; x < map.width; ++x) {
                if (x)
                    out << ',';
                out << map.at(x, y);
            }
            out << '\n';
        }
        return;
    }
    std::vector<std::uint8_t> rows(map.size() * 2);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const std::int32_t v = map.labels[i];
        if (v < 0 || v > 65535)
            throw_out_of_range("labels", "label does not fit in 16 bits");
        rows[2 * i] = static_cast<std::uint8_t>(v >> 8);
        rows[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    detail::write_png(path, map.width, map.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

inline void save_rgb_png(const std::string& path, const RgbImage& img) {
    std::vector<std::uint8_t> rows(img.size() * 3);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        rows[3 * i] = img.pixels[i].r;
        rows[3 * i + 1] = img.pixels[i].g;
        rows[3 * i + 2] = img.pixels[i].b;
    }
    detail::write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

/// Writes a [0,1] map as 8-bit grayscale PNG.
inline void save_contour_map(const std::string& path, const ContourMap& map) {
    std::vector<std::uint8_t> rows(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double v = std::clamp(map.values[i], 0.0, 1.0);
        rows[i] = static_cast<std::uint8_t>(std::llround(v * 255.0));
    }
    detail::write_png(path, map.width, map.height, 8, PNG_COLOR_TYPE_GRAY, rows);
}

/// Gradient-magnitude contour stand-in: central differences of the L channel,
/// normalized by the image maximum. Constant images give an all-zero map.
inline ContourMap fallback_prior(const RgbImage& rgb) {
    const LabImage lab = srgb_to_lab(rgb);
    ContourMap map(rgb.width, rgb.height);
    double max_mag = 0.0;
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            const int xl = std::max(0, x - 1), xr = std::min(rgb.width - 1, x + 1);
            const int yu = std::max(0, y - 1), yd = std::min(rgb.height - 1, y + 1);
            const double gx = (lab.at(xr, y).l - lab.at(xl, y).l) / 2.0;
            const double gy = (lab.at(x, yd).l - lab.at(x, yu).l) / 2.0;
            const double mag = std::sqrt(gx * gx + gy * gy);
            map.at(x, y) = mag;
            max_mag = std::max(max_mag, mag);
        }
    }
    if (max_mag > 0.0)
        for (double& v : map.values)
            v /= max_mag;
    return map;
}

enum class RenderMode { Boundaries, MeanColor, Overlay };

/// Visualization of a decomposition: per-superpixel mean color, boundary
/// pixels on white, or boundary pixels over the source image.
inline RgbImage render(const LabelMap& labels, const RgbImage& rgb, RenderMode mode) {
    scalp::detail::check_same_dims(labels.width, labels.height, rgb.width, rgb.height);
    constexpr Rgb8 kBoundaryColor{255, 0, 0};
    if (mode == RenderMode::MeanColor) {
        struct Acc {
            std::int64_t r = 0, g = 0, b = 0, n = 0;
        };
        std::vector<Acc> acc(labels.k);
        for (std::size_t i = 0; i < rgb.pixels.size(); ++i) {
            Acc& a = acc[labels.labels[i]];
            a.r += rgb.pixels[i].r;
            a.g += rgb.pixels[i].g;
            a.b += rgb.pixels[i].b;
            ++a.n;
        }
        std::vector<Rgb8> mean(labels.k);
        for (int k = 0; k < labels.k; ++k) {
            if (acc[k].n == 0)
                continue;
            mean[k] = {static_cast<std::uint8_t>(std::llround(static_cast<double>(acc[k].r) / acc[k].n)),
                       static_cast<std::uint8_t>(std::llround(static_cast<double>(acc[k].g) / acc[k].n)),
                       static_cast<std::uint8_t>(std::llround(static_cast<double>(acc[k].b) / acc[k].n))};
        }
        RgbImage out(rgb.width, rgb.height);
        for (std::size_t i = 0; i < out.pixels.size(); ++i)
            out.pixels[i] = mean[labels.labels[i]];
        return out;
    }
    const BoundaryMask b = extract_boundaries(labels);
    RgbImage out = mode == RenderMode::Overlay ? rgb : RgbImage(rgb.width, rgb.height, {255, 255, 255});
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        if (b.mask[i])
            out.pixels[i] = kBoundaryColor;
    return out;
}

/// Parses a dataset manifest: one `image;gt1,gt2,...;contour` entry per line.
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<DatasetEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScalpError(ErrorKind::Io, "cannot open " + path);
    std::vector<DatasetEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        DatasetEntry e;
        std::istringstream fields(line);
        std::string image, gts, contour;
        std::getline(fields, image, ';');
        std::getline(fields, gts, ';');
        std::getline(fields, contour, ';');
        e.image = image;
        std::istringstream gt_list(gts);
        std::string gt;
        while (std::getline(gt_list, gt, ','))
            if (!gt.empty())
                e.ground_truths.push_back(gt);
        e.contour = contour;
        if (e.image.empty())
            throw ScalpError(ErrorKind::CorruptFile, path + ": manifest entry without an image");
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace scalp::io
