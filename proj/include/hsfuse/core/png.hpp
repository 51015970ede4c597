#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <zlib.h>

#include "hsfuse/core/cube_io.hpp"
#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"

namespace hsfuse {

// Minimal deterministic PNG writer (zlib deflate, filter type 0 on every
// row). Enough for 8-bit grayscale previews and RGB label composites; keeps
// the dependency surface to zlib, which we already link for the compression.

namespace pngdetail {

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_chunk(std::vector<uint8_t>& out, const char type[4],
                      const std::vector<uint8_t>& data) {
    put_u32(out, static_cast<uint32_t>(data.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = static_cast<uint32_t>(
        ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32(out, crc);
}

/// channels: 1 = grayscale, 3 = RGB. `raster` is row-major, 8-bit.
inline std::vector<uint8_t> encode(int width, int height, int channels,
                                   const std::vector<uint8_t>& raster) {
    detail::require(width > 0 && height > 0, "png: dimensions must be positive");
    detail::require(channels == 1 || channels == 3, "png: unsupported channel count");
    detail::require(raster.size() == static_cast<size_t>(width) * height * channels,
                    "png: raster size mismatch");

    std::vector<uint8_t> filtered;
    filtered.reserve(static_cast<size_t>(height) * (static_cast<size_t>(width) * channels + 1));
    for (int y = 0; y < height; ++y) {
        filtered.push_back(0); // filter type 0 (None)
        const uint8_t* row = raster.data() + static_cast<size_t>(y) * width * channels;
        filtered.insert(filtered.end(), row, row + static_cast<size_t>(width) * channels);
    }

    uLongf bound = ::compressBound(static_cast<uLong>(filtered.size()));
    std::vector<uint8_t> compressed(bound);
    int rc = ::compress2(compressed.data(), &bound, filtered.data(),
                         static_cast<uLong>(filtered.size()), Z_DEFAULT_COMPRESSION);
    if (rc != Z_OK) throw std::runtime_error("png: deflate failed");
    compressed.resize(bound);

    std::vector<uint8_t> out;
    const uint8_t sig[8] = {137, 'P', 'N', 'G', '\r', '\n', 26, '\n'};
    out.insert(out.end(), sig, sig + 8);

    std::vector<uint8_t> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(width));
    put_u32(ihdr, static_cast<uint32_t>(height));
    ihdr.push_back(8);                                      // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);                  // color type
    ihdr.push_back(0);                                      // compression
    ihdr.push_back(0);                                      // filter method
    ihdr.push_back(0);                                      // no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", {});
    return out;
}

} // namespace pngdetail

/// Maps band values linearly onto 0..255 and writes an 8-bit grayscale PNG.
/// With no explicit range, uses the band's own min/max; a constant band maps
/// to mid-gray.
inline void export_png(const BandImage& band, const std::filesystem::path& path,
                       std::optional<std::pair<double, double>> range = std::nullopt) {
    band.validate();
    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
        detail::require(hi >= lo, "export_png: range max must be >= min");
    } else {
        lo = hi = band.pixels.empty() ? 0.0 : band.pixels.front();
        for (float v : band.pixels) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
    }
    std::vector<uint8_t> raster(band.size());
    if (hi == lo) {
        std::fill(raster.begin(), raster.end(), static_cast<uint8_t>(128));
    } else {
        double scale = 255.0 / (hi - lo);
        for (size_t i = 0; i < band.size(); ++i) {
            double v = (static_cast<double>(band.pixels[i]) - lo) * scale;
            v = std::clamp(v, 0.0, 255.0);
            raster[i] = static_cast<uint8_t>(std::lround(v));
        }
    }
    std::vector<uint8_t> png = pngdetail::encode(band.width, band.height, 1, raster);
    iodetail::write_file(path, png.data(), png.size());
}

/// Fixed palette for label composites; class codes beyond the table cycle.
inline std::array<uint8_t, 3> label_color(uint8_t cls) {
    static constexpr std::array<std::array<uint8_t, 3>, 7> palette = {{
        {0, 0, 0},       // 0: unlabeled
        {204, 42, 42},   // 1
        {56, 158, 66},   // 2
        {52, 94, 193},   // 3
        {208, 160, 32},  // 4
        {136, 66, 176},  // 5
        {40, 160, 160},  // 6
    }};
    if (cls == 0) return palette[0];
    return palette[1 + (cls - 1) % 6];
}

/// Writes a label map as an RGB PNG using the fixed class palette.
inline void export_label_png(const LabelMap& map, const std::filesystem::path& path) {
    map.validate();
    std::vector<uint8_t> raster(map.size() * 3);
    for (size_t i = 0; i < map.size(); ++i) {
        std::array<uint8_t, 3> c = label_color(map.labels[i]);
        raster[3 * i + 0] = c[0];
        raster[3 * i + 1] = c[1];
        raster[3 * i + 2] = c[2];
    }
    std::vector<uint8_t> png = pngdetail::encode(map.width, map.height, 3, raster);
    iodetail::write_file(path, png.data(), png.size());
}

} // namespace hsfuse
