#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"

namespace hsfuse {

// Cubes are stored as a JSON sidecar plus a raw band-sequential raster:
//   <stem>.json  { width, height, bands, dtype:"f32le", interleave:"bsq",
//                  pixel_dx_um, pixel_dy_um, wavenumbers_cm1:[...] }
//   <stem>.raw   float32 little-endian, band after band, rows top to bottom
// Label maps use dtype "u8" and omit the spectral fields.

static_assert(std::endian::native == std::endian::little,
              "raster I/O assumes a little-endian host");

namespace iodetail {

inline std::filesystem::path strip_known_ext(const std::filesystem::path& p) {
    if (p.extension() == ".json" || p.extension() == ".raw") {
        std::filesystem::path q = p;
        q.replace_extension();
        return q;
    }
    return p;
}

inline std::vector<char> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    detail::require(in.good(), "cannot open file: " + p.string());
    in.seekg(0, std::ios::end);
    std::vector<char> buf(static_cast<size_t>(in.tellg()));
    in.seekg(0);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    detail::require(in.good(), "cannot read file: " + p.string());
    return buf;
}

inline void write_file(const std::filesystem::path& p, const void* data, size_t bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw std::runtime_error("cannot open file for writing: " + p.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    out.flush();
    if (!out.good()) throw std::runtime_error("write failed: " + p.string());
}

inline nlohmann::json parse_json_file(const std::filesystem::path& p) {
    std::vector<char> buf = read_file(p);
    nlohmann::json j = nlohmann::json::parse(buf.begin(), buf.end(), nullptr, false);
    detail::require(!j.is_discarded(), "malformed JSON: " + p.string());
    return j;
}

} // namespace iodetail

/// Writes `<stem>.json` + `<stem>.raw`. `stem` may also be given with a
/// .json/.raw extension, which is stripped.
inline void save_cube(const HyperCube& cube, const std::filesystem::path& stem_in) {
    cube.validate();
    std::filesystem::path stem = iodetail::strip_known_ext(stem_in);

    nlohmann::json j;
    j["width"] = cube.width();
    j["height"] = cube.height();
    j["bands"] = cube.bands.size();
    j["dtype"] = "f32le";
    j["interleave"] = "bsq";
    j["pixel_dx_um"] = cube.bands.front().dx_um;
    j["pixel_dy_um"] = cube.bands.front().dy_um;
    std::vector<double> wns;
    for (const BandImage& b : cube.bands) wns.push_back(b.wavenumber_cm1);
    j["wavenumbers_cm1"] = wns;
    std::string header = j.dump(2);
    header.push_back('\n');
    iodetail::write_file(stem.string() + ".json", header.data(), header.size());

    std::vector<float> raster;
    raster.reserve(cube.bands.size() * cube.bands.front().size());
    for (const BandImage& b : cube.bands)
        raster.insert(raster.end(), b.pixels.begin(), b.pixels.end());
    iodetail::write_file(stem.string() + ".raw", raster.data(), raster.size() * sizeof(float));
}

inline HyperCube load_cube(const std::filesystem::path& stem_in) {
    std::filesystem::path stem = iodetail::strip_known_ext(stem_in);
    nlohmann::json j = iodetail::parse_json_file(stem.string() + ".json");

    auto need = [&](const char* key) {
        detail::require(j.contains(key), std::string("cube header missing field: ") + key);
        return j[key];
    };
    int w = need("width").get<int>();
    int h = need("height").get<int>();
    size_t nb = need("bands").get<size_t>();
    std::string dtype = need("dtype").get<std::string>();
    detail::require(dtype == "f32le", "unsupported dtype for cube: " + dtype);
    std::string interleave = need("interleave").get<std::string>();
    detail::require(interleave == "bsq", "unsupported interleave: " + interleave);
    double dx = need("pixel_dx_um").get<double>();
    double dy = need("pixel_dy_um").get<double>();
    std::vector<double> wns = need("wavenumbers_cm1").get<std::vector<double>>();
    detail::require(wns.size() == nb, "cube header: wavenumber count != band count");
    detail::require(w > 0 && h > 0 && nb > 0, "cube header: degenerate dimensions");

    std::vector<char> raw = iodetail::read_file(stem.string() + ".raw");
    size_t expect = static_cast<size_t>(w) * h * nb * sizeof(float);
    detail::require(raw.size() == expect,
                    "cube raster size mismatch: expected " + std::to_string(expect) +
                        " bytes, found " + std::to_string(raw.size()));

    HyperCube cube;
    const float* src = reinterpret_cast<const float*>(raw.data());
    for (size_t bi = 0; bi < nb; ++bi) {
        BandImage b = BandImage::make(w, h, dx, dy, wns[bi]);
        std::copy(src, src + b.size(), b.pixels.begin());
        src += b.size();
        b.validate(); // rejects NaN/Inf in the raster
        cube.bands.push_back(std::move(b));
    }
    cube.validate();
    return cube;
}

inline void save_labels(const LabelMap& map, const std::filesystem::path& stem_in) {
    map.validate();
    std::filesystem::path stem = iodetail::strip_known_ext(stem_in);
    nlohmann::json j;
    j["width"] = map.width;
    j["height"] = map.height;
    j["dtype"] = "u8";
    std::string header = j.dump(2);
    header.push_back('\n');
    iodetail::write_file(stem.string() + ".json", header.data(), header.size());
    iodetail::write_file(stem.string() + ".raw", map.labels.data(), map.labels.size());
}

inline LabelMap load_labels(const std::filesystem::path& stem_in) {
    std::filesystem::path stem = iodetail::strip_known_ext(stem_in);
    nlohmann::json j = iodetail::parse_json_file(stem.string() + ".json");
    detail::require(j.contains("width") && j.contains("height") && j.contains("dtype"),
                    "label header missing fields");
    detail::require(j["dtype"].get<std::string>() == "u8",
                    "unsupported dtype for labels: " + j["dtype"].get<std::string>());
    LabelMap m = LabelMap::make(j["width"].get<int>(), j["height"].get<int>());
    std::vector<char> raw = iodetail::read_file(stem.string() + ".raw");
    detail::require(raw.size() == m.size(), "label raster size mismatch");
    std::copy(raw.begin(), raw.end(), reinterpret_cast<char*>(m.labels.data()));
    return m;
}

} // namespace hsfuse
