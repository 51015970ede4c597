#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/core/rng.hpp"

namespace hsfuse {

/// Labeled pixel spectra extracted from a cube. Each row holds one pixel's
/// values across all bands, in the cube's band order; `pixel_index` keeps the
/// row-major source pixel for provenance and for re-extracting the same
/// pixels from another cube on the same grid.
struct PixelDataset {
    int n_features = 0;
    std::vector<float> features; // size() == labels.size() * n_features
    std::vector<uint8_t> labels;
    std::vector<uint32_t> pixel_index;
    std::string cube_id;

    size_t size() const { return labels.size(); }
    const float* row(size_t i) const { return features.data() + i * n_features; }

    void validate() const {
        detail::require(n_features > 0, "PixelDataset: no features");
        detail::require(!labels.empty(), "PixelDataset: no samples");
        detail::require(features.size() == labels.size() * static_cast<size_t>(n_features),
                        "PixelDataset: feature buffer size mismatch");
        detail::require(pixel_index.size() == labels.size(),
                        "PixelDataset: provenance size mismatch");
    }
};

/// Rows for the given pixels of a cube, with the supplied labels.
inline PixelDataset extract_at(const HyperCube& cube, std::span<const uint32_t> pixel_index,
                               std::span<const uint8_t> labels, std::string cube_id = "") {
    cube.validate();
    detail::require(pixel_index.size() == labels.size(), "extract_at: size mismatch");
    detail::require(!pixel_index.empty(), "extract_at: no pixels");
    const size_t n_px = static_cast<size_t>(cube.width()) * cube.height();
    PixelDataset ds;
    ds.n_features = static_cast<int>(cube.bands.size());
    ds.cube_id = std::move(cube_id);
    ds.labels.assign(labels.begin(), labels.end());
    ds.pixel_index.assign(pixel_index.begin(), pixel_index.end());
    ds.features.resize(pixel_index.size() * cube.bands.size());
    for (size_t i = 0; i < pixel_index.size(); ++i) {
        detail::require(pixel_index[i] < n_px, "extract_at: pixel index out of range");
        float* row = ds.features.data() + i * cube.bands.size();
        for (size_t b = 0; b < cube.bands.size(); ++b)
            row[b] = cube.bands[b].pixels[pixel_index[i]];
    }
    return ds;
}

/// Collects the labeled pixels of a cube into a training set, capping each
/// class at `per_class_cap` pixels chosen uniformly without replacement
/// (seeded; the same seed always selects the same pixels). Rows are ordered
/// by class code, then by pixel index.
inline PixelDataset build_dataset(const HyperCube& cube, const LabelMap& labels,
                                  size_t per_class_cap, uint64_t seed,
                                  std::string cube_id = "") {
    cube.validate();
    labels.validate();
    detail::require(labels.width == cube.width() && labels.height == cube.height(),
                    "build_dataset: label map does not match cube grid");
    detail::require(per_class_cap > 0, "build_dataset: per-class cap must be positive");

    std::vector<std::vector<uint32_t>> per_class(256);
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels.labels[i] != 0) per_class[labels.labels[i]].push_back(static_cast<uint32_t>(i));

    std::vector<uint32_t> chosen_px;
    std::vector<uint8_t> chosen_lb;
    for (int cls = 1; cls < 256; ++cls) {
        std::vector<uint32_t>& pool = per_class[cls];
        if (pool.empty()) continue;
        if (pool.size() > per_class_cap) {
            CounterRng rng(seed, 100 + static_cast<uint64_t>(cls));
            for (size_t i = 0; i < per_class_cap; ++i) { // partial Fisher-Yates
                size_t j = i + static_cast<size_t>(rng.next_index(pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            pool.resize(per_class_cap);
            std::sort(pool.begin(), pool.end());
        }
        for (uint32_t px : pool) {
            chosen_px.push_back(px);
            chosen_lb.push_back(static_cast<uint8_t>(cls));
        }
    }
    detail::require(!chosen_px.empty(), "build_dataset: label map has no labeled pixels");
    return extract_at(cube, chosen_px, chosen_lb, std::move(cube_id));
}

} // namespace hsfuse
