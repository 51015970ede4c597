#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsfuse/acquisition/phantom.hpp"
#include "hsfuse/acquisition/sampling.hpp"
#include "hsfuse/classify/forest.hpp"
#include "hsfuse/core/cube_io.hpp"
#include "hsfuse/core/errors.hpp"
#include "hsfuse/recon/fusion.hpp"

namespace hsfuse {

/// Everything a CLI run needs, resolved from the config file plus flag
/// overrides. The effective configuration is echoed to the output directory
/// so a run can be reproduced from its artifacts alone.
struct PipelineConfig {
    uint64_t seed = 0;
    bool seed_set = false;
    std::filesystem::path out_dir = "out";
    double reference_wavenumber_cm1 = 1660.0;

    PhantomSpec phantom{};

    int acquire_factor = 10;
    TimeModel time_model{};

    FusionConfig fusion{};

    std::vector<int> sweep_factors = {1, 2, 4, 6, 10, 20, 40};

    ForestConfig forest{};
    size_t per_class_cap = 10000;

    struct Inputs {
        std::optional<std::filesystem::path> cube;      // ground-truth / full-res cube stem
        std::optional<std::filesystem::path> labels;    // label map stem
        std::optional<std::filesystem::path> reference; // acquired reference cube stem
        std::optional<std::filesystem::path> sparse;    // acquired sparse cube stem
        std::optional<std::filesystem::path> model;     // trained forest JSON
    } inputs;
};

namespace configdetail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        detail::require(ok, "config: unknown key \"" + it.key() + "\" in " + where);
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        detail::fail_validation(std::string("config: bad value for \"") + key + "\"");
    }
}

inline std::vector<PhantomClass> classes_from_json(const nlohmann::json& arr) {
    detail::require(arr.is_array() && !arr.empty(), "config: phantom.classes must be a "
                                                    "non-empty array");
    std::vector<PhantomClass> out;
    for (const nlohmann::json& cj : arr) {
        reject_unknown_keys(cj, {"name", "peaks", "blob_count", "min_radius_frac",
                                 "max_radius_frac"},
                            "phantom.classes[]");
        PhantomClass c;
        c.name = get_or<std::string>(cj, "name", "class" + std::to_string(out.size() + 1));
        detail::require(cj.contains("peaks") && cj["peaks"].is_array(),
                        "config: phantom class needs a peaks array");
        for (const nlohmann::json& pj : cj["peaks"]) {
            detail::require(pj.is_array() && pj.size() == 3,
                            "config: each peak is [center_cm1, width_cm1, amplitude]");
            c.peaks.push_back({pj[0].get<double>(), pj[1].get<double>(), pj[2].get<double>()});
        }
        c.blob_count = get_or<int>(cj, "blob_count", c.blob_count);
        c.min_radius_frac = get_or<double>(cj, "min_radius_frac", c.min_radius_frac);
        c.max_radius_frac = get_or<double>(cj, "max_radius_frac", c.max_radius_frac);
        out.push_back(std::move(c));
    }
    return out;
}

inline nlohmann::json classes_to_json(const std::vector<PhantomClass>& classes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const PhantomClass& c : classes) {
        nlohmann::json peaks = nlohmann::json::array();
        for (const SpectralPeak& p : c.peaks)
            peaks.push_back({p.center_cm1, p.width_cm1, p.amplitude});
        arr.push_back({{"name", c.name},
                       {"peaks", peaks},
                       {"blob_count", c.blob_count},
                       {"min_radius_frac", c.min_radius_frac},
                       {"max_radius_frac", c.max_radius_frac}});
    }
    return arr;
}

inline std::optional<std::filesystem::path> path_or_none(const nlohmann::json& j,
                                                         const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return std::filesystem::path(j.at(key).get<std::string>());
}

} // namespace configdetail

/// Parses and validates a config document. Flag overrides are applied by the
/// CLI before `finalize_config`.
inline PipelineConfig parse_config(const nlohmann::json& j) {
    using namespace configdetail;
    detail::require(j.is_object(), "config: top level must be a JSON object");
    reject_unknown_keys(j,
                        {"seed", "out_dir", "reference_wavenumber_cm1", "phantom", "acquire",
                         "reconstruct", "sweep", "classify", "inputs"},
                        "top level");
    PipelineConfig cfg;
    if (j.contains("seed")) {
        // Parsed JSON text stores "5" as unsigned, but a programmatically
        // built document may hold the same value as a signed integer.
        detail::require(j["seed"].is_number_unsigned() ||
                            (j["seed"].is_number_integer() && j["seed"].get<int64_t>() >= 0),
                        "config: seed must be a non-negative integer");
        cfg.seed = j["seed"].get<uint64_t>();
        cfg.seed_set = true;
    }
    cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir.string());
    cfg.reference_wavenumber_cm1 =
        get_or<double>(j, "reference_wavenumber_cm1", cfg.reference_wavenumber_cm1);

    if (j.contains("phantom")) {
        const nlohmann::json& p = j["phantom"];
        reject_unknown_keys(p,
                            {"width", "height", "dx_um", "wavenumbers_cm1", "classes",
                             "background_level", "texture_scale_px", "texture_amplitude",
                             "noise_sigma"},
                            "phantom");
        cfg.phantom.width = get_or<int>(p, "width", cfg.phantom.width);
        cfg.phantom.height = get_or<int>(p, "height", cfg.phantom.height);
        cfg.phantom.dx_um = get_or<double>(p, "dx_um", cfg.phantom.dx_um);
        cfg.phantom.wavenumbers_cm1 =
            get_or<std::vector<double>>(p, "wavenumbers_cm1", cfg.phantom.wavenumbers_cm1);
        if (p.contains("classes")) cfg.phantom.classes = classes_from_json(p["classes"]);
        cfg.phantom.background_level =
            get_or<double>(p, "background_level", cfg.phantom.background_level);
        cfg.phantom.texture_scale_px =
            get_or<double>(p, "texture_scale_px", cfg.phantom.texture_scale_px);
        cfg.phantom.texture_amplitude =
            get_or<double>(p, "texture_amplitude", cfg.phantom.texture_amplitude);
        cfg.phantom.noise_sigma = get_or<double>(p, "noise_sigma", cfg.phantom.noise_sigma);
        cfg.phantom.validate();
    }

    if (j.contains("acquire")) {
        const nlohmann::json& a = j["acquire"];
        reject_unknown_keys(a, {"factor", "seconds_per_row", "fixed_overhead_s"}, "acquire");
        cfg.acquire_factor = get_or<int>(a, "factor", cfg.acquire_factor);
        detail::require(cfg.acquire_factor >= 1, "config: acquire.factor must be >= 1");
        cfg.time_model.seconds_per_row =
            get_or<double>(a, "seconds_per_row", cfg.time_model.seconds_per_row);
        cfg.time_model.fixed_overhead_s =
            get_or<double>(a, "fixed_overhead_s", cfg.time_model.fixed_overhead_s);
        detail::require(cfg.time_model.seconds_per_row > 0,
                        "config: acquire.seconds_per_row must be positive");
        detail::require(cfg.time_model.fixed_overhead_s >= 0,
                        "config: acquire.fixed_overhead_s must be non-negative");
    }

    if (j.contains("reconstruct")) {
        const nlohmann::json& r = j["reconstruct"];
        reject_unknown_keys(r, {"cutoff_scale", "equalize", "gaussian_sigma_frac"}, "reconstruct");
        if (r.contains("cutoff_scale")) {
            if (r["cutoff_scale"].is_string()) {
                detail::require(r["cutoff_scale"].get<std::string>() == "auto",
                                "config: reconstruct.cutoff_scale must be \"auto\" or an integer");
                cfg.fusion.cutoff_scale = -1;
            } else {
                detail::require(r["cutoff_scale"].is_number_integer(),
                                "config: reconstruct.cutoff_scale must be \"auto\" or an integer");
                cfg.fusion.cutoff_scale = r["cutoff_scale"].get<int>();
                detail::require(cfg.fusion.cutoff_scale >= 0,
                                "config: reconstruct.cutoff_scale must be >= 0");
            }
        }
        cfg.fusion.equalize = get_or<bool>(r, "equalize", cfg.fusion.equalize);
        cfg.fusion.gaussian_sigma_frac =
            get_or<double>(r, "gaussian_sigma_frac", cfg.fusion.gaussian_sigma_frac);
        detail::require(cfg.fusion.gaussian_sigma_frac > 0,
                        "config: reconstruct.gaussian_sigma_frac must be positive");
    }

    if (j.contains("sweep")) {
        const nlohmann::json& s = j["sweep"];
        reject_unknown_keys(s, {"factors"}, "sweep");
        cfg.sweep_factors = get_or<std::vector<int>>(s, "factors", cfg.sweep_factors);
        detail::require(!cfg.sweep_factors.empty(), "config: sweep.factors must be non-empty");
        for (int f : cfg.sweep_factors)
            detail::require(f >= 1, "config: sweep.factors entries must be >= 1");
    }

    if (j.contains("classify")) {
        const nlohmann::json& c = j["classify"];
        reject_unknown_keys(
            c, {"n_trees", "max_depth", "min_samples_split", "features_per_split",
                "per_class_cap"},
            "classify");
        cfg.forest.n_trees = get_or<int>(c, "n_trees", cfg.forest.n_trees);
        cfg.forest.max_depth = get_or<int>(c, "max_depth", cfg.forest.max_depth);
        cfg.forest.min_samples_split =
            get_or<int>(c, "min_samples_split", cfg.forest.min_samples_split);
        cfg.forest.features_per_split =
            get_or<int>(c, "features_per_split", cfg.forest.features_per_split);
        int cap = get_or<int>(c, "per_class_cap", static_cast<int>(cfg.per_class_cap));
        detail::require(cap > 0, "config: classify.per_class_cap must be positive");
        cfg.per_class_cap = static_cast<size_t>(cap);
        detail::require(cfg.forest.n_trees >= 1, "config: classify.n_trees must be >= 1");
        detail::require(cfg.forest.max_depth >= -1, "config: classify.max_depth must be >= -1");
        detail::require(cfg.forest.min_samples_split >= 2,
                        "config: classify.min_samples_split must be >= 2");
        detail::require(cfg.forest.features_per_split >= 0,
                        "config: classify.features_per_split must be >= 0");
    }

    if (j.contains("inputs")) {
        const nlohmann::json& in = j["inputs"];
        reject_unknown_keys(in, {"cube", "labels", "reference", "sparse", "model"}, "inputs");
        cfg.inputs.cube = configdetail::path_or_none(in, "cube");
        cfg.inputs.labels = configdetail::path_or_none(in, "labels");
        cfg.inputs.reference = configdetail::path_or_none(in, "reference");
        cfg.inputs.sparse = configdetail::path_or_none(in, "sparse");
        cfg.inputs.model = configdetail::path_or_none(in, "model");
    }
    return cfg;
}

/// Final validation once flag overrides are in: the seed is mandatory and
/// every explicitly referenced input must already exist.
inline void finalize_config(PipelineConfig& cfg) {
    detail::require(cfg.seed_set,
                    "config: a seed is required (config \"seed\" or --seed flag)");
    cfg.forest.seed = cfg.seed;
    auto check_stem = [](const std::optional<std::filesystem::path>& p, const char* what) {
        if (!p) return;
        std::filesystem::path stem = iodetail::strip_known_ext(*p);
        detail::require(std::filesystem::exists(stem.string() + ".json"),
                        std::string("config: inputs.") + what + " not found: " +
                            stem.string() + ".json");
    };
    check_stem(cfg.inputs.cube, "cube");
    check_stem(cfg.inputs.labels, "labels");
    check_stem(cfg.inputs.reference, "reference");
    check_stem(cfg.inputs.sparse, "sparse");
    if (cfg.inputs.model)
        detail::require(std::filesystem::exists(*cfg.inputs.model),
                        "config: inputs.model not found: " + cfg.inputs.model->string());
}

/// The effective configuration, defaults and overrides included.
inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir.string();
    j["reference_wavenumber_cm1"] = cfg.reference_wavenumber_cm1;
    j["phantom"] = {{"width", cfg.phantom.width},
                    {"height", cfg.phantom.height},
                    {"dx_um", cfg.phantom.dx_um},
                    {"wavenumbers_cm1", cfg.phantom.wavenumbers_cm1},
                    {"classes", configdetail::classes_to_json(cfg.phantom.classes)},
                    {"background_level", cfg.phantom.background_level},
                    {"texture_scale_px", cfg.phantom.texture_scale_px},
                    {"texture_amplitude", cfg.phantom.texture_amplitude},
                    {"noise_sigma", cfg.phantom.noise_sigma}};
    j["acquire"] = {{"factor", cfg.acquire_factor},
                    {"seconds_per_row", cfg.time_model.seconds_per_row},
                    {"fixed_overhead_s", cfg.time_model.fixed_overhead_s}};
    j["reconstruct"] = {{"cutoff_scale", cfg.fusion.cutoff_scale < 0
                                             ? nlohmann::json("auto")
                                             : nlohmann::json(cfg.fusion.cutoff_scale)},
                        {"equalize", cfg.fusion.equalize},
                        {"gaussian_sigma_frac", cfg.fusion.gaussian_sigma_frac}};
    j["sweep"] = {{"factors", cfg.sweep_factors}};
    j["classify"] = {{"n_trees", cfg.forest.n_trees},
                     {"max_depth", cfg.forest.max_depth},
                     {"min_samples_split", cfg.forest.min_samples_split},
                     {"features_per_split", cfg.forest.features_per_split},
                     {"per_class_cap", cfg.per_class_cap}};
    nlohmann::json in = nlohmann::json::object();
    if (cfg.inputs.cube) in["cube"] = cfg.inputs.cube->string();
    if (cfg.inputs.labels) in["labels"] = cfg.inputs.labels->string();
    if (cfg.inputs.reference) in["reference"] = cfg.inputs.reference->string();
    if (cfg.inputs.sparse) in["sparse"] = cfg.inputs.sparse->string();
    if (cfg.inputs.model) in["model"] = cfg.inputs.model->string();
    j["inputs"] = in;
    return j;
}

} // namespace hsfuse
