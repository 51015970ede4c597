#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsfuse/acquisition/phantom.hpp"
#include "hsfuse/acquisition/sampling.hpp"
#include "hsfuse/classify/dataset.hpp"
#include "hsfuse/classify/forest.hpp"
#include "hsfuse/cli/config.hpp"
#include "hsfuse/core/cube_io.hpp"
#include "hsfuse/core/format.hpp"
#include "hsfuse/core/png.hpp"
#include "hsfuse/eval/metrics.hpp"
#include "hsfuse/eval/sweep.hpp"
#include "hsfuse/recon/fusion.hpp"
#include "hsfuse/recon/interpolate.hpp"
#include "hsfuse/report/svg.hpp"

namespace hsfuse {

/// Output layout shared by every command.
struct CliPaths {
    std::filesystem::path out, cubes, plots, reports, models;
};

namespace clidetail {

inline CliPaths prepare_out_dir(const std::filesystem::path& out) {
    CliPaths p{out, out / "cubes", out / "plots", out / "reports", out / "models"};
    for (const auto& dir : {p.out, p.cubes, p.plots, p.reports, p.models})
        std::filesystem::create_directories(dir);
    return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    iodetail::write_file(path, text.data(), text.size());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

/// Every command records the effective configuration next to its outputs.
inline CliPaths start_command(const PipelineConfig& cfg) {
    CliPaths paths = prepare_out_dir(cfg.out_dir);
    write_json(paths.out / "config.json", config_to_json(cfg));
    return paths;
}

inline std::filesystem::path resolve_input(const std::optional<std::filesystem::path>& explicit_p,
                                           const std::filesystem::path& fallback_stem,
                                           const std::string& what,
                                           const std::string& producer) {
    std::filesystem::path stem =
        iodetail::strip_known_ext(explicit_p ? *explicit_p : fallback_stem);
    detail::require(std::filesystem::exists(stem.string() + ".json"),
                    what + " not found at " + stem.string() +
                        ".json (run `hsfuse " + producer + "` first or set inputs." + what + ")");
    return stem;
}

inline int find_band(const HyperCube& cube, double wavenumber) {
    for (size_t b = 0; b < cube.bands.size(); ++b) {
        double w = cube.bands[b].wavenumber_cm1;
        if (std::abs(w - wavenumber) <= 1e-6 * std::max(std::abs(w), std::abs(wavenumber)))
            return static_cast<int>(b);
    }
    return -1;
}

inline int require_band(const HyperCube& cube, double wavenumber, const std::string& what) {
    int b = find_band(cube, wavenumber);
    detail::require(b >= 0, what + ": no band at " + format_double(wavenumber) + " cm^-1");
    return b;
}

/// Side-by-side grayscale panels with a shared intensity range and thin
/// white separators — for eyeballing interpolation vs fusion vs truth.
inline void write_panel_png(const std::filesystem::path& path,
                            const std::vector<const BandImage*>& panels) {
    detail::require(!panels.empty(), "write_panel_png: no panels");
    const int w = panels[0]->width, h = panels[0]->height, gap = 4;
    float lo = panels[0]->pixels[0], hi = lo;
    for (const BandImage* p : panels) {
        detail::require(p->width == w && p->height == h,
                        "write_panel_png: panels must share dimensions");
        for (float v : p->pixels) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    const int total_w = static_cast<int>(panels.size()) * w +
                        (static_cast<int>(panels.size()) - 1) * gap;
    std::vector<uint8_t> raster(static_cast<size_t>(total_w) * h, 255);
    for (size_t p = 0; p < panels.size(); ++p) {
        const int x0 = static_cast<int>(p) * (w + gap);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double t = (panels[p]->pixels[static_cast<size_t>(y) * w + x] - lo) / span;
                raster[static_cast<size_t>(y) * total_w + x0 + x] =
                    static_cast<uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
            }
    }
    std::vector<uint8_t> png = pngdetail::encode(total_w, h, 1, raster);
    iodetail::write_file(path, png.data(), png.size());
}

/// A filename-safe wavenumber tag: 1660 -> "1660", 983.5 -> "983.5".
inline std::string wavenumber_tag(double wn) {
    std::string s = format_double(wn);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

/// Re-derives the interpolation-only estimate for one sparse band (the
/// pre-fusion baseline that reconstruction reports compare against).
inline BandImage interp_only(const BandImage& sparse, int full_height, int r,
                             double sigma_frac) {
    if (r == 1) return sparse;
    BandImage up = fourier_interpolate(sparse, sparse.height * r, sigma_frac);
    if (up.height != full_height) up = crop(up, 0, 0, up.width, full_height);
    return up;
}

/// Zeroes the labels outside [x0, x1) — used to carve train/test halves.
inline LabelMap mask_columns(const LabelMap& labels, int x0, int x1) {
    LabelMap out = labels;
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            if (x < x0 || x >= x1) out.labels[static_cast<size_t>(y) * out.width + x] = 0;
    return out;
}

inline nlohmann::json eval_to_json(const EvalReport& rep, const RandomForest& rf,
                                   const std::vector<PhantomClass>& class_names) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const ClassEval& ce : rep.per_class) {
        nlohmann::json c;
        c["class"] = ce.class_code;
        if (ce.class_code >= 1 && static_cast<size_t>(ce.class_code) <= class_names.size())
            c["name"] = class_names[ce.class_code - 1].name;
        c["support"] = ce.support;
        c["recall"] = ce.recall;
        c["auc"] = ce.auc_score ? nlohmann::json(*ce.auc_score) : nlohmann::json();
        per_class.push_back(std::move(c));
    }
    nlohmann::json j;
    j["n_samples"] = rep.n_samples;
    j["n_evaluated"] = rep.n_evaluated;
    j["overall_accuracy"] = rep.overall_accuracy;
    j["per_class"] = std::move(per_class);
    j["confusion"] = rep.confusion;
    j["confusion_classes"] = rf.classes;
    j["warnings"] = rep.warnings;
    return j;
}

inline std::string confusion_to_csv(const EvalReport& rep, const RandomForest& rf) {
    std::string csv = "true_class";
    for (uint8_t c : rf.classes) csv += ",predicted_" + std::to_string(static_cast<int>(c));
    csv += "\n";
    for (size_t t = 0; t < rep.confusion.size(); ++t) {
        csv += std::to_string(static_cast<int>(rf.classes[t]));
        for (size_t p = 0; p < rep.confusion[t].size(); ++p)
            csv += "," + std::to_string(rep.confusion[t][p]);
        csv += "\n";
    }
    return csv;
}

/// One ROC SVG per class with a defined curve: roc_class_<code>.svg.
inline void write_per_class_roc(const std::filesystem::path& plots_dir, const EvalReport& rep,
                                const std::vector<PhantomClass>& class_names) {
    for (const ClassEval& ce : rep.per_class) {
        if (!ce.auc_score) continue;
        PlotSeries s;
        std::string name =
            ce.class_code >= 1 && static_cast<size_t>(ce.class_code) <= class_names.size()
                ? class_names[ce.class_code - 1].name
                : "class " + std::to_string(static_cast<int>(ce.class_code));
        s.label = name + " (AUC " + format_fixed(*ce.auc_score, 3) + ")";
        for (const RocPoint& p : ce.roc) {
            s.x.push_back(p.fpr);
            s.y.push_back(p.tpr);
        }
        PlotOptions opt;
        opt.title = "ROC: " + name + " vs rest";
        opt.xlabel = "false positive rate";
        opt.ylabel = "true positive rate";
        opt.bounds = {{0.0, 1.0, 0.0, 1.0}};
        opt.diagonal = true;
        write_text(plots_dir /
                       ("roc_class_" + std::to_string(static_cast<int>(ce.class_code)) + ".svg"),
                   render_line_plot(std::span(&s, 1), opt));
    }
}

inline void write_roc_svg(const std::filesystem::path& path, const EvalReport& rep,
                          const std::vector<PhantomClass>& class_names) {
    std::vector<PlotSeries> series;
    for (const ClassEval& ce : rep.per_class) {
        if (!ce.auc_score) continue;
        PlotSeries s;
        std::string name =
            ce.class_code >= 1 && static_cast<size_t>(ce.class_code) <= class_names.size()
                ? class_names[ce.class_code - 1].name
                : "class " + std::to_string(static_cast<int>(ce.class_code));
        s.label = name + " (AUC " + format_fixed(*ce.auc_score, 3) + ")";
        for (const RocPoint& p : ce.roc) {
            s.x.push_back(p.fpr);
            s.y.push_back(p.tpr);
        }
        series.push_back(std::move(s));
    }
    if (series.empty()) return; // AUC undefined for every class; nothing to draw
    PlotOptions opt;
    opt.title = "One-vs-rest ROC";
    opt.xlabel = "false positive rate";
    opt.ylabel = "true positive rate";
    opt.bounds = {{0.0, 1.0, 0.0, 1.0}};
    opt.diagonal = true;
    write_text(path, render_line_plot(series, opt));
}

} // namespace clidetail

// --- commands ----------------------------------------------------------------

/// `hsfuse phantom`: synthesize a labeled ground-truth cube.
inline int cmd_phantom(const PipelineConfig& cfg) {
    using namespace clidetail;
    CliPaths paths = start_command(cfg);

    auto [cube, labels] = generate_phantom(cfg.phantom, cfg.seed);
    save_cube(cube, paths.cubes / "truth");
    save_labels(labels, paths.cubes / "labels");
    export_label_png(labels, paths.plots / "labels.png");

    int ref = find_band(cube, cfg.reference_wavenumber_cm1);
    const BandImage& shown = cube.bands[ref >= 0 ? static_cast<size_t>(ref) : 0];
    export_png(shown, paths.plots / ("band_" + wavenumber_tag(shown.wavenumber_cm1) + ".png"));

    std::vector<size_t> class_px(cfg.phantom.classes.size() + 1, 0);
    for (uint8_t l : labels.labels)
        if (l < class_px.size()) ++class_px[l];
    nlohmann::json classes = nlohmann::json::array();
    for (size_t c = 0; c < cfg.phantom.classes.size(); ++c)
        classes.push_back({{"label", c + 1},
                           {"name", cfg.phantom.classes[c].name},
                           {"pixels", class_px[c + 1]}});
    std::vector<double> wavenumbers;
    for (const BandImage& b : cube.bands) wavenumbers.push_back(b.wavenumber_cm1);
    write_json(paths.reports / "phantom.json",
               {{"seed", cfg.seed},
                {"width", cube.width()},
                {"height", cube.height()},
                {"bands", cube.bands.size()},
                {"wavenumbers_cm1", wavenumbers},
                {"background_pixels", class_px[0]},
                {"classes", classes}});

    std::printf("phantom: %dx%d cube, %zu bands, %zu classes -> %s\n", cube.width(),
                cube.height(), cube.bands.size(), cfg.phantom.classes.size(),
                paths.cubes.string().c_str());
    return 0;
}

/// `hsfuse acquire`: split a full cube into a full-resolution reference band
/// plus sparsely row-sampled bands, and report the time budget.
inline int cmd_acquire(const PipelineConfig& cfg) {
    using namespace clidetail;
    CliPaths paths = start_command(cfg);

    std::filesystem::path cube_stem =
        resolve_input(cfg.inputs.cube, paths.cubes / "truth", "cube", "phantom");
    HyperCube cube = load_cube(cube_stem);
    detail::require(cube.bands.size() >= 2, "acquire: need at least two bands");
    const int ref = require_band(cube, cfg.reference_wavenumber_cm1, "acquire reference");
    const int r = cfg.acquire_factor;

    HyperCube reference;
    reference.bands.push_back(cube.bands[ref]);
    HyperCube sparse;
    for (size_t b = 0; b < cube.bands.size(); ++b) {
        if (static_cast<int>(b) == ref) continue;
        sparse.bands.push_back(simulate_sparse_acquisition(cube.bands[b], r));
    }
    save_cube(reference, paths.cubes / "acquired_reference");
    save_cube(sparse, paths.cubes / "acquired_sparse");

    SamplingSpec full{cube.bands[0].dx_um, cube.bands[0].dx_um,
                      cube.width() * cube.bands[0].dx_um, cube.height() * cube.bands[0].dx_um};
    SamplingSpec sparse_spec = full;
    sparse_spec.dy_um = r * full.dx_um;
    const double minutes_full = acquisition_time_minutes(full, cfg.time_model);
    const double minutes_sparse = acquisition_time_minutes(sparse_spec, cfg.time_model);
    const size_t n_sparse = sparse.bands.size();
    write_json(paths.reports / "acquisition.json",
               {{"factor", r},
                {"seconds_per_row", cfg.time_model.seconds_per_row},
                {"fixed_overhead_s", cfg.time_model.fixed_overhead_s},
                {"rows_full", cube.height()},
                {"rows_sampled", sparse.bands[0].height},
                {"data_fraction", data_fraction(sparse_spec)},
                {"reference_wavenumber_cm1", cube.bands[ref].wavenumber_cm1},
                {"minutes_per_band_full", minutes_full},
                {"minutes_per_band_sparse", minutes_sparse},
                {"sparse_bands", n_sparse},
                {"total_minutes_sparse_protocol", minutes_full + n_sparse * minutes_sparse},
                {"total_minutes_full_protocol", (n_sparse + 1) * minutes_full}});

    std::printf("acquire: r=%d keeps %d of %d rows (%s of the data) -> %s\n", r,
                sparse.bands[0].height, cube.height(),
                format_fixed(100.0 * data_fraction(sparse_spec), 1).append("%").c_str(),
                paths.cubes.string().c_str());
    return 0;
}

/// `hsfuse reconstruct`: rebuild full-resolution bands from an acquisition;
/// when ground truth is available, score interpolation-only vs fused output.
inline int cmd_reconstruct(const PipelineConfig& cfg) {
    using namespace clidetail;
    CliPaths paths = start_command(cfg);

    HyperCube reference = load_cube(resolve_input(
        cfg.inputs.reference, paths.cubes / "acquired_reference", "reference", "acquire"));
    HyperCube sparse = load_cube(
        resolve_input(cfg.inputs.sparse, paths.cubes / "acquired_sparse", "sparse", "acquire"));
    detail::require(reference.bands.size() == 1,
                    "reconstruct: reference cube must hold exactly one band");

    AcquisitionSet set;
    set.reference = reference.bands[0];
    set.sparse_bands = sparse.bands;
    HyperCube recon = reconstruct_set(set, cfg.fusion);
    save_cube(recon, paths.cubes / "recon");

    // Optional scoring against ground truth.
    std::filesystem::path truth_stem =
        iodetail::strip_known_ext(cfg.inputs.cube ? *cfg.inputs.cube : paths.cubes / "truth");
    const bool have_truth = std::filesystem::exists(truth_stem.string() + ".json");

    const int r = static_cast<int>(std::lround(sparse.bands[0].dy_um / sparse.bands[0].dx_um));
    std::optional<HyperCube> truth;
    if (have_truth) truth = load_cube(truth_stem);

    nlohmann::json band_rows = nlohmann::json::array();
    for (size_t i = 0; i < sparse.bands.size(); ++i) {
        const BandImage& sb = sparse.bands[i];
        const int fused_idx = require_band(recon, sb.wavenumber_cm1, "reconstruct");
        const BandImage& fused = recon.bands[fused_idx];
        if (!have_truth) {
            export_png(fused,
                       paths.plots / ("fused_" + wavenumber_tag(sb.wavenumber_cm1) + ".png"));
            continue;
        }
        const int truth_idx = require_band(*truth, sb.wavenumber_cm1, "reconstruct truth");
        const BandImage& gt = truth->bands[truth_idx];
        BandImage interp =
            interp_only(sb, set.reference.height, r, cfg.fusion.gaussian_sigma_frac);
        interp.dy_um = gt.dy_um;
        band_rows.push_back({{"wavenumber_cm1", sb.wavenumber_cm1},
                             {"mse_interp", mse(gt, interp)},
                             {"mse_fused", mse(gt, fused)},
                             {"ssim_interp", ssim(gt, interp)},
                             {"ssim_fused", ssim(gt, fused)}});
        write_panel_png(paths.plots /
                            ("triptych_" + wavenumber_tag(sb.wavenumber_cm1) + ".png"),
                        {&interp, &fused, &gt});
    }

    if (have_truth) {
        double mi = 0, mf = 0, si = 0, sf = 0;
        for (const nlohmann::json& row : band_rows) {
            mi += row["mse_interp"].get<double>();
            mf += row["mse_fused"].get<double>();
            si += row["ssim_interp"].get<double>();
            sf += row["ssim_fused"].get<double>();
        }
        const double n = static_cast<double>(band_rows.size());
        write_json(paths.reports / "reconstruction_metrics.json",
                   {{"factor", r},
                    {"cutoff_scale", cfg.fusion.cutoff_scale < 0
                                         ? nlohmann::json("auto")
                                         : nlohmann::json(cfg.fusion.cutoff_scale)},
                    {"bands", band_rows},
                    {"mean_mse_interp", mi / n},
                    {"mean_mse_fused", mf / n},
                    {"mean_ssim_interp", si / n},
                    {"mean_ssim_fused", sf / n}});
        std::printf("reconstruct: r=%d, %zu bands, mean SSIM %s (interp) -> %s (fused)\n", r,
                    sparse.bands.size(), format_fixed(si / n, 4).c_str(),
                    format_fixed(sf / n, 4).c_str());
    } else {
        std::printf("reconstruct: r=%d, %zu bands (no ground truth available for scoring)\n", r,
                    sparse.bands.size());
    }
    return 0;
}

/// `hsfuse sweep`: degradation study over row-spacing factors, with CSV and
/// plots of the error/similarity trends.
inline int cmd_sweep(const PipelineConfig& cfg) {
    using namespace clidetail;
    CliPaths paths = start_command(cfg);

    HyperCube truth =
        load_cube(resolve_input(cfg.inputs.cube, paths.cubes / "truth", "cube", "phantom"));
    SweepReport report = spacing_sweep(truth, cfg.reference_wavenumber_cm1, cfg.sweep_factors,
                                       cfg.fusion, SsimParams{});
    write_text(paths.reports / "sweep.csv", sweep_to_csv(report));

    PlotSeries mse_series{"MSE", {}, {}, {}};
    PlotSeries ssim_series{"mean SSIM", {}, {}, {}};
    PlotSeries time_series{"mean SSIM", {}, {}, {}};
    const double dx = truth.bands[0].dx_um;
    SamplingSpec spec{dx, dx, truth.width() * dx, truth.height() * dx};
    for (const SweepAggregate& a : report.aggregates) {
        mse_series.x.push_back(a.r);
        mse_series.y.push_back(a.mse_mean);
        mse_series.yerr.push_back(a.mse_std);
        ssim_series.x.push_back(a.r);
        ssim_series.y.push_back(a.ssim_mean);
        ssim_series.yerr.push_back(a.ssim_std);
        SamplingSpec s = spec;
        s.dy_um = a.r * dx;
        time_series.x.push_back(acquisition_time_minutes(s, cfg.time_model));
        time_series.y.push_back(a.ssim_mean);
        time_series.yerr.push_back(a.ssim_std);
    }
    PlotOptions mopt;
    mopt.title = "Reconstruction error vs row-spacing factor";
    mopt.xlabel = "row-spacing factor r";
    mopt.ylabel = "MSE";
    write_text(paths.plots / "sweep_mse.svg",
               render_line_plot(std::span(&mse_series, 1), mopt));
    PlotOptions sopt;
    sopt.title = "Reconstruction similarity vs row-spacing factor";
    sopt.xlabel = "row-spacing factor r";
    sopt.ylabel = "mean SSIM";
    write_text(paths.plots / "sweep_ssim.svg",
               render_line_plot(std::span(&ssim_series, 1), sopt));
    PlotOptions topt;
    topt.title = "Similarity vs acquisition time per band";
    topt.xlabel = "acquisition time (min)";
    topt.ylabel = "mean SSIM";
    write_text(paths.plots / "sweep_ssim_vs_time.svg",
               render_line_plot(std::span(&time_series, 1), topt));

    for (const SweepAggregate& a : report.aggregates)
        std::printf("sweep: r=%-3d dy=%sum  MSE %s+-%s  SSIM %s+-%s\n", a.r,
                    format_double(a.dy_um).c_str(), format_fixed(a.mse_mean, 6).c_str(),
                    format_fixed(a.mse_std, 6).c_str(), format_fixed(a.ssim_mean, 4).c_str(),
                    format_fixed(a.ssim_std, 4).c_str());
    return 0;
}

/// `hsfuse classify`: train a pixel classifier on the left half of a labeled
/// cube (or load a model), score it on the right half, and label every pixel.
inline int cmd_classify(const PipelineConfig& cfg) {
    using namespace clidetail;
    CliPaths paths = start_command(cfg);

    HyperCube cube =
        load_cube(resolve_input(cfg.inputs.cube, paths.cubes / "truth", "cube", "phantom"));
    LabelMap labels =
        load_labels(resolve_input(cfg.inputs.labels, paths.cubes / "labels", "labels", "phantom"));
    detail::require(labels.width == cube.width() && labels.height == cube.height(),
                    "classify: label map does not match cube grid");

    const int split_x = cube.width() / 2;
    RandomForest rf;
    bool trained = false;
    if (cfg.inputs.model) {
        rf = load_forest(*cfg.inputs.model);
        std::printf("classify: loaded model %s\n", cfg.inputs.model->string().c_str());
    } else {
        LabelMap train_labels = mask_columns(labels, 0, split_x);
        PixelDataset train =
            build_dataset(cube, train_labels, cfg.per_class_cap, cfg.seed, "train");
        rf = train_rf(train, cfg.forest);
        trained = true;
        save_forest(rf, paths.models / "forest.json");
        std::printf("classify: trained %d trees on %zu pixels, OOB accuracy %s\n",
                    cfg.forest.n_trees, train.size(), format_fixed(rf.oob_accuracy, 4).c_str());
    }

    LabelMap test_labels = mask_columns(labels, split_x, cube.width());
    PixelDataset test = build_dataset(cube, test_labels, cfg.per_class_cap, cfg.seed, "test");
    EvalReport rep = evaluate(rf, test);

    nlohmann::json j = eval_to_json(rep, rf, cfg.phantom.classes);
    j["oob_accuracy"] = trained ? nlohmann::json(rf.oob_accuracy) : nlohmann::json();
    j["split_column"] = split_x;
    write_json(paths.reports / "classification.json", j);
    write_text(paths.reports / "confusion.csv", confusion_to_csv(rep, rf));
    write_roc_svg(paths.plots / "roc.svg", rep, cfg.phantom.classes);
    write_per_class_roc(paths.plots, rep, cfg.phantom.classes);

    LabelMap predicted = classify_cube(rf, cube);
    save_labels(predicted, paths.cubes / "predicted_labels");
    export_label_png(predicted, paths.plots / "predicted_labels.png");
    export_label_png(labels, paths.plots / "true_labels.png");

    std::printf("classify: held-out accuracy %s over %zu pixels\n",
                format_fixed(rep.overall_accuracy, 4).c_str(), rep.n_evaluated);
    return 0;
}

/// `hsfuse pipeline`: phantom -> acquire -> reconstruct, then check how well
/// a classifier trained on ground truth carries over to the reconstruction.
inline int cmd_pipeline(const PipelineConfig& cfg) {
    using namespace clidetail;
    cmd_phantom(cfg);
    cmd_acquire(cfg);
    cmd_reconstruct(cfg);

    CliPaths paths = prepare_out_dir(cfg.out_dir);
    HyperCube truth = load_cube(paths.cubes / "truth");
    HyperCube recon = load_cube(paths.cubes / "recon");
    LabelMap labels = load_labels(paths.cubes / "labels");

    const int split_x = truth.width() / 2;
    LabelMap train_labels = mask_columns(labels, 0, split_x);
    LabelMap test_labels = mask_columns(labels, split_x, truth.width());

    PixelDataset train = build_dataset(truth, train_labels, cfg.per_class_cap, cfg.seed, "train");
    RandomForest rf = train_rf(train, cfg.forest);
    save_forest(rf, paths.models / "forest.json");

    // The same held-out pixels, read once from the truth cube and once from
    // the reconstruction, so the comparison is paired.
    PixelDataset test_truth =
        build_dataset(truth, test_labels, cfg.per_class_cap, cfg.seed, "test-truth");
    PixelDataset test_recon = extract_at(recon, test_truth.pixel_index, test_truth.labels,
                                         "test-recon");
    EvalReport on_truth = evaluate(rf, test_truth);
    EvalReport on_recon = evaluate(rf, test_recon);

    LabelMap pred_truth = classify_cube(rf, truth);
    LabelMap pred_recon = classify_cube(rf, recon);
    export_label_png(pred_truth, paths.plots / "predicted_labels_truth.png");
    export_label_png(pred_recon, paths.plots / "predicted_labels_recon.png");
    save_labels(pred_recon, paths.cubes / "predicted_labels");
    write_roc_svg(paths.plots / "roc_truth.svg", on_truth, cfg.phantom.classes);
    write_roc_svg(paths.plots / "roc_recon.svg", on_recon, cfg.phantom.classes);

    const double drop_pp = 100.0 * (on_truth.overall_accuracy - on_recon.overall_accuracy);
    write_json(paths.reports / "pipeline.json",
               {{"factor", cfg.acquire_factor},
                {"cutoff_scale", cfg.fusion.cutoff_scale < 0
                                     ? nlohmann::json("auto")
                                     : nlohmann::json(cfg.fusion.cutoff_scale)},
                {"oob_accuracy", rf.oob_accuracy},
                {"on_truth", eval_to_json(on_truth, rf, cfg.phantom.classes)},
                {"on_reconstruction", eval_to_json(on_recon, rf, cfg.phantom.classes)},
                {"accuracy_drop_pp", drop_pp}});

    std::printf("pipeline: accuracy %s on truth vs %s on reconstruction (drop %s pp)\n",
                format_fixed(on_truth.overall_accuracy, 4).c_str(),
                format_fixed(on_recon.overall_accuracy, 4).c_str(),
                format_fixed(drop_pp, 2).c_str());
    return 0;
}

} // namespace hsfuse
