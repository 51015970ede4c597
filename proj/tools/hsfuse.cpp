// Command-line front end: synthesize phantoms, simulate sparse acquisitions,
// reconstruct full-resolution cubes, run spacing sweeps, and train/score the
// pixel classifier. Exit codes: 0 success, 2 bad usage or invalid input,
// 1 unexpected runtime failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsfuse/cli/commands.hpp"
#include "hsfuse/cli/config.hpp"

namespace {

int parse_cutoff(const std::string& text) {
    if (text == "auto") return -1;
    try {
        size_t pos = 0;
        int v = std::stoi(text, &pos);
        hsfuse::detail::require(pos == text.size() && v >= 0,
                                "--cutoff must be \"auto\" or a non-negative integer");
        return v;
    } catch (const hsfuse::validation_error&) {
        throw;
    } catch (const std::exception&) {
        hsfuse::detail::fail_validation("--cutoff must be \"auto\" or a non-negative integer");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconstructs full-resolution hyperspectral band images from sparse "
                 "row-sampled acquisitions by fusing curvelet coefficients with a "
                 "fully sampled reference band."};
    app.require_subcommand(1);

    std::string config_path, out_dir, cutoff_text;
    uint64_t seed = 0;
    double reference_wavenumber = 0.0;
    int factor = 0;
    std::vector<int> factors;
    auto* opt_config =
        app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    auto* opt_out = app.add_option("--out", out_dir, "output directory (default: out)");
    auto* opt_seed = app.add_option("--seed", seed, "random seed (required here or in config)");
    auto* opt_ref = app.add_option("--reference-wavenumber", reference_wavenumber,
                                   "reference band wavenumber in cm^-1");
    auto* opt_factor =
        app.add_option("--factor", factor, "row-spacing factor for acquire/pipeline")
            ->check(CLI::PositiveNumber);
    auto* opt_factors = app.add_option("--factors", factors, "row-spacing factors for sweep")
                            ->delimiter(',');
    auto* opt_cutoff = app.add_option("--cutoff", cutoff_text,
                                      "fusion cutoff scale: \"auto\" or a scale index");

    auto* sub_phantom =
        app.add_subcommand("phantom", "synthesize a labeled ground-truth cube");
    auto* sub_acquire = app.add_subcommand(
        "acquire", "simulate a sparse acquisition: full reference band + row-skipped bands");
    auto* sub_reconstruct = app.add_subcommand(
        "reconstruct", "rebuild full-resolution bands from an acquired set");
    auto* sub_sweep =
        app.add_subcommand("sweep", "reconstruction quality across row-spacing factors");
    auto* sub_classify =
        app.add_subcommand("classify", "train and score the random-forest pixel classifier");
    auto* sub_pipeline = app.add_subcommand(
        "pipeline", "phantom -> acquire -> reconstruct -> classification carry-over check");
    // Let global options appear after the subcommand: `hsfuse sweep --seed 1`.
    for (CLI::App* sub :
         {sub_phantom, sub_acquire, sub_reconstruct, sub_sweep, sub_classify, sub_pipeline})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        hsfuse::PipelineConfig cfg;
        if (opt_config->count() > 0)
            cfg = hsfuse::parse_config(hsfuse::iodetail::parse_json_file(config_path));
        if (opt_out->count() > 0) cfg.out_dir = out_dir;
        if (opt_seed->count() > 0) {
            cfg.seed = seed;
            cfg.seed_set = true;
        }
        if (opt_ref->count() > 0) cfg.reference_wavenumber_cm1 = reference_wavenumber;
        if (opt_factor->count() > 0) cfg.acquire_factor = factor;
        if (opt_factors->count() > 0) cfg.sweep_factors = factors;
        if (opt_cutoff->count() > 0) cfg.fusion.cutoff_scale = parse_cutoff(cutoff_text);
        hsfuse::finalize_config(cfg);

        if (sub_phantom->parsed()) return hsfuse::cmd_phantom(cfg);
        if (sub_acquire->parsed()) return hsfuse::cmd_acquire(cfg);
        if (sub_reconstruct->parsed()) return hsfuse::cmd_reconstruct(cfg);
        if (sub_sweep->parsed()) return hsfuse::cmd_sweep(cfg);
        if (sub_classify->parsed()) return hsfuse::cmd_classify(cfg);
        if (sub_pipeline->parsed()) return hsfuse::cmd_pipeline(cfg);
        std::fprintf(stderr, "error: no command selected\n");
        return 2;
    } catch (const hsfuse::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
