// Command-line front end: simulate / audit / verify-kernel / sweep / mms.

#include <CLI11.hpp>

#include "rotforch/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rotforch: Forchheimer flow in rotating porous media - solver and estimate auditor"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    long samples = 0;
    std::string estimates_csv;
    bool quiet = false;

    bool seed_set = false, samples_set = false;
    for (const char* name : {"simulate", "audit", "verify-kernel", "sweep", "mms"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--samples", samples, "sample count for verify-kernel")
            ->each([&](const std::string&) { samples_set = true; });
        sub->add_option("--estimates", estimates_csv, "comma-separated estimate ids");
        sub->add_flag("--quiet", quiet, "suppress progress output");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    rotforch::RunConfig cfg;
    try {
        cfg = rotforch::load_config(config_path);
    } catch (const std::exception& e) {
        rotforch::ordered_json err;
        err["error"] = {{"subcommand", sub}, {"message", e.what()}};
        std::cout << err.dump() << "\n";
        return 2;
    }

    rotforch::CliOverrides ov;
    if (seed_set) ov.seed = seed;
    if (samples_set) ov.samples = samples;
    ov.quiet = quiet;
    if (!estimates_csv.empty()) {
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const std::size_t next = estimates_csv.find(',', pos);
            ov.estimates.push_back(estimates_csv.substr(
                pos, next == std::string::npos ? next : next - pos));
            pos = next == std::string::npos ? next : next + 1;
        }
    }

    return rotforch::dispatch(sub, cfg, out_dir, ov);
}
