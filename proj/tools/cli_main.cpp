// Command-line driver for the sentiment-forecasting pipeline. One subcommand
// per stage plus `all`; stages read and write artifacts under --out so any
// prefix of the pipeline can be rerun reproducibly.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sentipred/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::vector<std::string> overrides;  // key=value
    bool dry_run = false;
};

sentipred::PipelineConfig resolve_config(const CliOptions& opts) {
    sentipred::PipelineConfig config;
    if (!opts.config_path.empty()) config = sentipred::load_config(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + kv + "'");
        sentipred::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opts.out_dir.empty()) sentipred::apply_override(config, "out_dir", opts.out_dir);
    if (!opts.seed.empty()) sentipred::apply_override(config, "seed", opts.seed);
    return config;
}

void print_plan(const std::vector<sentipred::Stage>& stages,
                const sentipred::PipelineConfig& config) {
    for (sentipred::Stage stage : stages) {
        std::cout << sentipred::to_string(stage) << ":\n";
        for (const std::string& in : sentipred::stage_inputs(stage, config))
            std::cout << "  reads  " << in << "\n";
        for (const std::string& out : sentipred::stage_outputs(stage, config))
            std::cout << "  writes " << out << "\n";
    }
}

int run(const std::vector<sentipred::Stage>& stages, const CliOptions& opts,
        const std::string& stage_name) {
    try {
        const sentipred::PipelineConfig config = resolve_config(opts);
        if (opts.dry_run) {
            print_plan(stages, config);
            return 0;
        }
        for (sentipred::Stage stage : stages) {
            sentipred::run_stage(stage, config);
            std::cout << "completed stage " << sentipred::to_string(stage) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        const nlohmann::json err = {{"error", e.what()}, {"stage", stage_name}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stock-forum sentiment indices and forecasting pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global flags after the subcommand name

    CliOptions opts;
    app.add_option("--config", opts.config_path, "Config file (key=value lines)");
    app.add_option("--out", opts.out_dir, "Output directory (overrides config)");
    app.add_option("--seed", opts.seed, "Random seed (overrides config)");
    app.add_option("--set", opts.overrides, "Override any config key, e.g. --set alpha=0.01");
    app.add_flag("--dry-run", opts.dry_run, "Print the stage plan without executing");

    int rc = 0;
    for (sentipred::Stage stage : sentipred::all_stages()) {
        const std::string name = sentipred::to_string(stage);
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " stage");
        sub->callback([&rc, &opts, stage, name]() { rc = run({stage}, opts, name); });
    }
    CLI::App* all = app.add_subcommand("all", "Run every stage in order");
    all->callback([&rc, &opts]() { rc = run(sentipred::all_stages(), opts, "all"); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
