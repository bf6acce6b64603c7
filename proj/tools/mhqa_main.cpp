#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhqa/config.hpp"
#include "mhqa/run.hpp"
#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Latent-rationale multi-hop QA: synthesize data, train, evaluate, inspect"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    std::optional<std::string> out_dir, seed, k_doc, k_sent, max_rationale, endpoint;
    std::optional<std::string> dataset, dev_dataset, checkpoint;
    bool independent = false, contiguous = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--out", out_dir, "output directory (all files are written under it)");
        cmd->add_option("--seed", seed, "master random seed");
        cmd->add_option("--k-doc", k_doc, "document candidates kept per example");
        cmd->add_option("--k-sent", k_sent, "sentence-set candidates kept per document set");
        cmd->add_option("--max-rationale", max_rationale, "per-document rationale size cap");
        cmd->add_flag("--contiguous", contiguous, "restrict rationales to contiguous sentence runs");
        cmd->add_flag("--independent-docs", independent,
                      "use the factorized document selection baseline");
        cmd->add_option("--external-endpoint", endpoint, "generation service URL for answers");
        cmd->add_option("--dataset", dataset, "dataset path (defaults under --out)");
        cmd->add_option("--dev-dataset", dev_dataset, "dev dataset path (defaults under --out)");
        cmd->add_option("--checkpoint", checkpoint, "checkpoint path (defaults under --out)");
    };

    for (const char* name : {"synth", "train", "eval", "predict", "gradcheck", "shortcuts"}) {
        add_common(app.add_subcommand(name));
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    if (out_dir) overrides.emplace_back("out_dir", *out_dir);
    if (seed) overrides.emplace_back("seed", *seed);
    if (k_doc) overrides.emplace_back("k_doc", *k_doc);
    if (k_sent) overrides.emplace_back("k_sent", *k_sent);
    if (max_rationale) overrides.emplace_back("max_rationale", *max_rationale);
    if (contiguous) overrides.emplace_back("contiguous", "true");
    if (independent) overrides.emplace_back("independent_docs", "true");
    if (endpoint) overrides.emplace_back("external_endpoint", *endpoint);
    if (dataset) overrides.emplace_back("dataset", *dataset);
    if (dev_dataset) overrides.emplace_back("dev_dataset", *dev_dataset);
    if (checkpoint) overrides.emplace_back("checkpoint", *checkpoint);

    try {
        const mhqa::RunConfig cfg = config_path.empty()
                                        ? mhqa::config_from_overrides(overrides)
                                        : mhqa::parse_config(config_path, overrides);
        return mhqa::run_command(command, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
