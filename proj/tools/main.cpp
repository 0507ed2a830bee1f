#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedsim/compare.hpp"
#include "fedsim/config.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/experiment.hpp"

namespace {

constexpr const char* kVersion = "fedsim 1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out_dir) {
    fedsim::ExperimentConfig config = fedsim::parse_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.out_dir = *out_dir;
    const auto result = fedsim::run_experiment(config);

    const auto& last = result.records.back();
    std::printf("run complete: %zu evaluated rounds, final accuracy %.4f, loss %.4f\n",
                result.records.size() - 1, last.accuracy, last.loss);
    std::printf("|E| statistic %.6f (%s)\n", result.e_audit.value,
                result.e_audit.passes ? "<= 1/2, condition holds" : "> 1/2, condition violated");
    std::printf("transfers: %llu model moves\n",
                static_cast<unsigned long long>(result.ledger.total()));
    if (!result.lemma_log.entries.empty()) {
        std::printf("lemma audit: %.1f%% of rounds hold with final c = %.4f\n",
                    100.0 * result.lemma_log.re_audit_hold_fraction(), result.lemma_log.final_c);
    }
    std::printf("outputs in %s\n", result.out_dir.string().c_str());
    return 0;
}

int cmd_audit(const std::string& config_path) {
    fedsim::ExperimentConfig config = fedsim::parse_config(config_path);
    auto streams = fedsim::seed_streams(config.seed, config.devices);

    fedsim::Dataset test;
    fedsim::Dataset train;
    if (config.dataset.is_idx) {
        train = fedsim::load_idx(config.dataset.idx.train_images, config.dataset.idx.train_labels);
    } else {
        const auto& syn = config.dataset.synthetic;
        auto full = fedsim::generate_synthetic(syn.n_train + syn.n_test, syn.d, syn.n_classes,
                                               syn.separation, streams.dataset);
        auto split = fedsim::split_dataset(full, syn.n_train);
        train = std::move(split.first);
    }

    fedsim::Partition partition;
    if (config.partition.scheme == "iid") {
        partition = fedsim::partition_iid(train, config.devices, streams.partition);
    } else if (config.partition.scheme == "pathological") {
        partition =
            fedsim::partition_pathological(train, config.devices, config.partition.xi, streams.partition);
    } else {
        partition =
            fedsim::partition_dirichlet(train, config.devices, config.partition.alpha, streams.partition);
    }
    fedsim::validate_partition(partition, train);
    const auto grouping = fedsim::assign_edges(config.devices, config.edges, streams.topology);
    const auto audit = fedsim::audit_convergence_condition(grouping, partition);

    std::printf("partition: %s over %d devices, %d edges\n", partition.scheme.c_str(),
                config.devices, config.edges);
    for (int k = 0; k < partition.n_devices(); ++k) {
        int classes_present = 0;
        for (auto c : partition.class_histograms[k]) classes_present += c > 0 ? 1 : 0;
        std::printf("  device %2d: %5lld samples, %d classes\n", k,
                    static_cast<long long>(partition.device_size(k)), classes_present);
    }
    std::printf("|E| = %.6f -> %s\n", audit.value,
                audit.passes ? "convergence condition satisfied (<= 1/2)"
                             : "convergence condition violated (> 1/2)");
    return 0;
}

int cmd_compare(const std::vector<std::string>& files, double target,
                const std::optional<std::string>& csv_out) {
    const auto cmp = fedsim::compare_runs(files, target);
    std::fputs(cmp.to_text().c_str(), stdout);
    if (csv_out) {
        std::FILE* f = std::fopen(csv_out->c_str(), "w");
        if (!f) throw fedsim::io_error("cannot write " + *csv_out);
        std::fputs(cmp.to_csv().c_str(), f);
        std::fclose(f);
    } else {
        std::fputs("\n", stdout);
        std::fputs(cmp.to_csv().c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-decentralized federated learning simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    auto* run = app.add_subcommand("run", "Run a configured experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Override the output directory");

    std::string audit_config;
    auto* audit = app.add_subcommand("audit", "Partition and |E| audit only");
    audit->add_option("--config", audit_config, "Experiment config (JSON)")->required();

    std::vector<std::string> compare_files;
    double target = 0.9;
    std::optional<std::string> csv_out;
    auto* compare = app.add_subcommand("compare", "Tabulate metrics files");
    compare->add_option("files", compare_files, "metrics.csv files")->required();
    compare->add_option("--target", target, "Accuracy target for cost column");
    compare->add_option("--csv", csv_out, "Write the CSV table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, out_dir);
        if (audit->parsed()) return cmd_audit(audit_config);
        if (compare->parsed()) return cmd_compare(compare_files, target, csv_out);
    } catch (const fedsim::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
