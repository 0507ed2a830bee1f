#include "fedsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

#include "fedsim/algorithms.hpp"
#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

Dataset subset(const Dataset& data, int n_keep, Rng& rng) {
    std::vector<int> perm(data.n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Dataset out;
    out.n = n_keep;
    out.d = data.d;
    out.n_classes = data.n_classes;
    out.inputs.resize(static_cast<std::size_t>(n_keep) * data.d);
    out.labels.resize(n_keep);
    for (int i = 0; i < n_keep; ++i) {
        const double* src = data.row(perm[i]);
        std::copy(src, src + data.d, out.inputs.begin() + static_cast<std::size_t>(i) * data.d);
        out.labels[i] = data.labels[perm[i]];
    }
    return out;
}

Dataset build_train(const ExperimentConfig& config, Rng& dataset_rng, Dataset& test_out) {
    if (config.dataset.is_idx) {
        Dataset train = load_idx(config.dataset.idx.train_images, config.dataset.idx.train_labels);
        test_out = load_idx(config.dataset.idx.test_images, config.dataset.idx.test_labels);
        const int n_classes = std::max(train.n_classes, test_out.n_classes);
        train.n_classes = test_out.n_classes = n_classes;
        if (train.d != test_out.d) {
            throw config_error("train and test IDX files disagree on image size");
        }
        const int keep = config.dataset.idx.subset_train;
        if (keep > 0 && keep < train.n) {
            train = subset(train, keep, dataset_rng);
        }
        return train;
    }
    const auto& syn = config.dataset.synthetic;
    Dataset full = generate_synthetic(syn.n_train + syn.n_test, syn.d, syn.n_classes,
                                      syn.separation, dataset_rng);
    auto [train, test] = split_dataset(full, syn.n_train);
    test_out = std::move(test);
    return std::move(train);
}

Partition build_partition(const ExperimentConfig& config, const Dataset& train, Rng& rng) {
    if (config.partition.scheme == "iid") return partition_iid(train, config.devices, rng);
    if (config.partition.scheme == "pathological") {
        return partition_pathological(train, config.devices, config.partition.xi, rng);
    }
    return partition_dirichlet(train, config.devices, config.partition.alpha, rng);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << text;
    if (!out) throw io_error("failed while writing " + path.string());
}

}  // namespace

StreamSet seed_streams(std::uint64_t master_seed, int n_devices) {
    if (n_devices < 1) throw contract_error("seed_streams: need at least one device stream");
    StreamSet streams{
        make_stream(master_seed, "dataset"),
        make_stream(master_seed, "partition"),
        make_stream(master_seed, "topology"),
        make_stream(master_seed, "init"),
        {},
    };
    streams.devices.reserve(static_cast<std::size_t>(n_devices));
    for (int k = 0; k < n_devices; ++k) {
        streams.devices.push_back(make_stream(master_seed, "device_" + std::to_string(k)));
    }
    return streams;
}

RunResult run_experiment(const ExperimentConfig& config) {
    RunResult result;
    result.out_dir = config.out_dir;
    std::filesystem::create_directories(result.out_dir);

    StreamSet streams = seed_streams(config.seed, config.devices);

    Dataset test;
    const Dataset train = build_train(config, streams.dataset, test);
    if (test.n < 1) throw config_error("test set is empty");

    const Model model = config.model.arch == "linear"
                            ? Model::linear(train.d, train.n_classes)
                            : Model(train.d, config.model.hidden, train.n_classes);

    const Partition partition = build_partition(config, train, streams.partition);
    validate_partition(partition, train);
    const EdgeGrouping grouping = assign_edges(config.devices, config.edges, streams.topology);
    result.e_audit = audit_convergence_condition(grouping, partition);

    std::vector<Rng> device_rngs = std::move(streams.devices);
    std::vector<std::uint64_t> device_steps(static_cast<std::size_t>(config.devices), 0);
    TrainContext ctx;
    ctx.model = &model;
    ctx.train = &train;
    ctx.partition = &partition;
    ctx.cfg = config.algo;
    ctx.device_rngs = &device_rngs;
    ctx.device_steps = &device_steps;
    ctx.parallel_rings = config.parallel_rings;

    ParameterVector w = init_params(model, streams.init);

    const EvalResult baseline = evaluate(model, w, test);
    result.records.push_back({-1, baseline.accuracy, baseline.mean_loss, 0.0, 0, {}});

    const bool auditing = config.audit_lemma && config.algorithm == Algorithm::FedSR;
    Batch train_full;
    ParameterVector y_best;
    double y_best_loss = 0.0;
    double loss_cur = 0.0;
    double c_est = 0.0;
    if (auditing) {
        train_full = full_batch(train);
        y_best = w;
        y_best_loss = loss_only(model, w, train_full);
        loss_cur = y_best_loss;
    }

    std::vector<nlohmann::json> plan_log;
    plan_log.reserve(static_cast<std::size_t>(config.rounds));

    for (int t = 0; t < config.rounds; ++t) {
        const double lr_t = lr_at(config.lr_schedule, t);
        nlohmann::json plan_json;
        std::vector<double> distances;
        ParameterVector w_prev;
        RoundPlan plan;

        if (auditing) w_prev = w;
        try {
            switch (config.algorithm) {
                case Algorithm::FedAvg:
                case Algorithm::FedProx: {
                    const auto sampled =
                        sample_devices(config.devices, config.sample_fraction, streams.topology, 1);
                    const double mu = config.algorithm == Algorithm::FedProx ? config.algo.mu : 0.0;
                    w = fedavg_round(ctx, sampled, w, lr_t, mu, &result.ledger);
                    plan_json = {{"round", t}, {"sampled", sampled}};
                    break;
                }
                case Algorithm::FedSR: {
                    plan = plan_round(grouping, partition, config.sample_fraction, t,
                                      streams.topology);
                    std::vector<ParameterVector> edge_models;
                    w = fedsr_round(ctx, plan, w, lr_t, &result.ledger, &edge_models);
                    for (const auto& m : edge_models) distances.push_back(m.l2_distance(w));
                    plan_json = roundplan_to_json(plan);
                    plan_json["edge_distances"] = distances;
                    break;
                }
                case Algorithm::HierFAvg: {
                    plan = plan_round(grouping, partition, config.sample_fraction, t,
                                      streams.topology);
                    std::vector<ParameterVector> edge_models;
                    w = hierfavg_round(ctx, plan, w, lr_t, &result.ledger, &edge_models);
                    for (const auto& m : edge_models) distances.push_back(m.l2_distance(w));
                    plan_json = roundplan_to_json(plan);
                    plan_json["edge_distances"] = distances;
                    break;
                }
                case Algorithm::RingOpt: {
                    auto sampled =
                        sample_devices(config.devices, config.sample_fraction, streams.topology, 1);
                    RingOrder ring{sampled};
                    streams.topology.shuffle(ring.devices);
                    w = ring_round(ctx, ring, w, lr_t, &result.ledger);
                    plan_json = {{"round", t}, {"sampled", sampled}, {"ring", ring.devices}};
                    break;
                }
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("round " + std::to_string(t) + " (" +
                                     algorithm_name(config.algorithm) + " training): " + e.what());
        }

        const EvalResult eval = evaluate(model, w, test);
        result.records.push_back(
            {t, eval.accuracy, eval.mean_loss, lr_t, result.ledger.total(), distances});
        plan_log.push_back(std::move(plan_json));

        if (auditing) {
            // Empirical gradient-bound update at the round's starting model.
            const ParameterVector sample[] = {w_prev};
            c_est = std::max(c_est, estimate_gradient_bound(model, train, partition, sample));

            const double total_weight = static_cast<double>(
                std::accumulate(plan.edge_weights.begin(), plan.edge_weights.end(),
                                static_cast<std::int64_t>(0)));
            LemmaTerms terms;
            terms.lhs = [&] {
                const double d = w.l2_distance(y_best);
                return d * d;
            }();
            terms.dist_sq = [&] {
                const double d = w_prev.l2_distance(y_best);
                return d * d;
            }();
            double min_frac = 1.0;
            for (std::size_t m = 0; m < plan.edge_weights.size(); ++m) {
                const double frac = static_cast<double>(plan.edge_weights[m]) / total_weight;
                terms.weight_sq_sum += frac * frac;
                const double ring_size = static_cast<double>(plan.rings[m].devices.size());
                terms.ring_term += frac * frac * ring_size * ring_size;
                min_frac = std::min(min_frac, frac);
            }
            terms.lr = lr_t;
            terms.a = min_frac;
            terms.loss_cur = loss_cur;
            terms.loss_ref = y_best_loss;

            result.lemma_log.record(t, terms, c_est);
            const auto& verdict = result.lemma_log.entries.back().verdict;
            if (!verdict.holds && std::isfinite(verdict.c_required)) {
                c_est = std::max(c_est, verdict.c_required);
            }

            loss_cur = loss_only(model, w, train_full);
            if (loss_cur < y_best_loss) {
                y_best = w;
                y_best_loss = loss_cur;
            }
        }
    }
    result.lemma_log.final_c = c_est;
    result.final_params = std::move(w);

    // Files.
    result.metrics_csv = result.out_dir / "metrics.csv";
    emit_metrics(result.records, result.metrics_csv);

    nlohmann::json summary = run_summary(result.records, config.eval_targets, result.ledger,
                                         config.algorithm);
    summary["e_statistic"] = {{"value", result.e_audit.value}, {"passes", result.e_audit.passes}};
    const auto schedule_audit = audit_schedule(config.lr_schedule);
    summary["schedule_audit"] = {{"kind", schedule_kind_name(config.lr_schedule.kind)},
                                 {"passes", schedule_audit.passes},
                                 {"failed_conditions", schedule_audit.failed}};
    if (auditing) {
        summary["lemma_hold_fraction"] = result.lemma_log.re_audit_hold_fraction();
        summary["lemma_final_c"] = result.lemma_log.final_c;
    }
    write_text(result.out_dir / "summary.json", summary.dump(2) + "\n");

    write_text(result.out_dir / "partition.json",
               partition_to_json(partition, config.seed).dump(2) + "\n");

    std::string plans_text;
    for (const auto& plan_json : plan_log) plans_text += plan_json.dump() + "\n";
    write_text(result.out_dir / "plans.jsonl", plans_text);

    if (auditing) {
        write_text(result.out_dir / "audit.json", result.lemma_log.to_json().dump(2) + "\n");
    }

    result.manifest = {
        {"schema_version", 1},
        {"config", config.to_json()},
        {"partition_summary",
         {{"scheme", partition.scheme},
          {"params", partition.params},
          {"device_sizes", [&] {
               std::vector<std::int64_t> sizes;
               for (int k = 0; k < partition.n_devices(); ++k) sizes.push_back(partition.device_size(k));
               return sizes;
           }()}}},
        {"edge_grouping", grouping.devices_of_edge},
        {"e_statistic", {{"value", result.e_audit.value}, {"passes", result.e_audit.passes}}},
        {"device_gradient_steps", device_steps},
        {"files",
         {{"metrics", "metrics.csv"},
          {"summary", "summary.json"},
          {"partition", "partition.json"},
          {"plans", "plans.jsonl"}}},
    };
    if (auditing) result.manifest["files"]["audit"] = "audit.json";
    write_text(result.out_dir / "manifest.json", result.manifest.dump(2) + "\n");

    return result;
}

}  // namespace fedsim
