#include "fedsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string normalized(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '_' || c == '-') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// Common misnomers that plain edit distance would miss.
const std::pair<const char*, const char*> kAliases[] = {
    {"learningrate", "lr_schedule"}, {"lr", "lr_schedule"},       {"eta", "lr_schedule"},
    {"schedule", "lr_schedule"},     {"clients", "devices"},      {"numdevices", "devices"},
    {"k", "devices"},                {"m", "edges"},              {"numedges", "edges"},
    {"epochs", "local_epochs"},      {"e", "local_epochs"},       {"r", "ring_rounds"},
    {"batchsize", "batch_size"},     {"fraction", "sample_fraction"},
    {"output", "out_dir"},           {"outdir", "out_dir"},       {"t", "rounds"},
};

std::string nearest_key(const std::string& key, const std::vector<std::string>& known) {
    const std::string norm = normalized(key);
    for (const auto& [alias, target] : kAliases) {
        if (norm == alias &&
            std::find(known.begin(), known.end(), target) != known.end()) {
            return target;
        }
    }
    std::string best;
    int best_dist = std::numeric_limits<int>::max();
    for (const auto& candidate : known) {
        const int dist = levenshtein(norm, normalized(candidate));
        if (dist < best_dist) {
            best_dist = dist;
            best = candidate;
        }
    }
    return best;
}

// 1-based line of the first occurrence of "key" in the raw config text;
// 0 when unknown.
int line_of_key(const std::string& raw, const std::string& key) {
    const auto pos = raw.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(raw.begin(), raw.begin() + static_cast<long>(pos), '\n'));
}

struct Ctx {
    const std::string& raw;
    std::string where;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        std::string loc;
        const int line = line_of_key(raw, key);
        if (line > 0) loc = " (line " + std::to_string(line) + ")";
        throw config_error("config key '" + key + "' in " + where + loc + ": " + message);
    }
};

void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& known,
                         const Ctx& ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            std::string msg = "unknown key";
            const std::string suggestion = nearest_key(it.key(), known);
            if (!suggestion.empty()) msg += "; did you mean '" + suggestion + "'?";
            ctx.fail(it.key(), msg);
        }
    }
}

const nlohmann::json& require_key(const nlohmann::json& obj, const std::string& key,
                                  const char* expectation, const Ctx& ctx) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw config_error("missing required key '" + key + "' in " + ctx.where + ": expected " +
                           expectation);
    }
    return *it;
}

int get_int(const nlohmann::json& obj, const std::string& key, const Ctx& ctx) {
    const auto& v = require_key(obj, key, "an integer", ctx);
    if (!v.is_number_integer()) ctx.fail(key, "expected an integer, got " + std::string(v.type_name()));
    return v.get<int>();
}

int get_int_or(const nlohmann::json& obj, const std::string& key, int fallback, const Ctx& ctx) {
    if (!obj.contains(key)) return fallback;
    return get_int(obj, key, ctx);
}

double get_double(const nlohmann::json& obj, const std::string& key, const Ctx& ctx) {
    const auto& v = require_key(obj, key, "a number", ctx);
    if (!v.is_number()) ctx.fail(key, "expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
}

double get_double_or(const nlohmann::json& obj, const std::string& key, double fallback,
                     const Ctx& ctx) {
    if (!obj.contains(key)) return fallback;
    return get_double(obj, key, ctx);
}

std::string get_string(const nlohmann::json& obj, const std::string& key, const Ctx& ctx) {
    const auto& v = require_key(obj, key, "a string", ctx);
    if (!v.is_string()) ctx.fail(key, "expected a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
}

bool get_bool_or(const nlohmann::json& obj, const std::string& key, bool fallback, const Ctx& ctx) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) ctx.fail(key, "expected a boolean, got " + std::string(v.type_name()));
    return v.get<bool>();
}

DatasetSpec parse_dataset(const nlohmann::json& j, const std::string& raw) {
    Ctx ctx{raw, "dataset"};
    if (!j.is_object()) throw config_error("config key 'dataset': expected an object");
    const std::string type = get_string(j, "type", ctx);
    DatasetSpec spec;
    if (type == "synthetic") {
        reject_unknown_keys(j, {"type", "n_train", "n_test", "d", "classes", "separation"}, ctx);
        spec.is_idx = false;
        spec.synthetic.n_train = get_int(j, "n_train", ctx);
        spec.synthetic.n_test = get_int(j, "n_test", ctx);
        spec.synthetic.d = get_int(j, "d", ctx);
        spec.synthetic.n_classes = get_int(j, "classes", ctx);
        spec.synthetic.separation = get_double(j, "separation", ctx);
        if (spec.synthetic.n_train < 1) ctx.fail("n_train", "must be >= 1");
        if (spec.synthetic.n_test < 1) ctx.fail("n_test", "must be >= 1");
        if (spec.synthetic.d < 2) ctx.fail("d", "must be >= 2");
        if (spec.synthetic.n_classes < 2) ctx.fail("classes", "must be >= 2");
        if (spec.synthetic.separation < 0.0) ctx.fail("separation", "must be >= 0");
    } else if (type == "idx") {
        reject_unknown_keys(j,
                            {"type", "train_images", "train_labels", "test_images", "test_labels",
                             "subset_train"},
                            ctx);
        spec.is_idx = true;
        spec.idx.train_images = get_string(j, "train_images", ctx);
        spec.idx.train_labels = get_string(j, "train_labels", ctx);
        spec.idx.test_images = get_string(j, "test_images", ctx);
        spec.idx.test_labels = get_string(j, "test_labels", ctx);
        spec.idx.subset_train = get_int_or(j, "subset_train", 0, ctx);
        if (spec.idx.subset_train < 0) ctx.fail("subset_train", "must be >= 0");
    } else {
        ctx.fail("type", "expected 'synthetic' or 'idx'");
    }
    return spec;
}

PartitionSpec parse_partition(const nlohmann::json& j, const std::string& raw) {
    Ctx ctx{raw, "partition"};
    if (!j.is_object()) throw config_error("config key 'partition': expected an object");
    PartitionSpec spec;
    spec.scheme = get_string(j, "scheme", ctx);
    if (spec.scheme == "iid") {
        reject_unknown_keys(j, {"scheme"}, ctx);
    } else if (spec.scheme == "pathological") {
        reject_unknown_keys(j, {"scheme", "xi"}, ctx);
        spec.xi = get_int(j, "xi", ctx);
        if (spec.xi < 1) ctx.fail("xi", "xi must be >= 1");
    } else if (spec.scheme == "dirichlet") {
        reject_unknown_keys(j, {"scheme", "alpha"}, ctx);
        spec.alpha = get_double(j, "alpha", ctx);
        if (!(spec.alpha > 0.0)) ctx.fail("alpha", "must be > 0");
    } else {
        ctx.fail("scheme", "expected 'iid', 'pathological' or 'dirichlet'");
    }
    return spec;
}

ModelSpec parse_model(const nlohmann::json& j, const std::string& raw) {
    Ctx ctx{raw, "model"};
    if (!j.is_object()) throw config_error("config key 'model': expected an object");
    ModelSpec spec;
    spec.arch = get_string(j, "arch", ctx);
    if (spec.arch == "linear") {
        reject_unknown_keys(j, {"arch"}, ctx);
    } else if (spec.arch == "mlp") {
        reject_unknown_keys(j, {"arch", "hidden"}, ctx);
        const auto& hidden = require_key(j, "hidden", "an array of layer sizes", ctx);
        if (!hidden.is_array() || hidden.empty()) {
            ctx.fail("hidden", "expected a non-empty array of layer sizes");
        }
        for (const auto& h : hidden) {
            if (!h.is_number_integer() || h.get<int>() < 1) {
                ctx.fail("hidden", "layer sizes must be integers >= 1");
            }
            spec.hidden.push_back(h.get<int>());
        }
    } else {
        ctx.fail("arch", "expected 'linear' or 'mlp'");
    }
    return spec;
}

LrSchedule parse_schedule(const nlohmann::json& j, int rounds, const std::string& raw) {
    Ctx ctx{raw, "lr_schedule"};
    if (!j.is_object()) throw config_error("config key 'lr_schedule': expected an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "cosine") {
        reject_unknown_keys(j, {"kind", "lr0", "lr_final"}, ctx);
        const double lr0 = get_double(j, "lr0", ctx);
        const double lr_final = get_double(j, "lr_final", ctx);
        if (rounds < 1) ctx.fail("kind", "a cosine schedule needs rounds >= 1");
        try {
            return LrSchedule::cosine(lr0, lr_final, rounds);
        } catch (const contract_error& e) {
            throw config_error(std::string("lr_schedule: ") + e.what());
        }
    }
    if (kind == "harmonic" || kind == "constant") {
        reject_unknown_keys(j, {"kind", "lr0"}, ctx);
        const double lr0 = get_double(j, "lr0", ctx);
        if (!(lr0 > 0.0)) ctx.fail("lr0", "must be > 0");
        return kind == "harmonic" ? LrSchedule::harmonic(lr0) : LrSchedule::constant(lr0);
    }
    ctx.fail("kind", "expected 'cosine', 'harmonic' or 'constant'");
}

std::string default_out_dir() {
    if (const char* env = std::getenv("FEDSIM_OUT_DIR")) return env;
    return "runs";
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    if (dataset.is_idx) {
        j["dataset"] = {{"type", "idx"},
                        {"train_images", dataset.idx.train_images},
                        {"train_labels", dataset.idx.train_labels},
                        {"test_images", dataset.idx.test_images},
                        {"test_labels", dataset.idx.test_labels},
                        {"subset_train", dataset.idx.subset_train}};
    } else {
        j["dataset"] = {{"type", "synthetic"},
                        {"n_train", dataset.synthetic.n_train},
                        {"n_test", dataset.synthetic.n_test},
                        {"d", dataset.synthetic.d},
                        {"classes", dataset.synthetic.n_classes},
                        {"separation", dataset.synthetic.separation}};
    }
    j["devices"] = devices;
    j["edges"] = edges;
    if (partition.scheme == "pathological") {
        j["partition"] = {{"scheme", partition.scheme}, {"xi", partition.xi}};
    } else if (partition.scheme == "dirichlet") {
        j["partition"] = {{"scheme", partition.scheme}, {"alpha", partition.alpha}};
    } else {
        j["partition"] = {{"scheme", partition.scheme}};
    }
    if (model.arch == "mlp") {
        j["model"] = {{"arch", "mlp"}, {"hidden", model.hidden}};
    } else {
        j["model"] = {{"arch", "linear"}};
    }
    j["algorithm"] = algorithm_name(algorithm);
    j["local_epochs"] = algo.local_epochs;
    j["ring_rounds"] = algo.ring_rounds;
    j["mu"] = algo.mu;
    j["edge_period"] = algo.edge_period;
    j["batch_size"] = algo.batch_size;
    j["momentum"] = algo.momentum;
    j["rounds"] = rounds;
    switch (lr_schedule.kind) {
        case ScheduleKind::Cosine:
            j["lr_schedule"] = {{"kind", "cosine"}, {"lr0", lr_schedule.lr0},
                                {"lr_final", lr_schedule.lr_final}};
            break;
        case ScheduleKind::Harmonic:
            j["lr_schedule"] = {{"kind", "harmonic"}, {"lr0", lr_schedule.lr0}};
            break;
        case ScheduleKind::Constant:
            j["lr_schedule"] = {{"kind", "constant"}, {"lr0", lr_schedule.lr0}};
            break;
    }
    j["sample_fraction"] = sample_fraction;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["parallel_rings"] = parallel_rings;
    j["audit"] = audit_lemma;
    j["eval_targets"] = eval_targets;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& raw) {
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    Ctx ctx{raw, "config"};
    reject_unknown_keys(j,
                        {"schema_version", "dataset", "devices", "edges", "partition", "model",
                         "algorithm", "local_epochs", "ring_rounds", "mu", "edge_period",
                         "batch_size", "momentum", "rounds", "lr_schedule", "sample_fraction",
                         "seed", "out_dir", "parallel_rings", "audit", "eval_targets"},
                        ctx);

    ExperimentConfig config;
    config.schema_version = get_int(j, "schema_version", ctx);
    if (config.schema_version != 1) ctx.fail("schema_version", "this build understands version 1");

    config.dataset = parse_dataset(require_key(j, "dataset", "an object", ctx), raw);
    config.devices = get_int(j, "devices", ctx);
    if (config.devices < 1) ctx.fail("devices", "must be >= 1");
    config.edges = get_int_or(j, "edges", 1, ctx);
    if (config.edges < 1) ctx.fail("edges", "must be >= 1");
    if (config.edges > config.devices) ctx.fail("edges", "cannot exceed devices");

    if (j.contains("partition")) {
        config.partition = parse_partition(j.at("partition"), raw);
    }
    config.model = parse_model(require_key(j, "model", "an object", ctx), raw);
    config.algorithm = [&] {
        const std::string name = get_string(j, "algorithm", ctx);
        try {
            return algorithm_from_name(name);
        } catch (const contract_error& e) {
            ctx.fail("algorithm", e.what());
        }
    }();
    config.algo.algo = config.algorithm;
    config.algo.local_epochs = get_int_or(j, "local_epochs", 1, ctx);
    if (config.algo.local_epochs < 0) ctx.fail("local_epochs", "must be >= 0");
    config.algo.ring_rounds = get_int_or(j, "ring_rounds", 1, ctx);
    if (config.algo.ring_rounds < 1) ctx.fail("ring_rounds", "must be >= 1");
    config.algo.mu = get_double_or(j, "mu", 0.0, ctx);
    if (config.algo.mu < 0.0) ctx.fail("mu", "must be >= 0");
    config.algo.edge_period = get_int_or(j, "edge_period", 1, ctx);
    if (config.algo.edge_period < 1) ctx.fail("edge_period", "must be >= 1");
    config.algo.batch_size = get_int_or(j, "batch_size", 32, ctx);
    if (config.algo.batch_size < 1) ctx.fail("batch_size", "must be >= 1");
    config.algo.momentum = get_double_or(j, "momentum", 0.5, ctx);
    if (config.algo.momentum < 0.0 || config.algo.momentum >= 1.0) {
        ctx.fail("momentum", "must be in [0, 1)");
    }

    config.rounds = get_int(j, "rounds", ctx);
    if (config.rounds < 0) ctx.fail("rounds", "must be >= 0");
    config.lr_schedule =
        parse_schedule(require_key(j, "lr_schedule", "an object", ctx), config.rounds, raw);

    config.sample_fraction = get_double_or(j, "sample_fraction", 1.0, ctx);
    if (!(config.sample_fraction > 0.0) || config.sample_fraction > 1.0) {
        ctx.fail("sample_fraction", "must be in (0, 1]");
    }
    const int per_round = static_cast<int>(std::lround(config.sample_fraction * config.devices));
    if (per_round < config.edges) {
        ctx.fail("sample_fraction", "round(fraction*devices) must cover every edge");
    }

    const auto& seed_v = require_key(j, "seed", "an unsigned integer", ctx);
    if (!seed_v.is_number_unsigned() && !seed_v.is_number_integer()) {
        ctx.fail("seed", "expected an integer seed");
    }
    config.seed = seed_v.get<std::uint64_t>();

    config.out_dir = j.contains("out_dir") ? get_string(j, "out_dir", ctx) : default_out_dir();
    config.parallel_rings = get_bool_or(j, "parallel_rings", false, ctx);
    config.audit_lemma = get_bool_or(j, "audit", config.algorithm == Algorithm::FedSR, ctx);
    if (j.contains("eval_targets")) {
        const auto& targets = j.at("eval_targets");
        if (!targets.is_array()) ctx.fail("eval_targets", "expected an array of accuracies");
        config.eval_targets.clear();
        for (const auto& t : targets) {
            if (!t.is_number() || t.get<double>() < 0.0 || t.get<double>() > 1.0) {
                ctx.fail("eval_targets", "targets must be numbers in [0, 1]");
            }
            config.eval_targets.push_back(t.get<double>());
        }
    }

    // Cross-field checks that do not need the data loaded.
    if (!config.dataset.is_idx) {
        const auto& syn = config.dataset.synthetic;
        if (syn.n_train < config.devices) {
            ctx.fail("devices", "more devices than training samples");
        }
        if (config.partition.scheme == "pathological" &&
            config.devices * config.partition.xi > syn.n_train) {
            ctx.fail("xi", "K*xi shards exceed the training set size");
        }
    }
    return config;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string raw = buffer.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the offset of the syntax error; report its line.
        const std::size_t byte = std::min<std::size_t>(e.byte, raw.size());
        const int line =
            1 + static_cast<int>(std::count(raw.begin(), raw.begin() + static_cast<long>(byte), '\n'));
        throw config_error("config " + path + " is not valid JSON (line " + std::to_string(line) +
                           "): " + e.what());
    }
    return config_from_json(j, raw);
}

}  // namespace fedsim
