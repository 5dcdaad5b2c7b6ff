#include "sae/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sae/bounds.hpp"
#include "sae/data_io.hpp"
#include "sae/errors.hpp"
#include "sae/init.hpp"

namespace sae::cli {

std::vector<Skeleton> depth_pattern(Eigen::Index n0) {
    std::vector<Skeleton> out;
    for (int depth = 0; depth <= 4; ++depth) {
        std::vector<Eigen::Index> dims{n0, 65};
        for (int k = depth; k >= 1; --k) dims.push_back((Eigen::Index{1} << (k + 1)) + 1);
        dims.push_back(3);
        out.emplace_back(std::move(dims));
    }
    return out;
}

std::vector<Skeleton> width_sweep(Eigen::Index n0, Eigen::Index n1) {
    std::vector<Skeleton> out;
    for (Eigen::Index n2 = 1; n2 <= n1; ++n2) out.emplace_back(std::vector<Eigen::Index>{n0, n1, n2});
    return out;
}

namespace {

SymmetricAutoencoder baseline_net(const Skeleton& skeleton, const InitStudyConfig& config, Rng& rng) {
    if (config.baseline == Baseline::He) return he_init(skeleton, config.act, rng, config.tag);
    return assemble(lift(orthogonal_random_init(skeleton, config.act, rng), config.tag));
}

InitStudyRow study_one(const DataSplit& data, const Skeleton& skeleton, const InitStudyConfig& config) {
    const SymmetricAutoencoder eys = assemble(lift(eys_init(data.train, skeleton, config.act), config.tag));
    InitStudyRow row{skeleton, empirical_mse(eys, data.test), std::numeric_limits<double>::infinity()};
    for (int t = 0; t < config.trials; ++t) {
        Rng rng(split_seed(config.seed, static_cast<std::uint64_t>(t)));
        const double mse = empirical_mse(baseline_net(skeleton, config, rng), data.test);
        if (std::isfinite(mse)) row.baseline_best_mse = std::min(row.baseline_best_mse, mse);
    }
    return row;
}

}  // namespace

std::vector<InitStudyRow> init_study(const Matrix& snapshots, const std::vector<Skeleton>& skeletons,
                                     const InitStudyConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("init study: trials must be positive");
    if (config.baseline == Baseline::He && (config.tag == ClassTag::SBAE || config.tag == ClassTag::SOAE)) {
        throw std::invalid_argument("init study: the He baseline is only defined for sae and ae");
    }
    for (const Skeleton& sk : skeletons) {
        if (sk.input_dim() != snapshots.rows()) {
            throw DataError("skeleton " + sk.to_string() + " does not match data dimension " +
                            std::to_string(snapshots.rows()));
        }
    }
    DataSplit data = split(snapshots, config.seed);
    const auto [train_norm, norm] = minmax_normalize(data.train);
    data.train = train_norm;
    data.val = norm.apply(data.val);
    data.test = norm.apply(data.test);

    std::vector<InitStudyRow> rows(skeletons.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < skeletons.size(); i = next++) {
            try {
                rows[i] = study_one(data, skeletons[i], config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(config.threads, skeletons.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

void write_init_study_csv(const std::vector<InitStudyRow>& rows, std::ostream& out) {
    out << "config,eys_mse,baseline_best_mse\n";
    char buf[64];
    for (const InitStudyRow& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.10g,%.10g\n", r.eys_mse, r.baseline_best_mse);
        out << r.skeleton.to_string('-') << buf;
    }
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    return f;
}

struct GenPgaOptions {
    Eigen::Index samples = 400;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_pga(const GenPgaOptions& o) {
    save_snapshots(generate_pga(o.samples, o.seed), o.out);
    return kExitOk;
}

struct TrainOptions {
    std::string data;
    std::string tag = "sae";
    std::string skeleton;
    std::string act = "identity";
    std::string init = "eys";
    TrainConfig config;
    std::string optimizer = "adam";
    std::string out_model;
    std::string out_history;
};

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
    const ClassTag tag = parse_class_tag(o.tag);
    const Skeleton skeleton = Skeleton::parse(o.skeleton);
    const Activation act = Activation::parse(o.act);
    TrainConfig config = o.config;
    config.optimizer = parse_optimizer(o.optimizer);
    config.validate();
    if (o.init != "eys" && o.init != "he" && o.init != "orth") {
        throw std::invalid_argument("unknown init '" + o.init + "' (expected eys, he or orth)");
    }
    if (o.init == "he" && (tag == ClassTag::SBAE || tag == ClassTag::SOAE)) {
        throw std::invalid_argument("he init yields an unconstrained network; use it with --class sae or ae");
    }

    const SnapshotSet set = load_snapshots(o.data);
    if (set.U.rows() != skeleton.input_dim()) {
        throw DataError("skeleton " + skeleton.to_string() + " expects " + std::to_string(skeleton.input_dim()) +
                        " rows, data '" + o.data + "' has " + std::to_string(set.U.rows()));
    }
    std::vector<std::string> warnings;
    DataSplit data = split(set.U, config.seed);
    auto [train_norm, norm] = minmax_normalize(data.train, &warnings);
    const Matrix val = norm.apply(data.val);
    const Matrix test = norm.apply(data.test);

    ParamVector theta0;
    Rng rng(split_seed(config.seed, 1));
    if (o.init == "eys") {
        EysResult eys = eys_init(train_norm, skeleton, act);
        warnings.insert(warnings.end(), eys.warnings.begin(), eys.warnings.end());
        theta0 = lift(eys, tag);
    } else if (o.init == "he") {
        theta0 = raw_params(he_init(skeleton, act, rng, tag), tag);
    } else {
        theta0 = lift(orthogonal_random_init(skeleton, act, rng), tag);
    }

    const TrainResult result = train(theta0, train_norm, val, config);
    const SymmetricAutoencoder net = assemble(result.theta);
    const Metrics m = evaluate(net, test, norm, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';

    if (!o.out_model.empty()) save_checkpoint(Checkpoint{net, result.theta, norm}, o.out_model);
    if (!o.out_history.empty()) write_history_csv(result.history, o.out_history);

    nlohmann::json j;
    j["class"] = to_string(tag);
    j["skeleton"] = skeleton.dims();
    j["activation"] = act.spec();
    j["init"] = o.init;
    j["seed"] = config.seed;
    j["mse"] = m.mse;
    j["mre"] = m.mre;
    j["physical_mse"] = m.physical_mse;
    j["epochs_run"] = result.history.epochs_run;
    j["best_epoch"] = result.history.best_epoch;
    out << j.dump() << '\n';
    return kExitOk;
}

struct InitStudyOptions {
    std::string data;
    std::string act = "hypact:0.5";
    std::string tag = "sae";
    std::string baseline = "orth";
    Eigen::Index width_sweep_n1 = 0;
    bool depth_pattern = false;
    std::vector<std::string> skeletons;
    int trials = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
};

int cmd_init_study(const InitStudyOptions& o, std::ostream& out) {
    InitStudyConfig config;
    config.act = Activation::parse(o.act);
    config.tag = parse_class_tag(o.tag);
    if (o.baseline == "orth") {
        config.baseline = Baseline::Orthogonal;
    } else if (o.baseline == "he") {
        config.baseline = Baseline::He;
    } else {
        throw std::invalid_argument("unknown baseline '" + o.baseline + "' (expected orth or he)");
    }
    config.trials = o.trials;
    config.seed = o.seed;
    config.threads = o.threads;

    const SnapshotSet set = load_snapshots(o.data);
    std::vector<Skeleton> skeletons;
    if (o.width_sweep_n1 > 0) {
        if (o.width_sweep_n1 >= set.U.rows()) throw std::invalid_argument("width sweep n1 must be below n0");
        for (Skeleton& s : width_sweep(set.U.rows(), o.width_sweep_n1)) skeletons.push_back(std::move(s));
    }
    if (o.depth_pattern) {
        for (Skeleton& s : depth_pattern(set.U.rows())) skeletons.push_back(std::move(s));
    }
    for (const std::string& s : o.skeletons) skeletons.push_back(Skeleton::parse(s));
    if (skeletons.empty()) {
        throw std::invalid_argument("init-study needs --width-sweep, --depth-pattern or --skeleton");
    }

    const auto rows = init_study(set.U, skeletons, config);
    if (o.out.empty()) {
        write_init_study_csv(rows, out);
    } else {
        std::ofstream f = open_output(o.out);
        write_init_study_csv(rows, f);
    }
    return kExitOk;
}

struct BoundsOptions {
    std::string model;
    std::string data;
    std::string out;
};

void write_bounds(const Checkpoint& ckpt, const Matrix& u, std::ostream& out) {
    const SymmetricAutoencoder& net = ckpt.net;
    const double linear = linear_lower_bound(u, net.skeleton.width(1));
    if (net.tag == ClassTag::SOAE) {
        const LayerwiseBounds b = layerwise_bounds(net, u);
        out << "k,lower_term,upper_term\n";
        for (std::size_t k = 0; k < b.lower_terms.size(); ++k) {
            out << k << ',' << fmt(b.lower_terms[k]) << ',' << fmt(b.upper_terms[k]) << '\n';
        }
        out << "mse," << fmt(b.mse) << ",\n";
        out << "lower," << fmt(b.lower) << ",\n";
        out << "upper," << fmt(b.upper) << ",\n";
        out << "linear_lower," << fmt(linear) << ",\n";
    } else {
        out << "k,lower_term\n";
        out << "linear_lower," << fmt(linear) << '\n';
        out << "mse," << fmt(empirical_mse(net, u)) << '\n';
    }
}

int cmd_bounds(const BoundsOptions& o, std::ostream& out) {
    const Checkpoint ckpt = load_checkpoint(o.model);
    Matrix u = load_snapshots(o.data).U;
    if (u.rows() != ckpt.net.skeleton.input_dim()) {
        throw DataError("model " + ckpt.net.skeleton.to_string() + " expects " +
                        std::to_string(ckpt.net.skeleton.input_dim()) + " rows, data '" + o.data + "' has " +
                        std::to_string(u.rows()));
    }
    if (ckpt.normalization) u = ckpt.normalization->apply(u);
    if (o.out.empty()) {
        write_bounds(ckpt, u, out);
    } else {
        std::ofstream f = open_output(o.out);
        write_bounds(ckpt, u, f);
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symmetric autoencoders: data generation, training, initialization study and bounds"};
    app.require_subcommand(1);

    GenPgaOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-pga", "Write a parameterized gaussian snapshot set");
    gen_cmd->add_option("--samples", gen.samples, "Number of snapshots")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Output snapshot CSV")->required();

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "Split, normalize, initialize, train and evaluate");
    train_cmd->add_option("--data", tr.data, "Snapshot CSV")->required();
    train_cmd->add_option("--class", tr.tag, "sae, sbae, soae or ae");
    train_cmd->add_option("--skeleton", tr.skeleton, "Layer widths, e.g. 514,64,15,3")->required();
    train_cmd->add_option("--act", tr.act, "identity, leakyrelu:<a>,<b> or hypact:<theta>");
    train_cmd->add_option("--init", tr.init, "eys, he or orth");
    train_cmd->add_option("--epochs", tr.config.epochs);
    train_cmd->add_option("--patience", tr.config.patience);
    train_cmd->add_option("--lr", tr.config.learning_rate);
    train_cmd->add_option("--batch", tr.config.batch_size);
    train_cmd->add_option("--seed", tr.config.seed);
    train_cmd->add_option("--optimizer", tr.optimizer, "adam or sgd");
    train_cmd->add_option("--log-every", tr.config.log_every, "History interval in epochs");
    train_cmd->add_option("--out-model", tr.out_model, "Checkpoint JSON");
    train_cmd->add_option("--out-history", tr.out_history, "History CSV");

    InitStudyOptions is;
    auto* study_cmd = app.add_subcommand("init-study", "Compare EYS against best-of-N random initializations");
    study_cmd->add_option("--data", is.data, "Snapshot CSV")->required();
    study_cmd->add_option("--act", is.act);
    study_cmd->add_option("--class", is.tag);
    study_cmd->add_option("--baseline", is.baseline, "orth or he");
    study_cmd->add_option("--width-sweep", is.width_sweep_n1, "Fixed n1; n2 runs over 1..n1");
    study_cmd->add_flag("--depth-pattern", is.depth_pattern, "{n0,65,3} up to {n0,65,33,17,9,5,3}");
    study_cmd->add_option("--skeleton", is.skeletons, "Extra skeleton (repeatable)");
    study_cmd->add_option("--trials", is.trials);
    study_cmd->add_option("--seed", is.seed);
    study_cmd->add_option("--threads", is.threads);
    study_cmd->add_option("--out", is.out, "Output CSV (standard output when omitted)");

    BoundsOptions bo;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate reconstruction bounds of a trained model");
    bounds_cmd->add_option("--model", bo.model, "Checkpoint JSON")->required();
    bounds_cmd->add_option("--data", bo.data, "Snapshot CSV")->required();
    bounds_cmd->add_option("--out", bo.out, "Output CSV (standard output when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen_cmd) return cmd_gen_pga(gen);
        if (*train_cmd) return cmd_train(tr, out, err);
        if (*study_cmd) return cmd_init_study(is, out);
        return cmd_bounds(bo, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace sae::cli
