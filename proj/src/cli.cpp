#include "fsnull/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "fsnull/data.hpp"
#include "fsnull/diagnostics.hpp"
#include "fsnull/error.hpp"
#include "fsnull/format.hpp"
#include "fsnull/protocol.hpp"
#include "fsnull/reporting.hpp"
#include "fsnull/synth.hpp"

namespace fsnull {

namespace {

namespace fs = std::filesystem;

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Failure inside a named stage of a command.
struct StageError : std::runtime_error {
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage)) {}
    std::string stage;
};

struct CommonFlags {
    std::string label_column = "label";
    std::string id_column;
    std::string model = "rf";
    std::size_t n_trees = ForestHyper{}.n_trees;
    double lr_lambda = LogisticHyper{}.l2_lambda;
    std::uint64_t master_seed = ExperimentConfig{}.master_seed;
    std::size_t runs = ExperimentConfig{}.n_runs;
    double test_fraction = ExperimentConfig{}.test_fraction;
    std::string metric = "auc";
    bool log_transform = false;
    bool pca = false;
    std::size_t threads = 0;
    std::string out;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool with_pca) {
    cmd.add_option("--label-column", f.label_column, "Name of the label column")->capture_default_str();
    cmd.add_option("--id-column", f.id_column, "Optional sample id column");
    cmd.add_option("--model", f.model, "Learner: rf, dt, lr or gbm")
        ->check(CLI::IsMember({"rf", "dt", "lr", "gbm"}))
        ->capture_default_str();
    cmd.add_option("--n-trees", f.n_trees, "Trees per forest")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--lr-lambda", f.lr_lambda, "L2 penalty of logistic regression")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--master-seed", f.master_seed, "Master seed")->capture_default_str();
    cmd.add_option("--runs", f.runs, "Random subsets per size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--test-fraction", f.test_fraction, "Held-out fraction per class")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--metric", f.metric, "Verdict metric: auc or accuracy")
        ->check(CLI::IsMember({"auc", "accuracy"}))
        ->capture_default_str();
    cmd.add_flag("--log-transform", f.log_transform, "Apply log2(x + 1) before modelling");
    if (with_pca) cmd.add_flag("--pca", f.pca, "Also write a PCA scatter plot");
    cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd.add_option("--out", f.out, "Output directory")->required();
}

ExperimentConfig make_config(const CommonFlags& f, std::ostream& err) {
    ExperimentConfig config;
    config.n_runs = f.runs;
    config.test_fraction = f.test_fraction;
    config.metric = *parse_verdict_metric(f.metric);
    config.master_seed = f.master_seed;
    config.threads = f.threads;
    config.learner.kind = *parse_learner_kind(f.model);
    config.learner.forest.n_trees = f.n_trees;
    config.learner.logistic.l2_lambda = f.lr_lambda;
    config.log = [&err](std::string_view line) { err << "fsnull: " << line << '\n'; };
    try {
        config.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return config;
}

template <typename F>
auto stage(std::string_view name, std::ostream& err, F&& body) -> decltype(body()) {
    err << "fsnull: [" << name << "]\n";
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(std::string(name), e.what());
    }
}

Dataset load(const std::string& path, const CommonFlags& f, std::ostream& err) {
    auto ds = stage("load " + path, err, [&] {
        return load_dataset(path, LoadOptions{f.label_column, f.id_column});
    });
    if (f.log_transform) {
        ds = stage("log-transform", err, [&] { return Dataset(log_transform(ds.matrix), ds.labels); });
    }
    return ds;
}

void prepare_out(const std::string& out, std::ostream& err) {
    stage("prepare output", err, [&] {
        if (out.empty()) throw Error(ErrorCode::IoError, "output directory path is empty");
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec || !fs::is_directory(out)) {
            throw Error(ErrorCode::IoError, "cannot create output directory '" + out + "'");
        }
    });
}

KeyValues metadata(std::string_view verb, const CommonFlags& f) {
    return {{"tool_version", std::string(kVersion)},
            {"verb", std::string(verb)},
            {"model", f.model},
            {"n_trees", std::to_string(f.n_trees)},
            {"lr_lambda", format_real(f.lr_lambda)},
            {"master_seed", std::to_string(f.master_seed)},
            {"n_runs", std::to_string(f.runs)},
            {"test_fraction", format_real(f.test_fraction)},
            {"metric", f.metric},
            {"log_transform", f.log_transform ? "true" : "false"},
            {"standardization", "z-score fitted on training samples"},
            {"auc_averaging", "macro-ovr"},
            {"ensemble_combiner", "soft-vote"},
            {"ensemble_subsets", "independent"}};
}

void write_pca(const Dataset& ds, const fs::path& out, ReportBundle& bundle, std::ostream& err) {
    stage("pca", err, [&] {
        const auto standardized = standardize(ds.matrix).train;
        const std::size_t d = std::min<std::size_t>({2, ds.n_samples() - 1, ds.n_features()});
        const auto pca = pca_project(standardized.values(), d);
        KeyValues kv{{"dimensions", std::to_string(pca.dimensions())},
                     {"total_variance", format_real(pca.total_variance)},
                     {"rank_deficient", pca.rank_deficient ? "true" : "false"}};
        for (std::size_t i = 0; i < pca.dimensions(); ++i) {
            kv.emplace_back("eigenvalue_" + std::to_string(i + 1), format_real(pca.eigenvalues[i]));
            kv.emplace_back("explained_variance_ratio_" + std::to_string(i + 1),
                            format_real(pca.explained_variance_ratio[i]));
        }
        write_key_values(out / "pca.txt", kv);
        bundle.scatter_svg_path = out / "scatter.svg";
        render_scatter_svg(pca, ds.labels, *bundle.scatter_svg_path);
    });
}

void finish_grid(std::string_view verb, const GridResult& result, const CommonFlags& f,
                 const Dataset& pca_source, std::ostream& err) {
    const fs::path out = f.out;
    auto bundle = stage("report", err, [&] { return emit_tables(result, out); });
    if (f.pca) write_pca(pca_source, out, bundle, err);
    stage("metadata", err, [&] {
        auto kv = metadata(verb, f);
        kv.emplace_back("n_features", std::to_string(result.p));
        kv.emplace_back("full_accuracy", format_real(result.full_accuracy));
        kv.emplace_back("full_auc", format_real(result.full_auc));
        for (const auto& w : result.warnings) kv.emplace_back("warning", w);
        write_key_values(out / "metadata.txt", kv);
    });
    err << "fsnull: verdict " << to_string(result.verdict.level) << " (best size "
        << result.verdict.best_size << ")\n";
}

int run_intra_cmd(const CommonFlags& f, const std::string& data, std::ostream& err) {
    const auto config = make_config(f, err);
    prepare_out(f.out, err);
    const auto ds = load(data, f, err);
    const auto result = stage("run-intra grid", err, [&] { return run_intra(ds, config); });
    finish_grid("run-intra", result, f, ds, err);
    return kExitOk;
}

int run_cross_cmd(const CommonFlags& f, const std::string& train, const std::string& test,
                  std::ostream& err) {
    const auto config = make_config(f, err);
    prepare_out(f.out, err);
    const auto train_ds = load(train, f, err);
    const auto test_ds = load(test, f, err);
    const auto result = stage("run-cross grid", err, [&] { return run_cross(train_ds, test_ds, config); });
    finish_grid("run-cross", result, f, train_ds, err);
    return kExitOk;
}

int compare_cmd(const CommonFlags& f, const std::string& data, const std::string& features,
                double multiplier, std::ostream& err) {
    const auto config = make_config(f, err);
    prepare_out(f.out, err);
    const auto ds = load(data, f, err);
    const auto list = stage("read feature list", err, [&] { return read_feature_list(features); });
    const auto cmp = stage("compare-published", err, [&] {
        return compare_published(ds, list, config, multiplier);
    });
    const fs::path out = f.out;
    stage("report", err, [&] {
        std::ofstream runs(out / "runs.csv", std::ios::binary);
        runs << format_runs_table(cmp.runs);
        if (!runs) throw Error(ErrorCode::IoError, "cannot write runs.csv");
        auto score = [](KeyValues& kv, const std::string& name, const ColumnScore& s) {
            kv.emplace_back(name + "_accuracy", format_real(s.accuracy));
            kv.emplace_back(name + "_auc", format_real(s.auc));
        };
        KeyValues kv{{"list_size", std::to_string(cmp.list_size)},
                     {"multiplier_c", format_real(cmp.multiplier_c)},
                     {"random_size", std::to_string(cmp.random_size)},
                     {"one_percent_size", std::to_string(cmp.one_percent_size)}};
        score(kv, "all_features", cmp.all_features);
        score(kv, "published", cmp.published);
        score(kv, "random_same_size", cmp.random_same_size);
        score(kv, "random_same_size_std", cmp.random_same_size_std);
        score(kv, "ensemble_same_size", cmp.ensemble_same_size);
        score(kv, "ensemble_one_percent", cmp.ensemble_one_percent);
        write_key_values(out / "published.txt", kv);
        auto meta = metadata("compare-published", f);
        meta.emplace_back("n_features", std::to_string(ds.n_features()));
        write_key_values(out / "metadata.txt", meta);
    });
    if (f.pca) {
        ReportBundle unused;
        write_pca(ds, out, unused, err);
    }
    err << "fsnull: published " << format_real(cmp.published.accuracy) << " vs all "
        << format_real(cmp.all_features.accuracy) << " (accuracy)\n";
    return kExitOk;
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-subset null baseline for feature selection", "fsnull"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonFlags intra, cross, published;
    std::string intra_data, cross_train, cross_test, pub_data, pub_features;
    double multiplier = 1.0;

    auto* intra_cmd = app.add_subcommand("run-intra", "Random subsets vs all features on one dataset");
    intra_cmd->add_option("--data", intra_data, "Dataset file")->required();
    add_common(*intra_cmd, intra, true);

    auto* cross_cmd = app.add_subcommand("run-cross", "Train on one dataset, test on another");
    cross_cmd->add_option("--train", cross_train, "Training dataset file")->required();
    cross_cmd->add_option("--test", cross_test, "Test dataset file")->required();
    add_common(*cross_cmd, cross, true);

    auto* pub_cmd = app.add_subcommand("compare-published", "Published feature list vs random subsets");
    pub_cmd->add_option("--data", pub_data, "Dataset file")->required();
    pub_cmd->add_option("--features", pub_features, "Feature list, one name per line")->required();
    pub_cmd->add_option("--multiplier", multiplier, "Random subset size as a multiple of the list size")
        ->check(CLI::Range(1.0, 1e9))
        ->capture_default_str();
    add_common(*pub_cmd, published, true);

    SynthOptions synth;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a seeded diffuse-signal dataset");
    synth_cmd->add_option("--n", synth.n, "Samples")->check(CLI::PositiveNumber)->capture_default_str();
    synth_cmd->add_option("--p", synth.p, "Features")->check(CLI::PositiveNumber)->capture_default_str();
    synth_cmd->add_option("--k", synth.k, "Classes")->check(CLI::Range(2, 1000))->capture_default_str();
    synth_cmd->add_option("--shift", synth.shift, "Class mean shift per feature")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "fsnull: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) failing = sub;
        err << failing->help();
        return kExitUsage;
    }

    try {
        if (intra_cmd->parsed()) return run_intra_cmd(intra, intra_data, err);
        if (cross_cmd->parsed()) return run_cross_cmd(cross, cross_train, cross_test, err);
        if (pub_cmd->parsed()) return compare_cmd(published, pub_data, pub_features, multiplier, err);
        stage("synth", err, [&] {
            const auto ds = make_synthetic(synth);
            const fs::path path = synth_out;
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            write_dataset(path, ds);
        });
        return kExitOk;
    } catch (const UsageError& e) {
        err << "fsnull: " << e.what() << '\n';
        return kExitUsage;
    } catch (const StageError& e) {
        err << "fsnull: error in stage '" << e.stage << "': " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "fsnull: error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace fsnull
