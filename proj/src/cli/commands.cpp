#include "mltsk/cli.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "mltsk/error.hpp"
#include "mltsk/experiment.hpp"

namespace mltsk::cli {

namespace fs = std::filesystem;

namespace {

std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string display(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

std::string fold_fingerprint(const FoldPlan& plan) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(plan.fold_count));
    for (int a : plan.assignments) mix(static_cast<std::uint64_t>(a));
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const Metric kAllMetrics[] = {Metric::ap, Metric::hl, Metric::oe, Metric::rl, Metric::cv};

// Options shared by the subcommands; each subcommand registers the subset it uses.
struct Options {
    std::string data_path;
    std::string format = "csv";
    std::string labels;  // comma list or MULAN .xml file
    int label_count = 0;
    std::uint64_t seed = 0;
    std::string out = "out";
    int workers = 1;
    std::string select_metric = "ap";
    int folds = 5;
    TrainConfig config;
    Grid grid;
    std::string model_path;
    bool save_models = false;
    std::string table_path;
    double q_alpha = 0.0;
    double critical_value = 0.0;
    std::string direction = "higher";
};

DataSource data_source(const Options& o) {
    DataSource s;
    s.path = o.data_path;
    s.format = o.format;
    s.label_count = o.label_count;
    if (!o.labels.empty()) {
        if (o.labels.size() > 4 && o.labels.substr(o.labels.size() - 4) == ".xml") {
            s.label_names = read_mulan_labels(o.labels);
        } else {
            std::stringstream ss(o.labels);
            std::string name;
            while (std::getline(ss, name, ',')) s.label_names.push_back(name);
        }
    }
    return s;
}

TrainConfig resolved_config(const Options& o) {
    TrainConfig c = o.config;
    c.seed = o.seed;
    c.validate();
    return c;
}

void add_data_options(CLI::App* sub, Options& o) {
    sub->add_option("--data", o.data_path, "Dataset file")->required();
    sub->add_option("--format", o.format, "Dataset format")->check(CLI::IsMember({"csv", "arff"}));
    sub->add_option("--labels", o.labels,
                    "ARFF label attributes: comma-separated names or a MULAN XML label file");
    sub->add_option("--label-count", o.label_count, "Number of trailing label columns/attributes");
}

void add_common_options(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "Seed for FCM, power iteration and fold assignment");
    sub->add_option("--out", o.out, "Output directory");
}

void add_train_options(CLI::App* sub, Options& o) {
    auto& c = o.config;
    sub->add_option("-K,--rules", c.rules, "Number of fuzzy rules")->check(CLI::PositiveNumber);
    sub->add_option("--width-scale", c.h, "Antecedent width scale h");
    sub->add_option("--alpha", c.alpha, "Label-correlation weight");
    sub->add_option("--beta", c.beta, "L1 weight");
    sub->add_option("--gamma", c.gamma, "Ridge weight of the initial solve");
    sub->add_option("--tau", c.tau, "Decision threshold");
    sub->add_option("--fuzzifier", c.fuzzifier, "FCM fuzzifier m");
    sub->add_option("--fcm-tol", c.fcm_tol, "FCM objective-change tolerance");
    sub->add_option("--fcm-max-iter", c.fcm_max_iter, "FCM iteration cap");
    sub->add_option("--fcm-restarts", c.fcm_restarts, "FCM restarts (best objective kept)");
    sub->add_option("--solver-tol", c.solver_tol, "Relative objective-change tolerance");
    sub->add_option("--solver-max-iter", c.solver_max_iter, "Proximal gradient iteration cap");
}

void write_snapshot(const CLI::App* sub, const fs::path& dir) {
    auto out = open_output(dir / "resolved_config.ini");
    out << '[' << sub->get_name() << "]\n" << sub->config_to_str(true, false);
}

// Wide metrics table: one row per fold (or evaluation) and, for
// cross-validation, one aggregate row whose sd columns are filled.
void write_metrics_header(std::ostream& out) {
    out << "dataset,fold";
    for (Metric m : kAllMetrics) out << ',' << metric_name(m) << ',' << metric_name(m) << "_sd," << metric_name(m) << "_display";
    out << '\n';
}

void write_metrics_row(std::ostream& out, const std::string& dataset, const std::string& fold,
                       const MetricsReport& r, const MetricsReport* sd = nullptr) {
    out << dataset << ',' << fold;
    for (Metric m : kAllMetrics) {
        const double v = metric_value(r, m);
        out << ',' << full(v) << ',';
        if (sd) out << full(metric_value(*sd, m));
        out << ',' << display(v);
        if (sd) out << " (" << display(metric_value(*sd, m)) << ')';
    }
    out << '\n';
}

void write_folds(const fs::path& path, const FoldPlan& plan) {
    auto out = open_output(path);
    out << "instance,fold\n";
    for (std::size_t i = 0; i < plan.assignments.size(); ++i)
        out << i + 1 << ',' << plan.assignments[i] + 1 << '\n';
}

void write_cv_outputs(const fs::path& dir, const std::string& dataset, const CvOutcome& cv) {
    {
        auto out = open_output(dir / "metrics.csv");
        write_metrics_header(out);
        for (const auto& f : cv.folds) write_metrics_row(out, dataset, std::to_string(f.fold + 1), f.metrics);
        write_metrics_row(out, dataset, "mean", cv.mean, &cv.sd);
    }
    auto out = open_output(dir / "traces.csv");
    out << "fold,iteration,objective,df\n";
    for (const auto& f : cv.folds)
        for (std::size_t t = 0; t < f.objective_trace.size(); ++t)
            out << f.fold + 1 << ',' << t + 1 << ',' << full(f.objective_trace[t]) << ','
                << full(f.df_trace[t]) << '\n';
}

void print_summary(std::ostream& out, const std::string& title, const CvOutcome& cv) {
    out << title << '\n';
    for (Metric m : kAllMetrics)
        out << "  " << metric_name(m) << "  " << display(metric_value(cv.mean, m)) << " ("
            << display(metric_value(cv.sd, m)) << ")\n";
}

std::string dataset_label(const Options& o) { return fs::path(o.data_path).stem().string(); }

// ---------------------------------------------------------------------------

int cmd_train(const Options& o, const CLI::App* sub, std::ostream& out) {
    const TrainConfig config = resolved_config(o);
    const Dataset data = load_dataset(data_source(o));
    const MlTskModel model = train(data, config);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    save_model(model, dir / "model.json");
    {
        auto trace = open_output(dir / "trace.csv");
        trace << "iteration,objective,df\n";
        for (std::size_t t = 0; t < model.report.objective_trace.size(); ++t)
            trace << t + 1 << ',' << full(model.report.objective_trace[t]) << ','
                  << full(model.report.df_trace[t]) << '\n';
    }
    {
        nlohmann::ordered_json s;
        s["dataset"] = o.data_path;
        s["instances"] = data.instance_count();
        s["features"] = data.feature_count();
        s["labels"] = data.label_count();
        s["rules"] = config.rules;
        s["iterations"] = model.report.iterations;
        s["converged"] = model.report.converged;
        s["best_iteration"] = model.report.best_iteration;
        s["initial_objective"] = model.report.initial_objective;
        s["final_objective"] = model.report.objective_trace.empty() ? model.report.initial_objective
                                                                    : model.report.objective_trace.back();
        s["lipschitz"] = model.report.lipschitz;
        s["lipschitz_converged"] = model.report.lipschitz_converged;
        s["fcm_iterations"] = model.report.fcm_iterations;
        auto f = open_output(dir / "summary.json");
        f << s.dump(2) << '\n';
        nlohmann::ordered_json t;
        t["fcm_seconds"] = model.report.fcm_seconds;
        t["solve_seconds"] = model.report.solve_seconds;
        auto ft = open_output(dir / "timings.json");
        ft << t.dump(2) << '\n';
    }
    write_snapshot(sub, dir);
    out << "trained " << config.rules << "-rule model on " << data.instance_count() << " instances: "
        << model.report.iterations << " iterations, "
        << (model.report.converged ? "converged" : "iteration cap reached") << '\n'
        << "wrote " << (dir / "model.json").string() << '\n';
    return kExitOk;
}

int cmd_predict(const Options& o, const CLI::App* sub, std::ostream& out) {
    const MlTskModel model = load_model(o.model_path);
    Matrix features;
    std::optional<Dataset> labelled;
    if (o.label_count > 0 || !o.labels.empty()) {
        labelled = load_dataset(data_source(o));
        features = labelled->features();
    } else {
        if (!fs::exists(o.data_path)) throw ValidationError("dataset not found: " + o.data_path);
        features = load_feature_csv(o.data_path);
    }
    const Matrix scores = predict_scores(model, features);
    const Matrix labels = predict_labels(scores, model.tau);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    auto write_matrix = [&](const fs::path& path, const Matrix& m, bool integral) {
        auto f = open_output(path);
        f << "instance";
        for (const auto& name : model.label_names) f << ',' << name;
        f << '\n';
        for (Eigen::Index n = 0; n < m.cols(); ++n) {
            f << n + 1;
            for (Eigen::Index l = 0; l < m.rows(); ++l)
                f << ',' << (integral ? std::to_string(static_cast<int>(m(l, n))) : full(m(l, n)));
            f << '\n';
        }
    };
    write_matrix(dir / "scores.csv", scores, false);
    write_matrix(dir / "labels.csv", labels, true);
    if (labelled) {
        if (labelled->label_count() != model.label_count())
            throw ValidationError("dataset label count does not match the model");
        const auto r = evaluate(scores, labels, labelled->labels());
        auto f = open_output(dir / "metrics.csv");
        write_metrics_header(f);
        write_metrics_row(f, dataset_label(o), "all", r);
        for (Metric m : kAllMetrics) out << metric_name(m) << ' ' << display(metric_value(r, m)) << '\n';
    }
    write_snapshot(sub, dir);
    out << "wrote predictions for " << features.cols() << " instances to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_cv(const Options& o, const CLI::App* sub, std::ostream& out) {
    const TrainConfig config = resolved_config(o);
    const Dataset data = load_dataset(data_source(o));
    const FoldPlan plan = make_folds(static_cast<std::size_t>(data.instance_count()), o.folds, o.seed);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    ModelSink sink;
    if (o.save_models) {
        fs::create_directories(dir / "models");
        sink = [&dir](int fold, const MlTskModel& m) {
            save_model(m, dir / "models" / ("fold_" + std::to_string(fold + 1) + ".json"));
        };
    }
    const CvOutcome cv = cross_validate(data, config, plan, o.workers, sink);
    write_cv_outputs(dir, dataset_label(o), cv);
    write_folds(dir / "folds.csv", plan);
    write_snapshot(sub, dir);
    print_summary(out, std::to_string(o.folds) + "-fold cross-validation, mean (sd):", cv);
    return kExitOk;
}

// One grid cell per file so an interrupted search can resume.
void write_cell(const fs::path& path, const GridCell& c) {
    auto f = open_output(path);
    f << "index,rules,h,alpha,beta,gamma";
    for (Metric m : kAllMetrics) f << ',' << metric_name(m) << "_mean," << metric_name(m) << "_sd";
    f << '\n' << c.index << ',' << c.config.rules << ',' << full(c.config.h) << ',' << full(c.config.alpha)
      << ',' << full(c.config.beta) << ',' << full(c.config.gamma);
    for (Metric m : kAllMetrics) f << ',' << full(metric_value(c.mean, m)) << ',' << full(metric_value(c.sd, m));
    f << '\n';
}

std::optional<GridCell> read_cell(const fs::path& path, const TrainConfig& expected, std::size_t index) {
    std::ifstream in(path);
    std::string header, line;
    if (!in || !std::getline(in, header) || !std::getline(in, line)) return std::nullopt;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    try {
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (v.size() != 16) return std::nullopt;
    if (static_cast<std::size_t>(v[0]) != index || static_cast<int>(v[1]) != expected.rules ||
        v[2] != expected.h || v[3] != expected.alpha || v[4] != expected.beta || v[5] != expected.gamma)
        return std::nullopt;
    GridCell c;
    c.index = index;
    c.config = expected;
    c.mean = {v[6], v[8], v[10], v[12], v[14], 0, 0};
    c.sd = {v[7], v[9], v[11], v[13], v[15], 0, 0};
    return c;
}

int cmd_grid(const Options& o, const CLI::App* sub, std::ostream& out) {
    const TrainConfig base = resolved_config(o);
    const Metric metric = parse_metric(o.select_metric);
    o.grid.validate();
    const Dataset data = load_dataset(data_source(o));
    const FoldPlan plan = make_folds(static_cast<std::size_t>(data.instance_count()), o.folds, o.seed);

    const fs::path dir = o.out;
    const fs::path cell_dir = dir / "cells";
    fs::create_directories(cell_dir);

    // Cached cells are only valid for the same data, folds and base settings.
    std::ostringstream key;
    key << fs::absolute(o.data_path).string() << '|' << fold_fingerprint(plan) << '|'
        << sub->config_to_str(true, false);
    bool reuse = false;
    {
        std::ifstream in(cell_dir / "grid_key.txt");
        std::stringstream existing;
        existing << in.rdbuf();
        reuse = in && existing.str() == key.str();
    }
    if (!reuse) {
        for (const auto& entry : fs::directory_iterator(cell_dir)) fs::remove(entry.path());
        auto f = open_output(cell_dir / "grid_key.txt");
        f << key.str();
    }

    const std::size_t total = o.grid.size();
    std::vector<GridCell> cells(total);
    std::vector<std::exception_ptr> errors(total);
    std::size_t resumed = 0;
    const auto cell_path = [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "cell_%06zu.csv", i);
        return cell_dir / name;
    };
    std::vector<char> done(total, 0);
    for (std::size_t i = 0; i < total && reuse; ++i)
        if (auto c = read_cell(cell_path(i), o.grid.cell(i, base), i)) {
            cells[i] = *c;
            done[i] = 1;
            ++resumed;
        }

    const auto count = static_cast<long long>(total);
#pragma omp parallel for num_threads(std::max(1, o.workers)) schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (done[idx]) continue;
        try {
            GridCell c;
            c.index = idx;
            c.config = o.grid.cell(idx, base);
            const CvOutcome cv = cross_validate(data, c.config, plan, 1);
            c.mean = cv.mean;
            c.sd = cv.sd;
            write_cell(cell_path(idx), c);
            cells[idx] = c;
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const std::size_t best = select_best(cells, metric);
    {
        auto f = open_output(dir / "grid.csv");
        f << "cell,rules,h,alpha,beta,gamma";
        for (Metric m : kAllMetrics)
            f << ',' << metric_name(m) << "_mean," << metric_name(m) << "_sd," << metric_name(m) << "_display";
        f << '\n';
        for (const auto& c : cells) {
            f << c.index << ',' << c.config.rules << ',' << full(c.config.h) << ',' << full(c.config.alpha)
              << ',' << full(c.config.beta) << ',' << full(c.config.gamma);
            for (Metric m : kAllMetrics)
                f << ',' << full(metric_value(c.mean, m)) << ',' << full(metric_value(c.sd, m)) << ','
                  << display(metric_value(c.mean, m)) << " (" << display(metric_value(c.sd, m)) << ')';
            f << '\n';
        }
    }
    const auto& b = cells[best];
    {
        nlohmann::ordered_json j;
        j["select_metric"] = metric_name(metric);
        j["cell"] = b.index;
        j["rules"] = b.config.rules;
        j["h"] = b.config.h;
        j["alpha"] = b.config.alpha;
        j["beta"] = b.config.beta;
        j["gamma"] = b.config.gamma;
        for (Metric m : kAllMetrics) {
            j["mean"][metric_name(m)] = metric_value(b.mean, m);
            j["sd"][metric_name(m)] = metric_value(b.sd, m);
        }
        auto f = open_output(dir / "best.json");
        f << j.dump(2) << '\n';
    }
    write_folds(dir / "folds.csv", plan);
    write_snapshot(sub, dir);
    out << "grid of " << total << " cells (" << resumed << " resumed); best by " << metric_name(metric)
        << ": cell " << b.index << " K=" << b.config.rules << " h=" << b.config.h << " alpha=" << b.config.alpha
        << " beta=" << b.config.beta << " gamma=" << b.config.gamma << '\n';
    for (Metric m : kAllMetrics)
        out << "  " << metric_name(m) << "  " << display(metric_value(b.mean, m)) << " ("
            << display(metric_value(b.sd, m)) << ")\n";
    return kExitOk;
}

int cmd_ablate(const Options& o, const CLI::App* sub, std::ostream& out) {
    const TrainConfig config = resolved_config(o);
    const Dataset data = load_dataset(data_source(o));
    const FoldPlan plan = make_folds(static_cast<std::size_t>(data.instance_count()), o.folds, o.seed);
    const AblationOutcome r = ablate_correlation(data, config, plan, o.workers);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    {
        auto f = open_output(dir / "ablation.csv");
        f << "group,alpha,metric,mean,sd,display\n";
        const auto rows = [&](const char* group, double alpha, const CvOutcome& cv) {
            for (Metric m : kAllMetrics)
                f << group << ',' << full(alpha) << ',' << metric_name(m) << ',' << full(metric_value(cv.mean, m))
                  << ',' << full(metric_value(cv.sd, m)) << ',' << display(metric_value(cv.mean, m)) << " ("
                  << display(metric_value(cv.sd, m)) << ")\n";
        };
        rows("A", 0.0, r.without_correlation);
        rows("B", config.alpha, r.with_correlation);
    }
    {
        nlohmann::ordered_json j;
        const auto fp = fold_fingerprint(plan);
        j["group_a"] = {{"alpha", 0.0}, {"fold_fingerprint", fp}};
        j["group_b"] = {{"alpha", config.alpha}, {"fold_fingerprint", fp}};
        j["fold_count"] = plan.fold_count;
        j["seed"] = plan.seed;
        auto f = open_output(dir / "ablation_meta.json");
        f << j.dump(2) << '\n';
    }
    write_folds(dir / "folds.csv", plan);
    write_snapshot(sub, dir);
    print_summary(out, "group A (alpha = 0), mean (sd):", r.without_correlation);
    print_summary(out, "group B (alpha = " + display(config.alpha) + "), mean (sd):", r.with_correlation);
    return kExitOk;
}

int cmd_corr_report(const Options& o, const CLI::App* sub, std::ostream& out) {
    const MlTskModel model = load_model(o.model_path);
    const Dataset data = load_dataset(data_source(o));
    const CorrelationReport rep = correlation_report(model, data);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    const auto write = [&](const fs::path& path, const Matrix& m) {
        auto f = open_output(path);
        f << "label";
        for (const auto& n : model.label_names) f << ',' << n;
        f << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            f << model.label_names[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < m.cols(); ++j) f << ',' << full(m(i, j));
            f << '\n';
        }
    };
    write(dir / "corr_consequents.csv", rep.consequent);
    write(dir / "corr_labels.csv", rep.label);
    write_snapshot(sub, dir);
    out << "wrote " << (dir / "corr_consequents.csv").string() << " and " << (dir / "corr_labels.csv").string()
        << '\n';
    return kExitOk;
}

int cmd_stats(const Options& o, const CLI::App* sub, std::ostream& out) {
    const bool higher = o.direction == "higher";
    const RankTable table = read_rank_table(o.table_path, higher);
    const StatsReport s = rank_statistics(table, o.q_alpha);

    std::ostringstream rep;
    rep << "methods " << table.method_count() << ", datasets " << table.dataset_count() << '\n';
    rep << "method,average_rank,within_cd_of_best\n";
    for (Eigen::Index j = 0; j < table.method_count(); ++j)
        rep << table.methods[static_cast<std::size_t>(j)] << ',' << full(table.average_ranks(j)) << ','
            << (s.within_cd_of_best[static_cast<std::size_t>(j)] ? "yes" : "no") << '\n';
    rep << "chi_square," << full(s.chi_square) << '\n';
    rep << "f_statistic," << full(s.f_statistic) << (s.degenerate ? ",degenerate" : "") << '\n';
    if (o.critical_value > 0.0)
        rep << "critical_value," << full(o.critical_value) << ','
            << (s.f_statistic > o.critical_value ? "reject" : "retain") << '\n';
    rep << "q_alpha," << full(o.q_alpha) << '\n';
    rep << "critical_difference," << full(s.critical_difference) << ',' << display(s.critical_difference) << '\n';
    out << rep.str();
    if (!o.out.empty()) {
        const fs::path dir = o.out;
        fs::create_directories(dir);
        auto f = open_output(dir / "stats.csv");
        f << rep.str();
        write_snapshot(sub, dir);
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-label TSK fuzzy system: training, evaluation and analysis"};
    app.name("mltsk");
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "TOML/INI file with option values (flags override it)");
    app.require_subcommand(1);

    Options o;
    auto* train_cmd = app.add_subcommand("train", "Train one model and write it with its objective trace");
    add_data_options(train_cmd, o);
    add_common_options(train_cmd, o);
    add_train_options(train_cmd, o);

    auto* predict_cmd = app.add_subcommand("predict", "Score and label instances with a saved model");
    predict_cmd->add_option("--model", o.model_path, "Model file")->required();
    add_data_options(predict_cmd, o);
    add_common_options(predict_cmd, o);

    auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation with fixed hyperparameters");
    add_data_options(cv_cmd, o);
    add_common_options(cv_cmd, o);
    add_train_options(cv_cmd, o);
    cv_cmd->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1 << 30));
    cv_cmd->add_option("--workers", o.workers, "Folds trained concurrently")->check(CLI::PositiveNumber);
    cv_cmd->add_flag("--save-models", o.save_models, "Write each fold's model under models/");

    auto* grid_cmd = app.add_subcommand("grid", "Grid search, every cell scored by cross-validation");
    add_data_options(grid_cmd, o);
    add_common_options(grid_cmd, o);
    add_train_options(grid_cmd, o);
    grid_cmd->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1 << 30));
    grid_cmd->add_option("--workers", o.workers, "Grid cells evaluated concurrently")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--select-metric", o.select_metric, "Metric used to pick the best cell")
        ->check(CLI::IsMember({"ap", "hl", "oe", "rl", "cv"}));
    grid_cmd->add_option("--grid-rules", o.grid.rules, "K values")->delimiter(',');
    grid_cmd->add_option("--grid-h", o.grid.h, "h values")->delimiter(',');
    grid_cmd->add_option("--grid-alpha", o.grid.alpha, "alpha values")->delimiter(',');
    grid_cmd->add_option("--grid-beta", o.grid.beta, "beta values")->delimiter(',');
    grid_cmd->add_option("--grid-gamma", o.grid.gamma, "gamma values")->delimiter(',');

    auto* ablate_cmd = app.add_subcommand("ablate", "Cross-validate with and without label correlation");
    add_data_options(ablate_cmd, o);
    add_common_options(ablate_cmd, o);
    add_train_options(ablate_cmd, o);
    ablate_cmd->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1 << 30));
    ablate_cmd->add_option("--workers", o.workers, "Folds trained concurrently")->check(CLI::PositiveNumber);

    auto* corr_cmd = app.add_subcommand("corr-report", "Correlation matrices of consequents and labels");
    corr_cmd->add_option("--model", o.model_path, "Model file")->required();
    add_data_options(corr_cmd, o);
    add_common_options(corr_cmd, o);

    auto* stats_cmd = app.add_subcommand("stats", "Friedman test and Bonferroni-Dunn critical difference");
    stats_cmd->add_option("--table", o.table_path, "CSV: dataset,method1,method2,...")->required();
    stats_cmd->add_option("--q-alpha", o.q_alpha, "Bonferroni-Dunn critical value q_alpha")
        ->required()
        ->check(CLI::PositiveNumber);
    stats_cmd->add_option("--critical-value", o.critical_value, "F critical value to compare against");
    stats_cmd->add_option("--direction", o.direction, "Whether higher or lower scores are better")
        ->check(CLI::IsMember({"higher", "lower"}));
    stats_cmd->add_option("--out", o.out, "Output directory (optional)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "mltsk: " << e.what() << '\n';
        return kExitUsage;
    }
    if (stats_cmd->parsed() && stats_cmd->count("--out") == 0) o.out.clear();

    try {
        if (train_cmd->parsed()) return cmd_train(o, train_cmd, out);
        if (predict_cmd->parsed()) return cmd_predict(o, predict_cmd, out);
        if (cv_cmd->parsed()) return cmd_cv(o, cv_cmd, out);
        if (grid_cmd->parsed()) return cmd_grid(o, grid_cmd, out);
        if (ablate_cmd->parsed()) return cmd_ablate(o, ablate_cmd, out);
        if (corr_cmd->parsed()) return cmd_corr_report(o, corr_cmd, out);
        if (stats_cmd->parsed()) return cmd_stats(o, stats_cmd, out);
    } catch (const ValidationError& e) {
        err << "mltsk: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "mltsk: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "mltsk: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace mltsk::cli
