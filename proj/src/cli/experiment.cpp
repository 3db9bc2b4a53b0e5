#include "mltsk/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "mltsk/correlation.hpp"
#include "mltsk/error.hpp"

namespace mltsk {

Dataset load_dataset(const DataSource& source) {
    if (source.path.empty()) throw ValidationError("no dataset path given");
    if (!std::filesystem::exists(source.path))
        throw ValidationError("dataset not found: " + source.path.string());
    if (source.format == "csv") {
        if (source.label_count < 1) throw ValidationError("CSV datasets need --label-count >= 1");
        return load_csv(source.path, source.label_count);
    }
    if (source.format == "arff") {
        if (!source.label_names.empty()) return load_arff(source.path, source.label_names);
        if (source.label_count < 1)
            throw ValidationError("ARFF datasets need --labels or --label-count");
        return load_arff_trailing(source.path, source.label_count);
    }
    throw ValidationError("unknown dataset format '" + source.format + "' (expected csv or arff)");
}

// ---------------------------------------------------------------------------
// Grid

std::size_t Grid::size() const {
    return rules.size() * h.size() * alpha.size() * beta.size() * gamma.size();
}

TrainConfig Grid::cell(std::size_t index, const TrainConfig& base) const {
    if (index >= size()) throw ValidationError("grid cell index out of range");
    TrainConfig c = base;
    c.gamma = gamma[index % gamma.size()];
    index /= gamma.size();
    c.beta = beta[index % beta.size()];
    index /= beta.size();
    c.alpha = alpha[index % alpha.size()];
    index /= alpha.size();
    c.h = h[index % h.size()];
    index /= h.size();
    c.rules = rules[index];
    return c;
}

void Grid::validate() const {
    if (rules.empty() || h.empty() || alpha.empty() || beta.empty() || gamma.empty())
        throw ValidationError("every grid list needs at least one value");
}

void ExperimentSpec::validate() const {
    base.validate();
    grid.validate();
    if (fold_count < 2) throw ValidationError("fold count must be at least 2");
    if (workers < 1) throw ValidationError("worker count must be at least 1");
}

// ---------------------------------------------------------------------------
// Cross-validation

void aggregate(const std::vector<FoldOutcome>& folds, MetricsReport& mean, MetricsReport& sd) {
    mean = sd = MetricsReport{};
    if (folds.empty()) return;
    const double n = static_cast<double>(folds.size());
    const Metric all[] = {Metric::ap, Metric::hl, Metric::oe, Metric::rl, Metric::cv};
    auto slot = [](MetricsReport& r, Metric m) -> double& {
        switch (m) {
            case Metric::ap: return r.ap;
            case Metric::hl: return r.hl;
            case Metric::oe: return r.oe;
            case Metric::rl: return r.rl;
            case Metric::cv: break;
        }
        return r.cv;
    };
    for (Metric m : all) {
        double total = 0.0;
        for (const auto& f : folds) total += metric_value(f.metrics, m);
        const double mu = total / n;
        double ss = 0.0;
        for (const auto& f : folds) ss += (metric_value(f.metrics, m) - mu) * (metric_value(f.metrics, m) - mu);
        slot(mean, m) = mu;
        slot(sd, m) = folds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    for (const auto& f : folds) {
        mean.skipped_ranked += f.metrics.skipped_ranked;
        mean.skipped_pairwise += f.metrics.skipped_pairwise;
    }
}

CvOutcome cross_validate(const Dataset& data, const TrainConfig& config, const FoldPlan& plan,
                         int workers, const ModelSink& sink) {
    config.validate();
    if (plan.assignments.size() != static_cast<std::size_t>(data.instance_count()))
        throw ValidationError("fold plan does not match the dataset size");
    const int k = plan.fold_count;
    CvOutcome out;
    out.folds.resize(static_cast<std::size_t>(k));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));

#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
    for (int f = 0; f < k; ++f) {
        try {
            const auto train_idx = plan.train_indices(f);
            const auto test_idx = plan.test_indices(f);
            const Dataset train_set = data.subset(train_idx);
            const Dataset test_set = data.subset(test_idx);
            const MlTskModel model = train(train_set, config);
            if (sink) sink(f, model);
            const Matrix scores = predict_scores(model, test_set.features());
            const Matrix predicted = predict_labels(scores, model.tau);

            FoldOutcome& o = out.folds[static_cast<std::size_t>(f)];
            o.fold = f;
            o.train_size = train_idx.size();
            o.test_size = test_idx.size();
            o.metrics = evaluate(scores, predicted, test_set.labels());
            o.iterations = model.report.iterations;
            o.converged = model.report.converged;
            o.objective_trace = model.report.objective_trace;
            o.df_trace = model.report.df_trace;
        } catch (...) {
            errors[static_cast<std::size_t>(f)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    aggregate(out.folds, out.mean, out.sd);
    return out;
}

std::size_t select_best(const std::vector<GridCell>& cells, Metric metric) {
    if (cells.empty()) throw ValidationError("no grid cells to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const double v = metric_value(cells[i].mean, metric);
        const double b = metric_value(cells[best].mean, metric);
        if (higher_is_better(metric) ? v > b : v < b) best = i;
    }
    return best;
}

AblationOutcome ablate_correlation(const Dataset& data, const TrainConfig& config,
                                   const FoldPlan& plan, int workers) {
    if (!(config.alpha > 0.0)) throw ValidationError("ablation needs alpha > 0 for the enabled group");
    TrainConfig off = config;
    off.alpha = 0.0;
    AblationOutcome out;
    out.without_correlation = cross_validate(data, off, plan, workers);
    out.with_correlation = cross_validate(data, config, plan, workers);
    return out;
}

CorrelationReport correlation_report(const MlTskModel& model, const Dataset& data) {
    if (data.label_count() != model.label_count())
        throw ValidationError("dataset label count does not match the model");
    return {column_correlations(model.consequents), build_correlation(data.labels()).coefficients};
}

// ---------------------------------------------------------------------------
// Statistics

StatsReport rank_statistics(const RankTable& table, double q_alpha) {
    StatsReport s{table, 0.0, 0.0, false, 0.0, {}};
    const auto f = friedman_statistic(table);
    s.chi_square = f.chi_square;
    s.f_statistic = f.f_statistic;
    s.degenerate = f.degenerate;
    s.critical_difference = bonferroni_dunn_cd(static_cast<int>(table.method_count()),
                                               static_cast<int>(table.dataset_count()), q_alpha);
    const double best = table.average_ranks.minCoeff();
    for (Eigen::Index j = 0; j < table.method_count(); ++j)
        s.within_cd_of_best.push_back(table.average_ranks(j) - best <= s.critical_difference);
    return s;
}

RankTable read_rank_table(const std::filesystem::path& path, bool higher_better) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open table: " + path.string());
    auto cells_of = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
        }
        return cells;
    };
    std::string line;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = cells_of(line);
    if (header.size() < 3) throw ParseError(path.string() + ": header needs a name column and >= 2 methods");
    std::vector<std::string> methods(header.begin() + 1, header.end());
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = cells_of(line);
        if (cells.size() != header.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells");
        std::vector<double> values;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            double v = 0.0;
            const auto& s = cells[c];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
            values.push_back(v);
        }
        datasets.push_back(cells[0]);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError(path.string() + ": no data rows");
    Matrix scores(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(methods.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < methods.size(); ++j)
            scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return make_rank_table(std::move(methods), std::move(datasets), scores, higher_better);
}

}  // namespace mltsk
