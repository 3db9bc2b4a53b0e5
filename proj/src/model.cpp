#include "mltsk/model.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mltsk/correlation.hpp"
#include "mltsk/error.hpp"
#include "mltsk/fuzzify.hpp"

namespace mltsk {

using json = nlohmann::ordered_json;

void MlTskModel::validate() const {
    antecedents.validate();
    const auto d = feature_count();
    const auto k = rule_count();
    if (standardizer.mean.size() != d || standardizer.stddev.size() != d)
        throw ValidationError("standardizer does not match the feature count");
    if (consequents.rows() != k * (d + 1) || consequents.cols() < 1)
        throw ValidationError("consequent matrix shape does not match K(D+1)×L");
    if (!consequents.allFinite()) throw ValidationError("consequent matrix has non-finite entries");
    if (static_cast<Eigen::Index>(label_names.size()) != consequents.cols())
        throw ValidationError("label names do not match L");
    if (static_cast<Eigen::Index>(feature_names.size()) != d)
        throw ValidationError("feature names do not match D");
    if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
}

MlTskModel train(const Dataset& data, const TrainConfig& config) {
    config.validate();
    const auto n = data.instance_count();
    if (n < std::max<Eigen::Index>(2, config.rules))
        throw ValidationError("training needs at least max(2, K) instances, got " + std::to_string(n));

    using clock = std::chrono::steady_clock;
    MlTskModel m;
    m.config = config;
    m.tau = config.tau;
    m.feature_names = data.feature_names();
    m.label_names = data.label_names();
    m.standardizer = fit_standardizer(data);
    const Matrix x = m.standardizer.apply(data.features());

    const auto t0 = clock::now();
    FcmOptions fcm{config.fuzzifier, config.fcm_tol, config.fcm_max_iter, config.fcm_restarts,
                   config.seed};
    const FcmResult clusters = fcm_cluster(x, config.rules, fcm);
    m.antecedents = estimate_antecedents(x, clusters.memberships, config.h);
    const auto t1 = clock::now();

    const Matrix g = fuzzy_map(x, m.antecedents);
    const CorrelationMatrix corr = build_correlation(data.labels());
    FitResult solved = fit(g, data.labels(), corr.penalty, config);
    const auto t2 = clock::now();

    m.consequents = std::move(solved.p);
    auto& r = m.report;
    r.fcm_iterations = clusters.iterations;
    r.fcm_objective = clusters.objective_trace.back();
    r.lipschitz = solved.state.lipschitz;
    r.lipschitz_converged = solved.state.lipschitz_converged;
    r.initial_objective = solved.state.initial_objective;
    r.objective_trace = std::move(solved.state.objective_trace);
    r.df_trace = std::move(solved.state.df_trace);
    r.iterations = solved.state.iterations;
    r.best_iteration = solved.state.best_iteration;
    r.converged = solved.state.converged;
    r.fcm_seconds = std::chrono::duration<double>(t1 - t0).count();
    r.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    return m;
}

namespace {

void check_input(const MlTskModel& model, const Matrix& features) {
    if (features.rows() != model.feature_count())
        throw ValidationError("input has " + std::to_string(features.rows()) +
                              " features, model expects " + std::to_string(model.feature_count()));
}

}  // namespace

Matrix predict_scores(const MlTskModel& model, const Matrix& features) {
    check_input(model, features);
    const Matrix g = fuzzy_map(model.standardizer.apply(features), model.antecedents);
    return model.consequents.transpose() * g;
}

Matrix predict_scores_rule_sum(const MlTskModel& model, const Matrix& features) {
    check_input(model, features);
    const Matrix x = model.standardizer.apply(features);
    const auto d = model.feature_count();
    const auto labels = model.label_count();
    Matrix scores = Matrix::Zero(labels, x.cols());
    for (Eigen::Index n = 0; n < x.cols(); ++n) {
        const Vector mu = firing_strengths(x.col(n), model.antecedents);
        for (Eigen::Index k = 0; k < model.rule_count(); ++k) {
            const auto block = model.consequents.middleRows(k * (d + 1), d + 1);
            for (Eigen::Index l = 0; l < labels; ++l) {
                // Rule k's affine output for label l: p0 + sum_i p_i x_i.
                const double rule_output = block(0, l) + block.col(l).tail(d).dot(x.col(n));
                scores(l, n) += mu(k) * rule_output;
            }
        }
    }
    return scores;
}

Matrix predict_labels(const Matrix& scores, double tau) {
    return (scores.array() > tau).cast<double>().matrix();
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw ParseError(std::string("model field '") + what + "' has the wrong row count");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(std::string("model field '") + what + "' has the wrong column count");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j, Eigen::Index size, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
        throw ParseError(std::string("model field '") + what + "' has the wrong length");
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json config_to_json(const TrainConfig& c) {
    return json{{"rules", c.rules},
                {"h", c.h},
                {"alpha", c.alpha},
                {"beta", c.beta},
                {"gamma", c.gamma},
                {"tau", c.tau},
                {"fuzzifier", c.fuzzifier},
                {"fcm_tol", c.fcm_tol},
                {"fcm_max_iter", c.fcm_max_iter},
                {"fcm_restarts", c.fcm_restarts},
                {"solver_tol", c.solver_tol},
                {"solver_max_iter", c.solver_max_iter},
                {"power_tol", c.power_tol},
                {"power_max_iter", c.power_max_iter},
                {"seed", c.seed},
                {"zero_init", c.zero_init}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.rules = j.at("rules").get<int>();
    c.h = j.at("h").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.tau = j.at("tau").get<double>();
    c.fuzzifier = j.at("fuzzifier").get<double>();
    c.fcm_tol = j.at("fcm_tol").get<double>();
    c.fcm_max_iter = j.at("fcm_max_iter").get<int>();
    c.fcm_restarts = j.at("fcm_restarts").get<int>();
    c.solver_tol = j.at("solver_tol").get<double>();
    c.solver_max_iter = j.at("solver_max_iter").get<int>();
    c.power_tol = j.at("power_tol").get<double>();
    c.power_max_iter = j.at("power_max_iter").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.zero_init = j.at("zero_init").get<bool>();
    return c;
}

}  // namespace

std::string model_to_string(const MlTskModel& model) {
    model.validate();
    const auto& r = model.report;
    json j;
    j["format"] = "mltsk-model";
    j["version"] = kModelFormatVersion;
    j["dims"] = {{"features", model.feature_count()},
                 {"rules", model.rule_count()},
                 {"labels", model.label_count()}};
    j["feature_names"] = model.feature_names;
    j["label_names"] = model.label_names;
    j["tau"] = model.tau;
    j["standardizer"] = {{"mean", vector_to_json(model.standardizer.mean)},
                         {"stddev", vector_to_json(model.standardizer.stddev)}};
    j["antecedents"] = {{"h", model.antecedents.h},
                        {"centers", matrix_to_json(model.antecedents.centers)},
                        {"widths", matrix_to_json(model.antecedents.widths)}};
    j["consequents"] = matrix_to_json(model.consequents);
    j["config"] = config_to_json(model.config);
    j["training"] = {{"fcm_iterations", r.fcm_iterations},
                     {"fcm_objective", r.fcm_objective},
                     {"lipschitz", r.lipschitz},
                     {"lipschitz_converged", r.lipschitz_converged},
                     {"initial_objective", r.initial_objective},
                     {"iterations", r.iterations},
                     {"best_iteration", r.best_iteration},
                     {"converged", r.converged},
                     {"objective_trace", r.objective_trace},
                     {"df_trace", r.df_trace}};
    return j.dump(1) + "\n";
}

MlTskModel model_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "mltsk-model")
            throw ParseError("not an mltsk model file");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw UnsupportedVersionError("unsupported model file version " + std::to_string(version) +
                                          " (this build reads version " +
                                          std::to_string(kModelFormatVersion) + ")");
        const auto& dims = j.at("dims");
        const auto d = dims.at("features").get<Eigen::Index>();
        const auto k = dims.at("rules").get<Eigen::Index>();
        const auto l = dims.at("labels").get<Eigen::Index>();
        if (d < 1 || k < 1 || l < 1) throw ParseError("model dimensions must be positive");

        MlTskModel m;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.label_names = j.at("label_names").get<std::vector<std::string>>();
        m.tau = j.at("tau").get<double>();
        m.standardizer.mean = vector_from_json(j.at("standardizer").at("mean"), d, "standardizer.mean");
        m.standardizer.stddev =
            vector_from_json(j.at("standardizer").at("stddev"), d, "standardizer.stddev");
        const auto& ante = j.at("antecedents");
        m.antecedents.h = ante.at("h").get<double>();
        m.antecedents.centers = matrix_from_json(ante.at("centers"), k, d, "antecedents.centers");
        m.antecedents.widths = matrix_from_json(ante.at("widths"), k, d, "antecedents.widths");
        m.consequents = matrix_from_json(j.at("consequents"), k * (d + 1), l, "consequents");
        m.config = config_from_json(j.at("config"));
        const auto& t = j.at("training");
        auto& r = m.report;
        r.fcm_iterations = t.at("fcm_iterations").get<int>();
        r.fcm_objective = t.at("fcm_objective").get<double>();
        r.lipschitz = t.at("lipschitz").get<double>();
        r.lipschitz_converged = t.at("lipschitz_converged").get<bool>();
        r.initial_objective = t.at("initial_objective").get<double>();
        r.iterations = t.at("iterations").get<int>();
        r.best_iteration = t.at("best_iteration").get<int>();
        r.converged = t.at("converged").get<bool>();
        r.objective_trace = t.at("objective_trace").get<std::vector<double>>();
        r.df_trace = t.at("df_trace").get<std::vector<double>>();
        try {
            m.validate();
        } catch (const ValidationError& e) {
            throw ParseError(std::string("inconsistent model file: ") + e.what());
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const MlTskModel& model, const std::filesystem::path& path) {
    const auto text = model_to_string(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model file: " + path.string());
    out << text;
}

MlTskModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

}  // namespace mltsk
