#include "mltsk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "mltsk/error.hpp"
#include "mltsk/random.hpp"

namespace mltsk {

namespace {

std::vector<std::string> default_names(const std::string& prefix, Eigen::Index n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i + 1));
    return names;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Matrix features, Matrix labels, std::vector<std::string> feature_names,
                 std::vector<std::string> label_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      label_names_(std::move(label_names)) {
    if (features_.rows() < 1) throw ValidationError("dataset needs at least one feature");
    if (labels_.rows() < 1) throw ValidationError("dataset needs at least one label");
    if (features_.cols() < 1) throw ValidationError("dataset needs at least one instance");
    if (features_.cols() != labels_.cols())
        throw ValidationError("feature and label matrices disagree on instance count");
    if (!features_.allFinite()) throw ValidationError("features contain NaN or Inf");
    for (Eigen::Index n = 0; n < labels_.cols(); ++n)
        for (Eigen::Index l = 0; l < labels_.rows(); ++l) {
            const double v = labels_(l, n);
            if (v != 0.0 && v != 1.0)
                throw ValidationError("label entry (" + std::to_string(l) + ", " +
                                      std::to_string(n) + ") is not 0 or 1");
        }
    if (feature_names_.empty()) feature_names_ = default_names("f", features_.rows());
    if (label_names_.empty()) label_names_ = default_names("y", labels_.rows());
    if (static_cast<Eigen::Index>(feature_names_.size()) != features_.rows())
        throw ValidationError("feature name count does not match D");
    if (static_cast<Eigen::Index>(label_names_.size()) != labels_.rows())
        throw ValidationError("label name count does not match L");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Matrix x(features_.rows(), static_cast<Eigen::Index>(indices.size()));
    Matrix y(labels_.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto src = static_cast<Eigen::Index>(indices[j]);
        if (src >= features_.cols()) throw ValidationError("subset index out of range");
        x.col(static_cast<Eigen::Index>(j)) = features_.col(src);
        y.col(static_cast<Eigen::Index>(j)) = labels_.col(src);
    }
    return Dataset(std::move(x), std::move(y), feature_names_, label_names_);
}

Dataset Dataset::with_features(Matrix features) const {
    return Dataset(std::move(features), labels_, feature_names_, label_names_);
}

Dataset Dataset::with_labels(Matrix labels) const {
    return Dataset(features_, std::move(labels), feature_names_, label_names_);
}

// ---------------------------------------------------------------------------
// CSV

Dataset load_csv(const std::filesystem::path& path, int label_count) {
    if (label_count < 1) throw ValidationError("label count must be at least 1");
    auto in = open_input(path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    std::size_t columns = 0;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto cells = split(body, ',');
        if (first) {
            first = false;
            columns = cells.size();
            std::vector<double> values(cells.size());
            bool numeric = true;
            for (std::size_t c = 0; c < cells.size() && numeric; ++c)
                numeric = parse_double(cells[c], values[c]);
            if (!numeric) {
                for (auto cell : cells) header.emplace_back(unquote(cell));
                continue;
            }
            rows.push_back(std::move(values));
            continue;
        }
        if (cells.size() != columns)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " columns, found " +
                             std::to_string(cells.size()));
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!parse_double(cells[c], values[c]))
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": non-numeric cell in column " + std::to_string(c + 1));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ValidationError(path.string() + ": no data rows");
    if (columns <= static_cast<std::size_t>(label_count))
        throw ValidationError(path.string() + ": label count leaves no feature columns");

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(columns) - label_count;
    Matrix x(d, n);
    Matrix y(label_count, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& row = rows[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < d; ++i) x(i, j) = row[static_cast<std::size_t>(i)];
        for (Eigen::Index l = 0; l < label_count; ++l) {
            const double v = row[static_cast<std::size_t>(d + l)];
            if (v != 0.0 && v != 1.0)
                throw ValidationError(path.string() + ": data row " + std::to_string(j + 1) +
                                      ", column " + std::to_string(d + l + 1) +
                                      ": label value is not 0 or 1");
            y(l, j) = v;
        }
    }
    std::vector<std::string> fnames, lnames;
    if (!header.empty()) {
        fnames.assign(header.begin(), header.begin() + d);
        lnames.assign(header.begin() + d, header.end());
    }
    return Dataset(std::move(x), std::move(y), std::move(fnames), std::move(lnames));
}

Matrix load_feature_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto cells = split(body, ',');
        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size() && numeric; ++c) numeric = parse_double(cells[c], values[c]);
        if (!numeric) {
            if (rows.empty()) continue;  // header
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell");
        }
        if (!rows.empty() && values.size() != rows.front().size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, found " +
                             std::to_string(values.size()));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ValidationError(path.string() + ": no data rows");
    Matrix x(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < rows[j].size(); ++i)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    if (!x.allFinite()) throw ValidationError(path.string() + ": features contain NaN or Inf");
    return x;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    const auto& fn = data.feature_names();
    const auto& ln = data.label_names();
    for (std::size_t i = 0; i < fn.size(); ++i) out << (i ? "," : "") << fn[i];
    for (const auto& name : ln) out << ',' << name;
    out << '\n';
    char buf[64];
    for (Eigen::Index n = 0; n < data.instance_count(); ++n) {
        for (Eigen::Index i = 0; i < data.feature_count(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.features()(i, n));
            out << (i ? "," : "") << buf;
        }
        for (Eigen::Index l = 0; l < data.label_count(); ++l)
            out << ',' << static_cast<int>(data.labels()(l, n));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// ARFF

namespace {

struct ArffAttribute {
    std::string name;
    bool numeric = false;
    std::vector<std::string> nominal;  // lower-cased values when nominal
};

// Splits an attribute declaration body into (name, type).
std::pair<std::string, std::string> split_attribute(std::string_view rest) {
    rest = trim(rest);
    std::string name;
    if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const char q = rest.front();
        const auto close = rest.find(q, 1);
        if (close == std::string_view::npos) throw ParseError("unterminated attribute name");
        name = std::string(rest.substr(1, close - 1));
        rest = rest.substr(close + 1);
    } else {
        const auto sp = rest.find_first_of(" \t");
        if (sp == std::string_view::npos) throw ParseError("attribute without type");
        name = std::string(rest.substr(0, sp));
        rest = rest.substr(sp);
    }
    return {name, std::string(trim(rest))};
}

// Reads a binary label cell: 0/1, or FALSE/TRUE as used by some exports.
bool parse_binary(std::string_view cell, double& out) {
    const auto v = lower(unquote(cell));
    if (v == "0" || v == "false") {
        out = 0.0;
        return true;
    }
    if (v == "1" || v == "true") {
        out = 1.0;
        return true;
    }
    double d;
    if (parse_double(v, d) && (d == 0.0 || d == 1.0)) {
        out = d;
        return true;
    }
    return false;
}

bool binary_nominal(const ArffAttribute& a) {
    if (a.nominal.empty() || a.nominal.size() > 2) return false;
    for (const auto& v : a.nominal) {
        double d;
        if (!parse_binary(v, d)) return false;
    }
    return true;
}

struct ArffContents {
    std::vector<ArffAttribute> attributes;
    std::vector<std::vector<std::string>> rows;  // dense cell text per attribute
};

ArffContents read_arff(const std::filesystem::path& path) {
    auto in = open_input(path);
    ArffContents arff;
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '%') continue;
        const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
        if (!in_data) {
            if (body.front() != '@') throw ParseError(where() + "expected a header directive");
            const auto sp = body.find_first_of(" \t");
            const auto keyword = lower(body.substr(0, sp));
            if (keyword == "@relation") continue;
            if (keyword == "@data") {
                in_data = true;
                continue;
            }
            if (keyword != "@attribute") throw ParseError(where() + "unknown directive " + keyword);
            auto [name, type] = split_attribute(body.substr(sp));
            ArffAttribute attr;
            attr.name = name;
            const auto t = lower(type);
            if (t == "numeric" || t == "real" || t == "integer") {
                attr.numeric = true;
            } else if (!t.empty() && t.front() == '{') {
                const auto close = t.rfind('}');
                if (close == std::string::npos) throw ParseError(where() + "unterminated nominal list");
                for (auto v : split(std::string_view(type).substr(1, close - 1), ','))
                    attr.nominal.emplace_back(lower(unquote(v)));
            }
            // string/date attributes stay non-numeric with no nominal values.
            arff.attributes.push_back(std::move(attr));
            continue;
        }
        const auto width = arff.attributes.size();
        std::vector<std::string> row(width, "0");
        if (body.front() == '{') {
            const auto close = body.rfind('}');
            if (close == std::string_view::npos) throw ParseError(where() + "unterminated sparse row");
            const auto inner = trim(body.substr(1, close - 1));
            if (!inner.empty()) {
                for (auto entry : split(inner, ',')) {
                    entry = trim(entry);
                    const auto sp = entry.find_first_of(" \t");
                    if (sp == std::string_view::npos) throw ParseError(where() + "bad sparse entry");
                    std::size_t idx = 0;
                    const auto key = entry.substr(0, sp);
                    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
                    if (ec != std::errc() || p != key.data() + key.size() || idx >= width)
                        throw ParseError(where() + "bad sparse index");
                    row[idx] = std::string(trim(entry.substr(sp)));
                }
            }
        } else {
            const auto cells = split(body, ',');
            if (cells.size() != width)
                throw ParseError(where() + "expected " + std::to_string(width) + " values, found " +
                                 std::to_string(cells.size()));
            for (std::size_t c = 0; c < width; ++c) row[c] = std::string(trim(cells[c]));
        }
        arff.rows.push_back(std::move(row));
    }
    if (arff.attributes.empty()) throw ValidationError(path.string() + ": no attributes declared");
    if (arff.rows.empty()) throw ValidationError(path.string() + ": no data rows");
    return arff;
}

Dataset assemble_arff(const ArffContents& arff, const std::vector<std::size_t>& label_attrs,
                      const std::filesystem::path& path) {
    std::vector<bool> is_label(arff.attributes.size(), false);
    for (auto a : label_attrs) {
        const auto& attr = arff.attributes[a];
        if (!attr.numeric && !binary_nominal(attr))
            throw ValidationError(path.string() + ": label attribute '" + attr.name +
                                  "' is not numeric or a {0,1} nominal");
        is_label[a] = true;
    }
    std::vector<std::size_t> feature_attrs;
    for (std::size_t a = 0; a < arff.attributes.size(); ++a) {
        if (is_label[a]) continue;
        if (!arff.attributes[a].numeric)
            throw ParseError(path.string() + ": unsupported attribute '" + arff.attributes[a].name +
                             "' (only numeric features are supported)");
        feature_attrs.push_back(a);
    }
    if (feature_attrs.empty()) throw ValidationError(path.string() + ": no feature attributes");

    const auto n = static_cast<Eigen::Index>(arff.rows.size());
    Matrix x(static_cast<Eigen::Index>(feature_attrs.size()), n);
    Matrix y(static_cast<Eigen::Index>(label_attrs.size()), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& row = arff.rows[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < feature_attrs.size(); ++i) {
            double v;
            if (!parse_double(unquote(row[feature_attrs[i]]), v))
                throw ParseError(path.string() + ": data row " + std::to_string(j + 1) +
                                 ": non-numeric value for '" + arff.attributes[feature_attrs[i]].name +
                                 "'");
            x(static_cast<Eigen::Index>(i), j) = v;
        }
        for (std::size_t l = 0; l < label_attrs.size(); ++l) {
            double v;
            if (!parse_binary(row[label_attrs[l]], v))
                throw ValidationError(path.string() + ": data row " + std::to_string(j + 1) +
                                      ", label '" + arff.attributes[label_attrs[l]].name +
                                      "': value is not 0 or 1");
            y(static_cast<Eigen::Index>(l), j) = v;
        }
    }
    std::vector<std::string> fnames, lnames;
    for (auto a : feature_attrs) fnames.push_back(arff.attributes[a].name);
    for (auto a : label_attrs) lnames.push_back(arff.attributes[a].name);
    return Dataset(std::move(x), std::move(y), std::move(fnames), std::move(lnames));
}

}  // namespace

Dataset load_arff(const std::filesystem::path& path, const std::vector<std::string>& label_names) {
    if (label_names.empty()) throw ValidationError("at least one label name is required");
    const auto arff = read_arff(path);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t a = 0; a < arff.attributes.size(); ++a) index.emplace(arff.attributes[a].name, a);
    std::vector<std::size_t> label_attrs;
    for (const auto& name : label_names) {
        const auto it = index.find(name);
        if (it == index.end()) throw ValidationError(path.string() + ": unknown label '" + name + "'");
        label_attrs.push_back(it->second);
    }
    return assemble_arff(arff, label_attrs, path);
}

Dataset load_arff_trailing(const std::filesystem::path& path, int label_count) {
    const auto arff = read_arff(path);
    if (label_count < 1 || static_cast<std::size_t>(label_count) >= arff.attributes.size())
        throw ValidationError(path.string() + ": label count out of range");
    std::vector<std::size_t> label_attrs;
    for (auto a = arff.attributes.size() - static_cast<std::size_t>(label_count);
         a < arff.attributes.size(); ++a)
        label_attrs.push_back(a);
    return assemble_arff(arff, label_attrs, path);
}

std::vector<std::string> read_mulan_labels(const std::filesystem::path& xml_path) {
    auto in = open_input(xml_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    static const std::regex label_re(R"re(<label\s+name\s*=\s*"([^"]*)")re");
    std::vector<std::string> names;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), label_re);
         it != std::sregex_iterator(); ++it)
        names.push_back((*it)[1].str());
    if (names.empty()) throw ParseError(xml_path.string() + ": no <label name=...> elements");
    return names;
}

// ---------------------------------------------------------------------------
// Descriptor sidecar

DatasetDescriptor describe(const Dataset& data, std::string source, std::string format) {
    return {std::move(source),   std::move(format),   static_cast<int>(data.label_count()),
            data.feature_names(), data.label_names(), data.instance_count()};
}

void write_descriptor(const DatasetDescriptor& desc, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["schema"] = "mltsk-dataset/1";
    j["source"] = desc.source;
    j["format"] = desc.format;
    j["label_count"] = desc.label_count;
    j["instance_count"] = desc.instance_count;
    j["feature_names"] = desc.feature_names;
    j["label_names"] = desc.label_names;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << j.dump(2) << '\n';
}

DatasetDescriptor read_descriptor(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("schema").get<std::string>() != "mltsk-dataset/1")
            throw UnsupportedVersionError(path.string() + ": unsupported descriptor schema");
        DatasetDescriptor d;
        d.source = j.at("source").get<std::string>();
        d.format = j.at("format").get<std::string>();
        d.label_count = j.at("label_count").get<int>();
        d.instance_count = j.value("instance_count", std::int64_t{0});
        d.feature_names = j.value("feature_names", std::vector<std::string>{});
        d.label_names = j.value("label_names", std::vector<std::string>{});
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Standardizer

Matrix Standardizer::apply(const Matrix& features) const {
    if (features.rows() != mean.size()) throw ValidationError("standardizer dimension mismatch");
    return (features.colwise() - mean).array().colwise() / stddev.array();
}

Matrix Standardizer::invert(const Matrix& standardized) const {
    if (standardized.rows() != mean.size()) throw ValidationError("standardizer dimension mismatch");
    return (standardized.array().colwise() * stddev.array()).matrix().colwise() + mean;
}

Standardizer fit_standardizer(const Dataset& data) {
    const auto& x = data.features();
    const double n = static_cast<double>(x.cols());
    Standardizer s;
    s.mean = x.rowwise().sum() / n;
    s.stddev = ((x.colwise() - s.mean).array().square().rowwise().sum() / n).sqrt().matrix();
    s.stddev = s.stddev.cwiseMax(Standardizer::kStddevFloor);
    return s;
}

Dataset apply_standardizer(const Standardizer& standardizer, const Dataset& data) {
    return data.with_features(standardizer.apply(data.features()));
}

// ---------------------------------------------------------------------------
// Folds

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("fold count must be at least 2");
    if (static_cast<std::size_t>(k) > n)
        throw ValidationError("fold count " + std::to_string(k) + " exceeds instance count " +
                              std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    FoldPlan plan;
    plan.fold_count = k;
    plan.seed = seed;
    plan.assignments.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos)
        plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    return plan;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

}  // namespace mltsk
