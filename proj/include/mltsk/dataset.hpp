#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mltsk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A multi-label dataset stored column-major by instance: features are
/// D×N, labels L×N with entries exactly 0 or 1.
///
/// Construction validates every invariant and throws ValidationError on
/// failure, so a Dataset value is always well-formed.
class Dataset {
public:
    Dataset(Matrix features, Matrix labels,
            std::vector<std::string> feature_names = {},
            std::vector<std::string> label_names = {});

    const Matrix& features() const noexcept { return features_; }
    const Matrix& labels() const noexcept { return labels_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }

    Eigen::Index feature_count() const noexcept { return features_.rows(); }
    Eigen::Index label_count() const noexcept { return labels_.rows(); }
    Eigen::Index instance_count() const noexcept { return features_.cols(); }

    /// Instances at `indices`, in that order.
    Dataset subset(std::span<const std::size_t> indices) const;

    /// Same names, replaced matrices (shapes must be consistent).
    Dataset with_features(Matrix features) const;
    Dataset with_labels(Matrix labels) const;

private:
    Matrix features_;
    Matrix labels_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> label_names_;
};

// CSV: features first, last `label_count` columns are labels. A header row
// is detected when the first row is not entirely numeric.
Dataset load_csv(const std::filesystem::path& path, int label_count);
void write_csv(const Dataset& data, const std::filesystem::path& path);
// Unlabeled CSV: every column is a feature; returns D×N.
Matrix load_feature_csv(const std::filesystem::path& path);

// ARFF (MULAN dialect). Attributes named in `label_names` become label rows
// in that order; other numeric attributes become features.
Dataset load_arff(const std::filesystem::path& path,
                  const std::vector<std::string>& label_names);
// ARFF where the trailing `label_count` attributes are labels.
Dataset load_arff_trailing(const std::filesystem::path& path, int label_count);
// Label names from a MULAN XML label file (<label name="..."> elements).
std::vector<std::string> read_mulan_labels(const std::filesystem::path& xml_path);

/// Text sidecar describing a dataset file (JSON, schema "mltsk-dataset/1").
struct DatasetDescriptor {
    std::string source;  // provenance path of the data file
    std::string format;  // "csv" or "arff"
    int label_count = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;
    std::int64_t instance_count = 0;
};

DatasetDescriptor describe(const Dataset& data, std::string source, std::string format);
void write_descriptor(const DatasetDescriptor& desc, const std::filesystem::path& path);
DatasetDescriptor read_descriptor(const std::filesystem::path& path);

/// Per-feature z-score statistics fitted on a training portion.
struct Standardizer {
    Vector mean;
    Vector stddev;  // population stddev, floored at kStddevFloor

    static constexpr double kStddevFloor = 1e-12;

    Matrix apply(const Matrix& features) const;
    Matrix invert(const Matrix& standardized) const;
};

Standardizer fit_standardizer(const Dataset& data);
Dataset apply_standardizer(const Standardizer& standardizer, const Dataset& data);

/// Assignment of N instances to k folds. Indices are shuffled with
/// Fisher-Yates driven by mt19937_64(seed), then dealt round-robin, so fold
/// sizes differ by at most one.
struct FoldPlan {
    int fold_count = 0;
    std::vector<int> assignments;
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

}  // namespace mltsk
