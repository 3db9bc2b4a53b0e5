#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mltsk/dataset.hpp"
#include "mltsk/random.hpp"

namespace testing {

using mltsk::Matrix;
using mltsk::Vector;

inline Matrix random_matrix(mltsk::Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = lo + (hi - lo) * rng.uniform();
    return m;
}

inline Matrix random_labels(mltsk::Rng& rng, Eigen::Index rows, Eigen::Index cols, double p = 0.5) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform() < p ? 1.0 : 0.0;
    return m;
}

inline Matrix random_symmetric(mltsk::Rng& rng, Eigen::Index n) {
    const Matrix a = random_matrix(rng, n, n);
    return (a + a.transpose()) / 2.0;
}

inline double normal(mltsk::Rng& rng) {
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * rng.uniform());
}

// Two Gaussian blobs in D dimensions centred at -2 and +2 along every axis.
// Labels are blob indicators: with `complementary` the second label is the
// negation of the first, otherwise both labels mark the same blob.
inline mltsk::Dataset toy_blobs(std::uint64_t seed, int per_blob = 20, int dims = 2,
                                bool complementary = true, double spread = 0.4) {
    mltsk::Rng rng(seed);
    const int n = 2 * per_blob;
    Matrix x(dims, n), y(2, n);
    for (int j = 0; j < n; ++j) {
        const bool second = j >= per_blob;
        for (int d = 0; d < dims; ++d) x(d, j) = (second ? 2.0 : -2.0) + spread * normal(rng);
        y(0, j) = second ? 1.0 : 0.0;
        y(1, j) = complementary ? 1.0 - y(0, j) : y(0, j);
    }
    return mltsk::Dataset(x, y);
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mltsk_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
    const double denom = std::max(b.norm(), 1e-300);
    return (a - b).norm() / denom;
}

}  // namespace testing
