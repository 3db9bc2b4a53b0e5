#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <set>

#include "../support.hpp"
#include "mltsk/dataset.hpp"
#include "mltsk/error.hpp"

using namespace mltsk;
using testing::TempDir;
using testing::write_file;

TEST_CASE("dataset construction validates its invariants") {
    Matrix x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    Matrix y(1, 3);
    y << 0, 1, 1;
    const Dataset d(x, y);
    CHECK(d.feature_count() == 2);
    CHECK(d.label_count() == 1);
    CHECK(d.instance_count() == 3);
    CHECK(d.feature_names() == std::vector<std::string>{"f1", "f2"});
    CHECK(d.label_names() == std::vector<std::string>{"y1"});

    Matrix bad_y = y;
    bad_y(0, 1) = 0.5;
    CHECK_THROWS_AS(Dataset(x, bad_y), ValidationError);
    Matrix nan_x = x;
    nan_x(1, 1) = std::nan("");
    CHECK_THROWS_AS(Dataset(nan_x, y), ValidationError);
    CHECK_THROWS_AS(Dataset(x, Matrix(1, 2)), ValidationError);
    CHECK_THROWS_AS(Dataset(x, y, {"only-one"}), ValidationError);
    CHECK_THROWS_AS(Dataset(Matrix(0, 3), y), ValidationError);
}

TEST_CASE("subset keeps the requested order") {
    Matrix x(1, 4);
    x << 10, 11, 12, 13;
    Matrix y(1, 4);
    y << 0, 1, 0, 1;
    const Dataset d(x, y);
    const std::vector<std::size_t> idx{3, 0};
    const Dataset s = d.subset(idx);
    CHECK(s.instance_count() == 2);
    CHECK(s.features()(0, 0) == 13);
    CHECK(s.features()(0, 1) == 10);
    CHECK(s.labels()(0, 0) == 1);
}

TEST_CASE("load_csv shapes and header detection") {
    TempDir dir;
    write_file(dir / "a.csv", "1.5,2,0\n3,4,1\n-5,6e-3,1\n");
    const Dataset d = load_csv(dir / "a.csv", 1);
    CHECK(d.feature_count() == 2);
    CHECK(d.label_count() == 1);
    CHECK(d.instance_count() == 3);
    CHECK(d.features()(1, 2) == 6e-3);

    write_file(dir / "b.csv", "x1,x2,lab\n1,2,0\n3,4,1\n");
    const Dataset h = load_csv(dir / "b.csv", 1);
    CHECK(h.instance_count() == 2);
    CHECK(h.feature_names() == std::vector<std::string>{"x1", "x2"});
    CHECK(h.label_names() == std::vector<std::string>{"lab"});
}

TEST_CASE("load_csv errors name the offending place") {
    TempDir dir;
    write_file(dir / "bad.csv", "1,2,0\n3,4,2\n");
    try {
        load_csv(dir / "bad.csv", 1);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("column 3") != std::string::npos);
    }
    write_file(dir / "ragged.csv", "1,2,0\n3,1\n");
    CHECK_THROWS_AS(load_csv(dir / "ragged.csv", 1), ParseError);
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_AS(load_csv(dir / "empty.csv", 1), ValidationError);
    CHECK_THROWS(load_csv(dir / "missing.csv", 1));
}

TEST_CASE("csv round trip is bit exact on random files") {
    TempDir dir;
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(5));
        const auto l = static_cast<Eigen::Index>(1 + rng.below(4));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(30));
        Matrix x = testing::random_matrix(rng, d, n, -1e6, 1e6);
        for (Eigen::Index j = 0; j < n; ++j) x(0, j) *= std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
        const Dataset original(x, testing::random_labels(rng, l, n));
        write_csv(original, dir / "r.csv");
        const Dataset back = load_csv(dir / "r.csv", static_cast<int>(l));
        CHECK(back.features() == original.features());
        CHECK(back.labels() == original.labels());
        write_csv(back, dir / "r2.csv");
        CHECK(testing::read_file(dir / "r.csv") == testing::read_file(dir / "r2.csv"));
    }
}

TEST_CASE("load_feature_csv reads unlabeled instances") {
    TempDir dir;
    write_file(dir / "f.csv", "a,b\n1,2\n3,4\n5,6\n");
    const Matrix x = load_feature_csv(dir / "f.csv");
    CHECK(x.rows() == 2);
    CHECK(x.cols() == 3);
    CHECK(x(1, 2) == 6);
}

TEST_CASE("load_arff dense and sparse rows") {
    TempDir dir;
    write_file(dir / "d.arff",
               "% comment\n@relation test\n"
               "@attribute a numeric\n@attribute b real\n@attribute 'c d' numeric\n"
               "@attribute l1 {0,1}\n@attribute l2 {0,1}\n"
               "@data\n1,2,3,0,1\n4,5,6,1,1\n");
    const Dataset d = load_arff(dir / "d.arff", {"l1", "l2"});
    CHECK(d.feature_count() == 3);
    CHECK(d.label_count() == 2);
    CHECK(d.instance_count() == 2);
    CHECK(d.feature_names()[2] == "c d");
    CHECK(d.features()(2, 1) == 6);
    CHECK(d.labels()(0, 1) == 1);

    // Label order follows the requested names, not the file order.
    const Dataset swapped = load_arff(dir / "d.arff", {"l2", "l1"});
    CHECK(swapped.labels()(0, 0) == 1);
    CHECK(swapped.labels()(1, 0) == 0);

    write_file(dir / "s.arff",
               "@relation sparse\n@attribute a numeric\n@attribute b numeric\n@attribute c numeric\n"
               "@attribute l0 {0,1}\n@attribute l1 {0,1}\n@data\n{0 1.5, 4 1}\n{}\n");
    const Dataset s = load_arff(dir / "s.arff", {"l0", "l1"});
    CHECK(s.features()(0, 0) == 1.5);
    CHECK(s.features()(1, 0) == 0);
    CHECK(s.features()(2, 0) == 0);
    CHECK(s.labels()(0, 0) == 0);
    CHECK(s.labels()(1, 0) == 1);
    CHECK(s.features().col(1).isZero());

    CHECK_THROWS_AS(load_arff(dir / "s.arff", {"nope"}), ValidationError);
    write_file(dir / "str.arff", "@relation x\n@attribute s string\n@attribute l {0,1}\n@data\nfoo,1\n");
    CHECK_THROWS_AS(load_arff(dir / "str.arff", {"l"}), ParseError);
}

TEST_CASE("real Emotions excerpt parses with its nominal labels") {
    const auto path = std::filesystem::path(MLTSK_TEST_DATA) / "emotions_head.arff";
    const Dataset d = load_arff_trailing(path, 6);
    CHECK(d.feature_count() == 72);
    CHECK(d.label_count() == 6);
    CHECK(d.instance_count() == 13);
    CHECK(d.label_names()[0] == "amazed.suprised");
    CHECK(d.labels().sum() > 0);
}

TEST_CASE("MULAN label xml") {
    TempDir dir;
    write_file(dir / "l.xml",
               "<?xml version=\"1.0\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n"
               "<label name=\"l1\"></label>\n<label name=\"l2\"></label>\n</labels>\n");
    CHECK(read_mulan_labels(dir / "l.xml") == std::vector<std::string>{"l1", "l2"});
}

TEST_CASE("descriptor round trip") {
    TempDir dir;
    Matrix x(2, 2);
    x << 1, 2, 3, 4;
    Matrix y(1, 2);
    y << 0, 1;
    const auto desc = describe(Dataset(x, y), "data.csv", "csv");
    write_descriptor(desc, dir / "d.json");
    const auto back = read_descriptor(dir / "d.json");
    CHECK(back.source == "data.csv");
    CHECK(back.label_count == 1);
    CHECK(back.instance_count == 2);
    CHECK(back.feature_names == desc.feature_names);
}

TEST_CASE("standardizer") {
    SUBCASE("constant feature maps to zero") {
        Matrix x(1, 4);
        x << 3, 3, 3, 3;
        const Dataset d(x, Matrix::Zero(1, 4));
        CHECK(apply_standardizer(fit_standardizer(d), d).features().isZero());
    }
    SUBCASE("already standard values are unchanged") {
        Matrix x(1, 4);
        x << -1, 1, -1, 1;
        const Dataset d(x, Matrix::Zero(1, 4));
        CHECK(apply_standardizer(fit_standardizer(d), d).features() == x);
    }
    SUBCASE("moments after the transform") {
        Rng rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix x = testing::random_matrix(rng, 5, 20, -50, 200);
            const Dataset d(x, Matrix::Zero(1, 20));
            const Standardizer s = fit_standardizer(d);
            const Matrix z = apply_standardizer(s, d).features();
            for (Eigen::Index f = 0; f < 5; ++f) {
                const double mean = z.row(f).mean();
                const double var = (z.row(f).array() - mean).square().mean();
                CHECK(std::abs(mean) < 1e-9);
                CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
            }
            CHECK((s.invert(z) - x).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("fold plans") {
    auto sizes = [](const FoldPlan& p) {
        std::vector<std::size_t> s;
        for (int f = 0; f < p.fold_count; ++f) s.push_back(p.test_indices(f).size());
        std::sort(s.begin(), s.end());
        return s;
    };
    CHECK(sizes(make_folds(10, 5, 1)) == std::vector<std::size_t>{2, 2, 2, 2, 2});
    CHECK(sizes(make_folds(11, 5, 1)) == std::vector<std::size_t>{2, 2, 2, 2, 3});
    CHECK(make_folds(50, 5, 9).assignments == make_folds(50, 5, 9).assignments);
    CHECK(make_folds(50, 5, 9).assignments != make_folds(50, 5, 10).assignments);
    CHECK_THROWS_AS(make_folds(10, 1, 0), ValidationError);
    CHECK_THROWS_AS(make_folds(3, 4, 0), ValidationError);

    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(200);
        const int k = static_cast<int>(2 + rng.below(std::min<std::size_t>(n - 1, 10)));
        const FoldPlan p = make_folds(n, k, rng.next());
        std::set<std::size_t> seen;
        std::size_t lo = n, hi = 0;
        for (int f = 0; f < k; ++f) {
            const auto test = p.test_indices(f);
            const auto train = p.train_indices(f);
            CHECK(test.size() + train.size() == n);
            for (auto i : test) CHECK(seen.insert(i).second);
            std::set<std::size_t> tr(train.begin(), train.end());
            for (auto i : test) CHECK(tr.count(i) == 0);
            lo = std::min(lo, test.size());
            hi = std::max(hi, test.size());
        }
        CHECK(seen.size() == n);
        CHECK(hi - lo <= 1);
    }
}
