#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "../support.hpp"
#include "mltsk/error.hpp"
#include "mltsk/evaluation.hpp"

using namespace mltsk;

namespace {

// Direct evaluation of the metric definitions for one instance.
struct Brute {
    double ap = 0, oe = 0, rl = 0, cv = 0;
    bool ranked = false, pairwise = false;
};

int brute_rank(const Vector& s, int l) {
    int r = 1;
    for (int q = 0; q < s.size(); ++q) r += s(q) > s(l) || (s(q) == s(l) && q < l);
    return r;
}

Brute brute(const Vector& s, const Vector& y) {
    Brute b;
    const int labels = static_cast<int>(s.size());
    std::vector<int> rel, irr;
    for (int l = 0; l < labels; ++l) (y(l) == 1.0 ? rel : irr).push_back(l);
    b.ranked = !rel.empty();
    b.pairwise = !rel.empty() && !irr.empty();
    if (!b.ranked) return b;
    double ap = 0;
    int deepest = 0;
    for (int l : rel) {
        int above = 0;
        for (int q : rel) above += brute_rank(s, q) <= brute_rank(s, l);
        ap += static_cast<double>(above) / brute_rank(s, l);
        deepest = std::max(deepest, brute_rank(s, l));
    }
    b.ap = ap / static_cast<double>(rel.size());
    int top = 0;
    for (int l = 0; l < labels; ++l)
        if (brute_rank(s, l) == 1) top = l;
    b.oe = y(top) == 1.0 ? 0.0 : 1.0;
    b.cv = static_cast<double>(deepest - 1) / labels;
    if (b.pairwise) {
        int bad = 0;
        for (int l : rel)
            for (int q : irr) bad += s(l) <= s(q);
        b.rl = static_cast<double>(bad) / (static_cast<double>(rel.size()) * static_cast<double>(irr.size()));
    }
    return b;
}

}  // namespace

TEST_CASE("label ranks") {
    Vector s(3);
    s << 0.9, 0.1, 0.5;
    CHECK(rank_labels(s) == std::vector<int>{1, 3, 2});
    CHECK(rank_labels(Vector::Constant(4, 0.3)) == std::vector<int>{1, 2, 3, 4});
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        Vector v(6);
        for (int i = 0; i < 6; ++i) v(i) = static_cast<double>(rng.below(4));
        std::vector<int> idx(6);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
        std::vector<int> expected(6);
        for (int p = 0; p < 6; ++p) expected[static_cast<std::size_t>(idx[static_cast<std::size_t>(p)])] = p + 1;
        CHECK(rank_labels(v) == expected);
    }
}

TEST_CASE("hand cases") {
    Matrix s(3, 1), y(3, 1);
    s << 0.9, 0.8, 0.1;
    y << 1, 0, 1;
    CHECK(average_precision(s, y) == (1.0 + 2.0 / 3.0) / 2.0);
    CHECK(average_precision(s, y) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

    Matrix perfect_s(3, 2), perfect_y(3, 2);
    perfect_s << 0.9, 0.1, 0.5, 0.2, 0.1, 0.8;
    perfect_y << 1, 0, 1, 0, 0, 1;
    CHECK(average_precision(perfect_s, perfect_y) == 1.0);
    CHECK(ranking_loss(perfect_s, perfect_y) == 0.0);
    CHECK(one_error(perfect_s, perfect_y) == 0.0);
    CHECK(ranking_loss(perfect_s, Matrix::Ones(3, 2) - perfect_y) == 1.0);
    CHECK(one_error(perfect_s, Matrix::Ones(3, 2) - perfect_y) == 1.0);

    Matrix oe_s(2, 4), oe_y(2, 4);
    oe_s << 0.9, 0.1, 0.8, 0.3,
            0.2, 0.7, 0.1, 0.6;
    oe_y << 1, 1, 0, 1,
            0, 0, 1, 1;
    CHECK(one_error(oe_s, oe_y) == 0.5);

    Matrix cv_s(4, 1), cv_y(4, 1);
    cv_s << 0.9, 0.5, 0.7, 0.1;
    cv_y << 1, 1, 0, 0;
    CHECK(coverage(cv_s, cv_y) == 0.5);
    Matrix first_y(4, 1);
    first_y << 1, 0, 0, 0;
    CHECK(coverage(cv_s, first_y) == 0.0);
    Matrix last_y(4, 1);
    last_y << 0, 0, 0, 1;
    CHECK(coverage(cv_s, last_y) == 0.75);
}

TEST_CASE("hamming loss") {
    Rng rng(2);
    const Matrix t = testing::random_labels(rng, 5, 9);
    CHECK(hamming_loss(t, t) == 0.0);
    CHECK(hamming_loss(Matrix::Ones(5, 9) - t, t) == 1.0);
    Matrix p(3, 1), y(3, 1);
    p << 1, 0, 0;
    y << 1, 1, 0;
    CHECK(hamming_loss(p, y) == 1.0 / 3.0);
    CHECK_THROWS_AS(hamming_loss(Matrix::Constant(3, 1, 0.5), y), ValidationError);
}

TEST_CASE("instances without relevant labels are skipped and counted") {
    Matrix s(2, 3), y(2, 3);
    s << 0.9, 0.1, 0.4,
         0.2, 0.8, 0.3;
    y << 1, 0, 1,
         0, 0, 1;
    int skipped = -1;
    CHECK(average_precision(s, y, &skipped) == 1.0);
    CHECK(skipped == 1);
    CHECK(ranking_loss(s, y, &skipped) == 0.0);
    CHECK(skipped == 2);
    const auto r = evaluate(s, Matrix((s.array() > 0.5).cast<double>()), y);
    CHECK(r.skipped_ranked == 1);
    CHECK(r.skipped_pairwise == 2);
}

TEST_CASE("exhaustive agreement with the definitions for three labels") {
    std::vector<Vector> scores, truths;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                Vector v(3);
                v << a, b, c;
                scores.push_back(v);
            }
    for (int mask = 0; mask < 8; ++mask) {
        Vector v(3);
        v << (mask & 1), (mask >> 1 & 1), (mask >> 2 & 1);
        truths.push_back(v);
    }
    for (const auto& s : scores)
        for (const auto& y : truths) {
            const Brute b = brute(s, y);
            int skipped = 0;
            CHECK(average_precision(s, y, &skipped) == b.ap);
            CHECK(skipped == (b.ranked ? 0 : 1));
            CHECK(one_error(s, y) == b.oe);
            CHECK(coverage(s, y) == b.cv);
            CHECK(ranking_loss(s, y) == b.rl);
        }
}

TEST_CASE("four-instance batches average the per-instance definitions") {
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        Matrix s(3, 4), y(3, 4), pred(3, 4);
        for (int n = 0; n < 4; ++n)
            for (int l = 0; l < 3; ++l) {
                s(l, n) = static_cast<double>(rng.below(3));
                y(l, n) = static_cast<double>(rng.below(2));
                pred(l, n) = static_cast<double>(rng.below(2));
            }
        double ap = 0, oe = 0, rl = 0, cv = 0, hl = 0;
        int ranked = 0, pairwise = 0;
        for (int n = 0; n < 4; ++n) {
            const Brute b = brute(s.col(n), y.col(n));
            if (b.ranked) {
                ap += b.ap;
                oe += b.oe;
                cv += b.cv;
                ++ranked;
            }
            if (b.pairwise) {
                rl += b.rl;
                ++pairwise;
            }
            int wrong = 0;
            for (int l = 0; l < 3; ++l) wrong += pred(l, n) != y(l, n);
            hl += wrong / 3.0;
        }
        const auto r = evaluate(s, pred, y);
        CHECK(r.ap == (ranked ? ap / ranked : 0.0));
        CHECK(r.oe == (ranked ? oe / ranked : 0.0));
        CHECK(r.cv == (ranked ? cv / ranked : 0.0));
        CHECK(r.rl == (pairwise ? rl / pairwise : 0.0));
        CHECK(r.hl == hl / 4.0);
        CHECK(r.skipped_ranked == 4 - ranked);
        CHECK(r.skipped_pairwise == 4 - pairwise);
    }
}

TEST_CASE("metric names and directions") {
    for (const char* name : {"ap", "hl", "oe", "rl", "cv"}) CHECK(metric_name(parse_metric(name)) == name);
    CHECK_THROWS_AS(parse_metric("f1"), ValidationError);
    CHECK(higher_is_better(Metric::ap));
    CHECK_FALSE(higher_is_better(Metric::hl));
}

TEST_CASE("rank tables and the Friedman statistic") {
    // Hand table, k = 3 methods over M = 4 datasets (higher is better).
    Matrix scores(4, 3);
    scores << 0.9, 0.8, 0.7,
              0.6, 0.9, 0.5,
              0.8, 0.8, 0.4,
              0.7, 0.6, 0.9;
    const auto t = make_rank_table({"a", "b", "c"}, {"d1", "d2", "d3", "d4"}, scores, true);
    Matrix ranks(4, 3);
    ranks << 1, 2, 3,
             2, 1, 3,
             1.5, 1.5, 3,
             2, 3, 1;
    CHECK(t.ranks == ranks);
    CHECK(t.average_ranks(0) == 1.625);
    CHECK(t.average_ranks(1) == 1.875);
    CHECK(t.average_ranks(2) == 2.5);
    // Rank sums 6.5, 7.5, 10: chi2 = 12/(M k (k+1)) sum R_j^2 - 3 M (k+1).
    const double chi2 = 12.0 / (4 * 3 * 4) * (6.5 * 6.5 + 7.5 * 7.5 + 10.0 * 10.0) - 3.0 * 4 * 4;
    const auto f = friedman_statistic(t);
    CHECK(f.chi_square == doctest::Approx(chi2).epsilon(1e-14));
    CHECK(f.f_statistic == doctest::Approx(3.0 * chi2 / (4.0 * 2.0 - chi2)).epsilon(1e-14));
    CHECK_FALSE(f.degenerate);

    const auto lower = make_rank_table({"a", "b", "c"}, {"d1", "d2", "d3", "d4"}, scores, false);
    CHECK(lower.ranks(0, 0) == 3);

    const auto tied = make_rank_table({"a", "b"}, {"d1", "d2"}, Matrix::Constant(2, 2, 0.5), true);
    const auto ft = friedman_statistic(tied);
    CHECK(ft.f_statistic == 0.0);
    CHECK(ft.degenerate);

    Matrix dom(3, 2);
    dom << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3;
    const auto td = make_rank_table({"a", "b"}, {"x", "y", "z"}, dom, true);
    CHECK(td.average_ranks(0) == 1.0);
    CHECK(td.average_ranks(1) == 2.0);
    const auto fd = friedman_statistic(td);
    CHECK(std::isinf(fd.f_statistic));
    CHECK(fd.degenerate);
}

TEST_CASE("critical difference") {
    CHECK(std::abs(bonferroni_dunn_cd(9, 12, 2.724) - 3.0455) <= 1e-4);
    CHECK(bonferroni_dunn_cd(2, 1, 1.0) == 1.0);
    CHECK(bonferroni_dunn_cd(5, 20, 2.5) == doctest::Approx(bonferroni_dunn_cd(5, 10, 2.5) / std::sqrt(2.0)));
    CHECK_THROWS_AS(bonferroni_dunn_cd(1, 3, 2.0), ValidationError);
}
