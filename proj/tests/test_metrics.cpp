#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ds/metrics.hpp"
#include "test_util.hpp"

using namespace ds;

namespace {

std::vector<std::uint32_t> random_permutation(std::size_t n, std::mt19937& gen) {
    std::vector<std::uint32_t> ranks(n);
    std::iota(ranks.begin(), ranks.end(), 1u);
    std::shuffle(ranks.begin(), ranks.end(), gen);
    return ranks;
}

RankMatrix rank_matrix_of(std::vector<std::vector<std::uint32_t>> rows,
                          std::vector<std::string> query_ids, std::vector<std::string> item_ids) {
    RankMatrix m;
    m.n_items = item_ids.size();
    m.query_ids = std::move(query_ids);
    m.item_ids = std::move(item_ids);
    m.rank_of = std::move(rows);
    return m;
}

}  // namespace

TEST_CASE("soft_topk_accuracy") {
    const std::vector<char> c{1, 0, 1};
    CHECK(soft_topk_accuracy(c, 3, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(soft_topk_accuracy(c, 3, 1.0) == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
    CHECK(soft_topk_accuracy(c, 3, 1.0) == doctest::Approx(0.72727).epsilon(1e-4));

    const std::vector<char> all_correct{1, 1, 1, 1};
    for (double s : {0.0, 0.5, 1.0, 2.0, 7.0}) {
        CHECK(soft_topk_accuracy(all_correct, 4, s) == 1.0);
    }

    CHECK_THROWS_AS(soft_topk_accuracy(c, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soft_topk_accuracy(c, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soft_topk_accuracy(c, 2, -0.5), std::invalid_argument);
}

TEST_CASE("soft_topk_accuracy is within [0,1] and improves when an item is corrected") {
    std::mt19937 gen(67);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + gen() % 10;
        std::vector<char> c(k);
        for (auto& v : c) v = gen() % 2;
        const double s = (gen() % 100) / 25.0;
        const double base = soft_topk_accuracy(c, k, s);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);

        auto flipped = c;
        for (std::size_t pos = 0; pos < k; ++pos) {
            if (!flipped[pos]) {
                flipped[pos] = 1;
                CHECK(soft_topk_accuracy(flipped, k, s) > base);
                break;
            }
        }
    }
}

TEST_CASE("jaccard_at_k") {
    const std::vector<std::uint32_t> a{1, 2, 3, 4};
    CHECK(jaccard_at_k(a, a, 2) == 1.0);

    const std::vector<std::uint32_t> b{3, 4, 1, 2};
    CHECK(jaccard_at_k(a, b, 2) == 0.0);  // disjoint top-2

    // top-2 sets {items 0,1} and {items 1,2}: one common of three
    const std::vector<std::uint32_t> c{1, 2, 3};
    const std::vector<std::uint32_t> d{3, 1, 2};
    CHECK(jaccard_at_k(c, d, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("soft_jaccard hand-evaluated case and identical rankings") {
    const std::vector<std::uint32_t> id{1, 2};
    const std::vector<std::uint32_t> swapped{2, 1};
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(soft_jaccard(id, id, 1, s) == 1.0);
        CHECK(soft_jaccard(id, id, 2, s) == 1.0);
    }
    // k=1, two items, opposite rankings, s=1: J = 2^{-1/s} = 0.5
    CHECK(soft_jaccard(id, swapped, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(soft_jaccard(id, swapped, 1, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("soft_jaccard at s=0 equals jaccard_at_k exactly") {
    std::mt19937 gen(71);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 12 + gen() % 20;
        const auto a = random_permutation(n, gen);
        const auto b = random_permutation(n, gen);
        for (std::size_t k : {1u, 5u, 10u}) {
            CHECK(soft_jaccard(a, b, k, 0.0) == jaccard_at_k(a, b, k));
        }
    }
}

TEST_CASE("soft_jaccard is symmetric and bounded") {
    std::mt19937 gen(73);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + gen() % 10;
        const auto a = random_permutation(n, gen);
        const auto b = random_permutation(n, gen);
        const std::size_t k = 1 + gen() % n;
        const double s = (gen() % 80) / 20.0;
        const double j_ab = soft_jaccard(a, b, k, s);
        CHECK(j_ab == soft_jaccard(b, a, k, s));
        CHECK(j_ab >= 0.0);
        CHECK(j_ab <= 1.0);
    }
}

TEST_CASE("soft_jaccard is non-decreasing in s on fixed disagreeing rankings") {
    // checked empirically: each beyond-k term (r/k)^(-1/s) grows with s, so
    // larger softness credits near-misses more (cf. the 2^(-1/s) case above)
    std::mt19937 gen(79);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 15;
        const auto a = random_permutation(n, gen);
        const auto b = random_permutation(n, gen);
        const std::size_t k = 5;
        if (jaccard_at_k(a, b, k) == 1.0) continue;
        double prev = soft_jaccard(a, b, k, 0.0);
        for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            const double cur = soft_jaccard(a, b, k, s);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("summarize") {
    const auto s = summarize({0.0, 1.0});
    CHECK(s.mean == 0.5);
    CHECK(s.q1 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.median == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.q3 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.sd == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(s.se == doctest::Approx(0.5).epsilon(1e-12));

    const auto single = summarize({0.7});
    CHECK(single.mean == 0.7);
    CHECK(single.se == 0.0);
    CHECK(single.q1 == 0.7);
    CHECK(single.median == 0.7);
    CHECK(single.q3 == 0.7);
}

TEST_CASE("evaluate_model") {
    LabelSet labels;
    labels.labels_of["q0"] = {"red"};
    labels.labels_of["q1"] = {"blue"};
    labels.labels_of["i0"] = {"red"};
    labels.labels_of["i1"] = {"blue"};

    SUBCASE("all queries all-correct") {
        const auto ranks = rank_matrix_of({{1, 2}, {2, 1}}, {"q0", "q1"}, {"i0", "i1"});
        LabelSet all;
        all.labels_of = {{"q0", {"x"}}, {"q1", {"x"}}, {"i0", {"x"}}, {"i1", {"x"}}};
        const auto summary = evaluate_model(ranks, all, 2, 0.0);
        CHECK(summary.mean == 1.0);
        CHECK(summary.se == 0.0);
    }
    SUBCASE("mixed correctness") {
        // q0 ranks i0 first (correct), q1 ranks i0 first (incorrect)
        const auto ranks = rank_matrix_of({{1, 2}, {1, 2}}, {"q0", "q1"}, {"i0", "i1"});
        const auto summary = evaluate_model(ranks, labels, 1, 0.0);
        CHECK(summary.mean == 0.5);
        CHECK(summary.q1 == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(summary.median == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(summary.q3 == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("missing query labels are listed") {
        const auto ranks = rank_matrix_of({{1, 2}, {1, 2}}, {"q0", "zz"}, {"i0", "i1"});
        CHECK_THROWS_WITH_AS(evaluate_model(ranks, labels, 1, 0.0), doctest::Contains("zz"),
                             std::invalid_argument);
    }
    SUBCASE("multi-label items count on any shared label") {
        LabelSet multi;
        multi.labels_of["q0"] = {"red", "green"};
        multi.labels_of["i0"] = {"green", "yellow"};
        CHECK(multi.relevant("q0", "i0"));
        CHECK_FALSE(multi.relevant("q0", "missing"));
    }
}

TEST_CASE("compare_models") {
    std::mt19937 gen(83);

    SUBCASE("identical rankings give 1 everywhere") {
        const auto a = rank_matrix_of({{1, 2, 3}, {3, 1, 2}}, {"q0", "q1"}, {"i0", "i1", "i2"});
        const auto summary = compare_models(a, a, 2, 1.0);
        for (double v : summary.per_query) CHECK(v == 1.0);
        CHECK(summary.mean == 1.0);
    }
    SUBCASE("s=0 summary equals the jaccard summary") {
        std::vector<std::vector<std::uint32_t>> rows_a, rows_b;
        for (int q = 0; q < 9; ++q) {
            rows_a.push_back(random_permutation(11, gen));
            rows_b.push_back(random_permutation(11, gen));
        }
        std::vector<std::string> qids, iids;
        for (int q = 0; q < 9; ++q) qids.push_back("q" + std::to_string(q));
        for (int i = 0; i < 11; ++i) iids.push_back("i" + std::to_string(i));
        const auto a = rank_matrix_of(rows_a, qids, iids);
        const auto b = rank_matrix_of(rows_b, qids, iids);

        const auto soft = compare_models(a, b, 4, 0.0);
        for (std::size_t q = 0; q < 9; ++q) {
            CHECK(soft.per_query[q] == jaccard_at_k(rows_a[q], rows_b[q], 4));
        }
    }
    SUBCASE("random pairs match the elementwise evaluation") {
        std::vector<std::vector<std::uint32_t>> rows_a, rows_b;
        for (int q = 0; q < 5; ++q) {
            rows_a.push_back(random_permutation(9, gen));
            rows_b.push_back(random_permutation(9, gen));
        }
        const auto a = rank_matrix_of(rows_a, {"a", "b", "c", "d", "e"},
                                      {"0", "1", "2", "3", "4", "5", "6", "7", "8"});
        const auto b = rank_matrix_of(rows_b, {"a", "b", "c", "d", "e"},
                                      {"0", "1", "2", "3", "4", "5", "6", "7", "8"});
        const auto summary = compare_models(a, b, 3, 1.5);
        for (std::size_t q = 0; q < 5; ++q) {
            CHECK(summary.per_query[q] == soft_jaccard(rows_a[q], rows_b[q], 3, 1.5));
        }
    }
    SUBCASE("shape mismatch") {
        const auto a = rank_matrix_of({{1, 2}}, {"q0"}, {"i0", "i1"});
        const auto b = rank_matrix_of({{1, 2, 3}}, {"q0"}, {"i0", "i1", "i2"});
        CHECK_THROWS_AS(compare_models(a, b, 1, 0.0), std::invalid_argument);
    }
}

TEST_CASE("labels CSV round trip") {
    const auto dir = test_tmp_dir("labels_io");
    const auto path = (dir / "labels.csv").string();
    save_labels_csv({"d0", "d1", "d0"}, {"red", "blue", "green"}, path);
    const auto labels = read_labels_csv(path);
    CHECK(labels.labels_of.at("d0") == std::vector<std::string>{"red", "green"});
    CHECK(labels.labels_of.at("d1") == std::vector<std::string>{"blue"});
}
