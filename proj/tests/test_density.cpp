#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ds/density.hpp"
#include "ds/math_util.hpp"
#include "oracles.hpp"

using namespace ds;

namespace {

EmbeddingTable random_embedding(std::mt19937& gen, std::size_t n, std::size_t d, double spread = 1.0) {
    std::normal_distribution<double> normal(0.0, spread);
    EmbeddingTable emb;
    emb.dim = d;
    for (std::size_t i = 0; i < n; ++i) {
        emb.ids.emplace("t" + std::to_string(i), static_cast<FeatureId>(i));
        emb.tokens.push_back("t" + std::to_string(i));
        for (std::size_t a = 0; a < d; ++a) emb.vectors.push_back(normal(gen));
    }
    return emb;
}

DocFeatureMatrix random_dfm(std::mt19937& gen, std::size_t n_docs, std::size_t n_features) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    DocFeatureMatrix m;
    m.n_features = n_features;
    m.rows.resize(n_docs);
    for (std::size_t t = 0; t < n_docs; ++t) {
        m.doc_ids.push_back("d" + std::to_string(t));
        for (FeatureId i = 0; i < n_features; ++i) {
            if (gen() % 3 == 0) m.rows[t].emplace_back(i, unit(gen));
        }
       if (m.rows[t].empty()) m.rows[t].emplace_back(static_cast<FeatureId>(gen() % n_features), unit(gen));
    }
    return m;
}

SamplePoints points_at(std::vector<std::vector<double>> coords) {
    SamplePoints s;
    s.dim = coords.empty() ? 0 : coords[0].size();
    s.radius = 1.0;
    s.points = Matrix(coords.size(), s.dim);
    for (std::size_t j = 0; j < coords.size(); ++j) {
        for (std::size_t a = 0; a < s.dim; ++a) s.points.at(j, a) = coords[j][a];
    }
    return s;
}

EmbeddingTable embedding_at(std::vector<std::vector<double>> coords) {
    EmbeddingTable emb;
    emb.dim = coords.empty() ? 0 : coords[0].size();
    for (std::size_t i = 0; i < coords.size(); ++i) {
        emb.ids.emplace("t" + std::to_string(i), static_cast<FeatureId>(i));
        emb.tokens.push_back("t" + std::to_string(i));
        for (double v : coords[i]) emb.vectors.push_back(v);
    }
    return emb;
}

Bandwidth scalar_bw(double h) {
    Bandwidth bw;
    bw.scalar = h;
    return bw;
}

}  // namespace

TEST_CASE("kernel_log_value") {
    CHECK(kernel_log_value({KernelShape::gaussian, 2}, 0.0, 1.0) ==
          doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-12));
    CHECK(kernel_log_value({KernelShape::gaussian, 2}, 0.0, 1.0) == doctest::Approx(-1.83788).epsilon(1e-5));
    CHECK(kernel_log_value({KernelShape::epanechnikov, 3}, 5.0, 1.0) == kNegInf);
    CHECK(kernel_log_value({KernelShape::epanechnikov, 3}, 0.0, 1.0) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // bandwidth rescales the squared distance
    CHECK(kernel_log_value({KernelShape::gaussian, 1}, 4.0, 2.0) ==
          doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5).epsilon(1e-12));
    CHECK_THROWS_AS(kernel_log_value({KernelShape::gaussian, 1}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("normalized density of a single-feature document is its weight everywhere") {
    const auto emb = embedding_at({{0.4, -0.2}});
    const auto samples = points_at({{0.0, 0.0}, {1.0, 2.0}, {-3.0, 0.5}});
    DocFeatureMatrix dfm;
    dfm.n_features = 1;
    dfm.doc_ids = {"d0"};
    dfm.rows = {{{0, 0.73}}};

    for (auto shape : {KernelShape::gaussian, KernelShape::epanechnikov}) {
        const auto result = density_matrix(dfm, emb, samples, scalar_bw(5.0), {shape, 2}, true);
        for (std::size_t j = 0; j < samples.count(); ++j) {
            CHECK(result.values.at(0, j) == doctest::Approx(0.73).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalized density of two equidistant features averages their weights") {
    const auto emb = embedding_at({{1.0, 0.0}, {-1.0, 0.0}});
    const auto samples = points_at({{0.0, 0.0}, {0.0, 2.0}});
    DocFeatureMatrix dfm;
    dfm.n_features = 2;
    dfm.doc_ids = {"d0"};
    dfm.rows = {{{0, 0.3}, {1, 0.5}}};

    const auto result = density_matrix(dfm, emb, samples, scalar_bw(1.5), {KernelShape::gaussian, 2}, true);
    for (std::size_t j = 0; j < samples.count(); ++j) {
        CHECK(result.values.at(0, j) == doctest::Approx(0.4).epsilon(1e-12));
    }
}

TEST_CASE("density_matrix matches the naive triple-loop oracle") {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> hdist(0.4, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t d = 1 + gen() % 8;
        const std::size_t n_features = 2 + gen() % 49;
        const std::size_t n_docs = 1 + gen() % 20;
        const std::size_t n_points = 1 + gen() % 10;

        const auto emb = random_embedding(gen, n_features, d);
        const auto dfm = random_dfm(gen, n_docs, n_features);
        SamplePoints samples;
        {
            std::normal_distribution<double> normal(0.0, 1.5);
            samples.dim = d;
            samples.radius = 10.0;
            samples.points = Matrix(n_points, d);
            for (auto& v : samples.points.data) v = normal(gen);
        }
        Bandwidth bw;
        if (trial % 2 == 0) {
            bw.scalar = hdist(gen);
        } else {
            double log_sum = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                bw.per_axis.push_back(hdist(gen));
                log_sum += std::log(bw.per_axis.back());
            }
            bw.scalar = std::exp(log_sum / static_cast<double>(d));
        }
        const KernelShape shape = trial % 4 < 2 ? KernelShape::gaussian : KernelShape::epanechnikov;
        const bool normalize = trial % 3 == 0;

        const auto result = density_matrix(dfm, emb, samples, bw, {shape, d}, normalize, 1 + trial % 3);
        const auto oracle = density_oracle(dfm, emb, samples, bw, shape, normalize);
        for (std::size_t t = 0; t < n_docs; ++t) {
            for (std::size_t j = 0; j < n_points; ++j) {
                const double got = result.values.at(t, j);
                const double want = oracle.at(t, j);
                CHECK(std::abs(got - want) <= 1e-10 * std::max({std::abs(want), std::abs(got), 1e-300}));
            }
        }
    }
}

TEST_CASE("unnormalized density is linear in document weights") {
    std::mt19937 gen(37);
    const auto emb = random_embedding(gen, 12, 4);
    auto dfm = random_dfm(gen, 3, 12);
    SamplePoints samples;
    samples.dim = 4;
    samples.radius = 5.0;
    samples.points = Matrix(6, 4);
    std::normal_distribution<double> normal;
    for (auto& v : samples.points.data) v = normal(gen);

    const auto base = density_matrix(dfm, emb, samples, scalar_bw(0.8), {KernelShape::gaussian, 4}, false);
    auto scaled_dfm = dfm;
    for (auto& [feature, weight] : scaled_dfm.rows[1]) weight *= 4.0;
    const auto scaled = density_matrix(scaled_dfm, emb, samples, scalar_bw(0.8), {KernelShape::gaussian, 4}, false);

    for (std::size_t j = 0; j < samples.count(); ++j) {
        CHECK(scaled.values.at(1, j) == doctest::Approx(4.0 * base.values.at(1, j)).epsilon(1e-12));
        CHECK(scaled.values.at(0, j) == base.values.at(0, j));
        CHECK(scaled.values.at(2, j) == base.values.at(2, j));
    }
}

TEST_CASE("gaussian density at a far point increases with bandwidth") {
    const auto emb = embedding_at({{0.0, 0.0, 0.0}});
    const auto samples = points_at({{4.0, 4.0, 4.0}});
    DocFeatureMatrix dfm;
    dfm.n_features = 1;
    dfm.doc_ids = {"d0"};
    dfm.rows = {{{0, 1.0}}};

    double prev = 0.0;
    for (double h : {0.5, 0.8, 1.2, 2.0, 3.5}) {
        const auto result = density_matrix(dfm, emb, samples, scalar_bw(h), {KernelShape::gaussian, 3}, false);
        CHECK(result.values.at(0, 0) > prev);
        prev = result.values.at(0, 0);
    }
}

TEST_CASE("a document's density row ignores other documents") {
    std::mt19937 gen(41);
    const auto emb = random_embedding(gen, 10, 3);
    auto dfm = random_dfm(gen, 4, 10);
    SamplePoints samples;
    samples.dim = 3;
    samples.radius = 3.0;
    samples.points = Matrix(5, 3);
    std::normal_distribution<double> normal;
    for (auto& v : samples.points.data) v = normal(gen);

    const auto full = density_matrix(dfm, emb, samples, scalar_bw(1.0), {KernelShape::gaussian, 3}, false);

    DocFeatureMatrix solo;
    solo.n_features = dfm.n_features;
    solo.doc_ids = {dfm.doc_ids[2]};
    solo.rows = {dfm.rows[2]};
    const auto alone = density_matrix(solo, emb, samples, scalar_bw(1.0), {KernelShape::gaussian, 3}, false);

    for (std::size_t j = 0; j < samples.count(); ++j) {
        CHECK(full.values.at(2, j) == alone.values.at(0, j));
    }
}

TEST_CASE("density output is identical across thread counts and block shapes") {
    std::mt19937 gen(43);
    const auto emb = random_embedding(gen, 40, 5);
    const auto dfm = random_dfm(gen, 15, 40);
    SamplePoints samples;
    samples.dim = 5;
    samples.radius = 4.0;
    samples.points = Matrix(33, 5);
    std::normal_distribution<double> normal;
    for (auto& v : samples.points.data) v = normal(gen);

    const auto a = density_matrix(dfm, emb, samples, scalar_bw(0.9), {KernelShape::gaussian, 5}, true, 1);
    const auto b = density_matrix(dfm, emb, samples, scalar_bw(0.9), {KernelShape::gaussian, 5}, true, 8);
    CHECK(a.values == b.values);
}

TEST_CASE("normalized density reports zero-denominator cells") {
    // Epanechnikov support is |y| < sqrt(d); this sample point is far outside
    // every feature's support, so the kernel sum vanishes there.
    const auto emb = embedding_at({{0.0, 0.0}, {0.3, 0.1}});
    const auto samples = points_at({{0.1, 0.0}, {9.0, 9.0}});
    DocFeatureMatrix dfm;
    dfm.n_features = 2;
    dfm.doc_ids = {"d0"};
    dfm.rows = {{{0, 1.0}}};

    const auto result = density_matrix(dfm, emb, samples, scalar_bw(1.0), {KernelShape::epanechnikov, 2}, true);
    CHECK(result.zero_denominator_cells == 1);
    CHECK(result.first_zero_denominator_point == 1);
    CHECK(result.values.at(0, 1) == 0.0);
    CHECK(result.values.at(0, 0) > 0.0);
}

TEST_CASE("cross_corpus_densities") {
    std::mt19937 gen(47);
    const auto emb = random_embedding(gen, 14, 4);
    const auto queries = random_dfm(gen, 5, 14);
    const auto items = random_dfm(gen, 7, 14);
    SamplePoints samples;
    samples.dim = 4;
    samples.radius = 4.0;
    samples.points = Matrix(9, 4);
    std::normal_distribution<double> normal;
    for (auto& v : samples.points.data) v = normal(gen);
    const KernelSpec spec{KernelShape::gaussian, 4};

    SUBCASE("same object evaluates once and shares the result") {
        const auto cross = cross_corpus_densities(queries, queries, emb, samples, scalar_bw(1.0), spec, false);
        CHECK(cross.shared);
        CHECK(cross.queries.values == cross.items.values);
    }
    SUBCASE("distinct corpora match their single-corpus runs") {
        const auto cross = cross_corpus_densities(queries, items, emb, samples, scalar_bw(1.0), spec, false);
        CHECK_FALSE(cross.shared);
        const auto q_alone = density_matrix(queries, emb, samples, scalar_bw(1.0), spec, false);
        const auto i_alone = density_matrix(items, emb, samples, scalar_bw(1.0), spec, false);
        CHECK(cross.queries.values == q_alone.values);
        CHECK(cross.items.values == i_alone.values);
    }
}
