#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ds/embedding.hpp"
#include "test_util.hpp"

using namespace ds;

TEST_CASE("load_embeddings parses the word2vec text format") {
    const auto dir = test_tmp_dir("emb_load");
    const auto path = write_file(dir / "emb.txt", "2 3\na 1 0 0\nb 0 1 0\n");
    const auto emb = load_embeddings(path);
    CHECK(emb.dim == 3);
    CHECK(emb.size() == 2);
    CHECK(emb.vector(*emb.id_of("a"))[0] == 1.0);
    CHECK(emb.vector(*emb.id_of("a"))[1] == 0.0);
    CHECK(emb.vector(*emb.id_of("b"))[1] == 1.0);
    CHECK(emb.token_of(0) == "a");
}

TEST_CASE("load_embeddings rejects malformed input") {
    const auto dir = test_tmp_dir("emb_bad");

    SUBCASE("wrong component count") {
        const auto path = write_file(dir / "wrong.txt", "1 2\na 1 0 0\n");
        CHECK_THROWS_WITH_AS(load_embeddings(path), doctest::Contains("3 components, expected 2"),
                             std::runtime_error);
    }
    SUBCASE("malformed header") {
        const auto path = write_file(dir / "header.txt", "banana\na 1\n");
        CHECK_THROWS_AS(load_embeddings(path), std::runtime_error);
    }
    SUBCASE("duplicate token carries its line number") {
        const auto path = write_file(dir / "dup.txt", "2 1\na 1\na 2\n");
        CHECK_THROWS_WITH_AS(load_embeddings(path), doctest::Contains(":3"), std::runtime_error);
    }
    SUBCASE("non-finite component") {
        const auto path = write_file(dir / "inf.txt", "1 1\na inf\n");
        CHECK_THROWS_AS(load_embeddings(path), std::runtime_error);
    }
    SUBCASE("truncated file") {
        const auto path = write_file(dir / "short.txt", "3 1\na 1\n");
        CHECK_THROWS_AS(load_embeddings(path), std::runtime_error);
    }
}

TEST_CASE("load_embeddings honors the row limit") {
    const auto dir = test_tmp_dir("emb_limit");
    const auto path = write_file(dir / "emb.txt", "3 1\na 1\nb 2\nc 3\n");
    const auto emb = load_embeddings(path, 2);
    CHECK(emb.size() == 2);
    CHECK(emb.id_of("c") == std::nullopt);
}

TEST_CASE("load_embeddings handles a vocabulary of 138030 tokens at d=300") {
    const auto dir = test_tmp_dir("emb_large");
    std::string content = "138030 300\n";
    std::string comps;
    for (int a = 0; a < 300; ++a) comps += " 0";
    comps += "\n";
    content.reserve(content.size() + 138030 * (comps.size() + 8));
    for (int i = 0; i < 138030; ++i) {
        content += "t" + std::to_string(i);
        content += comps;
    }
    const auto path = write_file(dir / "big.txt", content);
    const auto emb = load_embeddings(path);
    CHECK(emb.size() == 138030);
    CHECK(emb.dim == 300);
    std::filesystem::remove_all(dir);
}

TEST_CASE("intersect_vocabulary keeps exactly the shared tokens") {
    const auto dir = test_tmp_dir("emb_intersect");
    const auto path = write_file(dir / "emb.txt", "3 1\na 1\nb 2\nc 3\n");
    const auto emb = load_embeddings(path);

    SUBCASE("proper subset") {
        const auto out = intersect_vocabulary(emb, {"b", "c", "d"});
        CHECK(out.size() == 2);
        CHECK(out.id_of("a") == std::nullopt);
        CHECK(out.vector(*out.id_of("b"))[0] == 2.0);
        CHECK(out.vector(*out.id_of("c"))[0] == 3.0);
    }
    SUBCASE("full vocabulary is the identity up to re-indexing") {
        const auto out = intersect_vocabulary(emb, {"a", "b", "c"});
        REQUIRE(out.size() == emb.size());
        CHECK(out.tokens == emb.tokens);
        CHECK(out.vectors == emb.vectors);
    }
    SUBCASE("empty intersection is an error") {
        CHECK_THROWS_AS(intersect_vocabulary(emb, {"z"}), std::invalid_argument);
    }
}

TEST_CASE("vector_norms") {
    EmbeddingTable emb;
    emb.dim = 2;
    emb.vectors = {3.0, 4.0, 0.0, 0.0};
    emb.tokens = {"a", "b"};
    emb.ids = {{"a", 0}, {"b", 1}};

    const auto norms = vector_norms(emb);
    CHECK(norms[0] == doctest::Approx(5.0));
    CHECK(norms[1] == 0.0);
}

TEST_CASE("vector_norms matches a per-component sum-of-squares oracle") {
    std::mt19937 gen(42);
    std::normal_distribution<double> normal(0.0, 2.0);
    EmbeddingTable emb;
    emb.dim = 7;
    for (int i = 0; i < 50; ++i) {
        emb.ids.emplace("t" + std::to_string(i), static_cast<FeatureId>(i));
        emb.tokens.push_back("t" + std::to_string(i));
        for (std::size_t a = 0; a < emb.dim; ++a) emb.vectors.push_back(normal(gen));
    }
    const auto norms = vector_norms(emb);
    for (std::size_t i = 0; i < emb.size(); ++i) {
        double ss = 0.0;
        for (std::size_t a = 0; a < emb.dim; ++a) {
            ss += emb.vectors[i * emb.dim + a] * emb.vectors[i * emb.dim + a];
        }
        const double expected = std::sqrt(ss);
        CHECK(std::abs(norms[i] - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("vector_norms is invariant under re-indexing (multiset equality)") {
    const auto dir = test_tmp_dir("emb_norm_inv");
    const auto path = write_file(dir / "emb.txt", "4 2\na 1 1\nb 3 4\nc 0 2\nd 5 0\n");
    const auto emb = load_embeddings(path);
    auto full = vector_norms(emb);

    const auto sub = intersect_vocabulary(emb, {"d", "b", "a"});
    auto sub_norms = vector_norms(sub);

    // The intersected norms must appear in the full multiset.
    std::sort(full.begin(), full.end());
    std::sort(sub_norms.begin(), sub_norms.end());
    CHECK(std::includes(full.begin(), full.end(), sub_norms.begin(), sub_norms.end()));
}

TEST_CASE("save_embeddings round-trips doubles bit-exactly") {
    const auto dir = test_tmp_dir("emb_roundtrip");
    std::mt19937 gen(7);
    std::normal_distribution<double> normal;
    EmbeddingTable emb;
    emb.dim = 5;
    for (int i = 0; i < 20; ++i) {
        emb.ids.emplace("tok" + std::to_string(i), static_cast<FeatureId>(i));
        emb.tokens.push_back("tok" + std::to_string(i));
        for (std::size_t a = 0; a < emb.dim; ++a) emb.vectors.push_back(normal(gen));
    }
    const auto path = (dir / "emb.txt").string();
    save_embeddings(emb, path);
    const auto loaded = load_embeddings(path);
    CHECK(loaded.vectors == emb.vectors);
    CHECK(loaded.tokens == emb.tokens);
}
