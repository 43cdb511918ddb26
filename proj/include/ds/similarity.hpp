#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ds/corpus.hpp"
#include "ds/density.hpp"
#include "ds/embedding.hpp"
#include "ds/matrix.hpp"

namespace ds {

enum class SimilarityKind { cosine, jensen_shannon, neg_rwmd };

// Query-item scores; higher always means closer, so one ranking code path
// serves every method (RWMD is stored negated).
struct SimilarityMatrix {
    Matrix values;  // n_queries x n_items
    std::vector<std::string> query_ids;
    std::vector<std::string> item_ids;
    SimilarityKind kind = SimilarityKind::cosine;

    // Rows/columns whose density vector was identically zero; their
    // similarities are defined as 0.
    std::size_t zero_query_rows = 0;
    std::size_t zero_item_rows = 0;
};

// Per-query item ranks, 1 = most similar. Every row is a permutation of
// 1..n_items; rank_of[q][item] is item's rank for query q.
struct RankMatrix {
    std::size_t n_items = 0;
    std::vector<std::string> query_ids;
    std::vector<std::string> item_ids;
    std::vector<std::vector<std::uint32_t>> rank_of;

    // Items of row q ordered by ascending rank (the inverse permutation).
    std::vector<std::uint32_t> items_by_rank(std::size_t q) const;
};

// Cosine of each query row against each item row. Zero rows score 0
// against everything. Entries clamp to [-1, 1].
SimilarityMatrix cosine_similarity_rows(const DensityMatrix& queries, const DensityMatrix& items,
                                        unsigned threads = 1);

// 1 - JSD(p, q)/ln 2 across row pairs, rows renormalized to probability
// vectors; 0 ln 0 counts as 0. Zero rows score 0 with a diagnostic.
SimilarityMatrix jensen_shannon_similarity(const DensityMatrix& queries, const DensityMatrix& items,
                                           unsigned threads = 1);

// Ranks one score row: rank 1 for the highest score, ties broken by
// ascending item index.
std::vector<std::uint32_t> rank_items(std::span<const double> scores);

// Ranks every row. exclude_self (square matrices only) forces item q to the
// last rank of row q before ranking, so self-recommendations never reach
// any top-k with k < n_items.
RankMatrix rank_matrix(const SimilarityMatrix& sim, bool exclude_self = false);

// Relaxed word mover's distance between two unit-sum weight vectors: the
// max of the two one-sided relaxed transport costs, Euclidean ground
// distance. Throws on empty support.
double rwmd_distance(SparseRow a, SparseRow b, const EmbeddingTable& emb);

// One-sided relaxed cost sum_i a_i min_{j in support(b)} |x_i - x_j|.
// Cheaper than the symmetric distance; exposed for speed comparisons.
double rwmd_one_sided(SparseRow a, SparseRow b, const EmbeddingTable& emb);

// Full query-item matrix of -rwmd_distance. Rows of both inputs must be
// row-normalized. When queries and items are the same object only the
// upper triangle is computed. `cancel` is polled between rows; raising it
// aborts with TimeoutError.
SimilarityMatrix rwmd_matrix(const DocFeatureMatrix& queries, const DocFeatureMatrix& items,
                             const EmbeddingTable& emb, unsigned threads = 1,
                             const std::atomic<bool>* cancel = nullptr);

// Rankings export: "query_id,item_id,rank,score" rows, items in rank
// order. Entries forced last by exclude_self are omitted.
void save_rankings_csv(const RankMatrix& ranks, const SimilarityMatrix& sim,
                       const std::string& path, bool exclude_self = false);

struct RankingRecord {
    std::string query_id;
    std::string item_id;
    std::uint32_t rank;
    double score;
};

std::vector<RankingRecord> load_rankings_csv(const std::string& path);

}  // namespace ds
