#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ds/matrix.hpp"

namespace ds {

using FeatureId = std::uint32_t;

// Immutable after construction: maps feature ids 0..N_f-1 to d-dimensional
// vectors and back to their tokens. Safe for concurrent reads.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::vector<double> vectors;        // row-major, size() * dim
    std::vector<std::string> tokens;    // token_of
    std::unordered_map<std::string, FeatureId> ids;  // id_of

    std::size_t size() const { return tokens.size(); }
    const double* vector(FeatureId id) const { return vectors.data() + std::size_t(id) * dim; }
    const std::string& token_of(FeatureId id) const { return tokens[id]; }

    std::optional<FeatureId> id_of(const std::string& token) const {
        auto it = ids.find(token);
        if (it == ids.end()) return std::nullopt;
        return it->second;
    }

    MatrixView points_view() const { return {vectors.data(), size(), dim}; }
};

// Reads word2vec text format: header "N d", then one "token c_1 ... c_d"
// line per vector. limit > 0 caps the number of rows read.
// Throws std::runtime_error on malformed headers, wrong component counts,
// non-finite components, or duplicate tokens (all with line positions).
EmbeddingTable load_embeddings(const std::string& path, std::size_t limit = 0);

// Writes the same text format. Components use shortest round-trip decimals,
// so save -> load reproduces the doubles bit-exactly.
void save_embeddings(const EmbeddingTable& emb, const std::string& path);

// Keeps exactly the tokens present in both the table and `corpus_tokens`,
// re-compacting feature ids to 0..N_f'-1 in original id order.
// Throws std::invalid_argument when the intersection is empty.
EmbeddingTable intersect_vocabulary(const EmbeddingTable& emb,
                                    const std::unordered_set<std::string>& corpus_tokens);

// Euclidean norm of every stored vector, indexed by feature id.
std::vector<double> vector_norms(const EmbeddingTable& emb);

// Rescales every vector to unit length (zero vectors are left alone).
// Off by default in the pipeline; exposed behind a flag.
void normalize_vector_lengths(EmbeddingTable& emb);

}  // namespace ds
