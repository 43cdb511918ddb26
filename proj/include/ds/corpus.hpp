#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ds/embedding.hpp"

namespace ds {

struct Document {
    std::string doc_id;
    std::string text;
};

using SparseEntry = std::pair<FeatureId, double>;
using SparseRow = std::span<const SparseEntry>;

// Sparse documents-by-features weights. Rows keep entries sorted by feature
// id; stored weights are strictly positive and finite.
struct DocFeatureMatrix {
    std::size_t n_features = 0;
    std::vector<std::string> doc_ids;
    std::vector<std::vector<SparseEntry>> rows;

    std::size_t n_docs() const { return rows.size(); }
    SparseRow row(std::size_t t) const { return rows[t]; }
    double row_sum(std::size_t t) const;

    // Mean number of distinct features per document.
    double mean_unique_features() const;
};

// Lowercases, splits on non-alphabetic characters, and drops stopwords and
// tokens shorter than min_len. Casefolding is ASCII; anything outside
// [A-Za-z] acts as a separator.
std::vector<std::string> tokenize(std::string_view text,
                                  const std::unordered_set<std::string>& stopwords,
                                  std::size_t min_len = 4);

// Counts tokens per document against the (already intersected) embedding
// vocabulary. Documents whose tokens are all out of vocabulary produce an
// empty row; their indices are appended to *empty_docs when given.
DocFeatureMatrix build_dfm(const std::vector<std::vector<std::string>>& docs,
                           const std::vector<std::string>& doc_ids,
                           const EmbeddingTable& emb,
                           std::vector<std::size_t>* empty_docs = nullptr);

enum class IdfVariant {
    natural,   // idf_i = ln(N_d / df_i); df_i == N_d features drop to zero
    smoothed,  // idf_i = ln((1 + N_d) / (1 + df_i)) + 1
};

// Multiplies each weight by the idf of its feature. With the natural
// variant, features present in every document get weight 0 and leave the
// sparse structure. *all_zero is set when the whole matrix became zero
// (single-document corpus under the natural variant).
DocFeatureMatrix tfidf_transform(const DocFeatureMatrix& m,
                                 IdfVariant variant = IdfVariant::natural,
                                 bool* all_zero = nullptr);

// Divides each non-empty row by its sum. Idempotent.
DocFeatureMatrix row_normalize(const DocFeatureMatrix& m);

// Collects the distinct tokens of a tokenized corpus.
std::unordered_set<std::string> vocabulary(const std::vector<std::vector<std::string>>& docs);

// Corpus file: one "doc_id<TAB>text" record per line. Duplicate ids are
// rejected.
std::vector<Document> read_corpus(const std::string& path);

// Stopword list: one token per line (casefolded on load).
std::unordered_set<std::string> read_stopwords(const std::string& path);

// DFM persistence: CSV "doc,feature,weight" with shortest round-trip
// weights. Doc ids live in a sidecar written next to it by the CLI.
void save_dfm_csv(const DocFeatureMatrix& m, const std::string& path);
DocFeatureMatrix load_dfm_csv(const std::string& path, std::size_t n_features = 0);

void save_doc_ids(const std::vector<std::string>& ids, const std::string& path);
std::vector<std::string> load_doc_ids(const std::string& path);

}  // namespace ds
