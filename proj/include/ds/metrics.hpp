#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ds/similarity.hpp"

namespace ds {

// Per-query metric values with their distribution summary. Quartiles use
// the project-wide linear-interpolation quantile; sd is the sample standard
// deviation (0 for fewer than two queries) and se = sd / sqrt(n).
struct MetricSummary {
    std::vector<double> per_query;
    double mean = 0.0;
    double se = 0.0;
    double sd = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

MetricSummary summarize(std::vector<double> per_query);

// Soft top-k accuracy: rank-weighted correctness of the first k items,
//   A(k, s) = sum c_k' k'^-s / sum k'^-s.
// `correctness` is ordered by ascending rank. s = 0 gives every rank equal
// weight (the plain top-k mean).
double soft_topk_accuracy(std::span<const char> correctness, std::size_t k, double s);

// Jaccard index of the two top-k item sets.
double jaccard_at_k(std::span<const std::uint32_t> ranks_a, std::span<const std::uint32_t> ranks_b,
                    std::size_t k);

// Rank-penalized agreement between two models' top-k sets:
//   J(k, s) = -1 + 1/|U| sum_{t in U} [ min(1, (r_A/k)^(-1/s)) + (A->B) ]
// over U = union of the two top-k sets. At s = 0 each term is a sharp
// indicator and the value coincides with jaccard_at_k exactly.
double soft_jaccard(std::span<const std::uint32_t> ranks_a, std::span<const std::uint32_t> ranks_b,
                    std::size_t k, double s);

// Class labels per document; an item is a correct retrieval for a query iff
// they share at least one label.
struct LabelSet {
    std::unordered_map<std::string, std::vector<std::string>> labels_of;

    bool has(const std::string& doc_id) const { return labels_of.contains(doc_id); }
    bool relevant(const std::string& query_id, const std::string& item_id) const;
};

// Labels file: CSV "doc_id,label", one row per label (multi-label documents
// repeat their id).
LabelSet read_labels_csv(const std::string& path);
void save_labels_csv(const std::vector<std::string>& doc_ids,
                     const std::vector<std::string>& labels, const std::string& path);

// Per-query soft top-k accuracy of a ranking against labels. Every query id
// must be labeled (missing ids are reported exhaustively); unlabeled items
// count as incorrect.
MetricSummary evaluate_model(const RankMatrix& ranks, const LabelSet& labels, std::size_t k, double s);

// Per-query soft Jaccard agreement of two rankings over the same queries
// and items.
MetricSummary compare_models(const RankMatrix& a, const RankMatrix& b, std::size_t k, double s);

}  // namespace ds
