#include "ds/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ds/math_util.hpp"

namespace ds {

MetricSummary summarize(std::vector<double> per_query) {
    if (per_query.empty()) throw std::invalid_argument("summarize: no per-query values");
    MetricSummary s;
    s.per_query = std::move(per_query);
    const std::size_t n = s.per_query.size();

    double mean = 0.0;
    for (double v : s.per_query) mean += v;
    mean /= static_cast<double>(n);
    s.mean = mean;

    if (n >= 2) {
        double ss = 0.0;
        for (double v : s.per_query) ss += (v - mean) * (v - mean);
        s.sd = std::sqrt(ss / static_cast<double>(n - 1));
        s.se = s.sd / std::sqrt(static_cast<double>(n));
    }

    std::vector<double> sorted = s.per_query;
    std::sort(sorted.begin(), sorted.end());
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q3 = quantile_sorted(sorted, 0.75);
    return s;
}

double soft_topk_accuracy(std::span<const char> correctness, std::size_t k, double s) {
    if (k == 0) throw std::invalid_argument("soft_topk_accuracy: k must be positive");
    if (k > correctness.size()) {
        throw std::invalid_argument("soft_topk_accuracy: k exceeds the correctness vector");
    }
    if (s < 0.0) throw std::invalid_argument("soft_topk_accuracy: s must be non-negative");
    double num = 0.0, den = 0.0;
    for (std::size_t pos = 1; pos <= k; ++pos) {
        const double w = std::pow(static_cast<double>(pos), -s);
        den += w;
        if (correctness[pos - 1]) num += w;
    }
    return num / den;
}

double jaccard_at_k(std::span<const std::uint32_t> ranks_a, std::span<const std::uint32_t> ranks_b,
                    std::size_t k) {
    if (k == 0) throw std::invalid_argument("jaccard_at_k: k must be positive");
    if (ranks_a.size() != ranks_b.size()) {
        throw std::invalid_argument("jaccard_at_k: rank rows cover different item sets");
    }
    if (k > ranks_a.size()) throw std::invalid_argument("jaccard_at_k: k exceeds the item count");
    std::size_t inter = 0, uni = 0;
    for (std::size_t t = 0; t < ranks_a.size(); ++t) {
        const bool in_a = ranks_a[t] <= k;
        const bool in_b = ranks_b[t] <= k;
        if (in_a && in_b) ++inter;
        if (in_a || in_b) ++uni;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double soft_jaccard(std::span<const std::uint32_t> ranks_a, std::span<const std::uint32_t> ranks_b,
                    std::size_t k, double s) {
    if (k == 0) throw std::invalid_argument("soft_jaccard: k must be positive");
    if (ranks_a.size() != ranks_b.size()) {
        throw std::invalid_argument("soft_jaccard: rank rows cover different item sets");
    }
    if (k > ranks_a.size()) throw std::invalid_argument("soft_jaccard: k exceeds the item count");
    if (s < 0.0) throw std::invalid_argument("soft_jaccard: s must be non-negative");

    const double kk = static_cast<double>(k);
    auto term = [&](std::uint32_t rank) {
        if (rank <= k) return 1.0;
        if (s == 0.0) return 0.0;
        return std::pow(static_cast<double>(rank) / kk, -1.0 / s);
    };

    double sum = 0.0;
    std::size_t union_size = 0;
    for (std::size_t t = 0; t < ranks_a.size(); ++t) {
        if (ranks_a[t] > k && ranks_b[t] > k) continue;
        ++union_size;
        const double ta = term(ranks_a[t]);
        const double tb = term(ranks_b[t]);
        assert(ta == 1.0 || tb == 1.0);
        sum += ta + tb;
    }
    // sum lies in [u, 2u], so sum - u is exact; at s = 0 this reproduces
    // jaccard_at_k bit for bit.
    const double u = static_cast<double>(union_size);
    return (sum - u) / u;
}

bool LabelSet::relevant(const std::string& query_id, const std::string& item_id) const {
    const auto qi = labels_of.find(query_id);
    const auto ii = labels_of.find(item_id);
    if (qi == labels_of.end() || ii == labels_of.end()) return false;
    for (const auto& ql : qi->second) {
        for (const auto& il : ii->second) {
            if (ql == il) return true;
        }
    }
    return false;
}

LabelSet read_labels_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "doc_id,label") throw std::runtime_error(path + ": bad header, expected doc_id,label");
    LabelSet labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected doc_id,label");
        }
        labels.labels_of[line.substr(0, comma)].push_back(line.substr(comma + 1));
    }
    return labels;
}

void save_labels_csv(const std::vector<std::string>& doc_ids,
                     const std::vector<std::string>& labels, const std::string& path) {
    if (doc_ids.size() != labels.size()) {
        throw std::invalid_argument("save_labels_csv: ids and labels size mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write labels file: " + path);
    out << "doc_id,label\n";
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        out << doc_ids[i] << ',' << labels[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

MetricSummary evaluate_model(const RankMatrix& ranks, const LabelSet& labels, std::size_t k, double s) {
    std::string missing;
    std::size_t missing_count = 0;
    for (const auto& qid : ranks.query_ids) {
        if (!labels.has(qid)) {
            ++missing_count;
            if (!missing.empty()) missing += ", ";
            missing += qid;
        }
    }
    if (missing_count > 0) {
        throw std::invalid_argument("evaluate_model: " + std::to_string(missing_count) +
                                    " queries without labels: " + missing);
    }

    std::vector<double> per_query;
    per_query.reserve(ranks.rank_of.size());
    std::vector<char> correctness(k);
    for (std::size_t q = 0; q < ranks.rank_of.size(); ++q) {
        const auto order = ranks.items_by_rank(q);
        if (k > order.size()) throw std::invalid_argument("evaluate_model: k exceeds the item count");
        for (std::size_t pos = 0; pos < k; ++pos) {
            correctness[pos] = labels.relevant(ranks.query_ids[q], ranks.item_ids[order[pos]]) ? 1 : 0;
        }
        per_query.push_back(soft_topk_accuracy(correctness, k, s));
    }
    return summarize(std::move(per_query));
}

MetricSummary compare_models(const RankMatrix& a, const RankMatrix& b, std::size_t k, double s) {
    if (a.rank_of.size() != b.rank_of.size() || a.n_items != b.n_items) {
        throw std::invalid_argument("compare_models: rank matrices have different shapes");
    }
    if (a.query_ids != b.query_ids || a.item_ids != b.item_ids) {
        throw std::invalid_argument("compare_models: rank matrices cover different queries or items");
    }
    std::vector<double> per_query;
    per_query.reserve(a.rank_of.size());
    for (std::size_t q = 0; q < a.rank_of.size(); ++q) {
        per_query.push_back(soft_jaccard(a.rank_of[q], b.rank_of[q], k, s));
    }
    return summarize(std::move(per_query));
}

}  // namespace ds
