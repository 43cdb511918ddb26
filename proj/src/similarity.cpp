#include "ds/similarity.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ds/errors.hpp"
#include "ds/format.hpp"
#include "ds/math_util.hpp"
#include "ds/parallel.hpp"

namespace ds {

namespace {

std::vector<double> row_norms(const Matrix& m) {
    std::vector<double> norms(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.row(r);
        double ss = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) ss += row[c] * row[c];
        norms[r] = std::sqrt(ss);
    }
    return norms;
}

std::vector<double> row_sums(const Matrix& m) {
    std::vector<double> sums(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.row(r);
        sums[r] = std::accumulate(row, row + m.cols, 0.0);
    }
    return sums;
}

void check_compatible(const DensityMatrix& q, const DensityMatrix& i) {
    if (q.values.cols != i.values.cols) {
        throw std::invalid_argument("similarity: density matrices evaluated at different sample points");
    }
}

}  // namespace

std::vector<std::uint32_t> RankMatrix::items_by_rank(std::size_t q) const {
    std::vector<std::uint32_t> order(n_items);
    const auto& ranks = rank_of[q];
    for (std::uint32_t item = 0; item < n_items; ++item) {
        order[ranks[item] - 1] = item;
    }
    return order;
}

SimilarityMatrix cosine_similarity_rows(const DensityMatrix& queries, const DensityMatrix& items,
                                        unsigned threads) {
    check_compatible(queries, items);
    const std::size_t nq = queries.values.rows;
    const std::size_t ni = items.values.rows;
    const std::size_t n = queries.values.cols;

    SimilarityMatrix sim;
    sim.kind = SimilarityKind::cosine;
    sim.values = Matrix(nq, ni);
    sim.query_ids = queries.doc_ids;
    sim.item_ids = items.doc_ids;

    const auto qnorm = row_norms(queries.values);
    const auto inorm = row_norms(items.values);
    sim.zero_query_rows = static_cast<std::size_t>(std::count(qnorm.begin(), qnorm.end(), 0.0));
    sim.zero_item_rows = static_cast<std::size_t>(std::count(inorm.begin(), inorm.end(), 0.0));

    parallel_for(nq, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t a = begin; a < end; ++a) {
            const double* qa = queries.values.row(a);
            double* dst = sim.values.row(a);
            for (std::size_t b = 0; b < ni; ++b) {
                if (qnorm[a] == 0.0 || inorm[b] == 0.0) {
                    dst[b] = 0.0;
                    continue;
                }
                const double* ib = items.values.row(b);
                double dot = 0.0;
                for (std::size_t c = 0; c < n; ++c) dot += qa[c] * ib[c];
                dst[b] = std::clamp(dot / (qnorm[a] * inorm[b]), -1.0, 1.0);
            }
        }
    });
    return sim;
}

SimilarityMatrix jensen_shannon_similarity(const DensityMatrix& queries, const DensityMatrix& items,
                                           unsigned threads) {
    check_compatible(queries, items);
    const std::size_t nq = queries.values.rows;
    const std::size_t ni = items.values.rows;
    const std::size_t n = queries.values.cols;

    SimilarityMatrix sim;
    sim.kind = SimilarityKind::jensen_shannon;
    sim.values = Matrix(nq, ni);
    sim.query_ids = queries.doc_ids;
    sim.item_ids = items.doc_ids;

    const auto qsum = row_sums(queries.values);
    const auto isum = row_sums(items.values);
    sim.zero_query_rows = static_cast<std::size_t>(std::count(qsum.begin(), qsum.end(), 0.0));
    sim.zero_item_rows = static_cast<std::size_t>(std::count(isum.begin(), isum.end(), 0.0));

    const double ln2 = std::log(2.0);
    parallel_for(nq, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t a = begin; a < end; ++a) {
            const double* qa = queries.values.row(a);
            double* dst = sim.values.row(a);
            for (std::size_t b = 0; b < ni; ++b) {
                if (qsum[a] <= 0.0 || isum[b] <= 0.0) {
                    dst[b] = 0.0;
                    continue;
                }
                const double* ib = items.values.row(b);
                double divergence = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    const double p = qa[c] / qsum[a];
                    const double q = ib[c] / isum[b];
                    const double m = p + q;
                    // both one-sided terms join before the running sum, so
                    // swapping the rows is bit-exact
                    double cell = 0.0;
                    if (p > 0.0) cell += 0.5 * p * std::log(2.0 * p / m);
                    if (q > 0.0) cell += 0.5 * q * std::log(2.0 * q / m);
                    divergence += cell;
                }
                dst[b] = std::clamp(1.0 - divergence / ln2, 0.0, 1.0);
            }
        }
    });
    return sim;
}

std::vector<std::uint32_t> rank_items(std::span<const double> scores) {
    const std::size_t n = scores.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<std::uint32_t> ranks(n);
    for (std::uint32_t pos = 0; pos < n; ++pos) ranks[order[pos]] = pos + 1;
    assert([&] {
        std::vector<bool> seen(n, false);
        for (auto r : ranks) {
            if (r < 1 || r > n || seen[r - 1]) return false;
            seen[r - 1] = true;
        }
        return true;
    }());
    return ranks;
}

RankMatrix rank_matrix(const SimilarityMatrix& sim, bool exclude_self) {
    if (exclude_self && sim.values.rows != sim.values.cols) {
        throw std::invalid_argument("rank_matrix: self-exclusion requires a square similarity matrix");
    }
    RankMatrix out;
    out.n_items = sim.values.cols;
    out.query_ids = sim.query_ids;
    out.item_ids = sim.item_ids;
    out.rank_of.resize(sim.values.rows);

    std::vector<double> scratch;
    for (std::size_t q = 0; q < sim.values.rows; ++q) {
        const double* row = sim.values.row(q);
        if (!exclude_self) {
            out.rank_of[q] = rank_items({row, sim.values.cols});
        } else {
            scratch.assign(row, row + sim.values.cols);
            scratch[q] = -std::numeric_limits<double>::infinity();
            out.rank_of[q] = rank_items(scratch);
        }
    }
    return out;
}

double rwmd_one_sided(SparseRow a, SparseRow b, const EmbeddingTable& emb) {
    if (a.empty() || b.empty()) throw std::invalid_argument("rwmd: empty document support");
    const std::size_t dim = emb.dim;
    double cost = 0.0;
    for (const auto& [fa, wa] : a) {
        const double* xa = emb.vector(fa);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [fb, wb] : b) {
            const double* xb = emb.vector(fb);
            double sq = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double delta = xa[c] - xb[c];
                sq += delta * delta;
            }
            best = std::min(best, sq);
        }
        cost += wa * std::sqrt(best);
    }
    return cost;
}

double rwmd_distance(SparseRow a, SparseRow b, const EmbeddingTable& emb) {
    if (a.empty() || b.empty()) throw std::invalid_argument("rwmd: empty document support");
    const std::size_t dim = emb.dim;
    std::vector<double> min_a(a.size(), std::numeric_limits<double>::infinity());
    std::vector<double> min_b(b.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double* xa = emb.vector(a[i].first);
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double* xb = emb.vector(b[j].first);
            double sq = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double delta = xa[c] - xb[c];
                sq += delta * delta;
            }
            min_a[i] = std::min(min_a[i], sq);
            min_b[j] = std::min(min_b[j], sq);
        }
    }
    double cost_ab = 0.0, cost_ba = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cost_ab += a[i].second * std::sqrt(min_a[i]);
    for (std::size_t j = 0; j < b.size(); ++j) cost_ba += b[j].second * std::sqrt(min_b[j]);
    return std::max(cost_ab, cost_ba);
}

SimilarityMatrix rwmd_matrix(const DocFeatureMatrix& queries, const DocFeatureMatrix& items,
                             const EmbeddingTable& emb, unsigned threads,
                             const std::atomic<bool>* cancel) {
    const std::size_t nq = queries.n_docs();
    const std::size_t ni = items.n_docs();
    const bool symmetric = &queries == &items;

    // Workers must not throw; validate the rwmd_distance preconditions here.
    auto validate = [](const DocFeatureMatrix& m, const char* side) {
        for (std::size_t t = 0; t < m.n_docs(); ++t) {
            if (m.rows[t].empty()) {
                throw std::invalid_argument(std::string("rwmd_matrix: ") + side + " document " +
                                            m.doc_ids[t] + " has empty support");
            }
            if (std::abs(m.row_sum(t) - 1.0) > 1e-6) {
                throw std::invalid_argument(std::string("rwmd_matrix: ") + side + " document " +
                                            m.doc_ids[t] + " is not row-normalized");
            }
        }
    };
    validate(queries, "query");
    if (!symmetric) validate(items, "item");

    SimilarityMatrix sim;
    sim.kind = SimilarityKind::neg_rwmd;
    sim.values = Matrix(nq, ni);
    sim.query_ids = queries.doc_ids;
    sim.item_ids = items.doc_ids;

    // Dynamic row scheduling: each (a, b) cell is computed the same way no
    // matter which thread claims the row, so output stays deterministic.
    std::atomic<std::size_t> next_row{0};
    std::atomic<bool> cancelled{false};
    parallel_for(std::min<std::size_t>(threads, std::max<std::size_t>(nq, 1)), threads,
                 [&](std::size_t, std::size_t) {
                     for (;;) {
                         const std::size_t a = next_row.fetch_add(1);
                         if (a >= nq) return;
                         if (cancel && cancel->load(std::memory_order_relaxed)) {
                             cancelled.store(true);
                             return;
                         }
                         double* dst = sim.values.row(a);
                         const std::size_t b0 = symmetric ? a : 0;
                         for (std::size_t b = b0; b < ni; ++b) {
                             dst[b] = -rwmd_distance(queries.row(a), items.row(b), emb);
                         }
                     }
                 });
    if (cancelled.load()) throw TimeoutError("rwmd: cancelled before completion");
    if (symmetric) {
        for (std::size_t a = 0; a < nq; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                sim.values.at(a, b) = sim.values.at(b, a);
            }
        }
    }
    return sim;
}

void save_rankings_csv(const RankMatrix& ranks, const SimilarityMatrix& sim,
                       const std::string& path, bool exclude_self) {
    if (ranks.rank_of.size() != sim.values.rows || ranks.n_items != sim.values.cols) {
        throw std::invalid_argument("save_rankings_csv: rank and similarity shapes differ");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write rankings file: " + path);
    out << "query_id,item_id,rank,score\n";
    for (std::size_t q = 0; q < ranks.rank_of.size(); ++q) {
        const auto order = ranks.items_by_rank(q);
        std::uint32_t emitted_rank = 0;
        for (std::uint32_t item : order) {
            if (exclude_self && item == q) continue;
            ++emitted_rank;
            out << ranks.query_ids[q] << ',' << ranks.item_ids[item] << ',' << emitted_rank << ','
                << format_double(sim.values.at(q, item)) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RankingRecord> load_rankings_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open rankings file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "query_id,item_id,rank,score") {
        throw std::runtime_error(path + ": bad header, expected query_id,item_id,rank,score");
    }
    std::vector<RankingRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        const auto c3 = c2 == std::string::npos ? std::string::npos : line.find(',', c2 + 1);
        if (c3 == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected four fields");
        }
        RankingRecord rec;
        rec.query_id = line.substr(0, c1);
        rec.item_id = line.substr(c1 + 1, c2 - c1 - 1);
        auto r1 = std::from_chars(line.data() + c2 + 1, line.data() + c3, rec.rank);
        auto r2 = std::from_chars(line.data() + c3 + 1, line.data() + line.size(), rec.score);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != line.data() + line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace ds
