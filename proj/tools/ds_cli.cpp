// densim command line: synth, dfm, bandwidth, sample, density, similar,
// rank, eval, bench, pipeline. Exit codes: 0 ok, 1 validation error,
// 2 runtime error, 3 timeout.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ds/bandwidth.hpp"
#include "ds/corpus.hpp"
#include "ds/density.hpp"
#include "ds/embedding.hpp"
#include "ds/errors.hpp"
#include "ds/format.hpp"
#include "ds/math_util.hpp"
#include "ds/matrix_io.hpp"
#include "ds/metrics.hpp"
#include "ds/parallel.hpp"
#include "ds/pipeline.hpp"
#include "ds/sampler.hpp"
#include "ds/similarity.hpp"
#include "ds/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::string file_stem(const std::string& path) {
    return fs::path(path).stem().string();
}

// Per-query view of a rankings file: items in rank order plus the rank map.
struct QueryRanking {
    std::string query_id;
    std::vector<std::string> items_by_rank;
    std::map<std::string, std::uint32_t> rank_of;
};

std::vector<QueryRanking> group_rankings(const std::string& path) {
    const auto records = ds::load_rankings_csv(path);
    std::vector<QueryRanking> queries;
    std::map<std::string, std::size_t> index_of;
    for (const auto& rec : records) {
        auto [it, inserted] = index_of.try_emplace(rec.query_id, queries.size());
        if (inserted) queries.push_back({rec.query_id, {}, {}});
        auto& q = queries[it->second];
        if (!q.rank_of.emplace(rec.item_id, rec.rank).second) {
            throw std::invalid_argument(path + ": duplicate item \"" + rec.item_id + "\" for query \"" +
                                        rec.query_id + "\"");
        }
    }
    for (auto& q : queries) {
        q.items_by_rank.resize(q.rank_of.size());
        std::vector<bool> seen(q.rank_of.size(), false);
        for (const auto& [item, rank] : q.rank_of) {
            if (rank < 1 || rank > q.rank_of.size() || seen[rank - 1]) {
                throw std::invalid_argument(path + ": ranks of query \"" + q.query_id +
                                            "\" are not a permutation of 1..n");
            }
            seen[rank - 1] = true;
            q.items_by_rank[rank - 1] = item;
        }
    }
    return queries;
}

struct EvalRow {
    std::string metric;
    std::size_t k;
    double s;
    ds::MetricSummary summary;
};

void write_eval_report(const std::vector<EvalRow>& rows,
                       const std::vector<std::string>& query_ids, const std::string& out_path,
                       const std::string& per_query_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write report: " + out_path);
        out = &file;
    }
    *out << "metric,k,s,mean,se,q1,median,q3\n";
    for (const auto& row : rows) {
        *out << row.metric << ',' << row.k << ',' << ds::format_double(row.s) << ','
             << ds::format_double(row.summary.mean) << ',' << ds::format_double(row.summary.se) << ','
             << ds::format_double(row.summary.q1) << ',' << ds::format_double(row.summary.median) << ','
             << ds::format_double(row.summary.q3) << '\n';
    }
    if (!per_query_path.empty()) {
        std::ofstream pq(per_query_path, std::ios::binary);
        if (!pq) throw std::runtime_error("cannot write per-query report: " + per_query_path);
        pq << "metric,k,s,query_id,value\n";
        for (const auto& row : rows) {
            for (std::size_t q = 0; q < row.summary.per_query.size(); ++q) {
                pq << row.metric << ',' << row.k << ',' << ds::format_double(row.s) << ','
                   << query_ids[q] << ',' << ds::format_double(row.summary.per_query[q]) << '\n';
            }
        }
    }
}

void run_eval(const std::vector<std::string>& ranking_paths, const std::string& labels_path,
              const std::string& k_text, const std::string& s_text, const std::string& out_path,
              const std::string& per_query_path) {
    if (ranking_paths.empty() || ranking_paths.size() > 2) {
        throw std::invalid_argument("eval: provide one or two rankings files");
    }
    if (ranking_paths.size() == 1 && labels_path.empty()) {
        throw std::invalid_argument("eval: a single rankings file needs --labels to evaluate accuracy");
    }
    const auto k_grid = ds::k_grid_from_string(k_text);
    const auto s_grid = ds::s_grid_from_string(s_text);

    std::vector<std::vector<QueryRanking>> models;
    for (const auto& path : ranking_paths) models.push_back(group_rankings(path));

    std::vector<EvalRow> rows;
    std::vector<std::string> query_ids;
    for (const auto& q : models[0]) query_ids.push_back(q.query_id);

    if (!labels_path.empty()) {
        const ds::LabelSet labels = ds::read_labels_csv(labels_path);
        for (std::size_t m = 0; m < models.size(); ++m) {
            std::string missing;
            std::size_t missing_count = 0;
            for (const auto& q : models[m]) {
                if (!labels.has(q.query_id)) {
                    ++missing_count;
                    if (!missing.empty()) missing += ", ";
                    missing += q.query_id;
                }
            }
            if (missing_count > 0) {
                throw std::invalid_argument("eval: " + std::to_string(missing_count) +
                                            " queries without labels: " + missing);
            }
            for (std::size_t k : k_grid) {
                for (double s : s_grid) {
                    std::vector<double> per_query;
                    per_query.reserve(models[m].size());
                    std::vector<char> correctness(k);
                    for (const auto& q : models[m]) {
                        if (k > q.items_by_rank.size()) {
                            throw std::invalid_argument("eval: k=" + std::to_string(k) +
                                                        " exceeds the ranked item count of query " + q.query_id);
                        }
                        for (std::size_t pos = 0; pos < k; ++pos) {
                            correctness[pos] = labels.relevant(q.query_id, q.items_by_rank[pos]) ? 1 : 0;
                        }
                        per_query.push_back(ds::soft_topk_accuracy(correctness, k, s));
                    }
                    rows.push_back({"accuracy:" + file_stem(ranking_paths[m]), k, s,
                                    ds::summarize(std::move(per_query))});
                }
            }
        }
    }

    if (models.size() == 2) {
        // Agreement needs both models to rank the same items per query.
        auto& a = models[0];
        auto& b = models[1];
        std::string mismatches;
        std::size_t mismatch_count = 0;
        std::map<std::string, std::size_t> b_index;
        for (std::size_t i = 0; i < b.size(); ++i) b_index[b[i].query_id] = i;
        for (const auto& qa : a) {
            if (!b_index.contains(qa.query_id)) {
                ++mismatch_count;
                if (!mismatches.empty()) mismatches += ", ";
                mismatches += qa.query_id;
            }
        }
        for (const auto& qb : b) {
            bool found = false;
            for (const auto& qa : a) {
                if (qa.query_id == qb.query_id) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                ++mismatch_count;
                if (!mismatches.empty()) mismatches += ", ";
                mismatches += qb.query_id;
            }
        }
        if (mismatch_count > 0) {
            throw std::invalid_argument("eval: " + std::to_string(mismatch_count) +
                                        " query ids not shared by both rankings: " + mismatches);
        }
        // item sets must agree per query in both files; mismatches are
        // listed exhaustively before any metric is computed
        std::string item_mismatches;
        std::size_t item_mismatch_count = 0;
        for (const auto& qa : a) {
            const auto& qb = b[b_index[qa.query_id]];
            auto one_sided = [&](const QueryRanking& x, const QueryRanking& y, const char* which) {
                for (const auto& [item, rank] : x.rank_of) {
                    if (!y.rank_of.contains(item)) {
                        ++item_mismatch_count;
                        if (!item_mismatches.empty()) item_mismatches += ", ";
                        item_mismatches += qa.query_id + "/" + item + " (only in " + which + ")";
                    }
                }
            };
            one_sided(qa, qb, "first");
            one_sided(qb, qa, "second");
        }
        if (item_mismatch_count > 0) {
            throw std::invalid_argument("eval: " + std::to_string(item_mismatch_count) +
                                        " query/item pairs not shared by both rankings: " + item_mismatches);
        }

        for (std::size_t k : k_grid) {
            for (double s : s_grid) {
                std::vector<double> per_query;
                per_query.reserve(a.size());
                for (const auto& qa : a) {
                    const auto& qb = b[b_index[qa.query_id]];
                    std::vector<std::uint32_t> ra, rb;
                    ra.reserve(qa.rank_of.size());
                    rb.reserve(qa.rank_of.size());
                    for (const auto& [item, rank] : qa.rank_of) {
                        ra.push_back(rank);
                        rb.push_back(qb.rank_of.at(item));
                    }
                    per_query.push_back(ds::soft_jaccard(ra, rb, k, s));
                }
                rows.push_back({"soft_jaccard:" + file_stem(ranking_paths[0]) + ":" + file_stem(ranking_paths[1]),
                                k, s, ds::summarize(std::move(per_query))});
            }
        }
    }

    write_eval_report(rows, query_ids, out_path, per_query_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"densim: document similarity from kernel densities in a word-embedding space"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus with its embedding");
    ds::SynthConfig synth_config;
    std::string synth_outdir;
    synth->add_option("--classes", synth_config.n_classes, "Number of classes")->capture_default_str();
    synth->add_option("--docs-per-class", synth_config.docs_per_class, "Documents per class")->capture_default_str();
    synth->add_option("--words-per-class", synth_config.words_per_class, "Vocabulary size per class")->capture_default_str();
    synth->add_option("--doc-len", synth_config.doc_len, "Tokens per document")->capture_default_str();
    synth->add_option("--dim", synth_config.dim, "Embedding dimension")->capture_default_str();
    synth->add_option("--separation", synth_config.separation, "Pairwise distance between class centers")->capture_default_str();
    synth->add_option("--mixing", synth_config.mixing, "Probability of drawing a token from another class")->capture_default_str();
    synth->add_option("--seed", synth_config.seed, "Generator seed")->capture_default_str();
    synth->add_option("--outdir", synth_outdir, "Output directory")->required();
    synth->callback([&] {
        const auto corpus = ds::generate_synthetic(synth_config);
        const auto paths = ds::save_synthetic(corpus, synth_outdir);
        std::cout << "corpus    " << paths.corpus << "\n"
                  << "embedding " << paths.embedding << "\n"
                  << "labels    " << paths.labels << "\n";
    });

    // ---- dfm ----
    auto* dfm = app.add_subcommand("dfm", "Tokenize a corpus and build its document-feature matrix");
    ds::RunConfig dfm_config;
    std::string dfm_out, dfm_ids_out, dfm_emb_out, dfm_transform = "rownorm,tfidf", dfm_idf = "natural";
    dfm->add_option("--embedding", dfm_config.embedding_path, "Word2vec text embedding")->required();
    dfm->add_option("--corpus", dfm_config.queries_path, "doc_id<TAB>text corpus file")->required();
    dfm->add_option("--stopwords", dfm_config.stopwords_path, "Stopword list, one token per line");
    dfm->add_option("--min-len", dfm_config.min_len, "Minimum token length")->capture_default_str();
    dfm->add_option("--transform", dfm_transform, "Comma list of rownorm,tfidf (or none)")->capture_default_str();
    dfm->add_option("--idf", dfm_idf, "IDF variant: natural|smoothed")->capture_default_str();
    dfm->add_option("--embedding-limit", dfm_config.embedding_limit, "Cap on embedding rows read");
    dfm->add_flag("--normalize-embeddings", dfm_config.normalize_embeddings, "Unit-normalize embedding vectors");
    dfm->add_option("--out-dfm", dfm_out, "Output DFM CSV")->required();
    dfm->add_option("--out-ids", dfm_ids_out, "Output doc id list")->required();
    dfm->add_option("--out-embedding", dfm_emb_out, "Output vocabulary-intersected embedding")->required();
    dfm->callback([&] {
        dfm_config.transforms = ds::transforms_from_string(dfm_transform);
        dfm_config.idf = ds::idf_from_string(dfm_idf);
        const auto data = ds::prepare_data(dfm_config);
        ds::save_dfm_csv(data.queries, dfm_out);
        ds::save_doc_ids(data.queries.doc_ids, dfm_ids_out);
        ds::save_embeddings(data.embedding, dfm_emb_out);
        std::cout << "documents " << data.queries.n_docs() << "\nfeatures  " << data.embedding.size() << "\n";
        if (!data.empty_query_docs.empty()) {
            std::cout << "documents with no in-vocabulary tokens:";
            for (auto t : data.empty_query_docs) std::cout << ' ' << data.queries.doc_ids[t];
            std::cout << "\n";
        }
    });

    // ---- bandwidth ----
    auto* bandwidth = app.add_subcommand("bandwidth", "Estimate the kernel bandwidth from an embedding");
    ds::RunConfig bw_config;
    std::string bw_method = "volume", bw_out;
    bandwidth->add_option("--embedding", bw_config.embedding_path, "Vocabulary-intersected embedding")->required();
    bandwidth->add_option("--method", bw_method, "silverman|volume|lscv")->capture_default_str();
    bandwidth->add_option("--adjust", bw_config.bandwidth_adjust, "Multiplicative adjustment factor")->capture_default_str();
    bandwidth->add_option("--qlow", bw_config.q_low, "Lower norm quantile for the volume rule")->capture_default_str();
    bandwidth->add_option("--qhigh", bw_config.q_high, "Upper norm quantile for the volume rule")->capture_default_str();
    bandwidth->add_option("--threads", bw_config.threads, "Worker threads (0 = all cores)");
    bandwidth->add_option("--out", bw_out, "Output CSV (default: stdout)");
    bandwidth->callback([&] {
        bw_config.bandwidth_method = ds::bandwidth_method_from_string(bw_method);
        const auto emb = ds::load_embeddings(bw_config.embedding_path);
        const auto bw = ds::estimate_bandwidth(bw_config, emb);
        if (bw_out.empty()) {
            std::cout << "name,value\nscalar," << ds::format_double(bw.scalar) << "\n";
            for (std::size_t a = 0; a < bw.per_axis.size(); ++a) {
                std::cout << "axis_" << a << ',' << ds::format_double(bw.per_axis[a]) << "\n";
            }
        } else {
            ds::save_bandwidth_csv(bw, bw_out);
            std::cout << "h " << ds::format_double(bw.scalar) << "\n";
        }
    });

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "Draw uniform sample points in the embedding ball");
    ds::RunConfig sample_config;
    std::string sample_out;
    double sample_radius = 0.0;
    sample->add_option("--embedding", sample_config.embedding_path, "Vocabulary-intersected embedding")->required();
    sample->add_option("--samples", sample_config.n_samples, "Number of sample points")->capture_default_str();
    sample->add_option("--seed", sample_config.seed, "Generator seed")->capture_default_str();
    sample->add_option("--sample-quantile", sample_config.sample_quantile, "Norm quantile fixing the ball radius")->capture_default_str();
    sample->add_option("--radius", sample_radius, "Explicit radius override (skips the quantile)");
    sample->add_option("--threads", sample_config.threads, "Worker threads (0 = all cores)");
    sample->add_option("--out", sample_out, "Output matrix file (sidecar: <out>.meta)")->required();
    sample->callback([&] {
        const auto emb = ds::load_embeddings(sample_config.embedding_path);
        const double radius = sample_radius > 0.0
                                  ? sample_radius
                                  : ds::sampling_radius(ds::vector_norms(emb), sample_config.sample_quantile);
        const auto samples = ds::sample_ball(sample_config.n_samples, emb.dim, radius, sample_config.seed,
                                             sample_config.effective_threads());
        ds::save_sample_points(samples, sample_out, sample_out + ".meta");
        std::cout << "n " << samples.count() << "\nradius " << ds::format_double(radius) << "\n";
    });

    // ---- density ----
    auto* density = app.add_subcommand("density", "Evaluate document densities at the sample points");
    std::string density_dfm, density_emb, density_samples, density_hfile, density_kernel = "gaussian", density_out;
    double density_h = 0.0;
    bool density_normalize = false;
    unsigned density_threads = 0;
    density->add_option("--dfm", density_dfm, "DFM CSV")->required();
    density->add_option("--embedding", density_emb, "Vocabulary-intersected embedding")->required();
    density->add_option("--samples", density_samples, "Sample matrix file (expects <file>.meta sidecar)")->required();
    density->add_option("--bandwidth", density_h, "Scalar bandwidth value");
    density->add_option("--bandwidth-file", density_hfile, "Bandwidth CSV from the bandwidth subcommand");
    density->add_option("--kernel", density_kernel, "gaussian|epanechnikov")->capture_default_str();
    density->add_flag("--normalize-density", density_normalize, "Divide by the kernel sum over all features");
    density->add_option("--threads", density_threads, "Worker threads (0 = all cores)");
    density->add_option("--out", density_out, "Output density matrix")->required();
    density->callback([&] {
        if ((density_h > 0.0) == !density_hfile.empty()) {
            throw std::invalid_argument("density: give exactly one of --bandwidth or --bandwidth-file");
        }
        const auto emb = ds::load_embeddings(density_emb);
        const auto dfm = ds::load_dfm_csv(density_dfm, emb.size());
        const auto samples = ds::load_sample_points(density_samples, density_samples + ".meta");
        ds::Bandwidth bw;
        if (density_h > 0.0) {
            bw.scalar = density_h;
        } else {
            bw = ds::load_bandwidth_csv(density_hfile);
        }
        const ds::KernelSpec spec{ds::kernel_from_string(density_kernel), emb.dim};
        const auto result = ds::density_matrix(dfm, emb, samples, bw, spec, density_normalize,
                                               density_threads == 0 ? ds::default_threads() : density_threads);
        ds::save_matrix_dsm(result.values, density_out);
        if (result.zero_denominator_cells > 0) {
            std::cout << "zero-denominator cells " << result.zero_denominator_cells
                      << " (first at sample point " << result.first_zero_denominator_point
                      << "); bandwidth is too small for the sample spread\n";
        }
    });

    // ---- similar ----
    auto* similar = app.add_subcommand("similar", "Compute the query-item similarity matrix");
    std::string sim_kind = "cosine", sim_qd, sim_id, sim_qdfm, sim_idfm, sim_emb, sim_out;
    unsigned sim_threads = 0;
    similar->add_option("--kind", sim_kind, "cosine|jensen_shannon|rwmd")->capture_default_str();
    similar->add_option("--queries-density", sim_qd, "Query density matrix (cosine/jensen_shannon)");
    similar->add_option("--items-density", sim_id, "Item density matrix (cosine/jensen_shannon)");
    similar->add_option("--queries-dfm", sim_qdfm, "Query DFM CSV (rwmd)");
    similar->add_option("--items-dfm", sim_idfm, "Item DFM CSV (rwmd; defaults to the query DFM)");
    similar->add_option("--embedding", sim_emb, "Vocabulary-intersected embedding (rwmd)");
    similar->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    similar->add_option("--out", sim_out, "Output similarity matrix")->required();
    similar->callback([&] {
        const unsigned threads = sim_threads == 0 ? ds::default_threads() : sim_threads;
        const ds::SimilarityKind kind = ds::similarity_from_string(sim_kind);
        ds::SimilarityMatrix sim;
        if (kind == ds::SimilarityKind::neg_rwmd) {
            if (sim_qdfm.empty() || sim_emb.empty()) {
                throw std::invalid_argument("similar --kind rwmd needs --queries-dfm and --embedding");
            }
            const auto emb = ds::load_embeddings(sim_emb);
            const auto queries = ds::row_normalize(ds::load_dfm_csv(sim_qdfm, emb.size()));
            if (sim_idfm.empty() || sim_idfm == sim_qdfm) {
                sim = ds::rwmd_matrix(queries, queries, emb, threads);
            } else {
                const auto items = ds::row_normalize(ds::load_dfm_csv(sim_idfm, emb.size()));
                sim = ds::rwmd_matrix(queries, items, emb, threads);
            }
        } else {
            if (sim_qd.empty() || sim_id.empty()) {
                throw std::invalid_argument("similar needs --queries-density and --items-density");
            }
            ds::DensityMatrix q, i;
            q.values = ds::load_matrix_dsm(sim_qd);
            i.values = ds::load_matrix_dsm(sim_id);
            q.doc_ids.resize(q.values.rows);
            i.doc_ids.resize(i.values.rows);
            sim = kind == ds::SimilarityKind::cosine ? ds::cosine_similarity_rows(q, i, threads)
                                                     : ds::jensen_shannon_similarity(q, i, threads);
        }
        ds::save_matrix_dsm(sim.values, sim_out);
        if (sim.zero_query_rows + sim.zero_item_rows > 0) {
            std::cout << "zero rows: " << sim.zero_query_rows << " queries, " << sim.zero_item_rows
                      << " items (similarity 0 against everything)\n";
        }
    });

    // ---- rank ----
    auto* rank = app.add_subcommand("rank", "Rank items per query and export rankings");
    std::string rank_sim, rank_qids, rank_iids, rank_out;
    bool rank_exclude_self = false;
    rank->add_option("--similarity", rank_sim, "Similarity matrix file")->required();
    rank->add_option("--query-ids", rank_qids, "Query id list (default: row indices)");
    rank->add_option("--item-ids", rank_iids, "Item id list (default: column indices)");
    rank->add_flag("--exclude-self", rank_exclude_self, "Drop self-recommendations (square matrices)");
    rank->add_option("--out", rank_out, "Output rankings CSV")->required();
    rank->callback([&] {
        ds::SimilarityMatrix sim;
        sim.values = ds::load_matrix_dsm(rank_sim);
        if (rank_qids.empty()) {
            sim.query_ids.resize(sim.values.rows);
            for (std::size_t q = 0; q < sim.values.rows; ++q) sim.query_ids[q] = std::to_string(q);
        } else {
            sim.query_ids = ds::load_doc_ids(rank_qids);
        }
        if (rank_iids.empty()) {
            sim.item_ids.resize(sim.values.cols);
            for (std::size_t i = 0; i < sim.values.cols; ++i) sim.item_ids[i] = std::to_string(i);
        } else {
            sim.item_ids = ds::load_doc_ids(rank_iids);
        }
        if (sim.query_ids.size() != sim.values.rows || sim.item_ids.size() != sim.values.cols) {
            throw std::invalid_argument("rank: id lists do not match the similarity matrix shape");
        }
        const auto ranks = ds::rank_matrix(sim, rank_exclude_self);
        ds::save_rankings_csv(ranks, sim, rank_out, rank_exclude_self);
    });

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "Evaluate rankings: accuracy against labels, agreement between models");
    std::vector<std::string> eval_rankings;
    std::string eval_labels, eval_k = "5", eval_s = "0,1,2", eval_out, eval_per_query;
    eval->add_option("--rankings", eval_rankings, "One or two rankings CSVs")->required()->expected(1, 2);
    eval->add_option("--labels", eval_labels, "Labels CSV (doc_id,label)");
    eval->add_option("--k", eval_k, "Comma list of rank cutoffs")->capture_default_str();
    eval->add_option("--s", eval_s, "Comma list of softness values")->capture_default_str();
    eval->add_option("--out", eval_out, "Report CSV (default: stdout)");
    eval->add_option("--per-query", eval_per_query, "Also dump per-query values to this CSV");
    eval->callback([&] { run_eval(eval_rankings, eval_labels, eval_k, eval_s, eval_out, eval_per_query); });

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Benchmark the density method against RWMD");
    ds::RunConfig bench_config;
    std::string bench_kernel = "gaussian", bench_method = "volume", bench_similarity = "cosine";
    std::string bench_transform = "rownorm,tfidf", bench_idf = "natural", bench_rwmd_weights = "transformed";
    std::string bench_methods = "ds,rwmd", bench_report;
    double bench_timeout = 0.0;
    bench->add_option("--embedding", bench_config.embedding_path, "Word2vec text embedding")->required();
    bench->add_option("--queries", bench_config.queries_path, "Queries corpus")->required();
    bench->add_option("--items", bench_config.items_path, "Items corpus (default: queries)");
    bench->add_option("--stopwords", bench_config.stopwords_path, "Stopword list");
    bench->add_option("--kernel", bench_kernel, "gaussian|epanechnikov")->capture_default_str();
    bench->add_option("--bandwidth-method", bench_method, "silverman|volume|lscv")->capture_default_str();
    bench->add_option("--adjust", bench_config.bandwidth_adjust, "Bandwidth adjustment factor")->capture_default_str();
    bench->add_option("--qlow", bench_config.q_low, "Lower norm quantile")->capture_default_str();
    bench->add_option("--qhigh", bench_config.q_high, "Upper norm quantile")->capture_default_str();
    bench->add_option("--sample-quantile", bench_config.sample_quantile, "Ball radius quantile")->capture_default_str();
    bench->add_option("--samples", bench_config.n_samples, "Number of sample points")->capture_default_str();
    bench->add_option("--seed", bench_config.seed, "Seed")->capture_default_str();
    bench->add_flag("--normalize-density", bench_config.normalize_density, "Use normalized densities");
    bench->add_option("--similarity", bench_similarity, "cosine|jensen_shannon")->capture_default_str();
    bench->add_option("--transform", bench_transform, "DFM transforms")->capture_default_str();
    bench->add_option("--idf", bench_idf, "IDF variant")->capture_default_str();
    bench->add_option("--min-len", bench_config.min_len, "Minimum token length")->capture_default_str();
    bench->add_option("--rwmd-weights", bench_rwmd_weights, "RWMD input weights: transformed|counts")->capture_default_str();
    bench->add_option("--methods", bench_methods, "Comma list of ds,rwmd")->capture_default_str();
    bench->add_option("--timeout", bench_timeout, "RWMD timeout in seconds (0 = none)")->capture_default_str();
    bench->add_option("--threads", bench_config.threads, "Worker threads (0 = all cores)");
    bench->add_option("--report", bench_report, "Write the report as JSON");
    bench->callback([&] {
        bench_config.kernel = ds::kernel_from_string(bench_kernel);
        bench_config.bandwidth_method = ds::bandwidth_method_from_string(bench_method);
        bench_config.similarity = ds::similarity_from_string(bench_similarity);
        bench_config.transforms = ds::transforms_from_string(bench_transform);
        bench_config.idf = ds::idf_from_string(bench_idf);
        bench_config.rwmd_weights = ds::rwmd_weights_from_string(bench_rwmd_weights);
        bool run_ds = false, run_rwmd = false;
        std::stringstream ss(bench_methods);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part == "ds") {
                run_ds = true;
            } else if (part == "rwmd") {
                run_rwmd = true;
            } else if (!part.empty()) {
                throw std::invalid_argument("bench: unknown method \"" + part + "\" (ds|rwmd)");
            }
        }
        if (!run_ds && !run_rwmd) throw std::invalid_argument("bench: nothing to run");
        const auto report = ds::run_benchmark(bench_config, run_ds, run_rwmd, bench_timeout);
        std::cout << "corpus: " << report.n_queries << " queries, " << report.n_items << " items, "
                  << report.n_features << " features, F=" << ds::format_double(report.mean_unique_features)
                  << ", b=" << ds::format_double(report.feature_sharing_exponent) << "\n";
        if (report.ds_ran) {
            std::cout << "ds: bandwidth " << ds::format_double(report.bandwidth_sec) << " s, sample "
                      << ds::format_double(report.sample_sec) << " s, density "
                      << ds::format_double(report.density_sec) << " s, similarity "
                      << ds::format_double(report.similarity_sec) << " s, total "
                      << ds::format_double(report.ds_total_sec) << " s\n";
        }
        if (report.rwmd_ran) {
            std::cout << "rwmd: " << ds::format_double(report.rwmd_sec) << " s"
                      << (report.rwmd_timed_out ? " (timed out, partial)" : "") << "\n";
        }
        if (report.speed_ratio > 0.0) {
            std::cout << "speed ratio (rwmd/ds): " << ds::format_double(report.speed_ratio) << "\n";
        }
        if (!bench_report.empty()) ds::save_benchmark_json(report, bench_report);
        if (report.rwmd_timed_out) throw ds::TimeoutError("rwmd benchmark hit its timeout");
    });

    // ---- pipeline ----
    auto* pipeline = app.add_subcommand("pipeline", "Run the full retrieval pipeline into an output directory");
    ds::RunConfig pipe_config;
    std::string pipe_kernel = "gaussian", pipe_method = "volume", pipe_similarity = "cosine";
    std::string pipe_transform = "rownorm,tfidf", pipe_idf = "natural", pipe_rwmd_weights = "transformed";
    std::string pipe_config_file;
    bool pipe_normalize_density = false, pipe_normalize_embeddings = false;
    pipeline->add_option("--config", pipe_config_file,
                         "Read options from a key = value file (a pipeline manifest works); explicit flags win");
    pipeline->add_option("--embedding", pipe_config.embedding_path, "Word2vec text embedding");
    pipeline->add_option("--queries", pipe_config.queries_path, "Queries corpus");
    pipeline->add_option("--items", pipe_config.items_path, "Items corpus (default: queries)");
    pipeline->add_option("--stopwords", pipe_config.stopwords_path, "Stopword list");
    pipeline->add_option("--outdir", pipe_config.outdir, "Output directory");
    pipeline->add_option("--kernel", pipe_kernel, "gaussian|epanechnikov")->capture_default_str();
    pipeline->add_option("--bandwidth-method", pipe_method, "silverman|volume|lscv")->capture_default_str();
    pipeline->add_option("--adjust", pipe_config.bandwidth_adjust, "Bandwidth adjustment factor")->capture_default_str();
    pipeline->add_option("--qlow", pipe_config.q_low, "Lower norm quantile")->capture_default_str();
    pipeline->add_option("--qhigh", pipe_config.q_high, "Upper norm quantile")->capture_default_str();
    pipeline->add_option("--sample-quantile", pipe_config.sample_quantile, "Ball radius quantile")->capture_default_str();
    pipeline->add_option("--samples", pipe_config.n_samples, "Number of sample points")->capture_default_str();
    pipeline->add_option("--seed", pipe_config.seed, "Seed")->capture_default_str();
    pipeline->add_flag("--normalize-density", pipe_normalize_density, "Use normalized densities");
    pipeline->add_option("--similarity", pipe_similarity, "cosine|jensen_shannon")->capture_default_str();
    pipeline->add_option("--transform", pipe_transform, "DFM transforms, e.g. rownorm,tfidf or none")->capture_default_str();
    pipeline->add_option("--idf", pipe_idf, "IDF variant: natural|smoothed")->capture_default_str();
    pipeline->add_option("--min-len", pipe_config.min_len, "Minimum token length")->capture_default_str();
    pipeline->add_option("--embedding-limit", pipe_config.embedding_limit, "Cap on embedding rows read");
    pipeline->add_flag("--normalize-embeddings", pipe_normalize_embeddings, "Unit-normalize embedding vectors");
    pipeline->add_option("--rwmd-weights", pipe_rwmd_weights, "transformed|counts")->capture_default_str();
    std::string pipe_k = "5", pipe_s = "0,1,2";
    pipeline->add_option("--k", pipe_k, "Rank cutoffs recorded for evaluation")->capture_default_str();
    pipeline->add_option("--s", pipe_s, "Softness values recorded for evaluation")->capture_default_str();
    pipeline->add_option("--threads", pipe_config.threads, "Worker threads (0 = all cores)");
    pipeline->callback([&] {
        pipe_config.kernel = ds::kernel_from_string(pipe_kernel);
        pipe_config.bandwidth_method = ds::bandwidth_method_from_string(pipe_method);
        pipe_config.similarity = ds::similarity_from_string(pipe_similarity);
        pipe_config.transforms = ds::transforms_from_string(pipe_transform);
        pipe_config.idf = ds::idf_from_string(pipe_idf);
        pipe_config.rwmd_weights = ds::rwmd_weights_from_string(pipe_rwmd_weights);
        pipe_config.k_grid = ds::k_grid_from_string(pipe_k);
        pipe_config.s_grid = ds::s_grid_from_string(pipe_s);
        pipe_config.normalize_density = pipe_normalize_density;
        pipe_config.normalize_embeddings = pipe_normalize_embeddings;

        if (!pipe_config_file.empty()) {
            // file values fill in everything the command line left unset
            ds::RunConfig merged = ds::config_from_manifest(pipe_config_file);
            auto keep_cli = [&](const char* flag) { return pipeline->count(flag) > 0; };
            if (keep_cli("--embedding")) merged.embedding_path = pipe_config.embedding_path;
            if (keep_cli("--queries")) merged.queries_path = pipe_config.queries_path;
            if (keep_cli("--items")) merged.items_path = pipe_config.items_path;
            if (keep_cli("--stopwords")) merged.stopwords_path = pipe_config.stopwords_path;
            if (keep_cli("--outdir")) merged.outdir = pipe_config.outdir;
            if (keep_cli("--kernel")) merged.kernel = pipe_config.kernel;
            if (keep_cli("--bandwidth-method")) merged.bandwidth_method = pipe_config.bandwidth_method;
            if (keep_cli("--adjust")) merged.bandwidth_adjust = pipe_config.bandwidth_adjust;
            if (keep_cli("--qlow")) merged.q_low = pipe_config.q_low;
            if (keep_cli("--qhigh")) merged.q_high = pipe_config.q_high;
            if (keep_cli("--sample-quantile")) merged.sample_quantile = pipe_config.sample_quantile;
            if (keep_cli("--samples")) merged.n_samples = pipe_config.n_samples;
            if (keep_cli("--seed")) merged.seed = pipe_config.seed;
            if (keep_cli("--normalize-density")) merged.normalize_density = pipe_config.normalize_density;
            if (keep_cli("--similarity")) merged.similarity = pipe_config.similarity;
            if (keep_cli("--transform")) merged.transforms = pipe_config.transforms;
            if (keep_cli("--idf")) merged.idf = pipe_config.idf;
            if (keep_cli("--min-len")) merged.min_len = pipe_config.min_len;
            if (keep_cli("--embedding-limit")) merged.embedding_limit = pipe_config.embedding_limit;
            if (keep_cli("--normalize-embeddings")) merged.normalize_embeddings = pipe_config.normalize_embeddings;
            if (keep_cli("--rwmd-weights")) merged.rwmd_weights = pipe_config.rwmd_weights;
            if (keep_cli("--k")) merged.k_grid = pipe_config.k_grid;
            if (keep_cli("--s")) merged.s_grid = pipe_config.s_grid;
            if (keep_cli("--threads")) merged.threads = pipe_config.threads;
            pipe_config = merged;
        }
        if (pipe_config.outdir.empty()) {
            throw std::invalid_argument("pipeline: --outdir is required");
        }
        const auto result = ds::run_pipeline(pipe_config);
        std::cout << "h " << ds::format_double(result.bandwidth_scalar) << "\n"
                  << "radius " << ds::format_double(result.sampling_radius) << "\n"
                  << "rankings " << result.rankings_path << "\n"
                  << "manifest " << result.manifest_path << "\n";
        if (!result.empty_query_docs.empty() || !result.empty_item_docs.empty()) {
            std::cout << "documents with no in-vocabulary tokens: " << result.empty_query_docs.size()
                      << " queries, " << result.empty_item_docs.size() << " items\n";
        }
        if (result.zero_denominator_cells > 0) {
            std::cout << "zero-denominator density cells: " << result.zero_denominator_cells << "\n";
        }
        if (result.zero_similarity_rows > 0) {
            std::cout << "all-zero density rows: " << result.zero_similarity_rows << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ds::TimeoutError& e) {
        std::cerr << "timeout: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
