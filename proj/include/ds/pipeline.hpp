#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ds/bandwidth.hpp"
#include "ds/corpus.hpp"
#include "ds/density.hpp"
#include "ds/embedding.hpp"
#include "ds/similarity.hpp"

namespace ds {

enum class BandwidthMethod { silverman, volume, lscv };

enum class Transform { row_normalize, tfidf };

// Which weights feed the RWMD baseline: the same transformed DFM the
// density method uses (re-normalized to unit row sums), or plain
// row-normalized counts.
enum class RwmdWeights { transformed, counts };

struct RunConfig {
    std::string embedding_path;
    std::string queries_path;
    std::string items_path;     // empty: items corpus = queries corpus
    std::string stopwords_path; // empty: no stopword filtering
    std::string outdir;

    KernelShape kernel = KernelShape::gaussian;
    BandwidthMethod bandwidth_method = BandwidthMethod::volume;
    double bandwidth_adjust = 1.0;
    double q_low = 0.1;
    double q_high = 0.9;
    double sample_quantile = 0.95;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
    bool normalize_density = false;
    SimilarityKind similarity = SimilarityKind::cosine;
    std::vector<Transform> transforms = {Transform::row_normalize, Transform::tfidf};
    IdfVariant idf = IdfVariant::natural;
    std::size_t min_len = 4;
    std::size_t embedding_limit = 0;
    bool normalize_embeddings = false;
    RwmdWeights rwmd_weights = RwmdWeights::transformed;
    std::vector<std::size_t> k_grid = {5};
    std::vector<double> s_grid = {0.0, 1.0, 2.0};
    unsigned threads = 0;  // 0: hardware concurrency

    bool single_corpus() const { return items_path.empty() || items_path == queries_path; }
    unsigned effective_threads() const;

    // Throws std::invalid_argument before any work happens.
    void validate() const;
};

// Corpora tokenized, vocabulary-intersected and transformed; the shared
// front end of the pipeline and the benchmark. Raw counts are kept so the
// RWMD baseline can run on plain normalized counts when configured to.
struct PreparedData {
    EmbeddingTable embedding;
    DocFeatureMatrix queries;
    DocFeatureMatrix items;  // unused when single_corpus
    DocFeatureMatrix queries_counts;
    DocFeatureMatrix items_counts;
    bool single_corpus = false;
    std::vector<std::size_t> empty_query_docs;
    std::vector<std::size_t> empty_item_docs;

    const DocFeatureMatrix& items_ref() const { return single_corpus ? queries : items; }
};

PreparedData prepare_data(const RunConfig& config);

// DFM for the RWMD baseline per config.rwmd_weights, rows re-normalized to
// unit sum.
DocFeatureMatrix rwmd_input(const RunConfig& config, const PreparedData& data, bool items_side);

struct PipelineResult {
    std::string manifest_path;
    std::string rankings_path;
    double bandwidth_scalar = 0.0;
    double sampling_radius = 0.0;
    std::size_t zero_denominator_cells = 0;
    std::size_t zero_similarity_rows = 0;
    std::vector<std::size_t> empty_query_docs;
    std::vector<std::size_t> empty_item_docs;
};

// Full run: tokenize -> DFM -> transform -> bandwidth -> sample -> density
// -> similarity -> rank. Writes all intermediate artifacts plus a manifest
// into config.outdir; any stage error removes the partial outputs and
// rethrows tagged with the stage name. Reruns with the same config are
// byte identical.
PipelineResult run_pipeline(const RunConfig& config);

// Manifest i/o: "key = value" lines naming the CLI flags; a manifest is a
// valid --config file for the pipeline subcommand.
void write_manifest(const RunConfig& config, const std::string& path);
RunConfig config_from_manifest(const std::string& path);

struct BenchmarkReport {
    std::size_t n_queries = 0;
    std::size_t n_items = 0;
    std::size_t n_features = 0;
    double mean_unique_features = 0.0;  // F
    double feature_sharing_exponent = 0.0;  // b in F = N_f * N_d^-b, measured
    double bandwidth_scalar = 0.0;

    bool ds_ran = false;
    double bandwidth_sec = 0.0;
    double sample_sec = 0.0;
    double density_sec = 0.0;
    double similarity_sec = 0.0;
    double ds_total_sec = 0.0;

    bool rwmd_ran = false;
    bool rwmd_timed_out = false;
    double rwmd_sec = 0.0;

    double speed_ratio = 0.0;  // rwmd_sec / ds_total_sec
};

// Times the DS stages and the RWMD baseline on the prepared corpora.
// Stages finishing under 10 s are re-run and reported as the median of 3.
// timeout_sec > 0 arms a watchdog that aborts RWMD, flagging the report.
BenchmarkReport run_benchmark(const RunConfig& config, bool run_ds, bool run_rwmd,
                              double timeout_sec = 0.0);

void save_benchmark_json(const BenchmarkReport& report, const std::string& path);

// Small helpers shared with the CLI.
Bandwidth estimate_bandwidth(const RunConfig& config, const EmbeddingTable& emb);
std::vector<double> lscv_default_grid(double center);
void save_bandwidth_csv(const Bandwidth& bw, const std::string& path);
Bandwidth load_bandwidth_csv(const std::string& path);

// Grid parsing for the k/s evaluation grids ("5,10" / "0,1,2"); empty
// inputs fall back to k=5 resp. s=0.
std::vector<std::size_t> k_grid_from_string(const std::string& s);
std::vector<double> s_grid_from_string(const std::string& s);
std::string k_grid_to_string(const std::vector<std::size_t>& grid);
std::string s_grid_to_string(const std::vector<double>& grid);

std::string to_string(KernelShape v);
std::string to_string(BandwidthMethod v);
std::string to_string(SimilarityKind v);
std::string to_string(IdfVariant v);
std::string to_string(RwmdWeights v);
std::string transforms_to_string(const std::vector<Transform>& transforms);
KernelShape kernel_from_string(const std::string& s);
BandwidthMethod bandwidth_method_from_string(const std::string& s);
SimilarityKind similarity_from_string(const std::string& s);
IdfVariant idf_from_string(const std::string& s);
RwmdWeights rwmd_weights_from_string(const std::string& s);
std::vector<Transform> transforms_from_string(const std::string& s);

}  // namespace ds
