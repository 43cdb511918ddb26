#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ds/corpus.hpp"
#include "ds/embedding.hpp"

namespace ds {

// Labeled test-corpus generator: class vocabularies are unit-variance
// Gaussian clouds around centers with equal pairwise distance `separation`
// (scaled standard-basis construction, so dim >= n_classes is required).
// Documents draw doc_len tokens from their class vocabulary, except that a
// token is replaced by one from a uniformly chosen other class with
// probability `mixing`.
struct SynthConfig {
    std::size_t n_classes = 3;
    std::size_t docs_per_class = 20;
    std::size_t words_per_class = 50;
    std::size_t doc_len = 40;
    std::size_t dim = 16;
    double separation = 10.0;
    double mixing = 0.1;
    std::uint64_t seed = 1;
};

struct SynthCorpus {
    std::vector<Document> documents;
    std::vector<std::string> labels;  // per document, "class<N>"
    EmbeddingTable embedding;
};

// Deterministic in `seed`: tokens and documents each draw from their own
// SplitMix64 stream.
SynthCorpus generate_synthetic(const SynthConfig& config);

// Writes corpus.tsv, embedding.txt and labels.csv into `dir`.
struct SynthPaths {
    std::string corpus;
    std::string embedding;
    std::string labels;
};
SynthPaths save_synthetic(const SynthCorpus& corpus, const std::string& dir);

}  // namespace ds
