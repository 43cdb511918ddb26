#include "ds/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ds/metrics.hpp"
#include "ds/rng.hpp"

namespace ds {

namespace {

// Lowercase base-26 digits keep synthetic tokens purely alphabetic, so the
// tokenizer passes them through untouched.
std::string alpha_index(std::size_t value, std::size_t width) {
    std::string out(width, 'a');
    for (std::size_t pos = width; pos-- > 0 && value > 0;) {
        out[pos] = static_cast<char>('a' + value % 26);
        value /= 26;
    }
    return out;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& config) {
    if (config.n_classes < 1 || config.docs_per_class < 1 || config.words_per_class < 1 ||
        config.doc_len < 1 || config.dim < 1) {
        throw std::invalid_argument("generate_synthetic: all counts must be >= 1");
    }
    if (config.dim < config.n_classes) {
        throw std::invalid_argument("generate_synthetic: equal pairwise center distances need dim >= n_classes");
    }
    if (config.separation < 0.0) throw std::invalid_argument("generate_synthetic: separation must be >= 0");
    if (config.mixing < 0.0 || config.mixing >= 1.0) {
        throw std::invalid_argument("generate_synthetic: mixing must lie in [0, 1)");
    }

    const std::size_t n_tokens = config.n_classes * config.words_per_class;
    const std::size_t n_docs = config.n_classes * config.docs_per_class;

    SynthCorpus out;
    out.embedding.dim = config.dim;
    out.embedding.vectors.reserve(n_tokens * config.dim);
    out.embedding.tokens.reserve(n_tokens);

    // Centers (s/sqrt(2)) e_c give every pair of classes distance s exactly.
    const double center_coord = config.separation / std::sqrt(2.0);
    for (std::size_t c = 0; c < config.n_classes; ++c) {
        for (std::size_t w = 0; w < config.words_per_class; ++w) {
            const std::size_t token_index = c * config.words_per_class + w;
            NormalSampler rng(stream_seed(config.seed, token_index));
            for (std::size_t a = 0; a < config.dim; ++a) {
                double v = rng.next();
                if (a == c) v += center_coord;
                out.embedding.vectors.push_back(v);
            }
            std::string token = "w" + alpha_index(c, 2) + alpha_index(w, 4);
            out.embedding.ids.emplace(token, static_cast<FeatureId>(out.embedding.tokens.size()));
            out.embedding.tokens.push_back(std::move(token));
        }
    }

    out.documents.reserve(n_docs);
    out.labels.reserve(n_docs);
    for (std::size_t c = 0; c < config.n_classes; ++c) {
        for (std::size_t k = 0; k < config.docs_per_class; ++k) {
            const std::size_t doc_index = c * config.docs_per_class + k;
            NormalSampler rng(stream_seed(config.seed, n_tokens + doc_index));
            std::string text;
            for (std::size_t w = 0; w < config.doc_len; ++w) {
                std::size_t source_class = c;
                if (config.n_classes > 1 && rng.next_unit() < config.mixing) {
                    std::size_t other = rng.next_u64() % (config.n_classes - 1);
                    source_class = other < c ? other : other + 1;
                }
                const std::size_t word = rng.next_u64() % config.words_per_class;
                if (!text.empty()) text.push_back(' ');
                text += out.embedding.tokens[source_class * config.words_per_class + word];
            }
            out.documents.push_back({"d" + std::to_string(doc_index), std::move(text)});
            out.labels.push_back("class" + std::to_string(c));
        }
    }
    return out;
}

SynthPaths save_synthetic(const SynthCorpus& corpus, const std::string& dir) {
    std::filesystem::create_directories(dir);
    SynthPaths paths;
    paths.corpus = (std::filesystem::path(dir) / "corpus.tsv").string();
    paths.embedding = (std::filesystem::path(dir) / "embedding.txt").string();
    paths.labels = (std::filesystem::path(dir) / "labels.csv").string();

    std::ofstream out(paths.corpus, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + paths.corpus);
    for (const auto& doc : corpus.documents) {
        out << doc.doc_id << '\t' << doc.text << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + paths.corpus);
    out.close();

    save_embeddings(corpus.embedding, paths.embedding);

    std::vector<std::string> ids;
    ids.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) ids.push_back(doc.doc_id);
    save_labels_csv(ids, corpus.labels, paths.labels);
    return paths;
}

}  // namespace ds
