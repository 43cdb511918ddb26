#include "ds/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "ds/format.hpp"

namespace ds {

namespace {

bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_size(std::string_view text, std::size_t& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Splits on runs of spaces/tabs. Word2vec tokens carry no embedded whitespace.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

[[noreturn]] void fail(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

EmbeddingTable load_embeddings(const std::string& path, std::size_t limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path);

    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_fields(line);
    std::size_t declared = 0, dim = 0;
    if (header.size() != 2 || !parse_size(header[0], declared) || !parse_size(header[1], dim) || dim == 0) {
        fail(path, 1, "malformed header, expected \"N d\"");
    }

    const std::size_t want = (limit > 0 && limit < declared) ? limit : declared;

    EmbeddingTable emb;
    emb.dim = dim;
    emb.vectors.reserve(want * dim);
    emb.tokens.reserve(want);
    emb.ids.reserve(want * 2);

    std::size_t line_no = 1;
    while (emb.tokens.size() < want) {
        if (!std::getline(in, line)) {
            fail(path, line_no + 1, "unexpected end of file, got " + std::to_string(emb.tokens.size()) +
                                        " of " + std::to_string(declared) + " rows");
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        auto fields = split_fields(line);
        if (fields.empty()) fail(path, line_no, "empty row");
        if (fields.size() != dim + 1) {
            fail(path, line_no, "row has " + std::to_string(fields.size() - 1) +
                                    " components, expected " + std::to_string(dim));
        }
        std::string token(fields[0]);
        if (emb.ids.contains(token)) {
            fail(path, line_no, "duplicate token \"" + token + "\"");
        }
        for (std::size_t a = 0; a < dim; ++a) {
            double v = 0.0;
            if (!parse_double(fields[a + 1], v)) {
                fail(path, line_no, "component " + std::to_string(a + 1) + " is not a decimal float");
            }
            if (!std::isfinite(v)) {
                fail(path, line_no, "component " + std::to_string(a + 1) + " is not finite");
            }
            emb.vectors.push_back(v);
        }
        emb.ids.emplace(token, static_cast<FeatureId>(emb.tokens.size()));
        emb.tokens.push_back(std::move(token));
    }
    return emb;
}

void save_embeddings(const EmbeddingTable& emb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write embedding file: " + path);
    out << emb.size() << ' ' << emb.dim << '\n';
    std::string buf;
    for (FeatureId id = 0; id < emb.size(); ++id) {
        buf = emb.tokens[id];
        const double* v = emb.vector(id);
        for (std::size_t a = 0; a < emb.dim; ++a) {
            buf += ' ';
            buf += format_double(v[a]);
        }
        buf += '\n';
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingTable intersect_vocabulary(const EmbeddingTable& emb,
                                    const std::unordered_set<std::string>& corpus_tokens) {
    EmbeddingTable result;
    result.dim = emb.dim;
    for (FeatureId id = 0; id < emb.size(); ++id) {
        if (!corpus_tokens.contains(emb.tokens[id])) continue;
        const double* v = emb.vector(id);
        result.vectors.insert(result.vectors.end(), v, v + emb.dim);
        result.ids.emplace(emb.tokens[id], static_cast<FeatureId>(result.tokens.size()));
        result.tokens.push_back(emb.tokens[id]);
    }
    if (result.tokens.empty()) {
        throw std::invalid_argument("vocabulary intersection is empty: corpus and embedding share no tokens");
    }
    return result;
}

std::vector<double> vector_norms(const EmbeddingTable& emb) {
    std::vector<double> norms(emb.size());
    for (FeatureId id = 0; id < emb.size(); ++id) {
        const double* v = emb.vector(id);
        double ss = 0.0;
        for (std::size_t a = 0; a < emb.dim; ++a) ss += v[a] * v[a];
        norms[id] = std::sqrt(ss);
    }
    return norms;
}

void normalize_vector_lengths(EmbeddingTable& emb) {
    for (FeatureId id = 0; id < emb.size(); ++id) {
        double* v = emb.vectors.data() + std::size_t(id) * emb.dim;
        double ss = 0.0;
        for (std::size_t a = 0; a < emb.dim; ++a) ss += v[a] * v[a];
        if (ss == 0.0) continue;
        const double inv = 1.0 / std::sqrt(ss);
        for (std::size_t a = 0; a < emb.dim; ++a) v[a] *= inv;
    }
}

}  // namespace ds
