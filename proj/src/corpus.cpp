#include "ds/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "ds/format.hpp"

namespace ds {

double DocFeatureMatrix::row_sum(std::size_t t) const {
    double sum = 0.0;
    for (const auto& [feature, weight] : rows[t]) sum += weight;
    return sum;
}

double DocFeatureMatrix::mean_unique_features() const {
    if (rows.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& row : rows) total += row.size();
    return static_cast<double>(total) / static_cast<double>(rows.size());
}

std::vector<std::string> tokenize(std::string_view text,
                                  const std::unordered_set<std::string>& stopwords,
                                  std::size_t min_len) {
    if (min_len < 1) throw std::invalid_argument("tokenize: min_len must be >= 1");
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= min_len && !stopwords.contains(current)) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (char c : text) {
        if (c >= 'a' && c <= 'z') {
            current.push_back(c);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

DocFeatureMatrix build_dfm(const std::vector<std::vector<std::string>>& docs,
                           const std::vector<std::string>& doc_ids,
                           const EmbeddingTable& emb,
                           std::vector<std::size_t>* empty_docs) {
    if (doc_ids.size() != docs.size()) {
        throw std::invalid_argument("build_dfm: doc_ids and docs size mismatch");
    }
    DocFeatureMatrix m;
    m.n_features = emb.size();
    m.doc_ids = doc_ids;
    m.rows.resize(docs.size());

    std::unordered_map<FeatureId, double> counts;
    for (std::size_t t = 0; t < docs.size(); ++t) {
        counts.clear();
        for (const auto& token : docs[t]) {
            if (auto id = emb.id_of(token)) counts[*id] += 1.0;
        }
        auto& row = m.rows[t];
        row.assign(counts.begin(), counts.end());
        std::sort(row.begin(), row.end());
        if (row.empty() && empty_docs) empty_docs->push_back(t);
    }
    return m;
}

DocFeatureMatrix tfidf_transform(const DocFeatureMatrix& m, IdfVariant variant, bool* all_zero) {
    const std::size_t n_docs = m.n_docs();
    if (n_docs == 0) throw std::invalid_argument("tfidf_transform: empty corpus");

    std::vector<std::size_t> df(m.n_features, 0);
    for (const auto& row : m.rows) {
        for (const auto& [feature, weight] : row) ++df[feature];
    }

    std::vector<double> idf(m.n_features, 0.0);
    for (std::size_t i = 0; i < m.n_features; ++i) {
        if (df[i] == 0) continue;
        if (variant == IdfVariant::natural) {
            idf[i] = std::log(static_cast<double>(n_docs) / static_cast<double>(df[i]));
        } else {
            idf[i] = std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df[i]))) + 1.0;
        }
    }

    DocFeatureMatrix out;
    out.n_features = m.n_features;
    out.doc_ids = m.doc_ids;
    out.rows.resize(n_docs);
    bool any_nonzero = false;
    for (std::size_t t = 0; t < n_docs; ++t) {
        auto& row = out.rows[t];
        row.reserve(m.rows[t].size());
        for (const auto& [feature, weight] : m.rows[t]) {
            const double w = weight * idf[feature];
            if (w > 0.0) {
                row.emplace_back(feature, w);
                any_nonzero = true;
            }
        }
    }
    if (all_zero) *all_zero = !any_nonzero;
    return out;
}

DocFeatureMatrix row_normalize(const DocFeatureMatrix& m) {
    DocFeatureMatrix out = m;
    for (std::size_t t = 0; t < out.n_docs(); ++t) {
        const double sum = out.row_sum(t);
        if (sum <= 0.0) continue;
        for (auto& [feature, weight] : out.rows[t]) weight /= sum;
    }
    return out;
}

std::unordered_set<std::string> vocabulary(const std::vector<std::vector<std::string>>& docs) {
    std::unordered_set<std::string> vocab;
    for (const auto& doc : docs) {
        for (const auto& token : doc) vocab.insert(token);
    }
    return vocab;
}

std::vector<Document> read_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected doc_id<TAB>text");
        }
        Document doc{line.substr(0, tab), line.substr(tab + 1)};
        if (!seen.insert(doc.doc_id).second) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate doc_id \"" + doc.doc_id + "\"");
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::unordered_set<std::string> read_stopwords(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        for (char& c : line) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        words.insert(line);
    }
    return words;
}

void save_dfm_csv(const DocFeatureMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write DFM file: " + path);
    out << "doc,feature,weight\n";
    for (std::size_t t = 0; t < m.n_docs(); ++t) {
        for (const auto& [feature, weight] : m.rows[t]) {
            out << t << ',' << feature << ',' << format_double(weight) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DocFeatureMatrix load_dfm_csv(const std::string& path, std::size_t n_features) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open DFM file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "doc,feature,weight") throw std::runtime_error(path + ": bad header, expected doc,feature,weight");

    DocFeatureMatrix m;
    std::size_t line_no = 1;
    FeatureId max_feature = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected three fields");
        }
        std::size_t doc = 0;
        FeatureId feature = 0;
        double weight = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + c1, doc);
        auto r2 = std::from_chars(line.data() + c1 + 1, line.data() + c2, feature);
        auto r3 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), weight);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r3.ec != std::errc() ||
            r3.ptr != line.data() + line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        }
        if (!(weight > 0.0) || !std::isfinite(weight)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": weight must be positive and finite");
        }
        if (doc >= m.rows.size()) m.rows.resize(doc + 1);
        m.rows[doc].emplace_back(feature, weight);
        max_feature = std::max(max_feature, feature);
        any = true;
    }
    m.n_features = n_features > 0 ? n_features : (any ? std::size_t(max_feature) + 1 : 0);
    if (n_features > 0 && any && std::size_t(max_feature) >= n_features) {
        throw std::runtime_error(path + ": feature index exceeds declared feature count");
    }
    for (std::size_t t = 0; t < m.n_docs(); ++t) {
        auto& row = m.rows[t];
        std::sort(row.begin(), row.end());
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == row[k - 1].first) {
                throw std::runtime_error(path + ": duplicate (doc,feature) pair in row " + std::to_string(t));
            }
        }
    }
    m.doc_ids.resize(m.n_docs());
    for (std::size_t t = 0; t < m.n_docs(); ++t) m.doc_ids[t] = std::to_string(t);
    return m;
}

void save_doc_ids(const std::vector<std::string>& ids, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write doc id file: " + path);
    for (const auto& id : ids) out << id << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> load_doc_ids(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open doc id file: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

}  // namespace ds
