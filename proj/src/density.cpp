#include "ds/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ds/math_util.hpp"
#include "ds/parallel.hpp"

namespace ds {

namespace {

const double kLogTiny = std::log(std::numeric_limits<double>::min());

// Keeps the blocked kernel buffer around 32 MB.
constexpr std::size_t kBlockBudgetDoubles = std::size_t(4) << 20;

double finalize_unnormalized(double log_value) {
    return log_value < kLogTiny ? 0.0 : std::exp(log_value);
}

}  // namespace

double kernel_log_value(const KernelSpec& spec, double squared_distance, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel_log_value: h must be positive");
    const double d = static_cast<double>(spec.dim);
    const double y2 = squared_distance / (h * h);
    switch (spec.shape) {
        case KernelShape::gaussian:
            return -0.5 * d * std::log(2.0 * M_PI) - 0.5 * y2;
        case KernelShape::epanechnikov: {
            const double arg = d - y2;
            return arg > 0.0 ? std::log(arg) : kNegInf;
        }
    }
    throw std::logic_error("kernel_log_value: unknown kernel shape");
}

DensityMatrix density_matrix(const DocFeatureMatrix& dfm, const EmbeddingTable& emb,
                             const SamplePoints& samples, const Bandwidth& bw,
                             const KernelSpec& spec, bool normalize, unsigned threads) {
    const std::size_t n_features = emb.size();
    const std::size_t n_docs = dfm.n_docs();
    const std::size_t n_points = samples.count();
    const std::size_t dim = emb.dim;

    if (dfm.n_features != n_features) {
        throw std::invalid_argument("density_matrix: DFM features not indexed against this embedding");
    }
    if (samples.dim != dim) throw std::invalid_argument("density_matrix: sample dimension mismatch");
    if (spec.dim != dim) throw std::invalid_argument("density_matrix: kernel dimension mismatch");
    if (!(bw.scalar > 0.0)) throw std::invalid_argument("density_matrix: bandwidth must be positive");
    if (bw.diagonal() && bw.per_axis.size() != dim) {
        throw std::invalid_argument("density_matrix: per-axis bandwidth dimension mismatch");
    }

    DensityMatrix out;
    out.values = Matrix(n_docs, n_points);
    out.doc_ids = dfm.doc_ids;
    out.normalized = normalize;
    if (n_docs == 0 || n_points == 0) return out;

    // A diagonal bandwidth divides each coordinate by its own h up front;
    // the kernel then runs at h = 1.
    std::vector<double> scaled_features, scaled_samples;
    const double* X = emb.vectors.data();
    const double* Z = samples.points.data.data();
    double h = bw.scalar;
    if (bw.diagonal()) {
        for (double ha : bw.per_axis) {
            if (!(ha > 0.0)) throw std::invalid_argument("density_matrix: per-axis bandwidth must be positive");
        }
        scaled_features.resize(n_features * dim);
        scaled_samples.resize(n_points * dim);
        for (std::size_t i = 0; i < n_features; ++i) {
            for (std::size_t a = 0; a < dim; ++a) {
                scaled_features[i * dim + a] = X[i * dim + a] / bw.per_axis[a];
            }
        }
        for (std::size_t j = 0; j < n_points; ++j) {
            for (std::size_t a = 0; a < dim; ++a) {
                scaled_samples[j * dim + a] = Z[j * dim + a] / bw.per_axis[a];
            }
        }
        X = scaled_features.data();
        Z = scaled_samples.data();
        h = 1.0;
    }

    std::vector<double> x_norm2(n_features), z_norm2(n_points);
    for (std::size_t i = 0; i < n_features; ++i) {
        double ss = 0.0;
        for (std::size_t a = 0; a < dim; ++a) ss += X[i * dim + a] * X[i * dim + a];
        x_norm2[i] = ss;
    }
    for (std::size_t j = 0; j < n_points; ++j) {
        double ss = 0.0;
        for (std::size_t a = 0; a < dim; ++a) ss += Z[j * dim + a] * Z[j * dim + a];
        z_norm2[j] = ss;
    }

    // Per-document log-weights, computed once.
    std::vector<std::vector<double>> log_weights(n_docs);
    for (std::size_t t = 0; t < n_docs; ++t) {
        log_weights[t].reserve(dfm.rows[t].size());
        for (const auto& [feature, weight] : dfm.rows[t]) {
            if (!(weight > 0.0) || !std::isfinite(weight)) {
                throw std::invalid_argument("density_matrix: weights must be positive and finite");
            }
            log_weights[t].push_back(std::log(weight));
        }
    }

    // Block over sample points so the feature-by-point kernel buffer stays
    // bounded. The block layout is fixed by n_features alone, never by the
    // thread count, which keeps results schedule-independent.
    const std::size_t block_cols = std::clamp<std::size_t>(kBlockBudgetDoubles / std::max<std::size_t>(n_features, 1), 1, n_points);
    std::vector<double> log_kernel(n_features * block_cols);
    std::vector<double> log_denominator(normalize ? n_points : 0);

    std::atomic<std::size_t> zero_denominator{0};
    std::atomic<std::size_t> first_zero_point{n_points};

    for (std::size_t j0 = 0; j0 < n_points; j0 += block_cols) {
        const std::size_t j1 = std::min(n_points, j0 + block_cols);
        const std::size_t width = j1 - j0;

        parallel_for(n_features, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double* xi = X + i * dim;
                double* row = log_kernel.data() + i * block_cols;
                for (std::size_t j = j0; j < j1; ++j) {
                    const double* zj = Z + j * dim;
                    double dot = 0.0;
                    for (std::size_t a = 0; a < dim; ++a) dot += xi[a] * zj[a];
                    const double sq = std::max(0.0, x_norm2[i] + z_norm2[j] - 2.0 * dot);
                    row[j - j0] = kernel_log_value(spec, sq, h);
                }
            }
        });

        if (normalize) {
            parallel_for(width, threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t c = begin; c < end; ++c) {
                    double max = kNegInf;
                    for (std::size_t i = 0; i < n_features; ++i) {
                        max = std::max(max, log_kernel[i * block_cols + c]);
                    }
                    if (max == kNegInf) {
                        log_denominator[j0 + c] = kNegInf;
                        continue;
                    }
                    double sum = 0.0;
                    for (std::size_t i = 0; i < n_features; ++i) {
                        const double v = log_kernel[i * block_cols + c];
                        if (v != kNegInf) sum += std::exp(v - max);
                    }
                    log_denominator[j0 + c] = max + std::log(sum);
                }
            });
        }

        parallel_for(n_docs, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                const auto& row = dfm.rows[t];
                const auto& logw = log_weights[t];
                double* dst = out.values.row(t) + j0;
                for (std::size_t c = 0; c < width; ++c) {
                    double max = kNegInf;
                    for (std::size_t k = 0; k < row.size(); ++k) {
                        const double v = log_kernel[std::size_t(row[k].first) * block_cols + c] + logw[k];
                        max = std::max(max, v);
                    }
                    double log_num = kNegInf;
                    if (max != kNegInf) {
                        double sum = 0.0;
                        for (std::size_t k = 0; k < row.size(); ++k) {
                            const double v = log_kernel[std::size_t(row[k].first) * block_cols + c] + logw[k];
                            if (v != kNegInf) sum += std::exp(v - max);
                        }
                        log_num = max + std::log(sum);
                    }
                    if (!normalize) {
                        dst[c] = finalize_unnormalized(log_num);
                    } else {
                        const double log_den = log_denominator[j0 + c];
                        if (log_den == kNegInf || log_den < kLogTiny) {
                            dst[c] = 0.0;
                            zero_denominator.fetch_add(1, std::memory_order_relaxed);
                            std::size_t j = j0 + c;
                            std::size_t cur = first_zero_point.load(std::memory_order_relaxed);
                            while (j < cur && !first_zero_point.compare_exchange_weak(cur, j)) {
                            }
                        } else {
                            dst[c] = log_num == kNegInf ? 0.0 : std::exp(log_num - log_den);
                        }
                    }
                }
            }
        });
    }

    out.zero_denominator_cells = zero_denominator.load();
    out.first_zero_denominator_point = first_zero_point.load() == n_points ? 0 : first_zero_point.load();
    return out;
}

CrossDensities cross_corpus_densities(const DocFeatureMatrix& queries,
                                      const DocFeatureMatrix& items,
                                      const EmbeddingTable& emb, const SamplePoints& samples,
                                      const Bandwidth& bw, const KernelSpec& spec,
                                      bool normalize, unsigned threads) {
    CrossDensities out;
    if (&queries == &items) {
        out.queries = density_matrix(queries, emb, samples, bw, spec, normalize, threads);
        out.items = out.queries;
        out.shared = true;
        return out;
    }
    out.queries = density_matrix(queries, emb, samples, bw, spec, normalize, threads);
    out.items = density_matrix(items, emb, samples, bw, spec, normalize, threads);
    return out;
}

}  // namespace ds
