#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ds/bandwidth.hpp"
#include "ds/corpus.hpp"
#include "ds/embedding.hpp"
#include "ds/matrix.hpp"
#include "ds/sampler.hpp"

namespace ds {

enum class KernelShape { gaussian, epanechnikov };

struct KernelSpec {
    KernelShape shape = KernelShape::gaussian;
    std::size_t dim = 0;
};

// Documents-by-sample-points density values: the corpus condensed from N_f
// features to n sample-point features.
struct DensityMatrix {
    Matrix values;  // n_docs x n_points, finite and >= 0
    std::vector<std::string> doc_ids;
    bool normalized = false;

    // Cells where the normalizing kernel sum underflowed to zero (entry set
    // to 0). A nonzero count signals a bandwidth too small for the sample
    // spread. first_zero_denominator_point is the first offending j.
    std::size_t zero_denominator_cells = 0;
    std::size_t first_zero_denominator_point = 0;
};

// log k((z - x)/h) for the squared distance |z - x|^2.
//   gaussian:      k(y) = (2 pi)^(-d/2) exp(-|y|^2 / 2)
//   epanechnikov:  k(y) = max(0, d - |y|^2), log 0 = -infinity
double kernel_log_value(const KernelSpec& spec, double squared_distance, double h);

// Kernel-regression densities of every document at every sample point.
// Entry (t, j) is  sum_i k((z_j - x_i)/h) w_{t,i}, normalized by the kernel
// sum over all corpus features when `normalize` is set. The numerator runs
// only over the document's own features. Accumulation is log-space
// (log-sum-exp); unnormalized entries whose log falls below log(DBL_MIN)
// are stored as exactly 0. A diagonal bandwidth rescales each coordinate
// difference before the norm.
// Output is independent of `threads`.
DensityMatrix density_matrix(const DocFeatureMatrix& dfm, const EmbeddingTable& emb,
                             const SamplePoints& samples, const Bandwidth& bw,
                             const KernelSpec& spec, bool normalize, unsigned threads = 1);

struct CrossDensities {
    DensityMatrix queries;
    DensityMatrix items;
    bool shared = false;  // true when the corpora were the same object and one evaluation served both
};

// Query and item densities over shared sample points and kernel
// configuration. When both arguments are the same object the matrix is
// evaluated once.
CrossDensities cross_corpus_densities(const DocFeatureMatrix& queries,
                                      const DocFeatureMatrix& items,
                                      const EmbeddingTable& emb, const SamplePoints& samples,
                                      const Bandwidth& bw, const KernelSpec& spec,
                                      bool normalize, unsigned threads = 1);

}  // namespace ds
