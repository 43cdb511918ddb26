#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ds/matrix.hpp"

namespace ds {

// Generator contract, recorded in sidecar headers: point j is produced by a
// dedicated SplitMix64 stream seeded with stream_seed(seed, j); the d
// normal components come from the Marsaglia polar method on that stream and
// the radial uniform is the next raw draw after them. Regenerating with the
// same (n, d, R, seed) is bit-identical regardless of thread count.
inline constexpr const char* kSamplerGenerator = "splitmix64-polar";

struct SamplePoints {
    std::size_t dim = 0;
    double radius = 0.0;
    std::uint64_t seed = 0;
    Matrix points;  // n x dim

    std::size_t count() const { return points.rows; }
};

// R for the sampling ball: the q-quantile of the embedding-vector norms
// (q = 0.95 unless overridden). Throws when all norms are zero.
double sampling_radius(const std::vector<double>& norms, double q = 0.95);

// n points uniform in the d-ball of radius R:  z = Z u^(1/d) R / |Z| with Z
// standard d-variate normal and u standard uniform. A zero-norm Z (all but
// impossible with finite floats) is redrawn from the same stream.
SamplePoints sample_ball(std::size_t n, std::size_t dim, double radius,
                         std::uint64_t seed, unsigned threads = 1);

// Binary matrix file plus a text sidecar recording n, d, R, seed and the
// generator name.
void save_sample_points(const SamplePoints& samples, const std::string& matrix_path,
                        const std::string& meta_path);
SamplePoints load_sample_points(const std::string& matrix_path, const std::string& meta_path);

}  // namespace ds
