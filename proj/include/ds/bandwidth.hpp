#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ds/matrix.hpp"

namespace ds {

// Kernel length scale. per_axis, when present, is a diagonal bandwidth
// matrix; scalar is then the geometric mean of the diagonal.
struct Bandwidth {
    double scalar = 0.0;
    std::vector<double> per_axis;

    bool diagonal() const { return !per_axis.empty(); }
    Bandwidth scaled(double factor) const;
};

// Rule-of-thumb bandwidth per axis:
//   h^(a) = sigma^(a) * (4 / (N (d+2)))^(1/(d+4))
// sigma is the population standard deviation (1/N). Throws on N < 2 or on
// an axis with zero spread.
Bandwidth silverman_bandwidth(MatrixView points);

// log of the volume of a d-ball, via log-Gamma. Gamma(1 + d/2) overflows
// doubles well before d = 300, so this is never exponentiated.
double log_ball_volume(std::size_t dim, double radius);

// log of the volume of the spherical layer r < |x| <= radius. r = 0 returns
// log_ball_volume exactly. In high dimension the inner-ball correction is
// vanishingly small: volume concentrates near the surface.
double log_layer_volume(std::size_t dim, double r, double radius);

// (q_low, q_high) quantiles of the norms, linearly interpolated.
std::pair<double, double> radius_quantiles(const std::vector<double>& norms,
                                           double q_low = 0.1, double q_high = 0.9);

// Typical spacing of n_points spread uniformly over the layer between the
// norm quantiles:  h = exp((log V(r,R) - log N) / d).
Bandwidth volume_bandwidth(const std::vector<double>& norms, std::size_t dim,
                           std::size_t n_points, double q_low = 0.1, double q_high = 0.9);

// Least-squares cross-validation cost at bandwidth h, Gaussian kernel:
//
//   C(h) = 1/(h^d N^2) * sum_{i,j} [ K(d_ij/h) - 2N/(N-1) k(d_ij/h) ]
//          + 2 k(0) / (h^d (N-1))
//
// with K the Gaussian convolution kernel (4*pi)^(-d/2) exp(-|y|^2/4). The
// double sum runs over all ordered pairs including i = j. Kernel sums are
// taken in log space, so tiny h yields +inf rather than NaN.
double lscv_cost(MatrixView points, double h, unsigned threads = 1);

// Grid minimizer for lscv_cost. Ties (and non-finite costs) resolve toward
// the larger h.
Bandwidth lscv_minimize(MatrixView points, const std::vector<double>& grid, unsigned threads = 1);

}  // namespace ds
