#include "ds/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ds/math_util.hpp"
#include "ds/parallel.hpp"

namespace ds {

Bandwidth Bandwidth::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("bandwidth adjustment factor must be positive");
    Bandwidth out;
    out.scalar = scalar * factor;
    out.per_axis = per_axis;
    for (double& h : out.per_axis) h *= factor;
    return out;
}

Bandwidth silverman_bandwidth(MatrixView points) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 points");

    Bandwidth bw;
    bw.per_axis.resize(d);
    const double factor = std::pow(4.0 / (static_cast<double>(n) * (static_cast<double>(d) + 2.0)),
                                   1.0 / (static_cast<double>(d) + 4.0));
    double log_sum = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += points.at(i, a);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = points.at(i, a) - mean;
            var += delta * delta;
        }
        var /= static_cast<double>(n);
        const double sigma = std::sqrt(var);
        if (sigma == 0.0) {
            throw std::invalid_argument("silverman_bandwidth: zero standard deviation on axis " + std::to_string(a));
        }
        bw.per_axis[a] = sigma * factor;
        log_sum += std::log(bw.per_axis[a]);
    }
    bw.scalar = std::exp(log_sum / static_cast<double>(d));
    return bw;
}

double log_ball_volume(std::size_t dim, double radius) {
    if (dim < 1) throw std::invalid_argument("log_ball_volume: dim must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("log_ball_volume: radius must be positive");
    const double d = static_cast<double>(dim);
    return 0.5 * d * std::log(M_PI) - std::lgamma(1.0 + 0.5 * d) + d * std::log(radius);
}

double log_layer_volume(std::size_t dim, double r, double radius) {
    if (r < 0.0) throw std::invalid_argument("log_layer_volume: r must be non-negative");
    if (!(r < radius)) throw std::invalid_argument("log_layer_volume: need r < radius");
    const double log_outer = log_ball_volume(dim, radius);
    if (r == 0.0) return log_outer;
    const double log_inner = log_ball_volume(dim, r);
    return log_outer + std::log1p(-std::exp(log_inner - log_outer));
}

std::pair<double, double> radius_quantiles(const std::vector<double>& norms,
                                           double q_low, double q_high) {
    if (norms.empty()) throw std::invalid_argument("radius_quantiles: empty input");
    if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) {
        throw std::invalid_argument("radius_quantiles: need 0 <= q_low < q_high <= 1");
    }
    std::vector<double> sorted = norms;
    std::sort(sorted.begin(), sorted.end());
    return {quantile_sorted(sorted, q_low), quantile_sorted(sorted, q_high)};
}

Bandwidth volume_bandwidth(const std::vector<double>& norms, std::size_t dim,
                           std::size_t n_points, double q_low, double q_high) {
    if (n_points == 0) throw std::invalid_argument("volume_bandwidth: n_points must be positive");
    const auto [r, radius] = radius_quantiles(norms, q_low, q_high);
    if (r == radius) throw std::invalid_argument("volume_bandwidth: zero-thickness layer (r == R)");
    if (!(radius > 0.0)) throw std::invalid_argument("volume_bandwidth: outer radius is zero");
    const double log_volume = log_layer_volume(dim, r, radius);
    Bandwidth bw;
    bw.scalar = std::exp((log_volume - std::log(static_cast<double>(n_points))) / static_cast<double>(dim));
    return bw;
}

double lscv_cost(MatrixView points, double h, unsigned threads) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (n < 2) throw std::invalid_argument("lscv_cost: need at least 2 points");
    if (!(h > 0.0)) throw std::invalid_argument("lscv_cost: h must be positive");

    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n);
    const double inv_h2 = 1.0 / (h * h);

    // Per-row partial log-sum-exp over exp(-|x_i-x_j|^2 / (4h^2)) resp.
    // (2h^2); merged in row order so the result is thread-count independent.
    std::vector<LogSumExpAccumulator> conv_parts(n), kern_parts(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            LogSumExpAccumulator conv, kern;
            const double* xi = points.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                const double* xj = points.row(j);
                double sq = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    const double delta = xi[a] - xj[a];
                    sq += delta * delta;
                }
                conv.add(-0.25 * sq * inv_h2);
                kern.add(-0.5 * sq * inv_h2);
            }
            conv_parts[i] = conv;
            kern_parts[i] = kern;
        }
    });
    LogSumExpAccumulator conv_sum, kern_sum;
    for (std::size_t i = 0; i < n; ++i) {
        conv_sum.merge(conv_parts[i]);
        kern_sum.merge(kern_parts[i]);
    }

    const double log_scale = -dd * std::log(h) - 2.0 * std::log(nn);
    // ls1: convolution-kernel sum; ls2: kernel sum with its 2N/(N-1) factor;
    // ls3: the 2 k(0) / (h^d (N-1)) tail.
    const double ls1 = conv_sum.value() - 0.5 * dd * std::log(4.0 * M_PI) + log_scale;
    const double ls2 = kern_sum.value() - 0.5 * dd * std::log(2.0 * M_PI) + log_scale +
                       std::log(2.0 * nn / (nn - 1.0));
    const double ls3 = std::log(2.0) - 0.5 * dd * std::log(2.0 * M_PI) -
                       dd * std::log(h) - std::log(nn - 1.0);

    // C = e^ls1 - e^ls2 + e^ls3, evaluated around the common maximum so a
    // huge h^-d produces a signed infinity instead of inf - inf = NaN.
    const double m = std::max({ls1, ls2, ls3});
    if (m == kNegInf) return 0.0;
    const double bracket = std::exp(ls1 - m) - std::exp(ls2 - m) + std::exp(ls3 - m);
    if (m > std::log(std::numeric_limits<double>::max())) {
        if (bracket > 0.0) return std::numeric_limits<double>::infinity();
        if (bracket < 0.0) return -std::numeric_limits<double>::infinity();
        return 0.0;
    }
    return std::exp(m) * bracket;
}

Bandwidth lscv_minimize(MatrixView points, const std::vector<double>& grid, unsigned threads) {
    if (grid.empty()) throw std::invalid_argument("lscv_minimize: empty grid");
    for (double h : grid) {
        if (!(h > 0.0)) throw std::invalid_argument("lscv_minimize: grid values must be positive");
    }
    double best_h = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    bool first = true;
    for (double h : grid) {
        double cost = lscv_cost(points, h, threads);
        if (std::isnan(cost)) cost = std::numeric_limits<double>::infinity();
        if (first || cost < best_cost || (cost == best_cost && h > best_h)) {
            best_h = h;
            best_cost = cost;
            first = false;
        }
    }
    Bandwidth bw;
    bw.scalar = best_h;
    return bw;
}

}  // namespace ds
