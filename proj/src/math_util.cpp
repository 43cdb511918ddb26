#include "ds/math_util.hpp"

#include <algorithm>
#include <stdexcept>

namespace ds {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

double log_sum_exp(std::span<const double> values) {
    double max = kNegInf;
    for (double v : values) max = std::max(max, v);
    if (max == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : values) {
        if (v != kNegInf) sum += std::exp(v - max);
    }
    return max + std::log(sum);
}

}  // namespace ds
