#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ds {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Quantile with linear interpolation between closest order statistics:
// position q*(n-1) in the sorted array. The same convention is used
// everywhere a quantile appears (bandwidth radii, sampling radius,
// metric quartiles).
double quantile_sorted(std::span<const double> sorted, double q);

// Sorts a copy of `values` and evaluates quantile_sorted.
double quantile(std::vector<double> values, double q);

// Stable log(sum(exp(v))) over the span; -inf entries contribute nothing.
// Empty input or all -inf yields -inf.
double log_sum_exp(std::span<const double> values);

// Streaming variant: tracks max and a rescaled sum without materializing
// the log values. Partial accumulators merge associatively; merging in a
// fixed order keeps parallel reductions deterministic.
class LogSumExpAccumulator {
public:
    void add(double log_value) {
        if (log_value == kNegInf) return;
        if (log_value <= max_) {
            sum_ += std::exp(log_value - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_value) + 1.0;
            max_ = log_value;
        }
    }

    void merge(const LogSumExpAccumulator& other) {
        if (other.max_ == kNegInf) return;
        if (max_ == kNegInf) {
            *this = other;
        } else if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        }
    }

    double value() const {
        if (max_ == kNegInf) return kNegInf;
        return max_ + std::log(sum_);
    }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

}  // namespace ds
