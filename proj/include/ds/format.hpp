#pragma once

#include <string>

namespace ds {

// Shortest decimal that round-trips the double exactly (std::to_chars).
// All CSV and text outputs go through this so reruns are byte-identical.
std::string format_double(double value);

}  // namespace ds
