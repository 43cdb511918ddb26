#pragma once

#include <string>

#include "ds/matrix.hpp"

namespace ds {

// Binary matrix interchange format, bit-exact across platforms:
//   magic "DSM1", little-endian u32 version (= 1), u64 rows, u64 cols,
//   then rows*cols IEEE-754 doubles, row-major, little-endian.
void save_matrix_dsm(const Matrix& m, const std::string& path);
Matrix load_matrix_dsm(const std::string& path);

}  // namespace ds
