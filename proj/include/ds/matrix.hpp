#pragma once

#include <cstddef>
#include <vector>

namespace ds {

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    bool operator==(const Matrix& other) const = default;
};

// Non-owning view over row-major data (used to avoid copying embedding tables
// into Matrix objects just to run statistics over them).
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    MatrixView() = default;
    MatrixView(const double* d, std::size_t r, std::size_t c) : data(d), rows(r), cols(c) {}
    MatrixView(const Matrix& m) : data(m.data.data()), rows(m.rows), cols(m.cols) {}

    const double* row(std::size_t r) const { return data + r * cols; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

}  // namespace ds
