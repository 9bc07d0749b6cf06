#pragma once

#include <cstddef>
#include <vector>

namespace comemnet {

// Dense row-major matrix of 64-bit floats. Shapes are validated on every
// exposed operation; mismatches throw ConfigError.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0);

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    int count() const { return rows * cols; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    static Matrix zeros(int r, int c) { return Matrix(r, c, 0.0); }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

void add_inplace(Matrix& a, const Matrix& b);
void axpy_inplace(Matrix& a, double s, const Matrix& b); // a += s*b
void scale_inplace(Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

} // namespace comemnet
