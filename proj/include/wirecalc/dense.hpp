#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wirecalc/errors.hpp"

namespace wirecalc {

/// Minimal dense real matrix, row-major. Used for wiring derivatives and
/// linear-system blocks; deliberately small, no BLAS.
class Dense {
public:
    Dense() : rows_(0), cols_(0) {}
    Dense(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Dense identity(std::size_t n) {
        Dense m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Dense from_rows(const std::vector<std::vector<double>>& rows) {
        std::size_t nc = rows.empty() ? 0 : rows.front().size();
        Dense m(rows.size(), nc);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != nc)
                throw Error(ErrorKind::InvalidArgument, "ragged rows in dense matrix");
            for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Dense operator*(const Dense& other) const {
        if (cols_ != other.rows_)
            throw Error(ErrorKind::ShapeMismatch, "dense matrix product shape mismatch");
        Dense out(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += v * other(k, j);
            }
        return out;
    }

    Dense operator+(const Dense& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw Error(ErrorKind::ShapeMismatch, "dense matrix sum shape mismatch");
        Dense out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += other.a_[i];
        return out;
    }

    /// Block-diagonal direct sum.
    Dense direct_sum(const Dense& other) const {
        Dense out(rows_ + other.rows_, cols_ + other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
        for (std::size_t i = 0; i < other.rows_; ++i)
            for (std::size_t j = 0; j < other.cols_; ++j)
                out(rows_ + i, cols_ + j) = other(i, j);
        return out;
    }

    bool approx_equal(const Dense& other, double tol) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) return false;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (std::abs(a_[i] - other.a_[i]) > tol) return false;
        return true;
    }

    bool operator==(const Dense& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && a_ == other.a_;
    }

    std::string to_string() const {
        std::string out = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i) out += "; ";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) out += " ";
                out += std::to_string((*this)(i, j));
            }
        }
        return out + "]";
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> a_;
};

}  // namespace wirecalc
