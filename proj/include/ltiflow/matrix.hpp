#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "ltiflow/errors.hpp"

namespace ltiflow {

/// Dense matrix over an exact ring T (scalar, polynomial or rational function).
template <class T>
class Matrix {
   public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T())
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged initializer list");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool is_square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b, "+");
        Matrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
        return c;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b, "-");
        Matrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
        return c;
    }
    friend Matrix operator-(const Matrix& a) {
        Matrix c = a;
        for (auto& x : c.data_) x = -x;
        return c;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatch("matrix product " + a.shape_str() + " * " + b.shape_str());
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }
    friend Matrix operator*(const T& s, const Matrix& a) {
        Matrix c = a;
        for (auto& x : c.data_) x = s * x;
        return c;
    }
    friend Matrix operator*(const Matrix& a, const T& s) { return s * a; }
    Matrix& operator+=(const Matrix& b) { return *this = *this + b; }
    Matrix& operator-=(const Matrix& b) { return *this = *this - b; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!(x == T(0))) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix block(std::size_t i0, std::size_t j0, std::size_t nrows, std::size_t ncols) const {
        if (i0 + nrows > rows_ || j0 + ncols > cols_)
            throw DimensionMismatch("block out of range");
        Matrix b(nrows, ncols);
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t j = 0; j < ncols; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }
    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_)
            throw DimensionMismatch("set_block out of range");
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    static Matrix hstack(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_) throw DimensionMismatch("hstack row mismatch");
        Matrix c(a.rows_, a.cols_ + b.cols_);
        c.set_block(0, 0, a);
        c.set_block(0, a.cols_, b);
        return c;
    }
    static Matrix vstack(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.cols_) throw DimensionMismatch("vstack column mismatch");
        Matrix c(a.rows_ + b.rows_, a.cols_);
        c.set_block(0, 0, a);
        c.set_block(a.rows_, 0, b);
        return c;
    }

    template <class U>
    Matrix<U> map(const std::function<U(const T&)>& f) const {
        Matrix<U> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = f((*this)(i, j));
        return m;
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

   private:
    void check_same_shape(const Matrix& b, const char* op) const {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw DimensionMismatch(std::string("matrix ") + op + " shape mismatch " +
                                    shape_str() + " vs " + b.shape_str());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

}  // namespace ltiflow
