#pragma once

#include <vector>

#include "cotame/scalar.hpp"

namespace cotame {

// Dense matrix over Scalar, row-major.
class Matrix {
   public:
    Matrix() = default;
    Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols) {}
    static Matrix identity(int n);

    int rows() const { return r_; }
    int cols() const { return c_; }
    Scalar& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const Scalar& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    Matrix operator*(const Matrix& o) const;
    std::vector<Scalar> operator*(const std::vector<Scalar>& v) const;
    friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }
    Matrix transpose() const;
    Matrix pow(int k) const;
    bool is_zero() const;

    int rank() const;
    // reduced row echelon form; pivots receives pivot columns
    Matrix rref(std::vector<int>* pivots = nullptr) const;
    // basis of {v : M v = 0}, one vector per free column, in increasing free-column order
    std::vector<std::vector<Scalar>> nullspace() const;
    // throws PreconditionError if singular
    Matrix inverse() const;
    bool invertible() const { return r_ == c_ && rank() == r_; }

   private:
    int r_ = 0, c_ = 0;
    std::vector<Scalar> a_;
};

// Solve M x = b; returns false if inconsistent. Free variables are set to zero.
bool solve_linear(const Matrix& m, const std::vector<Scalar>& b, std::vector<Scalar>& x);

}  // namespace cotame
