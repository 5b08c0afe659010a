#include "cotame/matrix.hpp"

namespace cotame {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (c_ != o.r_) throw DimensionMismatch("matrix product shape mismatch");
    Matrix m(r_, o.c_);
    for (int i = 0; i < r_; ++i)
        for (int k = 0; k < c_; ++k) {
            const Scalar& x = (*this)(i, k);
            if (x.is_zero()) continue;
            for (int j = 0; j < o.c_; ++j) m(i, j) += x * o(k, j);
        }
    return m;
}

std::vector<Scalar> Matrix::operator*(const std::vector<Scalar>& v) const {
    if (static_cast<int>(v.size()) != c_) throw DimensionMismatch("matrix-vector shape mismatch");
    std::vector<Scalar> out(r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

Matrix Matrix::transpose() const {
    Matrix m(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

Matrix Matrix::pow(int k) const {
    Matrix m = identity(r_);
    for (int i = 0; i < k; ++i) m = m * *this;
    return m;
}

bool Matrix::is_zero() const {
    for (auto& x : a_)
        if (!x.is_zero()) return false;
    return true;
}

Matrix Matrix::rref(std::vector<int>* pivots) const {
    Matrix m = *this;
    std::vector<int> piv;
    int row = 0;
    for (int col = 0; col < c_ && row < r_; ++col) {
        int p = -1;
        for (int i = row; i < r_; ++i)
            if (!m(i, col).is_zero()) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < c_; ++j) std::swap(m(p, j), m(row, j));
        Scalar inv = m(row, col).inverse();
        for (int j = col; j < c_; ++j) m(row, j) *= inv;
        for (int i = 0; i < r_; ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            Scalar f = m(i, col);
            for (int j = col; j < c_; ++j) m(i, j) -= f * m(row, j);
        }
        piv.push_back(col);
        ++row;
    }
    if (pivots) *pivots = piv;
    return m;
}

int Matrix::rank() const {
    std::vector<int> piv;
    rref(&piv);
    return static_cast<int>(piv.size());
}

std::vector<std::vector<Scalar>> Matrix::nullspace() const {
    std::vector<int> piv;
    Matrix m = rref(&piv);
    std::vector<bool> is_pivot(c_, false);
    for (int p : piv) is_pivot[p] = true;
    std::vector<std::vector<Scalar>> basis;
    for (int f = 0; f < c_; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Scalar> v(c_);
        v[f] = Scalar(1);
        for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m(static_cast<int>(k), f);
        basis.push_back(std::move(v));
    }
    return basis;
}

Matrix Matrix::inverse() const {
    if (r_ != c_) throw PreconditionError("inverse of a non-square matrix");
    Matrix aug(r_, 2 * c_);
    for (int i = 0; i < r_; ++i) {
        for (int j = 0; j < c_; ++j) aug(i, j) = (*this)(i, j);
        aug(i, c_ + i) = Scalar(1);
    }
    std::vector<int> piv;
    Matrix red = aug.rref(&piv);
    if (static_cast<int>(piv.size()) < r_ || piv[r_ - 1] >= c_) throw PreconditionError("singular matrix");
    Matrix inv(r_, c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) inv(i, j) = red(i, c_ + j);
    return inv;
}

bool solve_linear(const Matrix& m, const std::vector<Scalar>& b, std::vector<Scalar>& x) {
    Matrix aug(m.rows(), m.cols() + 1);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    std::vector<int> piv;
    Matrix red = aug.rref(&piv);
    if (!piv.empty() && piv.back() == m.cols()) return false;
    x.assign(m.cols(), Scalar(0));
    for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = red(static_cast<int>(k), m.cols());
    return true;
}

}  // namespace cotame
