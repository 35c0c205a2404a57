#pragma once

#include "slnd/rational.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace slnd {

/// Small dense row-major matrix over an exact scalar (Int or Rat).
/// The float layer lives in Eigen; this type only carries the exact layer.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
    Mat(int rows, int cols, std::initializer_list<T> vals) : Mat(rows, cols) {
        if (int(vals.size()) != rows * cols) throw std::invalid_argument("Mat: initializer size mismatch");
        size_t i = 0;
        for (const T& v : vals) a_[i++] = v;
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    bool operator==(const Mat& o) const = default;

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }

    void negate_row(int i) {
        for (int c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
    }

    // row_i -= q * row_j
    void axpy_row(int i, int j, const T& q) {
        if (q == T(0)) return;
        for (int c = 0; c < cols_; ++c) (*this)(i, c) -= q * (*this)(j, c);
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

using IMat = Mat<Int>;
using QMat = Mat<Rat>;

template <class T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat<T> c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const T& aik = a(i, k);
            if (aik == T(0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline QMat to_rat(const IMat& m) {
    QMat q(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) q(i, j) = Rat(m(i, j));
    return q;
}

inline Eigen::MatrixXd to_eigen(const QMat& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) e(i, j) = to_double(m(i, j));
    return e;
}

inline Eigen::MatrixXd to_eigen(const IMat& m) { return to_eigen(to_rat(m)); }

inline QMat rat_from_eigen(const Eigen::MatrixXd& e) {
    QMat q(int(e.rows()), int(e.cols()));
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j) q(i, j) = rat_from_double(e(i, j));
    return q;
}

/// Exact determinant by Gaussian elimination with column pivoting.
Rat det_q(QMat m);

/// Exact inverse; throws std::domain_error on singular input.
QMat inverse_q(const QMat& m);

/// Rank over Q (destructive elimination on a copy).
int rank_q(QMat m);

/// True iff v lies in the rational row span of rows.
bool in_row_span_q(const QMat& rows, const QMat& v_row);

}  // namespace slnd
