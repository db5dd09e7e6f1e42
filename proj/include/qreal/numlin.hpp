// Copyright 2026 The qreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex linear algebra on small Hilbert spaces C^n.
//
// Tensor convention: system factor first. For C^n (x) C^k the basis index
// (i, a) flattens to i * k + a.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qreal/errors.hpp"

namespace qreal {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
/// Orthonormal list of column vectors.
using Basis = std::vector<CVector>;

struct ToleranceConfig {
    double eq_tol = 1e-9;
    double eig_cluster_tol = 1e-8;
    double rank_tol = 1e-10;

    void validate() const {
        if (!(eq_tol > 0) || !(eig_cluster_tol > 0) || !(rank_tol > 0)) {
            throw Error(ErrorKind::InvalidArgument, "tolerances must be strictly positive");
        }
        if (eq_tol < rank_tol) {
            throw Error(ErrorKind::InvalidArgument, "eq_tol must be >= rank_tol");
        }
    }
};

class Matrix {
   public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }

    Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows) {
            if (row.size() != cols_) {
                throw Error(ErrorKind::DimMismatch, "ragged matrix literal");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) {
        return Matrix(rows, cols);
    }

    static Matrix diagonal(std::span<const double> values) {
        Matrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    static Matrix diagonal(std::initializer_list<double> values) {
        return diagonal(std::span<const double>(values.begin(), values.size()));
    }

    /// Matrix whose j-th column is columns[j]; `rows` is used when the list is empty.
    static Matrix from_columns(const std::vector<CVector> &columns, std::size_t rows) {
        Matrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows) {
                throw Error(ErrorKind::DimMismatch, "column length differs from row count");
            }
            for (std::size_t i = 0; i < rows; ++i) {
                m(i, j) = columns[j][i];
            }
        }
        return m;
    }

    std::size_t rows() const noexcept {
        return rows_;
    }
    std::size_t cols() const noexcept {
        return cols_;
    }
    bool is_square() const noexcept {
        return rows_ == cols_;
    }

    cplx &operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    const cplx &operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    std::span<const cplx> data() const noexcept {
        return data_;
    }

    CVector column(std::size_t j) const {
        CVector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            v[i] = (*this)(i, j);
        }
        return v;
    }

    Matrix adjoint() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                r(j, i) = std::conj((*this)(i, j));
            }
        }
        return r;
    }

    cplx trace() const {
        cplx t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const cplx &z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    Matrix &operator+=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += other.data_[i];
        }
        return *this;
    }

    Matrix &operator-=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= other.data_[i];
        }
        return *this;
    }

    Matrix &operator*=(cplx s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix &b) {
        a += b;
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix &b) {
        a -= b;
        return a;
    }
    friend Matrix operator*(Matrix a, cplx s) {
        a *= s;
        return a;
    }
    friend Matrix operator*(cplx s, Matrix a) {
        a *= s;
        return a;
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        if (a.cols_ != b.rows_) {
            throw Error(ErrorKind::DimMismatch,
                        "cannot multiply " + a.shape_string() + " by " + b.shape_string());
        }
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const cplx ail = a(i, l);
                if (ail == cplx{}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    r(i, j) += ail * b(l, j);
                }
            }
        }
        return r;
    }

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

   private:
    void require_same_shape(const Matrix &other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw Error(ErrorKind::DimMismatch, "shape " + shape_string() + " vs " + other.shape_string());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline void require_square(const Matrix &m, const char *what) {
    if (!m.is_square()) {
        throw Error(ErrorKind::NotSquare, std::string(what) + " is " + m.shape_string());
    }
}

// ---------------------------------------------------------------------------
// Vectors

/// Conjugate-linear in the first argument.
inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimMismatch, "inner product of vectors with different lengths");
    }
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

inline double norm(std::span<const cplx> v) {
    double s = 0;
    for (const auto &z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

inline CVector operator-(const CVector &a, const CVector &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimMismatch, "vector difference with different lengths");
    }
    CVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] - b[i];
    }
    return r;
}

inline CVector operator+(const CVector &a, const CVector &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimMismatch, "vector sum with different lengths");
    }
    CVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] + b[i];
    }
    return r;
}

inline CVector operator*(cplx s, CVector v) {
    for (auto &z : v) {
        z *= s;
    }
    return v;
}

inline CVector matvec(const Matrix &m, std::span<const cplx> v) {
    if (m.cols() != v.size()) {
        throw Error(ErrorKind::DimMismatch,
                    "cannot apply " + m.shape_string() + " to vector of length " + std::to_string(v.size()));
    }
    CVector r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx s = 0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            s += m(i, j) * v[j];
        }
        r[i] = s;
    }
    return r;
}

/// |a><b|
inline Matrix outer(std::span<const cplx> a, std::span<const cplx> b) {
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

/// <v|X|v>
inline cplx expectation(const Matrix &x, std::span<const cplx> v) {
    return inner(v, matvec(x, v));
}

/// Pure state: a vector normalized within tolerance, stored exactly normalized.
class UnitVector {
   public:
    explicit UnitVector(CVector amplitudes, double tol = ToleranceConfig{}.eq_tol) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) {
            throw Error(ErrorKind::InvalidArgument, "state vector must have positive dimension");
        }
        for (const auto &z : amps_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw Error(ErrorKind::InvalidArgument, "state vector has non-finite amplitude");
            }
        }
        const double n = norm(amps_);
        if (std::abs(n - 1.0) > tol) {
            throw Error(ErrorKind::NotNormalized, "state norm " + std::to_string(n) + " is not 1");
        }
        for (auto &z : amps_) {
            z /= n;
        }
    }

    /// Rescales any nonzero vector to unit length.
    static UnitVector normalized(CVector v) {
        const double n = norm(v);
        if (!(n > 0) || !std::isfinite(n)) {
            throw Error(ErrorKind::NotNormalized, "cannot normalize a zero or non-finite vector");
        }
        for (auto &z : v) {
            z /= n;
        }
        return UnitVector(std::move(v));
    }

    static UnitVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw Error(ErrorKind::InvalidArgument, "basis index out of range");
        }
        CVector v(dim);
        v[index] = 1.0;
        return UnitVector(std::move(v));
    }

    std::size_t dim() const noexcept {
        return amps_.size();
    }
    const CVector &vec() const noexcept {
        return amps_;
    }
    std::span<const cplx> amplitudes() const noexcept {
        return amps_;
    }
    cplx operator[](std::size_t i) const {
        return amps_[i];
    }

   private:
    CVector amps_;
};

// ---------------------------------------------------------------------------
// Norms and comparisons

inline double frobenius_norm(const Matrix &m) {
    return norm(m.data());
}

/// ||X - Y||_F <= tol * max(1, ||X||_F, ||Y||_F)
inline bool approx_equal(const Matrix &x, const Matrix &y, double tol) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        return false;
    }
    const double scale = std::max({1.0, frobenius_norm(x), frobenius_norm(y)});
    return frobenius_norm(x - y) <= tol * scale;
}

inline bool approx_equal(std::span<const cplx> x, std::span<const cplx> y, double tol) {
    if (x.size() != y.size()) {
        return false;
    }
    double diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff += std::norm(x[i] - y[i]);
    }
    return std::sqrt(diff) <= tol * std::max({1.0, norm(x), norm(y)});
}

inline Matrix hermitian_part(const Matrix &m) {
    require_square(m, "matrix");
    Matrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
        }
    }
    return r;
}

/// ||H - H^dagger||_F <= tol * ||H||_F
inline bool is_hermitian(const Matrix &h, double tol) {
    if (!h.is_square()) {
        return false;
    }
    double diff = 0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        for (std::size_t j = i + 1; j < h.cols(); ++j) {
            diff += 2 * std::norm(h(i, j) - std::conj(h(j, i)));
        }
        diff += std::norm(h(i, i) - std::conj(h(i, i)));
    }
    return std::sqrt(diff) <= tol * frobenius_norm(h);
}

inline bool is_unitary(const Matrix &u, double tol) {
    if (!u.is_square()) {
        return false;
    }
    return frobenius_norm(u.adjoint() * u - Matrix::identity(u.rows())) <= tol;
}

/// Largest deviation of the Gram matrix of `vectors` from the identity.
inline double orthonormality_defect(const std::vector<CVector> &vectors) {
    double worst = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i; j < vectors.size(); ++j) {
            const cplx g = inner(vectors[i], vectors[j]);
            worst = std::max(worst, std::abs(g - (i == j ? cplx(1.0) : cplx(0.0))));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic complex Jacobi)

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j belongs to values[j]
};

namespace detail {

/// Jacobi sweeps on an exactly Hermitian working copy.
inline EigenDecomposition jacobi_eigh(Matrix a) {
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double scale = frobenius_norm(a);
    const double eps = std::numeric_limits<double>::epsilon();
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) <= 4.0 * eps * scale || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Skip rotations that cannot change the diagonal in floating point.
                if (sweep > 3 && std::abs(app) + 100.0 * mag == std::abs(app) &&
                    std::abs(aqq) + 100.0 * mag == std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const cplx phase = apq / mag;  // e^{i phi}
                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                const cplx jqp = -s * std::conj(phase);
                const cplx jqq = c * std::conj(phase);

                // A <- A J (columns p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp + jqp * akq;
                    a(k, q) = s * akp + jqq * akq;
                }
                // A <- J^dagger A (rows p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(jqp) * aqk;
                    a(q, k) = s * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                // V <- V J
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp + jqp * vkq;
                    v(k, q) = s * vkp + jqq * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    EigenDecomposition result{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        result.values[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) {
            result.vectors(i, j) = v(i, order[j]);
        }
    }
    return result;
}

}  // namespace detail

/// Eigenvalues ascending, eigenvectors as columns of a unitary matrix.
/// Throws NotSquare / NotHermitian when the input is not (numerically) Hermitian.
inline EigenDecomposition eigh(const Matrix &h, const ToleranceConfig &tol = {}) {
    require_square(h, "eigh input");
    if (!h.is_finite()) {
        throw Error(ErrorKind::InvalidArgument, "eigh input has non-finite entries");
    }
    if (!is_hermitian(h, tol.eq_tol)) {
        throw Error(ErrorKind::NotHermitian, "eigh input deviates from its adjoint");
    }
    return detail::jacobi_eigh(hermitian_part(h));
}

/// Spectral norm.
inline double operator_norm(const Matrix &m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return 0.0;
    }
    const auto eig = detail::jacobi_eigh(hermitian_part(m.adjoint() * m));
    return std::sqrt(std::max(0.0, eig.values.back()));
}

/// Singular values in descending order, via the Hermitian dilation [[0, M], [M^dagger, 0]],
/// which keeps absolute accuracy near zero.
inline std::vector<double> singular_values(const Matrix &m) {
    const std::size_t r = m.rows();
    const std::size_t c = m.cols();
    Matrix d(r + c, r + c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            d(i, r + j) = m(i, j);
            d(r + j, i) = std::conj(m(i, j));
        }
    }
    auto eig = detail::jacobi_eigh(std::move(d));
    std::vector<double> values(eig.values.rbegin(), eig.values.rbegin() + std::min(r, c));
    for (auto &x : values) {
        x = std::max(0.0, x);
    }
    return values;
}

// ---------------------------------------------------------------------------
// Subspaces

namespace detail {

/// Modified Gram-Schmidt, two passes; drops vectors that collapse below `drop`.
inline Basis orthonormalize(const std::vector<CVector> &vectors, double drop = 1e-12) {
    Basis out;
    for (const auto &v : vectors) {
        CVector w = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : out) {
                const cplx proj = inner(b, w);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] -= proj * b[i];
                }
            }
        }
        const double n = norm(w);
        if (n > drop) {
            for (auto &z : w) {
                z /= n;
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

inline double rank_cutoff(double largest, const ToleranceConfig &tol) {
    return tol.rank_tol * std::max(1.0, largest);
}

inline void require_orthonormal(const Basis &basis, std::size_t dim, const ToleranceConfig &tol) {
    for (const auto &v : basis) {
        if (v.size() != dim) {
            throw Error(ErrorKind::DimMismatch, "basis vectors have inconsistent length");
        }
    }
    if (orthonormality_defect(basis) > tol.eq_tol) {
        throw Error(ErrorKind::NotOrthonormalInput, "basis is not orthonormal");
    }
}

}  // namespace detail

/// Sum of |v><v| over an orthonormal list; `dim` is used when the list is empty.
inline Matrix projector_onto(const Basis &basis, std::size_t dim) {
    Matrix p(dim, dim);
    for (const auto &v : basis) {
        if (v.size() != dim) {
            throw Error(ErrorKind::DimMismatch, "basis vector length differs from dim");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                p(i, j) += v[i] * std::conj(v[j]);
            }
        }
    }
    return p;
}

/// Orthonormal basis of the numerical range of M. Values below
/// rank_tol * max(1, largest) count as zero.
inline Basis range_basis(const Matrix &m, const ToleranceConfig &tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) {
        return {};
    }
    Basis out;
    const bool hermitian = m.is_square() && is_hermitian(m, 1e-14);
    if (hermitian) {
        const auto eig = detail::jacobi_eigh(hermitian_part(m));
        double largest = 0;
        for (double x : eig.values) {
            largest = std::max(largest, std::abs(x));
        }
        const double cutoff = detail::rank_cutoff(largest, tol);
        for (std::size_t j = 0; j < eig.values.size(); ++j) {
            if (std::abs(eig.values[j]) > cutoff) {
                out.push_back(eig.vectors.column(j));
            }
        }
    } else {
        const std::size_t r = m.rows();
        const std::size_t c = m.cols();
        Matrix d(r + c, r + c);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                d(i, r + j) = m(i, j);
                d(r + j, i) = std::conj(m(i, j));
            }
        }
        const auto eig = detail::jacobi_eigh(std::move(d));
        const double cutoff = detail::rank_cutoff(std::max(0.0, eig.values.back()), tol);
        for (std::size_t j = 0; j < eig.values.size(); ++j) {
            if (eig.values[j] > cutoff) {
                CVector u(r);
                for (std::size_t i = 0; i < r; ++i) {
                    u[i] = eig.vectors(i, j);
                }
                out.push_back(std::move(u));
            }
        }
    }
    return detail::orthonormalize(out, 1e-6);
}

/// Orthonormal basis of the kernel of a Hermitian matrix (eigenvalues within
/// `cutoff` of zero).
inline Basis hermitian_kernel(const Matrix &h, double cutoff) {
    const auto eig = detail::jacobi_eigh(hermitian_part(h));
    Basis out;
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        if (std::abs(eig.values[j]) <= cutoff) {
            out.push_back(eig.vectors.column(j));
        }
    }
    return out;
}

/// span(A) and span(B) intersected: eigenvectors of P_A + P_B at eigenvalue 2
/// (within eig_cluster_tol).
inline Basis subspace_intersection(const Basis &a, const Basis &b, const ToleranceConfig &tol = {}) {
    if (a.empty() || b.empty()) {
        return {};
    }
    const std::size_t dim = a.front().size();
    detail::require_orthonormal(a, dim, tol);
    detail::require_orthonormal(b, dim, tol);
    const Matrix sum = projector_onto(a, dim) + projector_onto(b, dim);
    const auto eig = detail::jacobi_eigh(sum);
    Basis out;
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        if (eig.values[j] >= 2.0 - tol.eig_cluster_tol) {
            out.push_back(eig.vectors.column(j));
        }
    }
    return out;
}

/// Largest principal angle between two subspaces; pi/2 when dimensions differ.
inline double subspace_distance(const Basis &a, const Basis &b, std::size_t dim) {
    if (a.size() != b.size()) {
        return std::acos(0.0);
    }
    const Matrix diff = projector_onto(a, dim) - projector_onto(b, dim);
    const auto eig = detail::jacobi_eigh(diff);
    double largest = 0;
    for (double x : eig.values) {
        largest = std::max(largest, std::abs(x));
    }
    return std::asin(std::min(1.0, largest));
}

// ---------------------------------------------------------------------------
// Tensor products and probe compression

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return r;
}

inline CVector kron(std::span<const cplx> a, std::span<const cplx> b) {
    CVector r(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            r[i * b.size() + k] = a[i] * b[k];
        }
    }
    return r;
}

/// <xi| X |xi> as an operator on the system factor C^n of C^n (x) C^k.
inline Matrix probe_compress(const Matrix &x, std::size_t sys_dim, std::size_t probe_dim, const UnitVector &xi) {
    if (x.rows() != sys_dim * probe_dim || x.cols() != sys_dim * probe_dim) {
        throw Error(ErrorKind::DimMismatch, "operator " + x.shape_string() + " does not act on C^" +
                                                std::to_string(sys_dim) + " (x) C^" + std::to_string(probe_dim));
    }
    if (xi.dim() != probe_dim) {
        throw Error(ErrorKind::DimMismatch, "probe state dimension differs from probe_dim");
    }
    Matrix r(sys_dim, sys_dim);
    for (std::size_t i = 0; i < sys_dim; ++i) {
        for (std::size_t j = 0; j < sys_dim; ++j) {
            cplx s = 0;
            for (std::size_t a = 0; a < probe_dim; ++a) {
                const cplx left = std::conj(xi[a]);
                if (left == cplx{}) {
                    continue;
                }
                for (std::size_t b = 0; b < probe_dim; ++b) {
                    s += left * x(i * probe_dim + a, j * probe_dim + b) * xi[b];
                }
            }
            r(i, j) = s;
        }
    }
    return r;
}

/// exp(i H) for Hermitian H.
inline Matrix expi_hermitian(const Matrix &h, const ToleranceConfig &tol = {}) {
    const auto eig = eigh(h, tol);
    const std::size_t n = h.rows();
    Matrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx phase = std::polar(1.0, eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = eig.vectors(i, k) * phase;
            for (std::size_t j = 0; j < n; ++j) {
                r(i, j) += vik * std::conj(eig.vectors(j, k));
            }
        }
    }
    return r;
}

}  // namespace qreal
