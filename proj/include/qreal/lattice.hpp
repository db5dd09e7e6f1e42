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

// The lattice of orthogonal projections on C^n: orthocomplement, meet, join,
// Sasaki hook, biconditional and commutators.
//
// Every operation returns a freshly snapped projection (Hermitian, spectrum
// exactly {0, 1} up to rounding) so that deeply nested expressions do not
// accumulate drift.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qreal/errors.hpp"
#include "qreal/numlin.hpp"

namespace qreal {

class Projection {
   public:
    /// Validates idempotence and self-adjointness within eq_tol, then snaps.
    explicit Projection(const Matrix &m, const ToleranceConfig &tol = {}) {
        require_square(m, "projection");
        if (!m.is_finite()) {
            throw Error(ErrorKind::InvalidArgument, "projection has non-finite entries");
        }
        if (frobenius_norm(m - m.adjoint()) > tol.eq_tol) {
            throw Error(ErrorKind::NotProjection, "matrix is not self-adjoint");
        }
        if (frobenius_norm(m * m - m) > tol.eq_tol) {
            throw Error(ErrorKind::NotProjection, "matrix is not idempotent");
        }
        *this = snapped(m);
    }

    static Projection zero(std::size_t dim) {
        return Projection(Basis{}, dim);
    }

    static Projection identity(std::size_t dim) {
        Basis b;
        for (std::size_t i = 0; i < dim; ++i) {
            CVector e(dim);
            e[i] = 1.0;
            b.push_back(std::move(e));
        }
        return Projection(std::move(b), dim);
    }

    /// Projection onto span(vectors); the list need not be orthonormal.
    static Projection onto(const std::vector<CVector> &vectors, std::size_t dim) {
        for (const auto &v : vectors) {
            if (v.size() != dim) {
                throw Error(ErrorKind::DimMismatch, "spanning vector length differs from dim");
            }
        }
        return Projection(detail::orthonormalize(vectors, 1e-10), dim);
    }

    /// Spectral snap of a nearly-projection Hermitian matrix: eigenvalues >= 1/2 become 1.
    static Projection snapped(const Matrix &m) {
        require_square(m, "projection");
        const auto eig = detail::jacobi_eigh(hermitian_part(m));
        Basis b;
        for (std::size_t j = 0; j < eig.values.size(); ++j) {
            if (eig.values[j] >= 0.5) {
                b.push_back(eig.vectors.column(j));
            }
        }
        return Projection(std::move(b), m.rows());
    }

    std::size_t dim() const noexcept {
        return dim_;
    }
    std::size_t rank() const noexcept {
        return basis_.size();
    }
    bool is_zero() const noexcept {
        return basis_.empty();
    }
    bool is_identity() const noexcept {
        return basis_.size() == dim_;
    }
    const Matrix &matrix() const noexcept {
        return matrix_;
    }
    /// Orthonormal basis of the range.
    const Basis &basis() const noexcept {
        return basis_;
    }

    CVector apply(std::span<const cplx> v) const {
        return matvec(matrix_, v);
    }

    /// ||P v - v|| <= tol
    bool contains(std::span<const cplx> v, double tol) const {
        const CVector pv = apply(v);
        double d = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            d += std::norm(pv[i] - v[i]);
        }
        return std::sqrt(d) <= tol;
    }

   private:
    Projection(Basis basis, std::size_t dim)
        : dim_(dim), basis_(std::move(basis)), matrix_(projector_onto(basis_, dim)) {
    }

    std::size_t dim_ = 0;
    Basis basis_;
    Matrix matrix_;
};

inline bool approx_equal(const Projection &p, const Projection &q, double tol) {
    return p.dim() == q.dim() && approx_equal(p.matrix(), q.matrix(), tol);
}

namespace detail {

inline void require_same_dim(const Projection &p, const Projection &q) {
    if (p.dim() != q.dim()) {
        throw Error(ErrorKind::DimMismatch,
                    "projections act on C^" + std::to_string(p.dim()) + " and C^" + std::to_string(q.dim()));
    }
}

}  // namespace detail

/// I - P
inline Projection complement(const Projection &p) {
    return Projection::snapped(Matrix::identity(p.dim()) - p.matrix());
}

/// Projection onto ran P and ran Q intersected.
inline Projection meet(const Projection &p, const Projection &q, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(p, q);
    return Projection::onto(subspace_intersection(p.basis(), q.basis(), tol), p.dim());
}

inline Projection join(const Projection &p, const Projection &q, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(p, q);
    return complement(meet(complement(p), complement(q), tol));
}

/// Sasaki hook P ->_S Q = P^perp v (P ^ Q).
inline Projection sasaki(const Projection &p, const Projection &q, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(p, q);
    return join(complement(p), meet(p, q, tol), tol);
}

/// (P ->_S Q) ^ (Q ->_S P)
inline Projection biconditional(const Projection &p, const Projection &q, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(p, q);
    return meet(sasaki(p, q, tol), sasaki(q, p, tol), tol);
}

/// (P ^ Q) v (P ^ Q^perp) v (P^perp ^ Q) v (P^perp ^ Q^perp); its range is ker [P, Q].
inline Projection com_pair(const Projection &p, const Projection &q, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(p, q);
    const Projection pc = complement(p);
    const Projection qc = complement(q);
    return join(join(meet(p, q, tol), meet(p, qc, tol), tol), join(meet(pc, q, tol), meet(pc, qc, tol), tol), tol);
}

/// Projection onto the largest subspace invariant under every member on which
/// all members commute pairwise.
///
/// Starts from the joint kernel of all pairwise commutators and repeatedly
/// discards the part that some member maps out of the current subspace; this
/// stabilizes after at most dim rounds.
inline Projection com_family(std::span<const Projection> ps, const ToleranceConfig &tol = {}) {
    if (ps.empty()) {
        throw Error(ErrorKind::EmptyFamily, "commutator of an empty family");
    }
    const std::size_t dim = ps.front().dim();
    for (const auto &p : ps) {
        detail::require_same_dim(ps.front(), p);
    }

    // sum_{i<j} (i[P_i, P_j])^2 is positive semidefinite with kernel = joint commutator kernel.
    Matrix form(dim, dim);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const Matrix c = ps[i].matrix() * ps[j].matrix() - ps[j].matrix() * ps[i].matrix();
            form += c.adjoint() * c;
        }
    }
    Basis current = hermitian_kernel(form, tol.eig_cluster_tol);

    while (!current.empty()) {
        const Matrix b = Matrix::from_columns(current, dim);
        const Matrix outside = Matrix::identity(dim) - projector_onto(current, dim);
        Matrix leak(current.size(), current.size());
        for (const auto &p : ps) {
            const Matrix w = outside * p.matrix() * b;
            leak += w.adjoint() * w;
        }
        const Basis coeffs = hermitian_kernel(leak, tol.eig_cluster_tol);
        if (coeffs.size() == current.size()) {
            break;
        }
        Basis next;
        next.reserve(coeffs.size());
        for (const auto &c : coeffs) {
            next.push_back(matvec(b, c));
        }
        current = detail::orthonormalize(next, 1e-10);
    }
    return Projection::onto(current, dim);
}

inline Projection com_family(std::initializer_list<Projection> ps, const ToleranceConfig &tol = {}) {
    return com_family(std::span<const Projection>(ps.begin(), ps.size()), tol);
}

/// ran P contained in ran Q.
inline bool leq(const Projection &p, const Projection &q, double tol) {
    detail::require_same_dim(p, q);
    return frobenius_norm(q.matrix() * p.matrix() - p.matrix()) <= tol;
}

inline bool commutes(const Projection &p, const Projection &q, double tol) {
    detail::require_same_dim(p, q);
    return frobenius_norm(p.matrix() * q.matrix() - q.matrix() * p.matrix()) <= tol;
}

}  // namespace qreal
