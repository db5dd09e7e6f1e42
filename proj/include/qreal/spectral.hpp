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

// Observables and their spectral resolutions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qreal/errors.hpp"
#include "qreal/lattice.hpp"
#include "qreal/numlin.hpp"

namespace qreal {

/// Hermitian matrix with a display name.
class Observable {
   public:
    explicit Observable(const Matrix &m, std::string name = "", const ToleranceConfig &tol = {})
        : name_(std::move(name)) {
        require_square(m, "observable");
        if (!m.is_finite()) {
            throw Error(ErrorKind::InvalidArgument, "observable has non-finite entries");
        }
        if (!is_hermitian(m, tol.eq_tol)) {
            throw Error(ErrorKind::NotHermitian, "observable '" + name_ + "' is not Hermitian");
        }
        matrix_ = hermitian_part(m);
    }

    const Matrix &matrix() const noexcept {
        return matrix_;
    }
    const std::string &name() const noexcept {
        return name_;
    }
    std::size_t dim() const noexcept {
        return matrix_.rows();
    }

   private:
    Matrix matrix_;
    std::string name_;
};

struct SpectralEntry {
    double value;
    Projection projection;
};

/// Distinct eigenvalues in ascending order with their eigenprojections.
struct SpectralFamily {
    std::size_t dim = 0;
    std::vector<SpectralEntry> entries;

    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(entries.size());
        for (const auto &e : entries) {
            v.push_back(e.value);
        }
        return v;
    }

    /// E({value}); zero when value is off the spectrum.
    Projection projection_for(double value, const ToleranceConfig &tol = {}) const {
        for (const auto &e : entries) {
            if (std::abs(e.value - value) <= tol.eig_cluster_tol) {
                return e.projection;
            }
        }
        return Projection::zero(dim);
    }

    Matrix reconstruct() const {
        Matrix m(dim, dim);
        for (const auto &e : entries) {
            m += e.projection.matrix() * cplx(e.value);
        }
        return m;
    }
};

/// Finite real-to-real map given as (input, output) pairs.
using ValueMap = std::vector<std::pair<double, double>>;

inline std::optional<double> lookup(const ValueMap &f, double x, const ToleranceConfig &tol = {}) {
    for (const auto &[in, out] : f) {
        if (std::abs(in - x) <= tol.eig_cluster_tol) {
            return out;
        }
    }
    return std::nullopt;
}

namespace detail {

/// Groups sorted values into single-linkage clusters (gap > threshold splits).
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_sorted(std::span<const double> sorted,
                                                                       double threshold) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i] - sorted[i - 1] > threshold) {
            groups.emplace_back(start, i);
            start = i;
        }
    }
    if (sorted.empty()) {
        groups.clear();
    }
    return groups;
}

}  // namespace detail

inline SpectralFamily spectral_family(const Observable &a, const ToleranceConfig &tol = {}) {
    const auto eig = detail::jacobi_eigh(a.matrix());
    SpectralFamily family{a.dim(), {}};
    for (const auto &[begin, end] : detail::cluster_sorted(eig.values, tol.eig_cluster_tol)) {
        double mean = 0;
        Basis vectors;
        for (std::size_t j = begin; j < end; ++j) {
            mean += eig.values[j];
            vectors.push_back(eig.vectors.column(j));
        }
        mean /= static_cast<double>(end - begin);
        family.entries.push_back({mean, Projection::onto(vectors, a.dim())});
    }
    return family;
}

/// Sum of eigenprojections whose eigenvalue lies within eig_cluster_tol of some listed value.
inline Projection spectral_projection(const SpectralFamily &family, std::span<const double> values,
                                      const ToleranceConfig &tol = {}) {
    Basis vectors;
    for (const auto &e : family.entries) {
        const bool hit = std::any_of(values.begin(), values.end(),
                                     [&](double v) { return std::abs(v - e.value) <= tol.eig_cluster_tol; });
        if (hit) {
            vectors.insert(vectors.end(), e.projection.basis().begin(), e.projection.basis().end());
        }
    }
    return Projection::onto(vectors, family.dim);
}

inline Projection spectral_projection(const Observable &a, std::span<const double> values,
                                      const ToleranceConfig &tol = {}) {
    return spectral_projection(spectral_family(a, tol), values, tol);
}

inline Projection spectral_projection(const Observable &a, std::initializer_list<double> values,
                                      const ToleranceConfig &tol = {}) {
    return spectral_projection(a, std::span<const double>(values.begin(), values.size()), tol);
}

/// Spectral family of f(A): entries with equal f-values merge.
inline SpectralFamily map_family(const SpectralFamily &family, const ValueMap &f, const ToleranceConfig &tol = {}) {
    std::vector<std::pair<double, const SpectralEntry *>> mapped;
    for (const auto &e : family.entries) {
        const auto out = lookup(f, e.value, tol);
        if (!out) {
            throw Error(ErrorKind::UnmappedEigenvalue,
                        "value map does not cover eigenvalue " + std::to_string(e.value));
        }
        mapped.emplace_back(*out, &e);
    }
    std::stable_sort(mapped.begin(), mapped.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
    std::vector<double> outputs;
    for (const auto &m : mapped) {
        outputs.push_back(m.first);
    }
    SpectralFamily result{family.dim, {}};
    for (const auto &[begin, end] : detail::cluster_sorted(outputs, tol.eig_cluster_tol)) {
        Basis vectors;
        for (std::size_t i = begin; i < end; ++i) {
            const auto &b = mapped[i].second->projection.basis();
            vectors.insert(vectors.end(), b.begin(), b.end());
        }
        result.entries.push_back({outputs[begin], Projection::onto(vectors, family.dim)});
    }
    return result;
}

/// f(A) = sum_i f(lambda_i) E_i.
inline Observable apply_value_map(const Observable &a, const ValueMap &f, const ToleranceConfig &tol = {}) {
    const SpectralFamily mapped = map_family(spectral_family(a, tol), f, tol);
    return Observable(mapped.reconstruct(), "f(" + a.name() + ")", tol);
}

struct ValueProbability {
    double value;
    double probability;
};

using Distribution = std::vector<ValueProbability>;

inline Distribution born_distribution(const SpectralFamily &family, const UnitVector &psi) {
    if (psi.dim() != family.dim) {
        throw Error(ErrorKind::DimMismatch, "state dimension differs from observable dimension");
    }
    Distribution d;
    for (const auto &e : family.entries) {
        const double n = norm(e.projection.apply(psi.amplitudes()));
        d.push_back({e.value, n * n});
    }
    return d;
}

/// p(lambda) = ||E^A(lambda) psi||^2 for each distinct eigenvalue.
inline Distribution born_distribution(const Observable &a, const UnitVector &psi, const ToleranceConfig &tol = {}) {
    if (psi.dim() != a.dim()) {
        throw Error(ErrorKind::DimMismatch, "state dimension differs from observable dimension");
    }
    return born_distribution(spectral_family(a, tol), psi);
}

}  // namespace qreal
