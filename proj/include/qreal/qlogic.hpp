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

// Truth values of formulas as projections, and the state-dependent notions
// built on them: truth in a state, value identity, joint determinateness and
// existence of joint probability distributions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qreal/errors.hpp"
#include "qreal/lattice.hpp"
#include "qreal/numlin.hpp"
#include "qreal/qlang.hpp"
#include "qreal/spectral.hpp"

namespace qreal {

/// Named observables on a common C^n. Immutable once built.
class Environment {
   public:
    Environment() = default;

    explicit Environment(std::map<std::string, Observable> bindings) : bindings_(std::move(bindings)) {
        for (const auto &[name, obs] : bindings_) {
            if (dim_ == 0) {
                dim_ = obs.dim();
            } else if (obs.dim() != dim_) {
                throw Error(ErrorKind::DimMismatch, "observable '" + name + "' acts on C^" +
                                                        std::to_string(obs.dim()) + ", expected C^" +
                                                        std::to_string(dim_));
            }
        }
    }

    const Observable &at(const std::string &name) const {
        const auto it = bindings_.find(name);
        if (it == bindings_.end()) {
            throw Error(ErrorKind::UnboundObservable, "observable '" + name + "' is not bound");
        }
        return it->second;
    }

    bool contains(const std::string &name) const {
        return bindings_.count(name) != 0;
    }

    std::size_t dim() const noexcept {
        return dim_;
    }

    const std::map<std::string, Observable> &bindings() const noexcept {
        return bindings_;
    }

   private:
    std::map<std::string, Observable> bindings_;
    std::size_t dim_ = 0;
};

struct TruthReport {
    Projection projection;
    double probability;
    bool holds;
};

namespace detail {

inline void require_same_dim(const Observable &a, const Observable &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimMismatch, "observables act on C^" + std::to_string(a.dim()) + " and C^" +
                                                std::to_string(b.dim()));
    }
}

inline void require_state_dim(std::size_t dim, const UnitVector &psi) {
    if (psi.dim() != dim) {
        throw Error(ErrorKind::DimMismatch,
                    "state has dimension " + std::to_string(psi.dim()) + ", expected " + std::to_string(dim));
    }
}

/// spec(A) union spec(B), merged within eig_cluster_tol, ascending.
inline std::vector<double> joint_values(const SpectralFamily &a, const SpectralFamily &b,
                                        const ToleranceConfig &tol) {
    std::vector<double> all = a.values();
    const auto bv = b.values();
    all.insert(all.end(), bv.begin(), bv.end());
    std::sort(all.begin(), all.end());
    std::vector<double> merged;
    for (const auto &[begin, end] : cluster_sorted(all, tol.eig_cluster_tol)) {
        merged.push_back(all[begin]);
    }
    return merged;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectral-family level primitives (shared with the measurement module)

/// [[A = B]] = meet over lambda of (E^A{lambda} <-> E^B{lambda}).
inline Projection value_identity(const SpectralFamily &a, const SpectralFamily &b, const ToleranceConfig &tol = {}) {
    if (a.dim != b.dim) {
        throw Error(ErrorKind::DimMismatch, "value identity of observables on different spaces");
    }
    Projection result = Projection::identity(a.dim);
    for (double lambda : detail::joint_values(a, b, tol)) {
        result = meet(result, biconditional(a.projection_for(lambda, tol), b.projection_for(lambda, tol), tol), tol);
        if (result.is_zero()) {
            break;
        }
    }
    return result;
}

/// max over lambda of ||E^A{lambda} psi - E^B{lambda} psi||
inline double correlation_defect(const SpectralFamily &a, const SpectralFamily &b, std::span<const cplx> psi,
                                 const ToleranceConfig &tol = {}) {
    double worst = 0;
    for (double lambda : detail::joint_values(a, b, tol)) {
        const CVector pa = a.projection_for(lambda, tol).apply(psi);
        const CVector pb = b.projection_for(lambda, tol).apply(psi);
        worst = std::max(worst, norm(pa - pb));
    }
    return worst;
}

/// com of every spectral projection of every family member.
inline Projection joint_determinacy_projection(std::span<const SpectralFamily> families,
                                               const ToleranceConfig &tol = {}) {
    std::vector<Projection> ps;
    for (const auto &f : families) {
        for (const auto &e : f.entries) {
            ps.push_back(e.projection);
        }
    }
    return com_family(ps, tol);
}

// ---------------------------------------------------------------------------
// Observable level

inline Projection value_identity(const Observable &a, const Observable &b, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(a, b);
    return value_identity(spectral_family(a, tol), spectral_family(b, tol), tol);
}

/// E^A{lambda} psi = E^B{lambda} psi for every lambda, within eq_tol.
inline bool perfectly_correlated(const Observable &a, const Observable &b, const UnitVector &psi,
                                 const ToleranceConfig &tol = {}) {
    detail::require_same_dim(a, b);
    detail::require_state_dim(a.dim(), psi);
    return correlation_defect(spectral_family(a, tol), spectral_family(b, tol), psi.amplitudes(), tol) <= tol.eq_tol;
}

/// Compositional truth value of a formula.
inline Projection truth_projection(const Formula &f, const Environment &env, const ToleranceConfig &tol = {}) {
    std::map<std::string, SpectralFamily> cache;
    auto family = [&](const std::string &name) -> const SpectralFamily & {
        auto it = cache.find(name);
        if (it == cache.end()) {
            it = cache.emplace(name, spectral_family(env.at(name), tol)).first;
        }
        return it->second;
    };
    for (const auto &name : referenced_observables(f)) {
        env.at(name);
    }

    auto eval = [&](auto &self, const Formula &g) -> Projection {
        return std::visit(
            [&](const auto &n) -> Projection {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Atom>) {
                    return spectral_projection(family(n.observable), n.values, tol);
                } else if constexpr (std::is_same_v<T, Not>) {
                    return complement(self(self, *n.operand));
                } else if constexpr (std::is_same_v<T, Binary>) {
                    const Projection l = self(self, *n.lhs);
                    const Projection r = self(self, *n.rhs);
                    switch (n.op) {
                        case BinaryOp::And:
                            return meet(l, r, tol);
                        case BinaryOp::Or:
                            return join(l, r, tol);
                        case BinaryOp::Sasaki:
                            return sasaki(l, r, tol);
                        case BinaryOp::Iff:
                            return biconditional(l, r, tol);
                    }
                    throw Error(ErrorKind::InvalidArgument, "unknown connective");
                } else if constexpr (std::is_same_v<T, Equal>) {
                    return value_identity(family(n.lhs), family(n.rhs), tol);
                } else {
                    std::vector<SpectralFamily> fams;
                    for (const auto &o : n.observables) {
                        fams.push_back(family(o));
                    }
                    return joint_determinacy_projection(fams, tol);
                }
            },
            g.node);
    };
    return eval(eval, f);
}

/// Truth of a formula in a pure state: psi in the range of its truth value.
inline TruthReport holds_in(const Formula &f, const Environment &env, const UnitVector &psi,
                            const ToleranceConfig &tol = {}) {
    detail::require_state_dim(env.dim(), psi);
    Projection p = truth_projection(f, env, tol);
    const CVector pv = p.apply(psi.amplitudes());
    const double probability = std::clamp(inner(psi.amplitudes(), pv).real(), 0.0, 1.0);
    const bool holds = norm(pv - psi.vec()) <= tol.eq_tol;
    return TruthReport{std::move(p), probability, holds};
}

struct JointDeterminacy {
    bool determinate;
    Projection projection;
};

inline JointDeterminacy jointly_determinate(std::span<const Observable> observables, const UnitVector &psi,
                                            const ToleranceConfig &tol = {}) {
    if (observables.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "joint determinateness needs at least two observables");
    }
    std::vector<SpectralFamily> fams;
    for (const auto &o : observables) {
        detail::require_same_dim(observables.front(), o);
        fams.push_back(spectral_family(o, tol));
    }
    detail::require_state_dim(observables.front().dim(), psi);
    Projection p = joint_determinacy_projection(fams, tol);
    const bool determinate = p.contains(psi.amplitudes(), tol.eq_tol);
    return JointDeterminacy{determinate, std::move(p)};
}

inline JointDeterminacy jointly_determinate(const Observable &a, const Observable &b, const UnitVector &psi,
                                            const ToleranceConfig &tol = {}) {
    const std::vector<Observable> obs{a, b};
    return jointly_determinate(obs, psi, tol);
}

/// Jointly determinate in no state: the commutator projection vanishes.
inline bool nowhere_commuting(const Observable &a, const Observable &b, const ToleranceConfig &tol = {}) {
    detail::require_same_dim(a, b);
    const std::vector<SpectralFamily> fams{spectral_family(a, tol), spectral_family(b, tol)};
    return joint_determinacy_projection(fams, tol).rank() == 0;
}

struct JointCandidate {
    double a_value;
    double b_value;
    double probability;
};

struct JpdResult {
    bool exists;
    std::vector<JointCandidate> candidate;
};

/// Candidate joint distribution <psi| E^A{lambda} ^ E^B{mu} |psi>; it is a
/// genuine joint distribution when it sums to one and reproduces both Born
/// marginals.
inline JpdResult jpd_exists(const Observable &a, const Observable &b, const UnitVector &psi,
                            const ToleranceConfig &tol = {}) {
    detail::require_same_dim(a, b);
    detail::require_state_dim(a.dim(), psi);
    const SpectralFamily fa = spectral_family(a, tol);
    const SpectralFamily fb = spectral_family(b, tol);
    JpdResult result{true, {}};
    std::vector<double> marginal_a(fa.entries.size(), 0.0);
    std::vector<double> marginal_b(fb.entries.size(), 0.0);
    double total = 0;
    for (std::size_t i = 0; i < fa.entries.size(); ++i) {
        for (std::size_t j = 0; j < fb.entries.size(); ++j) {
            const Projection m = meet(fa.entries[i].projection, fb.entries[j].projection, tol);
            const double p = m.is_zero() ? 0.0 : expectation(m.matrix(), psi.amplitudes()).real();
            result.candidate.push_back({fa.entries[i].value, fb.entries[j].value, p});
            marginal_a[i] += p;
            marginal_b[j] += p;
            total += p;
        }
    }
    bool ok = std::abs(total - 1.0) <= tol.eq_tol;
    const Distribution born_a = born_distribution(fa, psi);
    const Distribution born_b = born_distribution(fb, psi);
    for (std::size_t i = 0; i < born_a.size(); ++i) {
        ok = ok && std::abs(born_a[i].probability - marginal_a[i]) <= tol.eq_tol;
    }
    for (std::size_t j = 0; j < born_b.size(); ++j) {
        ok = ok && std::abs(born_b[j].probability - marginal_b[j]) <= tol.eq_tol;
    }
    result.exists = ok;
    return result;
}

}  // namespace qreal
