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

// Indirect measurement models (probe state, coupling unitary, meter) and the
// quantities read off them: POVM effects, output statistics, rms noise and
// disturbance, and state-dependent precise / simultaneous measurement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qreal/errors.hpp"
#include "qreal/lattice.hpp"
#include "qreal/numlin.hpp"
#include "qreal/qlogic.hpp"
#include "qreal/spectral.hpp"

namespace qreal {

class MeasurementModel {
   public:
    MeasurementModel(std::size_t sys_dim, std::size_t probe_dim, UnitVector probe_state, Matrix coupling,
                     Observable meter, std::map<std::string, ValueMap> label_maps = {},
                     const ToleranceConfig &tol = {})
        : sys_dim_(sys_dim),
          probe_dim_(probe_dim),
          probe_state_(std::move(probe_state)),
          coupling_(std::move(coupling)),
          meter_(std::move(meter)),
          label_maps_(std::move(label_maps)) {
        if (sys_dim_ == 0 || probe_dim_ == 0) {
            throw Error(ErrorKind::InvalidArgument, "system and probe dimensions must be positive");
        }
        if (probe_state_.dim() != probe_dim_) {
            throw Error(ErrorKind::DimMismatch, "probe state dimension differs from probe_dim");
        }
        if (meter_.dim() != probe_dim_) {
            throw Error(ErrorKind::DimMismatch, "meter does not act on the probe space");
        }
        const std::size_t total = sys_dim_ * probe_dim_;
        if (coupling_.rows() != total || coupling_.cols() != total) {
            throw Error(ErrorKind::DimMismatch,
                        "coupling is " + coupling_.shape_string() + ", expected " + std::to_string(total) + "x" +
                            std::to_string(total));
        }
        if (!coupling_.is_finite() || !is_unitary(coupling_, tol.eq_tol)) {
            throw Error(ErrorKind::NotUnitary, "coupling is not unitary");
        }
        meter_family_ = spectral_family(meter_, tol);
        for (const auto &[name, f] : label_maps_) {
            for (const auto &e : meter_family_.entries) {
                if (!lookup(f, e.value, tol)) {
                    throw Error(ErrorKind::UnmappedEigenvalue, "label map '" + name +
                                                                   "' does not cover meter eigenvalue " +
                                                                   std::to_string(e.value));
                }
            }
        }
    }

    std::size_t sys_dim() const noexcept {
        return sys_dim_;
    }
    std::size_t probe_dim() const noexcept {
        return probe_dim_;
    }
    std::size_t total_dim() const noexcept {
        return sys_dim_ * probe_dim_;
    }
    const UnitVector &probe_state() const noexcept {
        return probe_state_;
    }
    const Matrix &coupling() const noexcept {
        return coupling_;
    }
    const Observable &meter() const noexcept {
        return meter_;
    }
    const SpectralFamily &meter_family() const noexcept {
        return meter_family_;
    }
    const std::map<std::string, ValueMap> &label_maps() const noexcept {
        return label_maps_;
    }

    const ValueMap &label_map(const std::string &name) const {
        const auto it = label_maps_.find(name);
        if (it == label_maps_.end()) {
            throw Error(ErrorKind::InvalidArgument, "model has no label map named '" + name + "'");
        }
        return it->second;
    }

    /// psi (x) xi
    CVector joint_state(const UnitVector &psi) const {
        if (psi.dim() != sys_dim_) {
            throw Error(ErrorKind::DimMismatch, "state has dimension " + std::to_string(psi.dim()) +
                                                    ", model system dimension is " + std::to_string(sys_dim_));
        }
        return kron(psi.amplitudes(), probe_state_.amplitudes());
    }

   private:
    std::size_t sys_dim_;
    std::size_t probe_dim_;
    UnitVector probe_state_;
    Matrix coupling_;
    Observable meter_;
    std::map<std::string, ValueMap> label_maps_;
    SpectralFamily meter_family_;
};

// ---------------------------------------------------------------------------
// Heisenberg-picture meter

/// Spectral family of O = U^dagger (1 (x) M) U, built by conjugating the
/// meter's eigenprojections so that spec(O) = spec(M) exactly.
inline SpectralFamily output_family(const MeasurementModel &model) {
    const std::size_t n = model.sys_dim();
    const Matrix u_dag = model.coupling().adjoint();
    SpectralFamily family{model.total_dim(), {}};
    for (const auto &e : model.meter_family().entries) {
        Basis vectors;
        for (std::size_t i = 0; i < n; ++i) {
            CVector ei(n);
            ei[i] = 1.0;
            for (const auto &b : e.projection.basis()) {
                vectors.push_back(matvec(u_dag, kron(ei, b)));
            }
        }
        family.entries.push_back({e.value, Projection::onto(vectors, model.total_dim())});
    }
    return family;
}

/// O = U^dagger (1 (x) M) U
inline Observable meter_output(const MeasurementModel &model) {
    const Matrix o = model.coupling().adjoint() * kron(Matrix::identity(model.sys_dim()), model.meter().matrix()) *
                     model.coupling();
    return Observable(hermitian_part(o), "O");
}

/// Spectral family of A (x) 1 on the joint space.
inline SpectralFamily extend_to_probe(const SpectralFamily &a, std::size_t probe_dim) {
    SpectralFamily out{a.dim * probe_dim, {}};
    for (const auto &e : a.entries) {
        Basis vectors;
        for (const auto &v : e.projection.basis()) {
            for (std::size_t b = 0; b < probe_dim; ++b) {
                CVector eb(probe_dim);
                eb[b] = 1.0;
                vectors.push_back(kron(v, eb));
            }
        }
        out.entries.push_back({e.value, Projection::onto(vectors, out.dim)});
    }
    return out;
}

struct PovmEffect {
    double outcome;
    Matrix effect;
};

/// Pi(m) = <xi| U^dagger (1 (x) E^M{m}) U |xi>
inline std::vector<PovmEffect> povm(const MeasurementModel &model) {
    std::vector<PovmEffect> effects;
    for (const auto &e : output_family(model).entries) {
        effects.push_back(
            {e.value, hermitian_part(probe_compress(e.projection.matrix(), model.sys_dim(), model.probe_dim(),
                                                    model.probe_state()))});
    }
    return effects;
}

/// p(m) = <psi| Pi(m) |psi>
inline Distribution output_distribution(const MeasurementModel &model, const UnitVector &psi) {
    if (psi.dim() != model.sys_dim()) {
        throw Error(ErrorKind::DimMismatch, "state dimension differs from model system dimension");
    }
    Distribution d;
    for (const auto &eff : povm(model)) {
        d.push_back({eff.outcome, std::max(0.0, expectation(eff.effect, psi.amplitudes()).real())});
    }
    return d;
}

/// p(m) = ||(1 (x) E^M{m}) U (psi (x) xi)||^2, computed on the full state vector.
inline Distribution output_distribution_statevector(const MeasurementModel &model, const UnitVector &psi) {
    const CVector out = matvec(model.coupling(), model.joint_state(psi));
    Distribution d;
    for (const auto &e : model.meter_family().entries) {
        const Matrix lifted = kron(Matrix::identity(model.sys_dim()), e.projection.matrix());
        const double n = norm(matvec(lifted, out));
        d.push_back({e.value, n * n});
    }
    return d;
}

/// Push a distribution forward through a value map (outcomes merged within eig_cluster_tol).
inline Distribution push_forward(const Distribution &d, const ValueMap &f, const ToleranceConfig &tol = {}) {
    Distribution out;
    for (const auto &vp : d) {
        const auto y = lookup(f, vp.value, tol);
        if (!y) {
            throw Error(ErrorKind::UnmappedEigenvalue, "value map does not cover outcome " + std::to_string(vp.value));
        }
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const ValueProbability &o) { return std::abs(o.value - *y) <= tol.eig_cluster_tol; });
        if (it == out.end()) {
            out.push_back({*y, vp.probability});
        } else {
            it->probability += vp.probability;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.value < b.value; });
    return out;
}

// ---------------------------------------------------------------------------
// Precise measurement in a state

struct CorrelationCertificate {
    double defect;
    bool passed;
};

namespace detail {

inline void require_system_observable(const MeasurementModel &model, const Observable &a) {
    if (a.dim() != model.sys_dim()) {
        throw Error(ErrorKind::DimMismatch, "observable '" + a.name() + "' acts on C^" + std::to_string(a.dim()) +
                                                ", model system is C^" + std::to_string(model.sys_dim()));
    }
}

inline CorrelationCertificate certify(const SpectralFamily &output, const SpectralFamily &a, const UnitVector &psi,
                                      const CVector &joint, const UnitVector &xi, const ToleranceConfig &tol) {
    double worst = 0;
    for (double lambda : joint_values(output, a, tol)) {
        const CVector lhs = output.projection_for(lambda, tol).apply(joint);
        const CVector rhs = kron(a.projection_for(lambda, tol).apply(psi.amplitudes()), xi.amplitudes());
        worst = std::max(worst, norm(lhs - rhs));
    }
    return {worst, worst <= tol.eq_tol};
}

}  // namespace detail

/// Perfect correlation between f(O) and A (x) 1 in psi (x) xi:
/// defect = max_lambda ||E^{f(O)}{lambda}(psi (x) xi) - (E^A{lambda} psi) (x) xi||.
inline CorrelationCertificate measures_in_state(const MeasurementModel &model, const Observable &a,
                                                const ValueMap &f, const UnitVector &psi,
                                                const ToleranceConfig &tol = {}) {
    detail::require_system_observable(model, a);
    const SpectralFamily output = map_family(output_family(model), f, tol);
    return detail::certify(output, spectral_family(a, tol), psi, model.joint_state(psi), model.probe_state(), tol);
}

/// epsilon = ||(f(O) - A (x) 1)(psi (x) xi)||
inline double rms_noise(const MeasurementModel &model, const Observable &a, const ValueMap &f,
                        const UnitVector &psi, const ToleranceConfig &tol = {}) {
    detail::require_system_observable(model, a);
    const Matrix fo = map_family(output_family(model), f, tol).reconstruct();
    const Matrix a1 = kron(a.matrix(), Matrix::identity(model.probe_dim()));
    return norm(matvec(fo - a1, model.joint_state(psi)));
}

/// eta = ||(U^dagger (B (x) 1) U - B (x) 1)(psi (x) xi)||
inline double rms_disturbance(const MeasurementModel &model, const Observable &b, const UnitVector &psi) {
    detail::require_system_observable(model, b);
    const Matrix b1 = kron(b.matrix(), Matrix::identity(model.probe_dim()));
    const Matrix evolved = model.coupling().adjoint() * b1 * model.coupling();
    return norm(matvec(evolved - b1, model.joint_state(psi)));
}

inline double standard_deviation(const Observable &a, const UnitVector &psi) {
    const CVector apsi = matvec(a.matrix(), psi.amplitudes());
    const double mean = inner(psi.amplitudes(), apsi).real();
    const double second = inner(apsi, apsi).real();
    return std::sqrt(std::max(0.0, second - mean * mean));
}

struct UncertaintyReport {
    double epsilon;
    double eta;
    double sigma_a;
    double sigma_b;
    double lhs;    // eps*eta + eps*sigma_b + sigma_a*eta
    double bound;  // |<psi|[A, B]|psi>| / 2
    bool satisfied;
};

/// Universal uncertainty relation
/// eps(A) eta(B) + eps(A) sigma(B) + sigma(A) eta(B) >= |<[A, B]>| / 2.
inline UncertaintyReport uncertainty_report(const MeasurementModel &model, const Observable &a, const ValueMap &f,
                                            const Observable &b, const UnitVector &psi,
                                            const ToleranceConfig &tol = {}) {
    detail::require_system_observable(model, a);
    detail::require_system_observable(model, b);
    UncertaintyReport r{};
    r.epsilon = rms_noise(model, a, f, psi, tol);
    r.eta = rms_disturbance(model, b, psi);
    r.sigma_a = standard_deviation(a, psi);
    r.sigma_b = standard_deviation(b, psi);
    r.lhs = r.epsilon * r.eta + r.epsilon * r.sigma_b + r.sigma_a * r.eta;
    const Matrix comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    r.bound = 0.5 * std::abs(expectation(comm, psi.amplitudes()));
    r.satisfied = r.lhs >= r.bound - 1e-9;
    return r;
}

struct SimultaneousReport {
    CorrelationCertificate cert_a;
    CorrelationCertificate cert_b;
    bool both;
};

/// One apparatus, two classical post-processings of the same meter reading.
inline SimultaneousReport simultaneously_measures(const MeasurementModel &model, const Observable &a,
                                                  const ValueMap &fa, const Observable &b, const ValueMap &fb,
                                                  const UnitVector &psi, const ToleranceConfig &tol = {}) {
    SimultaneousReport r{measures_in_state(model, a, fa, psi, tol), measures_in_state(model, b, fb, psi, tol), false};
    r.both = r.cert_a.passed && r.cert_b.passed;
    return r;
}

// ---------------------------------------------------------------------------
// Contextual report

struct StateTruth {
    double probability;
    bool holds;
};

struct ContextReport {
    std::string a_name;
    std::string b_name;
    CorrelationCertificate cert_a;
    CorrelationCertificate cert_b;
    bool both_measured;
    bool nowhere_commuting;
    bool jointly_determinate;
    std::size_t com_rank;
    JpdResult jpd;
    StateTruth equal_in_state;       // [A = B] at psi
    StateTruth output_equals_a;      // [fA(O) = A (x) 1] at psi (x) xi
    StateTruth output_equals_b;      // [fB(O) = B (x) 1] at psi (x) xi
    StateTruth extended_equal;       // [A (x) 1 = B (x) 1] at psi (x) xi
    bool non_transitivity_exhibited;
};

namespace detail {

inline StateTruth truth_at(const Projection &p, std::span<const cplx> v, const ToleranceConfig &tol) {
    const CVector pv = p.apply(v);
    const double prob = std::clamp(inner(v, pv).real(), 0.0, 1.0);
    double d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        d += std::norm(pv[i] - v[i]);
    }
    return {prob, std::sqrt(d) <= tol.eq_tol};
}

}  // namespace detail

inline ContextReport context_report(const MeasurementModel &model, const Observable &a, const ValueMap &fa,
                                    const Observable &b, const ValueMap &fb, const UnitVector &psi,
                                    const ToleranceConfig &tol = {}) {
    detail::require_system_observable(model, a);
    detail::require_system_observable(model, b);
    detail::require_state_dim(model.sys_dim(), psi);

    const SpectralFamily fam_a = spectral_family(a, tol);
    const SpectralFamily fam_b = spectral_family(b, tol);
    const SpectralFamily output = output_family(model);
    const SpectralFamily out_a = map_family(output, fa, tol);
    const SpectralFamily out_b = map_family(output, fb, tol);
    const CVector joint = model.joint_state(psi);

    ContextReport r{};
    r.a_name = a.name();
    r.b_name = b.name();
    r.cert_a = detail::certify(out_a, fam_a, psi, joint, model.probe_state(), tol);
    r.cert_b = detail::certify(out_b, fam_b, psi, joint, model.probe_state(), tol);
    r.both_measured = r.cert_a.passed && r.cert_b.passed;

    const std::vector<SpectralFamily> pair{fam_a, fam_b};
    const Projection com = joint_determinacy_projection(pair, tol);
    r.com_rank = com.rank();
    r.nowhere_commuting = com.rank() == 0;
    r.jointly_determinate = com.contains(psi.amplitudes(), tol.eq_tol);
    r.jpd = jpd_exists(a, b, psi, tol);
    r.equal_in_state = detail::truth_at(value_identity(fam_a, fam_b, tol), psi.amplitudes(), tol);

    const SpectralFamily ext_a = extend_to_probe(fam_a, model.probe_dim());
    const SpectralFamily ext_b = extend_to_probe(fam_b, model.probe_dim());
    r.output_equals_a = detail::truth_at(value_identity(out_a, ext_a, tol), joint, tol);
    r.output_equals_b = detail::truth_at(value_identity(out_b, ext_b, tol), joint, tol);
    r.extended_equal = detail::truth_at(value_identity(ext_a, ext_b, tol), joint, tol);
    r.non_transitivity_exhibited = r.output_equals_a.holds && r.output_equals_b.holds && !r.extended_equal.holds;
    return r;
}

/// Human-readable rendering of a context report.
inline std::string render_text(const ContextReport &r) {
    auto yes = [](bool b) { return b ? "yes" : "no"; };
    const std::string a = r.a_name.empty() ? "A" : r.a_name;
    const std::string b = r.b_name.empty() ? "B" : r.b_name;
    std::ostringstream out;
    out.precision(6);
    out << "Context report for " << a << " and " << b << "\n";
    out << "  apparatus measures " << a << " in this state: " << yes(r.cert_a.passed) << " (defect " << r.cert_a.defect
        << ")\n";
    out << "  apparatus measures " << b << " in this state: " << yes(r.cert_b.passed) << " (defect " << r.cert_b.defect
        << ")\n";
    out << "  simultaneous measurement: " << yes(r.both_measured) << "\n";
    out << "  nowhere commuting: " << yes(r.nowhere_commuting) << " (com rank " << r.com_rank << ")\n";
    out << "  jointly determinate in this state: " << yes(r.jointly_determinate) << "\n";
    out << "  joint probability distribution exists: " << yes(r.jpd.exists) << "\n";
    out << "  [" << a << " = " << b << "] holds in this state: " << yes(r.equal_in_state.holds) << " (probability "
        << r.equal_in_state.probability << ")\n";
    out << "  [fA(O) = " << a << "] holds: " << yes(r.output_equals_a.holds) << "\n";
    out << "  [fB(O) = " << b << "] holds: " << yes(r.output_equals_b.holds) << "\n";
    out << "  [" << a << " = " << b << "] holds on the joint space: " << yes(r.extended_equal.holds) << "\n";
    if (r.non_transitivity_exhibited) {
        out << "  The meter output equals " << a << " in one context and " << b
            << " in another, while the two observables are not equal.\n";
    }
    return out.str();
}

}  // namespace qreal
