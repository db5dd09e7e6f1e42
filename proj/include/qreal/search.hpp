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

// Randomized search for a measurement model and a state in which one
// apparatus precisely measures two given observables.
//
// The coupling is U = exp(iH) with H Hermitian, the probe starts in e_0, and
// the meter is diag(1, ..., k). Each restart runs a coordinate-wise
// derivative-free descent (adaptive step, shrink on failure) over the entries
// of H and the state amplitudes. Label maps are chosen exactly for every
// iterate, and after each sweep the state is replaced by the minimizer of the
// squared correlation defect for the current coupling and maps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qreal/errors.hpp"
#include "qreal/measure.hpp"
#include "qreal/numlin.hpp"
#include "qreal/spectral.hpp"

namespace qreal {

struct SearchOptions {
    std::size_t probe_dim = 2;
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
    /// Objective evaluations allowed per restart.
    std::size_t budget = 4000;
    /// A restart stops early once its root-sum-square defect drops below this.
    double target = 1e-12;
    unsigned threads = 1;
    /// Label maps are enumerated exhaustively when |spec|^k stays within this limit.
    std::size_t enumeration_limit = 4096;
    std::size_t map_samples = 512;
};

struct RestartSummary {
    std::size_t index;
    double defect;
    std::size_t evaluations;
};

struct SearchRecord {
    MeasurementModel model;
    UnitVector psi;
    ValueMap fa;
    ValueMap fb;
    double defect;
    double defect_a;
    double defect_b;
    std::size_t restart_index;
    std::vector<RestartSummary> restarts;
};

namespace detail {

/// Hermitian N x N matrix from N^2 reals: diagonal first, then (re, im) of the upper triangle.
inline Matrix hermitian_from_params(std::span<const double> params, std::size_t n) {
    Matrix h(n, n);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = params[idx++];
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const cplx z(params[idx], params[idx + 1]);
            idx += 2;
            h(p, q) = z;
            h(q, p) = std::conj(z);
        }
    }
    return h;
}

inline CVector state_from_params(std::span<const double> params) {
    CVector v(params.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = cplx(params[2 * i], params[2 * i + 1]);
    }
    const double n = norm(v);
    if (!(n > 1e-150)) {
        v.assign(v.size(), 0.0);
        v[0] = 1.0;
        return v;
    }
    for (auto &z : v) {
        z /= n;
    }
    return v;
}

/// Search problem for fixed target observables A, B on C^n with a k-level probe.
class SimultaneousProblem {
   public:
    SimultaneousProblem(const SpectralFamily &a, const SpectralFamily &b, std::size_t k)
        : a_(a), b_(b), n_(a.dim), k_(k) {
    }

    std::size_t n() const {
        return n_;
    }
    std::size_t k() const {
        return k_;
    }
    std::size_t joint_dim() const {
        return n_ * k_;
    }

    /// g_m = U^dagger (1 (x) |m><m|) U (psi (x) e_0) for each meter outcome m.
    std::vector<CVector> components(const Matrix &u, const CVector &psi) const {
        CVector joint(joint_dim());
        for (std::size_t i = 0; i < n_; ++i) {
            joint[i * k_] = psi[i];
        }
        const CVector w = matvec(u, joint);
        const Matrix u_dag = u.adjoint();
        std::vector<CVector> g;
        g.reserve(k_);
        for (std::size_t m = 0; m < k_; ++m) {
            CVector masked(joint_dim());
            for (std::size_t i = 0; i < n_; ++i) {
                masked[i * k_ + m] = w[i * k_ + m];
            }
            g.push_back(matvec(u_dag, masked));
        }
        return g;
    }

    /// (E_lambda psi) (x) e_0 for each spectral entry.
    static std::vector<CVector> targets(const SpectralFamily &f, const CVector &psi, std::size_t k) {
        std::vector<CVector> t;
        for (const auto &e : f.entries) {
            const CVector v = e.projection.apply(psi);
            CVector joint(v.size() * k);
            for (std::size_t i = 0; i < v.size(); ++i) {
                joint[i * k] = v[i];
            }
            t.push_back(std::move(joint));
        }
        return t;
    }

    /// Map minimizing sum_lambda ||sum_{f(m)=lambda} g_m - t_lambda||^2. Because the
    /// g_m are mutually orthogonal the cost separates over outcomes m.
    static std::vector<std::size_t> separable_map(const std::vector<CVector> &g, const std::vector<CVector> &t) {
        std::vector<std::size_t> map(g.size(), 0);
        for (std::size_t m = 0; m < g.size(); ++m) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < t.size(); ++l) {
                const double score = inner(g[m], t[l]).real();
                if (score > best) {
                    best = score;
                    map[m] = l;
                }
            }
        }
        return map;
    }

    static std::vector<double> per_value_residuals(const std::vector<CVector> &g, const std::vector<CVector> &t,
                                                   const std::vector<std::size_t> &map) {
        std::vector<CVector> sums(t.size(), CVector(t.empty() ? 0 : t.front().size()));
        for (std::size_t m = 0; m < g.size(); ++m) {
            auto &s = sums[map[m]];
            for (std::size_t i = 0; i < s.size(); ++i) {
                s[i] += g[m][i];
            }
        }
        std::vector<double> r(t.size());
        for (std::size_t l = 0; l < t.size(); ++l) {
            r[l] = norm(sums[l] - t[l]);
        }
        return r;
    }

    static double squared_cost(const std::vector<CVector> &g, const std::vector<CVector> &t,
                               const std::vector<std::size_t> &map) {
        double c = 0;
        for (double r : per_value_residuals(g, t, map)) {
            c += r * r;
        }
        return c;
    }

    static double max_defect(const std::vector<CVector> &g, const std::vector<CVector> &t,
                             const std::vector<std::size_t> &map) {
        const auto r = per_value_residuals(g, t, map);
        return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    }

    struct Evaluation {
        double cost = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> map_a;
        std::vector<std::size_t> map_b;
    };

    Evaluation evaluate(const Matrix &u, const CVector &psi) const {
        const auto g = components(u, psi);
        const auto ta = targets(a_, psi, k_);
        const auto tb = targets(b_, psi, k_);
        Evaluation e;
        e.map_a = separable_map(g, ta);
        e.map_b = separable_map(g, tb);
        e.cost = squared_cost(g, ta, e.map_a) + squared_cost(g, tb, e.map_b);
        return e;
    }

    /// Minimizer over unit psi of the summed squared defect for fixed U and maps:
    /// the eigenvector of the smallest eigenvalue of sum_lambda L_lambda^dagger L_lambda,
    /// where L_lambda psi = F_lambda (psi (x) e_0) - (E_lambda psi) (x) e_0.
    CVector polish_state(const Matrix &u, const std::vector<std::size_t> &map_a,
                         const std::vector<std::size_t> &map_b) const {
        const std::size_t d = joint_dim();
        const Matrix u_dag = u.adjoint();
        // Columns of G_m J, where J psi = psi (x) e_0.
        std::vector<Matrix> gj(k_, Matrix(d, n_));
        for (std::size_t i = 0; i < n_; ++i) {
            CVector col(d);
            for (std::size_t r = 0; r < d; ++r) {
                col[r] = u(r, i * k_);
            }
            for (std::size_t m = 0; m < k_; ++m) {
                CVector masked(d);
                for (std::size_t s = 0; s < n_; ++s) {
                    masked[s * k_ + m] = col[s * k_ + m];
                }
                const CVector back = matvec(u_dag, masked);
                for (std::size_t r = 0; r < d; ++r) {
                    gj[m](r, i) = back[r];
                }
            }
        }
        Matrix q(n_, n_);
        auto accumulate = [&](const SpectralFamily &fam, const std::vector<std::size_t> &map) {
            for (std::size_t l = 0; l < fam.entries.size(); ++l) {
                Matrix op(d, n_);
                for (std::size_t m = 0; m < k_; ++m) {
                    if (map[m] == l) {
                        op += gj[m];
                    }
                }
                const Matrix &e = fam.entries[l].projection.matrix();
                for (std::size_t s = 0; s < n_; ++s) {
                    for (std::size_t i = 0; i < n_; ++i) {
                        op(s * k_, i) -= e(s, i);
                    }
                }
                q += op.adjoint() * op;
            }
        };
        accumulate(a_, map_a);
        accumulate(b_, map_b);
        const auto eig = detail::jacobi_eigh(hermitian_part(q));
        return eig.vectors.column(0);
    }

    /// Label map (as meter-outcome indices) minimizing the max-norm defect for one family.
    std::vector<std::size_t> best_certified_map(const std::vector<CVector> &g, const std::vector<CVector> &t,
                                                const SearchOptions &opts, std::mt19937_64 &rng) const {
        std::vector<std::size_t> best = separable_map(g, t);
        double best_defect = max_defect(g, t, best);
        const std::size_t values = t.size();
        double combos = 1;
        for (std::size_t m = 0; m < k_; ++m) {
            combos *= static_cast<double>(values);
        }
        auto consider = [&](const std::vector<std::size_t> &map) {
            const double d = max_defect(g, t, map);
            if (d < best_defect) {
                best_defect = d;
                best = map;
            }
        };
        std::vector<std::size_t> map(k_, 0);
        if (combos <= static_cast<double>(opts.enumeration_limit)) {
            while (true) {
                consider(map);
                std::size_t pos = 0;
                while (pos < k_ && ++map[pos] == values) {
                    map[pos] = 0;
                    ++pos;
                }
                if (pos == k_) {
                    break;
                }
            }
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, values - 1);
            for (std::size_t s = 0; s < opts.map_samples; ++s) {
                for (auto &v : map) {
                    v = pick(rng);
                }
                consider(map);
            }
        }
        return best;
    }

    const SpectralFamily &a() const {
        return a_;
    }
    const SpectralFamily &b() const {
        return b_;
    }

   private:
    const SpectralFamily &a_;
    const SpectralFamily &b_;
    std::size_t n_;
    std::size_t k_;
};

struct RestartResult {
    Matrix u;
    CVector psi;
    std::vector<std::size_t> map_a;
    std::vector<std::size_t> map_b;
    double defect = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

inline RestartResult run_restart(const SimultaneousProblem &problem, const SearchOptions &opts, std::size_t index) {
    std::mt19937_64 rng(opts.seed + index);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t d = problem.joint_dim();
    const std::size_t nu = d * d;
    std::vector<double> x(nu + 2 * problem.n());
    for (auto &v : x) {
        v = normal(rng);
    }

    std::size_t evals = 0;
    // Eigenbasis of the last accepted generator. Coordinate steps perturb H only
    // slightly, so Jacobi started from this basis needs a sweep or two.
    Matrix warm = Matrix::identity(d);
    Matrix trial_basis = warm;
    auto unitary_of = [&](const std::vector<double> &params) {
        const Matrix h = hermitian_from_params(std::span<const double>(params.data(), nu), d);
        const auto eig = detail::jacobi_eigh(hermitian_part(warm.adjoint() * h * warm));
        trial_basis = warm * eig.vectors;
        std::vector<cplx> phases(d);
        for (std::size_t i = 0; i < d; ++i) {
            phases[i] = std::polar(1.0, eig.values[i]);
        }
        Matrix scaled = trial_basis;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                scaled(i, j) *= phases[j];
            }
        }
        return Matrix(scaled * trial_basis.adjoint());
    };
    auto state_of = [&](const std::vector<double> &params) {
        return state_from_params(std::span<const double>(params.data() + nu, 2 * problem.n()));
    };
    auto evaluate = [&](const std::vector<double> &params) {
        ++evals;
        return problem.evaluate(unitary_of(params), state_of(params));
    };
    auto set_state = [&](std::vector<double> &params, const CVector &psi) {
        for (std::size_t i = 0; i < psi.size(); ++i) {
            params[nu + 2 * i] = psi[i].real();
            params[nu + 2 * i + 1] = psi[i].imag();
        }
    };
    auto try_polish = [&](std::vector<double> &params, SimultaneousProblem::Evaluation &current) {
        const Matrix u = unitary_of(params);
        std::vector<double> trial = params;
        set_state(trial, problem.polish_state(u, current.map_a, current.map_b));
        auto e = evaluate(trial);
        if (e.cost <= current.cost) {
            params = std::move(trial);
            current = std::move(e);
            warm = trial_basis;
        }
    };

    const double stop = opts.target * opts.target;
    auto current = evaluate(x);
    warm = trial_basis;
    std::vector<double> step(x.size(), 0.25);
    while (evals < opts.budget && current.cost > stop) {
        std::vector<CVector> cols;
        for (std::size_t j = 0; j < d; ++j) {
            cols.push_back(warm.column(j));
        }
        warm = Matrix::from_columns(detail::orthonormalize(cols), d);
        for (std::size_t c = 0; c < x.size() && evals < opts.budget && current.cost > stop; ++c) {
            bool improved = false;
            for (const double dir : {1.0, -1.0}) {
                std::vector<double> trial = x;
                trial[c] += dir * step[c];
                auto e = evaluate(trial);
                if (e.cost < current.cost) {
                    x = std::move(trial);
                    current = std::move(e);
                    warm = trial_basis;
                    step[c] = std::min(2.0, step[c] * 2.0);
                    improved = true;
                    break;
                }
                if (evals >= opts.budget) {
                    break;
                }
            }
            if (!improved) {
                step[c] *= 0.5;
            }
        }
        if (evals < opts.budget) {
            try_polish(x, current);
        }
        if (*std::max_element(step.begin(), step.end()) < 1e-14) {
            break;
        }
    }
    try_polish(x, current);

    RestartResult result;
    result.u = unitary_of(x);
    result.psi = state_of(x);
    result.evaluations = evals;
    const auto g = problem.components(result.u, result.psi);
    const auto ta = SimultaneousProblem::targets(problem.a(), result.psi, problem.k());
    const auto tb = SimultaneousProblem::targets(problem.b(), result.psi, problem.k());
    result.map_a = problem.best_certified_map(g, ta, opts, rng);
    result.map_b = problem.best_certified_map(g, tb, opts, rng);
    result.defect =
        std::max(SimultaneousProblem::max_defect(g, ta, result.map_a), SimultaneousProblem::max_defect(g, tb, result.map_b));
    return result;
}

inline ValueMap to_value_map(const std::vector<std::size_t> &map, const SpectralFamily &target) {
    ValueMap f;
    for (std::size_t m = 0; m < map.size(); ++m) {
        f.emplace_back(static_cast<double>(m + 1), target.entries[map[m]].value);
    }
    return f;
}

}  // namespace detail

/// Best-found simultaneous-measurement witness for (A, B). Deterministic for a
/// given seed: restart r draws from seed + r, and the lowest restart index wins
/// ties, so the thread count never changes the result.
inline SearchRecord search_simultaneous(const Observable &a, const Observable &b, const SearchOptions &opts,
                                        const ToleranceConfig &tol = {}) {
    detail::require_same_dim(a, b);
    if (opts.probe_dim < 2) {
        throw Error(ErrorKind::InvalidArgument, "probe dimension must be at least 2");
    }
    if (opts.restarts < 1) {
        throw Error(ErrorKind::InvalidArgument, "at least one restart is required");
    }
    const SpectralFamily fa = spectral_family(a, tol);
    const SpectralFamily fb = spectral_family(b, tol);
    const detail::SimultaneousProblem problem(fa, fb, opts.probe_dim);

    std::vector<detail::RestartResult> results(opts.restarts);
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(opts.restarts)));
    if (workers == 1) {
        for (std::size_t r = 0; r < opts.restarts; ++r) {
            results[r] = detail::run_restart(problem, opts, r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < opts.restarts; r = next++) {
                    results[r] = detail::run_restart(problem, opts, r);
                }
            });
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    std::size_t best = 0;
    std::vector<RestartSummary> summaries;
    for (std::size_t r = 0; r < results.size(); ++r) {
        summaries.push_back({r, results[r].defect, results[r].evaluations});
        if (results[r].defect < results[best].defect) {
            best = r;
        }
    }

    const auto &winner = results[best];
    const std::size_t k = opts.probe_dim;
    std::vector<double> meter_values(k);
    for (std::size_t m = 0; m < k; ++m) {
        meter_values[m] = static_cast<double>(m + 1);
    }
    ValueMap map_a = detail::to_value_map(winner.map_a, fa);
    ValueMap map_b = detail::to_value_map(winner.map_b, fb);
    MeasurementModel model(a.dim(), k, UnitVector::basis(k, 0), winner.u, Observable(Matrix::diagonal(meter_values), "M"),
                           {{"fA", map_a}, {"fB", map_b}}, tol);
    UnitVector psi(winner.psi);
    const auto cert_a = measures_in_state(model, a, map_a, psi, tol);
    const auto cert_b = measures_in_state(model, b, map_b, psi, tol);
    return SearchRecord{std::move(model),       std::move(psi), std::move(map_a), std::move(map_b),
                        std::max(cert_a.defect, cert_b.defect), cert_a.defect, cert_b.defect, best,
                        std::move(summaries)};
}

}  // namespace qreal
