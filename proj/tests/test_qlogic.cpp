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

#include "qreal/qlogic.hpp"

#include "corpus.hpp"
#include "gtest/gtest.h"

using namespace qreal;
using namespace qreal::testing;

namespace {

Environment pauli_env() {
    return Environment({{"A", Observable(sigma_x())}, {"B", Observable(sigma_y())}});
}

}  // namespace

TEST(Environment, UnboundAndDimMismatch) {
    const auto env = pauli_env();
    try {
        env.at("C");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnboundObservable);
    }
    EXPECT_THROW(Environment({{"A", Observable(sigma_x())}, {"B", Observable(Matrix::identity(3))}}), Error);
    EXPECT_THROW(truth_projection(*parse("C in {1}"), env), Error);
}

TEST(TruthProjection, Examples) {
    const Environment z({{"A", Observable(sigma_z())}});
    EXPECT_TRUE(approx_equal(truth_projection(*parse("A in {+1}"), z), line(ket0()), 1e-12));
    EXPECT_TRUE(truth_projection(*parse("A in {+1} | A in {-1}"), z).is_identity());
    EXPECT_TRUE(truth_projection(*parse("com(A,B)"), pauli_env()).is_zero());
}

TEST(HoldsIn, Examples) {
    const Environment z({{"A", Observable(sigma_z())}});
    const auto r0 = holds_in(*parse("A in {+1}"), z, ket0());
    EXPECT_TRUE(r0.holds);
    EXPECT_NEAR(r0.probability, 1.0, 1e-12);
    const auto rp = holds_in(*parse("A in {+1}"), z, ket_plus());
    EXPECT_FALSE(rp.holds);
    EXPECT_NEAR(rp.probability, 0.5, 1e-12);
    Rng rng(401);
    const auto eq = parse("[A = B]");
    for (int t = 0; t < 50; ++t) {
        const auto r = holds_in(*eq, pauli_env(), random_state(2, rng));
        EXPECT_FALSE(r.holds);
        EXPECT_NEAR(r.probability, 0.0, 1e-12);
    }
    EXPECT_THROW(holds_in(*eq, pauli_env(), UnitVector::basis(3, 0)), Error);
}

TEST(ValueIdentity, Examples) {
    Rng rng(402);
    const Observable a(random_hermitian(3, rng));
    EXPECT_TRUE(value_identity(a, a).is_identity());
    EXPECT_TRUE(value_identity(Observable(sigma_x()), Observable(sigma_y())).is_zero());
    const auto p = value_identity(Observable(Matrix::diagonal({1, 2, 3})), Observable(Matrix::diagonal({1, 2, 4})));
    EXPECT_TRUE(approx_equal(p.matrix(), Matrix::diagonal({1, 1, 0}), 1e-12));
    EXPECT_THROW(value_identity(a, Observable(sigma_x())), Error);
}

TEST(ValueIdentity, Symmetric) {
    Rng rng(403);
    for (int t = 0; t < 100; ++t) {
        const auto inst = pair_instance(t, rng);
        const Observable a(inst.a), b(inst.b);
        EXPECT_TRUE(approx_equal(value_identity(a, b), value_identity(b, a), 1e-9));
    }
}

TEST(PerfectlyCorrelated, Examples) {
    Rng rng(404);
    const Observable a(random_hermitian(3, rng));
    EXPECT_TRUE(perfectly_correlated(a, a, random_state(3, rng)));
    for (int t = 0; t < 20; ++t) {
        EXPECT_FALSE(perfectly_correlated(Observable(sigma_x()), Observable(sigma_y()), random_state(2, rng)));
    }
    EXPECT_TRUE(perfectly_correlated(Observable(Matrix::diagonal({1, 2})), Observable(Matrix::diagonal({1, 3})), ket0()));
    EXPECT_FALSE(perfectly_correlated(Observable(Matrix::diagonal({1, 2})), Observable(Matrix::diagonal({1, 3})), ket1()));
}

TEST(EqualitySemantics, EquivalentToPerfectCorrelation) {
    Rng rng(405);
    const auto eq = parse("[A = B]");
    int agreements_true = 0;
    for (int t = 0; t < 300; ++t) {
        const auto inst = pair_instance(t, rng);
        const Observable a(inst.a), b(inst.b);
        const Environment env({{"A", a}, {"B", b}});
        const bool lattice = holds_in(*eq, env, inst.psi).holds;
        const bool correlated = perfectly_correlated(a, b, inst.psi);
        EXPECT_EQ(lattice, correlated) << inst.kind << " #" << t;
        EXPECT_EQ(correlated, oracle_correlated(inst.a, inst.b, inst.psi)) << inst.kind << " #" << t;
        agreements_true += lattice ? 1 : 0;
    }
    // The corpus has to exercise both answers.
    EXPECT_GT(agreements_true, 30);
    EXPECT_LT(agreements_true, 270);
}

TEST(JointDeterminacy, Examples) {
    Rng rng(406);
    const auto psi3 = random_state(3, rng);
    const Observable d1(Matrix::diagonal({1, 2, 2})), d2(Matrix::diagonal({0, 0, 5}));
    const auto r = jointly_determinate(d1, d2, psi3);
    EXPECT_TRUE(r.determinate);
    EXPECT_TRUE(r.projection.is_identity());
    for (int t = 0; t < 10; ++t) {
        const auto rxy = jointly_determinate(Observable(sigma_x()), Observable(sigma_y()), random_state(2, rng));
        EXPECT_FALSE(rxy.determinate);
        EXPECT_TRUE(rxy.projection.is_zero());
    }
    // A, B commute on e0 only.
    const Matrix bx = direct_sum(Matrix{{1}}, sigma_x());
    const Matrix bz = direct_sum(Matrix{{2}}, sigma_z());
    const auto block = jointly_determinate(Observable(bx), Observable(bz), UnitVector::basis(3, 0));
    EXPECT_TRUE(block.determinate);
    EXPECT_TRUE(approx_equal(block.projection.matrix(), Matrix::diagonal({1, 0, 0}), 1e-9));
    EXPECT_FALSE(jointly_determinate(Observable(bx), Observable(bz), UnitVector::basis(3, 1)).determinate);
    const std::vector<Observable> one{d1};
    EXPECT_THROW(jointly_determinate(one, psi3), Error);
}

TEST(JointDeterminacy, ThreeObservableFamily) {
    const std::vector<Observable> diag{Observable(Matrix::diagonal({1, 2, 3})), Observable(Matrix::diagonal({0, 0, 1})),
                                       Observable(Matrix::diagonal({4, 5, 4}))};
    EXPECT_TRUE(jointly_determinate(diag, UnitVector::basis(3, 2)).projection.is_identity());
    const Environment env({{"A", diag[0]}, {"B", diag[1]}, {"C", Observable(direct_sum(Matrix{{1}}, sigma_x()))}});
    const auto p = truth_projection(*parse("com(A, B, C)"), env);
    EXPECT_TRUE(approx_equal(p.matrix(), Matrix::diagonal({1, 0, 0}), 1e-9));
}

TEST(NowhereCommuting, Examples) {
    EXPECT_TRUE(nowhere_commuting(Observable(sigma_x()), Observable(sigma_y())));
    Rng rng(407);
    const Observable a(random_hermitian(3, rng));
    EXPECT_FALSE(nowhere_commuting(a, a));
    const Matrix i2 = Matrix::identity(2);
    EXPECT_FALSE(nowhere_commuting(Observable(kron(sigma_x(), i2)), Observable(kron(i2, sigma_y()))));
}

TEST(Jpd, Examples) {
    Rng rng(408);
    const Matrix v = random_unitary(3, rng);
    const Observable a(v * Matrix::diagonal({0, 1, 1}) * v.adjoint());
    const Observable b(v * Matrix::diagonal({2, 2, 3}) * v.adjoint());
    const auto psi = random_state(3, rng);
    const auto r = jpd_exists(a, b, psi);
    EXPECT_TRUE(r.exists);
    const auto fa = spectral_family(a), fb = spectral_family(b);
    for (const auto &c : r.candidate) {
        const Matrix prod =
            fa.projection_for(c.a_value).matrix() * fb.projection_for(c.b_value).matrix();
        EXPECT_NEAR(c.probability, expectation(prod, psi.amplitudes()).real(), 1e-9);
    }
    for (int t = 0; t < 50; ++t) {
        const auto rxy = jpd_exists(Observable(sigma_x()), Observable(sigma_y()), random_state(2, rng));
        EXPECT_FALSE(rxy.exists);
        for (const auto &c : rxy.candidate) {
            EXPECT_NEAR(c.probability, 0.0, 1e-12);
        }
    }
    const auto self = jpd_exists(a, a, psi);
    EXPECT_TRUE(self.exists);
    const auto born = born_distribution(a, psi);
    for (const auto &c : self.candidate) {
        if (c.a_value == c.b_value) {
            double expect = 0;
            for (const auto &e : born) {
                if (e.value == c.a_value) {
                    expect = e.probability;
                }
            }
            EXPECT_NEAR(c.probability, expect, 1e-9);
        } else {
            EXPECT_NEAR(c.probability, 0.0, 1e-12);
        }
    }
}

TEST(Jpd, AgreesWithJointDeterminacy) {
    Rng rng(409);
    for (int t = 0; t < 300; ++t) {
        const auto inst = pair_instance(t, rng);
        const Observable a(inst.a), b(inst.b);
        EXPECT_EQ(jpd_exists(a, b, inst.psi).exists, jointly_determinate(a, b, inst.psi).determinate)
            << inst.kind << " #" << t;
    }
}

TEST(ClassicalLimit, DiagonalFormulasAreBoolean) {
    Rng rng(410);
    const std::vector<std::string> names{"A", "B", "C"};
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + t % 4;
        std::map<std::string, Observable> bind;
        std::map<std::string, std::vector<double>> diag;
        for (const auto &nm : names) {
            diag[nm] = integer_spectrum(n, rng);
            bind.emplace(nm, Observable(Matrix::diagonal(diag[nm])));
        }
        const Environment env(bind);
        // Random formula over small integer literals, evaluated alongside its Boolean meaning per coordinate.
        std::function<std::pair<FormulaPtr, std::function<bool(std::size_t)>>(int)> gen = [&](int depth) {
            std::pair<FormulaPtr, std::function<bool(std::size_t)>> out;
            const int pick = depth == 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 8);
            const std::string x = names[rng() % 3], y = names[rng() % 3];
            if (pick == 0) {
                const double v = static_cast<double>(rng() % 3);
                out = {make_atom(x, {v}), [&diag, x, v](std::size_t i) { return diag[x][i] == v; }};
            } else if (pick == 1) {
                out = {make_equal(x, y), [&diag, x, y](std::size_t i) { return diag[x][i] == diag[y][i]; }};
            } else if (pick == 2) {
                out = {make_com({x, y}), [](std::size_t) { return true; }};
            } else if (pick == 3) {
                auto a = gen(depth - 1);
                out = {make_not(a.first), [f = a.second](std::size_t i) { return !f(i); }};
            } else {
                auto a = gen(depth - 1), b = gen(depth - 1);
                const auto fa = a.second, fb = b.second;
                switch (pick % 4) {
                    case 0:
                        out = {make_and(a.first, b.first), [=](std::size_t i) { return fa(i) && fb(i); }};
                        break;
                    case 1:
                        out = {make_or(a.first, b.first), [=](std::size_t i) { return fa(i) || fb(i); }};
                        break;
                    case 2:
                        out = {make_sasaki(a.first, b.first), [=](std::size_t i) { return !fa(i) || fb(i); }};
                        break;
                    default:
                        out = {make_iff(a.first, b.first), [=](std::size_t i) { return fa(i) == fb(i); }};
                }
            }
            return out;
        };
        const auto [formula, boolean] = gen(4);
        std::vector<double> expect(n);
        for (std::size_t i = 0; i < n; ++i) {
            expect[i] = boolean(i) ? 1.0 : 0.0;
        }
        const auto p = truth_projection(*formula, env);
        EXPECT_LE(frobenius_norm(p.matrix() - Matrix::diagonal(expect)), 1e-9) << print(*formula);
    }
}
