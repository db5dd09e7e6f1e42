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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "cli_golden.hpp"
#include "corpus.hpp"
#include "qreal/cli.hpp"
#include "qreal/io.hpp"
#include "qreal/lattice.hpp"
#include "qreal/measure.hpp"
#include "qreal/qlang.hpp"
#include "qreal/qlogic.hpp"
#include "qreal/search.hpp"
#include "test_util.hpp"

using namespace qreal;
using namespace qreal::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    // Records the first failure only.
    void require(bool ok, const std::string &what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::size_t com_pair_rank(const Observable &a, const Observable &b) {
    const std::vector<SpectralFamily> fams{spectral_family(a), spectral_family(b)};
    return joint_determinacy_projection(fams).rank();
}

Matrix commutator(const Projection &p, const Projection &q) {
    return p.matrix() * q.matrix() - q.matrix() * p.matrix();
}

// Pair with a common invariant block, so that ker[P,Q] is nontrivial.
std::pair<Projection, Projection> commuting_block_pair(std::size_t n, Rng &rng) {
    const Matrix v = random_unitary(n, rng);
    std::vector<double> dp(n, 0), dq(n, 0);
    dp[0] = 1;
    dq[0] = static_cast<double>(rng() % 2);
    const Matrix blk = random_projection(n - 1, 1, rng).matrix();
    Matrix mp = Matrix::diagonal(dp), mq = Matrix::diagonal(dq);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            mq(i, j) = blk(i - 1, j - 1);
        }
    }
    mp(1, 1) = 1;
    return {Projection(v * mp * v.adjoint()), Projection(v * mq * v.adjoint())};
}

Outcome lattice_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(1001);
    double worst_law = 0, worst_angle = 0;
    for (std::size_t n = 2; n <= 5; ++n) {
        for (int t = 0; t < 500; ++t) {
            // orthomodular: P <= Q  =>  Q = P v (P' ^ Q)
            const std::size_t rq = 1 + rng() % n;
            const std::size_t rp = rng() % (rq + 1);
            std::vector<CVector> vs;
            for (std::size_t i = 0; i < rq; ++i) {
                vs.push_back(random_vector(n, rng));
            }
            const auto q = Projection::onto(vs, n);
            const auto p = Projection::onto(std::vector<CVector>(vs.begin(), vs.begin() + rp), n);
            const double om = frobenius_norm(q.matrix() - join(p, meet(complement(p), q)).matrix());

            // De Morgan on an unrelated pair
            const auto r = random_projection(n, rng() % (n + 1), rng);
            const auto s = random_projection(n, rng() % (n + 1), rng);
            const double dm = frobenius_norm(complement(join(r, s)).matrix() - meet(complement(r), complement(s)).matrix());

            auto [a, b] = t % 3 == 0 ? commuting_block_pair(n, rng) : std::pair{r, s};
            const Matrix c = commutator(a, b);
            const double angle = subspace_distance(com_pair(a, b).basis(), hermitian_kernel(c.adjoint() * c, 1e-8), n);

            worst_law = std::max({worst_law, om, dm});
            worst_angle = std::max(worst_angle, angle);
        }
    }
    const double secs = seconds_since(t0);
    o.require(worst_law <= 1e-9, "law residual " + fmt("%.3g", worst_law));
    o.require(worst_angle <= 1e-8, "principal angle " + fmt("%.3g", worst_angle));
    o.require(secs < 60.0, "runtime " + fmt("%.1f s", secs));
    if (o.pass) {
        o.detail = "2000 pairs, max law residual " + fmt("%.2g", worst_law) + ", max angle " + fmt("%.2g", worst_angle) +
                   ", " + fmt("%.2f s", secs);
    }
    return o;
}

Outcome nondistributivity() {
    Outcome o;
    const auto p = line(ket0()), q = line(ket_plus()), r = line(ket_minus());
    const double gap = operator_norm(meet(p, join(q, r)).matrix() - join(meet(p, q), meet(p, r)).matrix());
    o.require(std::abs(gap - 1.0) <= 1e-9, "gap " + fmt("%.12g", gap));
    if (o.pass) {
        o.detail = "gap " + fmt("%.12f", gap);
    }
    return o;
}

const std::vector<PairInstance> &identity_corpus() {
    static const std::vector<PairInstance> corpus = [] {
        Rng rng(1003);
        std::vector<PairInstance> v;
        for (std::size_t t = 0; t < 1000; ++t) {
            v.push_back(pair_instance(t, rng));
        }
        return v;
    }();
    return corpus;
}

Outcome value_identity_theorem() {
    Outcome o;
    const auto eq = parse("[A = B]");
    int disagreements = 0, oracle_disagreements = 0, holds = 0, nowhere = 0, partial = 0, commuting = 0;
    for (const auto &inst : identity_corpus()) {
        const Observable a(inst.a), b(inst.b);
        const Environment env({{"A", a}, {"B", b}});
        const bool lattice = holds_in(*eq, env, inst.psi).holds;
        const bool corr = perfectly_correlated(a, b, inst.psi);
        disagreements += lattice != corr;
        oracle_disagreements += corr != oracle_correlated(inst.a, inst.b, inst.psi);
        holds += lattice;
        const std::size_t rank = com_pair_rank(a, b);
        nowhere += rank == 0;
        partial += rank > 0 && rank < a.dim();
        commuting += rank == a.dim();
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    o.require(oracle_disagreements == 0, std::to_string(oracle_disagreements) + " disagreements with the eigh oracle");
    o.require(nowhere > 0 && partial > 0 && commuting > 0, "corpus does not span all commutation classes");
    o.require(holds > 0 && holds < 1000, "corpus does not exercise both answers");
    if (o.pass) {
        o.detail = "1000 instances (" + std::to_string(commuting) + " commuting, " + std::to_string(partial) +
                   " partially commuting, " + std::to_string(nowhere) + " nowhere commuting; " + std::to_string(holds) +
                   " true), 0 disagreements";
    }
    return o;
}

Outcome nowhere_commuting_no_jpd() {
    Outcome o;
    const Observable x(sigma_x()), y(sigma_y());
    o.require(nowhere_commuting(x, y), "sigma_x, sigma_y not reported nowhere commuting");
    Rng rng(1004);
    for (int t = 0; t < 200; ++t) {
        o.require(!jpd_exists(x, y, random_state(2, rng)).exists, "jpd exists in state #" + std::to_string(t));
    }
    int mismatches = 0, exists = 0;
    for (const auto &inst : identity_corpus()) {
        const Observable a(inst.a), b(inst.b);
        const bool j = jpd_exists(a, b, inst.psi).exists;
        mismatches += j != jointly_determinate(a, b, inst.psi).determinate;
        exists += j;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " jpd/jointdet mismatches");
    if (o.pass) {
        o.detail = "200 states without jpd; jpd == jointdet on 1000 instances (" + std::to_string(exists) + " exist)";
    }
    return o;
}

Outcome measurement_numerics() {
    Outcome o;
    const auto model = cnot_model();
    const Observable z(sigma_z()), x(sigma_x());
    const ValueMap &id = model.label_map("id");
    Rng rng(1005);
    for (int t = 0; t < 20; ++t) {
        const auto psi = random_state(2, rng);
        const auto cert = measures_in_state(model, z, id, psi);
        const double eps = rms_noise(model, z, id, psi);
        o.require(cert.passed && cert.defect <= 1e-9 && eps <= 1e-9, "sigma_z not certified in state #" + std::to_string(t));
    }
    const double eps = rms_noise(model, x, id, ket_plus());
    o.require(std::abs(eps - std::sqrt(2.0)) <= 1e-9, "epsilon(sigma_x, |+>) = " + fmt("%.12g", eps));
    o.require(!measures_in_state(model, x, id, ket_plus()).passed, "sigma_x certified in |+>");
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        const auto m = random_model(1 + t % 3, 1 + (t / 3) % 3, rng);
        Matrix sum = Matrix::zeros(m.sys_dim(), m.sys_dim());
        for (const auto &e : povm(m)) {
            sum += e.effect;
        }
        worst = std::max(worst, frobenius_norm(sum - Matrix::identity(m.sys_dim())));
    }
    o.require(worst <= 1e-10, "POVM completeness " + fmt("%.3g", worst));
    if (o.pass) {
        o.detail = "CNOT certifies sigma_z in 20 states; eps(sigma_x) = " + fmt("%.12f", eps) + "; POVM residual " +
                   fmt("%.2g", worst);
    }
    return o;
}

Outcome uncertainty() {
    Outcome o;
    Rng rng(1006);
    double slack = 1e300;
    for (std::size_t t = 0; t < 200; ++t) {
        const auto inst = measure_instance(t, rng);
        o.require(inst.model.sys_dim() <= 3 && inst.model.probe_dim() <= 3, "instance outside dims");
        const auto r = uncertainty_report(inst.model, inst.a, inst.f, inst.b, inst.psi);
        const double s = r.lhs - r.bound;
        slack = std::min(slack, s);
        o.require(r.satisfied && s >= -1e-9, "violation on #" + std::to_string(t) + " (" + inst.kind + "), lhs - bound = " +
                                                 fmt("%.3g", s));
    }
    if (o.pass) {
        o.detail = "200 instances, min lhs - bound " + fmt("%.3g", slack);
    }
    return o;
}

Outcome zero_noise_equivalence() {
    Outcome o;
    Rng rng(1007);
    int passed = 0, mismatches = 0;
    for (std::size_t t = 0; t < 300; ++t) {
        const auto inst = measure_instance(t, rng);
        const bool cert = measures_in_state(inst.model, inst.a, inst.f, inst.psi).passed;
        const bool zero = rms_noise(inst.model, inst.a, inst.f, inst.psi) <= 1e-8;
        mismatches += cert != zero;
        passed += cert;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(passed > 0 && passed < 300, "corpus does not exercise both directions");
    if (o.pass) {
        o.detail = "300 instances (" + std::to_string(passed) + " certified), 0 mismatches";
    }
    return o;
}

Outcome planted_search() {
    Outcome o;
    const Observable z(sigma_z(), "A"), z3(3.0 * sigma_z(), "B");
    SearchOptions opts;
    opts.probe_dim = 2;
    opts.restarts = 50;
    opts.seed = 7;
    const auto t0 = Clock::now();
    const auto rec = search_simultaneous(z, z3, opts);
    const double secs = seconds_since(t0);
    o.require(rec.defect < 1e-8, "defect " + fmt("%.3g", rec.defect));
    o.require(secs < 120.0, "runtime " + fmt("%.1f s", secs));
    o.require(simultaneously_measures(rec.model, z, rec.fa, z3, rec.fb, rec.psi).both, "record does not certify");
    if (o.pass) {
        o.detail = "defect " + fmt("%.2g", rec.defect) + " at restart " + std::to_string(rec.restart_index) + ", " +
                   fmt("%.2f s", secs);
    }
    return o;
}

Outcome headline() {
    Outcome o;
    const std::string fx = data_path("fixtures/");
    const auto model = io::load_model(fx + "witness_model.json");
    const auto a = io::load_observable(fx + "witness_A.json", "A");
    const auto b = io::load_observable(fx + "witness_B.json", "B");
    const auto psi = io::load_state(fx + "witness_psi.json");

    const auto r = context_report(model, a, model.label_map("fA"), b, model.label_map("fB"), psi);
    o.require(r.cert_a.passed && r.cert_a.defect <= 1e-8, "A not certified, defect " + fmt("%.3g", r.cert_a.defect));
    o.require(r.cert_b.passed && r.cert_b.defect <= 1e-8, "B not certified, defect " + fmt("%.3g", r.cert_b.defect));
    o.require(r.nowhere_commuting, "pair is not nowhere commuting");
    o.require(!r.jointly_determinate, "pair is jointly determinate");
    o.require(!r.jpd.exists, "jpd exists");
    o.require(r.non_transitivity_exhibited, "no non-transitivity exhibit");

    // The same report through the command line entry point.
    std::ostringstream out, err;
    const int code = cli::run({"context", fx + "witness_model.json", fx + "witness_A.json", "fA", fx + "witness_B.json", "fB",
                               "--state", fx + "witness_psi.json"},
                              out, err);
    o.require(code == cli::kExitTrue, "context exit " + std::to_string(code) + ": " + err.str());
    if (code == cli::kExitTrue) {
        const auto j = nlohmann::json::parse(out.str());
        o.require(j["both_measured"] == true && j["nowhere_commuting"] == true && j["jointly_determinate"] == false &&
                      j["jpd"]["exists"] == false,
                  "context JSON disagrees");
    }

    // Independent search on the same pair; reported, not gating.
    SearchOptions opts;
    opts.probe_dim = model.probe_dim();
    opts.restarts = 500;
    opts.seed = 2026;
    opts.budget = 1000;
    opts.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto t0 = Clock::now();
    const auto rec = search_simultaneous(a, b, opts);
    const double secs = seconds_since(t0);
    const bool found = simultaneously_measures(rec.model, a, rec.fa, b, rec.fb, rec.psi).both;
    if (o.pass) {
        o.detail = "witness defects " + fmt("%.2g", r.cert_a.defect) + " / " + fmt("%.2g", r.cert_b.defect) +
                   ", com rank 0, no jpd";
    }
    o.detail += "; search (k=" + std::to_string(opts.probe_dim) + ", 500 restarts, budget 1000) best defect " +
                fmt("%.2g", rec.defect) + (found ? " certified" : " not certified") + ", " + fmt("%.1f s", secs);
    return o;
}

Outcome reproducibility_gap() {
    Outcome o;
    // No interaction, probe in |+>, sigma_z meter: a fair coin that matches sigma_z in |+> by accident.
    const MeasurementModel model(2, 2, ket_plus(), Matrix::identity(4), Observable(sigma_z(), "M"));
    const Observable a(sigma_z());
    const ValueMap id = identity_map({-1, 1});
    const auto pushed = push_forward(output_distribution(model, ket_plus()), id);
    const auto born = born_distribution(a, ket_plus());
    double worst = 0;
    for (const auto &e : born) {
        double p = 0;
        for (const auto &g : pushed) {
            if (std::abs(g.value - e.value) < 1e-8) {
                p = g.probability;
            }
        }
        worst = std::max(worst, std::abs(p - e.probability));
    }
    o.require(pushed.size() == born.size(), "support differs");
    o.require(worst <= 1e-10, "statistics differ by " + fmt("%.3g", worst));
    const auto cert = measures_in_state(model, a, id, ket_plus());
    const double eps = rms_noise(model, a, id, ket_plus());
    o.require(!cert.passed, "certificate passes");
    o.require(eps > 1e-8, "rms noise vanishes");
    if (o.pass) {
        o.detail = "statistics match within " + fmt("%.2g", worst) + ", certificate defect " + fmt("%.6f", cert.defect) +
                   ", eps " + fmt("%.6f", eps);
    }
    return o;
}

Outcome parser() {
    Outcome o;
    Rng rng(1011);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto f = random_formula(rng, 6);
        const std::string text = print(*f);
        const auto back = parse(text);
        mismatches += !(*back == *f) || print(*back) != text;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");
    const auto goldens = load_parse_goldens();
    o.require(goldens.size() >= 20, "only " + std::to_string(goldens.size()) + " goldens");
    int wrong = 0;
    for (const auto &g : goldens) {
        try {
            parse(g.input);
            ++wrong;
        } catch (const ParseError &e) {
            wrong += e.byte_offset() != g.offset || e.expected() != g.expected || e.found() != g.found;
        }
    }
    o.require(wrong == 0, std::to_string(wrong) + " golden mismatches");
    if (o.pass) {
        o.detail = "1000 round trips, " + std::to_string(goldens.size()) + " malformed goldens exact";
    }
    return o;
}

Outcome cli_end_to_end() {
    Outcome o;
    const auto outcomes = run_cli_goldens();
    int failed = 0;
    for (const auto &c : outcomes) {
        if (!c.passed) {
            ++failed;
            o.require(false, c.name + ": " + c.why);
        }
    }
    std::ifstream in(data_path("golden/cli_cases.json"));
    const auto cases = nlohmann::json::parse(in);
    std::set<int> exits;
    std::set<std::string> commands;
    for (const auto &c : cases) {
        exits.insert(c["exit"].get<int>());
        if (!c["args"].empty()) {
            commands.insert(c["args"][0].get<std::string>());
        }
    }
    o.require(exits == std::set<int>{0, 1, 2}, "exit-code paths not all covered");
    for (const char *cmd : {"eval", "com", "jointdet", "jpd", "measure", "search", "context"}) {
        o.require(commands.count(cmd) > 0, std::string("no golden for ") + cmd);
    }
    if (o.pass) {
        o.detail = std::to_string(outcomes.size()) + " golden runs, exits 0/1/2 covered";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"lattice suite", lattice_suite},
        {"nondistributivity", nondistributivity},
        {"value identity", value_identity_theorem},
        {"nowhere commuting, no jpd", nowhere_commuting_no_jpd},
        {"measurement numerics", measurement_numerics},
        {"uncertainty relation", uncertainty},
        {"zero noise iff certificate", zero_noise_equivalence},
        {"planted search", planted_search},
        {"nowhere commuting pair measured", headline},
        {"reproducibility gap", reproducibility_gap},
        {"parser", parser},
        {"cli end to end", cli_end_to_end},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s  %2zu  %-32s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
