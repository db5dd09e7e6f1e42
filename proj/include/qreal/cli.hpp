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

// Command-line front end. `run` is the whole program minus process plumbing
// so it can be driven in-process by tests.
//
// Exit codes: 0 = predicate true / search success, 1 = predicate false /
// search non-success, 2 = usage or data error.

#include <cstdlib>
#include <exception>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qreal/io.hpp"
#include "qreal/qreal.hpp"

namespace qreal::cli {

inline constexpr int kExitTrue = 0;
inline constexpr int kExitFalse = 1;
inline constexpr int kExitError = 2;

/// Tolerances from QREAL_EIG_TOL / QREAL_RANK_TOL, with --tol overriding eq_tol.
inline ToleranceConfig tolerances_from_environment(std::optional<double> eq_tol) {
    ToleranceConfig tol;
    auto read = [](const char *name, double &slot) {
        if (const char *v = std::getenv(name)) {
            try {
                std::size_t used = 0;
                slot = std::stod(v, &used);
                if (used != std::string(v).size()) {
                    throw std::invalid_argument(name);
                }
            } catch (const std::exception &) {
                throw Error(ErrorKind::InvalidArgument, std::string(name) + " is not a number: '" + v + "'");
            }
        }
    };
    read("QREAL_EIG_TOL", tol.eig_cluster_tol);
    read("QREAL_RANK_TOL", tol.rank_tol);
    if (eq_tol) {
        tol.eq_tol = *eq_tol;
    }
    tol.validate();
    return tol;
}

namespace detail {

inline std::pair<std::string, std::string> split_binding(const std::string &binding, const char *flag) {
    const auto pos = binding.find('=');
    if (pos == std::string::npos || pos == 0 || pos + 1 == binding.size()) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string(flag) + " expects NAME=PATH, got '" + binding + "'");
    }
    return {binding.substr(0, pos), binding.substr(pos + 1)};
}

inline void emit(std::ostream &out, const nlohmann::json &j) {
    out << j.dump(2) << "\n";
}

}  // namespace detail

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qreal: quantum-logical truth values and measurement models on C^n", "qreal"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<double> eq_tol;
    app.add_option("--tol", eq_tol, "equality tolerance for operators and vectors");

    std::function<int()> action;

    // eval
    std::string formula;
    std::vector<std::string> obs_bindings;
    std::string state_path;
    auto *eval = app.add_subcommand("eval", "truth value of a formula in a state");
    eval->add_option("formula", formula, "formula text")->required();
    eval->add_option("--obs", obs_bindings, "observable binding NAME=PATH")->take_all();
    eval->add_option("--state", state_path, "state file")->required();
    eval->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const FormulaPtr f = parse(formula);
            std::map<std::string, Observable> bindings;
            for (const auto &b : obs_bindings) {
                auto [name, path] = detail::split_binding(b, "--obs");
                bindings.emplace(name, io::load_observable(path, name, tol));
            }
            const Environment env(std::move(bindings));
            const UnitVector psi = io::load_state(state_path);
            const TruthReport report = holds_in(*f, env, psi, tol);
            detail::emit(out, io::to_json(report));
            return report.holds ? kExitTrue : kExitFalse;
        };
    });

    // jointdet / jpd / com share the observable pair arguments
    std::string a_path;
    std::string b_path;
    auto add_pair = [&](CLI::App *sub, bool state_required) {
        sub->add_option("A", a_path, "first observable file")->required();
        sub->add_option("B", b_path, "second observable file")->required();
        auto *opt = sub->add_option("--state", state_path, "state file");
        if (state_required) {
            opt->required();
        }
    };

    auto *jointdet = app.add_subcommand("jointdet", "joint determinateness of A and B in a state");
    add_pair(jointdet, true);
    jointdet->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const Observable a = io::load_observable(a_path, "A", tol);
            const Observable b = io::load_observable(b_path, "B", tol);
            const UnitVector psi = io::load_state(state_path);
            const JointDeterminacy jd = jointly_determinate(a, b, psi, tol);
            detail::emit(out, {{"determinate", jd.determinate}, {"com_rank", jd.projection.rank()}});
            return jd.determinate ? kExitTrue : kExitFalse;
        };
    });

    auto *jpd = app.add_subcommand("jpd", "existence of a joint probability distribution in a state");
    add_pair(jpd, true);
    jpd->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const Observable a = io::load_observable(a_path, "A", tol);
            const Observable b = io::load_observable(b_path, "B", tol);
            const UnitVector psi = io::load_state(state_path);
            const JpdResult r = jpd_exists(a, b, psi, tol);
            detail::emit(out, io::to_json(r));
            return r.exists ? kExitTrue : kExitFalse;
        };
    });

    auto *com = app.add_subcommand("com", "commutator projection of A and B");
    add_pair(com, false);
    com->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const Observable a = io::load_observable(a_path, "A", tol);
            const Observable b = io::load_observable(b_path, "B", tol);
            const std::vector<SpectralFamily> fams{spectral_family(a, tol), spectral_family(b, tol)};
            const std::size_t rank = joint_determinacy_projection(fams, tol).rank();
            detail::emit(out, {{"rank", rank}, {"nowhere_commuting", rank == 0}});
            return rank == 0 ? kExitTrue : kExitFalse;
        };
    });

    // measure
    std::string model_path;
    std::vector<std::string> observables;
    std::vector<std::string> maps;
    auto *measure = app.add_subcommand("measure", "statistics, certificates and noise of a measurement model");
    measure->add_option("model", model_path, "model file")->required();
    measure->add_option("--state", state_path, "state file")->required();
    measure->add_option("--observable", observables, "observable NAME=PATH (repeatable)")->take_all();
    measure->add_option("--map", maps, "label map name, paired with --observable in order")->take_all();
    measure->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            if (observables.size() != maps.size()) {
                throw Error(ErrorKind::InvalidArgument, "each --observable needs a matching --map");
            }
            const MeasurementModel model = io::load_model(model_path, tol);
            const UnitVector psi = io::load_state(state_path);
            nlohmann::json report;
            report["distribution"] = io::to_json(output_distribution(model, psi), "outcome");
            report["observables"] = nlohmann::json::array();
            std::vector<std::pair<Observable, ValueMap>> targets;
            bool all_passed = true;
            for (std::size_t i = 0; i < observables.size(); ++i) {
                auto [name, path] = detail::split_binding(observables[i], "--observable");
                Observable a = io::load_observable(path, name, tol);
                const ValueMap &f = model.label_map(maps[i]);
                const auto cert = measures_in_state(model, a, f, psi, tol);
                all_passed = all_passed && cert.passed;
                report["observables"].push_back({{"name", name},
                                                 {"map", maps[i]},
                                                 {"defect", cert.defect},
                                                 {"passed", cert.passed},
                                                 {"epsilon", rms_noise(model, a, f, psi, tol)}});
                targets.emplace_back(std::move(a), f);
            }
            if (targets.size() == 2) {
                report["uncertainty"] = io::to_json(
                    uncertainty_report(model, targets[0].first, targets[0].second, targets[1].first, psi, tol));
            }
            detail::emit(out, report);
            return all_passed ? kExitTrue : kExitFalse;
        };
    });

    // search
    std::size_t probe_dim = 2;
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
    std::size_t budget = SearchOptions{}.budget;
    unsigned threads = 1;
    std::string out_path;
    bool verbose = false;
    auto *search = app.add_subcommand("search", "search for a simultaneous-measurement witness");
    search->add_option("A", a_path, "first observable file")->required();
    search->add_option("B", b_path, "second observable file")->required();
    search->add_option("--probe-dim", probe_dim, "probe dimension k (>= 2)")->required();
    search->add_option("--restarts", restarts, "number of random restarts");
    search->add_option("--seed", seed, "base random seed");
    search->add_option("--budget", budget, "objective evaluations per restart");
    search->add_option("--threads", threads, "worker threads");
    search->add_option("--out", out_path, "witness file to write")->required();
    search->add_flag("--verbose", verbose, "print one line per restart on stderr");
    search->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const Observable a = io::load_observable(a_path, "A", tol);
            const Observable b = io::load_observable(b_path, "B", tol);
            SearchOptions opts;
            opts.probe_dim = probe_dim;
            opts.restarts = restarts;
            opts.seed = seed;
            opts.budget = budget;
            opts.threads = threads;
            const SearchRecord record = search_simultaneous(a, b, opts, tol);
            if (verbose) {
                for (const auto &s : record.restarts) {
                    err << "restart " << s.index << ": defect " << std::setprecision(6) << s.defect << " after "
                        << s.evaluations << " evaluations\n";
                }
            }
            io::write_json_file(out_path, io::to_json(record));
            const bool success = record.defect <= tol.eq_tol;
            detail::emit(out, {{"defect", record.defect},
                               {"defect_a", record.defect_a},
                               {"defect_b", record.defect_b},
                               {"restart_index", record.restart_index},
                               {"success", success},
                               {"witness", out_path}});
            return success ? kExitTrue : kExitFalse;
        };
    });

    // context
    std::string fa_name;
    std::string fb_name;
    bool text = false;
    auto *context = app.add_subcommand("context", "contextual-interpretation report for one apparatus");
    context->add_option("model", model_path, "model file")->required();
    context->add_option("A", a_path, "first observable file")->required();
    context->add_option("fA", fa_name, "label map for A")->required();
    context->add_option("B", b_path, "second observable file")->required();
    context->add_option("fB", fb_name, "label map for B")->required();
    context->add_option("--state", state_path, "state file (a search witness also works)")->required();
    context->add_flag("--text", text, "human-readable output instead of JSON");
    context->callback([&] {
        action = [&] {
            const ToleranceConfig tol = tolerances_from_environment(eq_tol);
            const MeasurementModel model = io::load_model(model_path, tol);
            const Observable a = io::load_observable(a_path, "A", tol);
            const Observable b = io::load_observable(b_path, "B", tol);
            const UnitVector psi = io::load_state(state_path);
            const ContextReport r =
                context_report(model, a, model.label_map(fa_name), b, model.label_map(fb_name), psi, tol);
            if (text) {
                out << render_text(r);
            } else {
                detail::emit(out, io::to_json(r));
            }
            return r.both_measured ? kExitTrue : kExitFalse;
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kExitTrue : kExitError;
    }

    try {
        return action ? action() : kExitError;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
    } catch (const nlohmann::json::exception &e) {
        err << "error: malformed input: " << e.what() << "\n";
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace qreal::cli
