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

// JSON file formats and report serialization.
//
//   matrix file : {"dim": n, "matrix": [[[re, im], ...], ...]}
//   state file  : {"dim": n, "vector": [[re, im], ...]}
//   model file  : {"sys_dim": n, "probe_dim": k, "probe_state": <state>,
//                  "unitary": <matrix, n*k>, "meter": <matrix, k>,
//                  "label_maps": {name: [[eigenvalue, output], ...]}}
//
// Doubles are written with the shortest representation that round-trips.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qreal/errors.hpp"
#include "qreal/measure.hpp"
#include "qreal/numlin.hpp"
#include "qreal/qlogic.hpp"
#include "qreal/search.hpp"
#include "qreal/spectral.hpp"

namespace qreal::io {

using json = nlohmann::json;

inline constexpr double kStateNormTolerance = 1e-6;
inline constexpr double kUnitaryTolerance = 1e-8;

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Io, "'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_json_file(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw Error(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string &what) {
    throw Error(ErrorKind::Io, what);
}

inline const json &field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        schema_error(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

inline std::size_t positive_int(const json &j, const char *key) {
    const json &v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        schema_error(std::string("field '") + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

inline double finite_number(const json &v, const char *what) {
    if (!v.is_number()) {
        schema_error(std::string(what) + " must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        schema_error(std::string(what) + " must be finite");
    }
    return x;
}

inline cplx complex_entry(const json &v) {
    if (!v.is_array() || v.size() != 2) {
        schema_error("complex entries must be [re, im] pairs");
    }
    return {finite_number(v[0], "real part"), finite_number(v[1], "imaginary part")};
}

inline json complex_to_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices, states, observables

inline Matrix matrix_from_json(const json &j) {
    const std::size_t n = detail::positive_int(j, "dim");
    const json &rows = detail::field(j, "matrix");
    if (!rows.is_array() || rows.size() != n) {
        detail::schema_error("'matrix' must have " + std::to_string(n) + " rows");
    }
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n) {
            detail::schema_error("matrix row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        }
        for (std::size_t c = 0; c < n; ++c) {
            m(i, c) = detail::complex_entry(rows[i][c]);
        }
    }
    return m;
}

inline json matrix_to_json(const Matrix &m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(detail::complex_to_json(m(i, c)));
        }
        rows.push_back(std::move(row));
    }
    return json{{"dim", m.rows()}, {"matrix", std::move(rows)}};
}

/// Accepts a state body, or any object carrying one under "state" (such as a search witness).
inline UnitVector state_from_json(const json &j) {
    if (j.is_object() && !j.contains("vector") && j.contains("state")) {
        return state_from_json(j.at("state"));
    }
    const std::size_t n = detail::positive_int(j, "dim");
    const json &vec = detail::field(j, "vector");
    if (!vec.is_array() || vec.size() != n) {
        detail::schema_error("'vector' must have " + std::to_string(n) + " entries");
    }
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = detail::complex_entry(vec[i]);
    }
    if (std::abs(norm(v) - 1.0) > kStateNormTolerance) {
        throw Error(ErrorKind::NotNormalized, "state norm " + std::to_string(norm(v)) + " is not within " +
                                                  std::to_string(kStateNormTolerance) + " of 1");
    }
    return UnitVector::normalized(std::move(v));
}

inline json state_to_json(const UnitVector &psi) {
    json vec = json::array();
    for (const auto &z : psi.vec()) {
        vec.push_back(detail::complex_to_json(z));
    }
    return json{{"dim", psi.dim()}, {"vector", std::move(vec)}};
}

inline Observable observable_from_json(const json &j, const std::string &name, const ToleranceConfig &tol = {}) {
    return Observable(matrix_from_json(j), name, tol);
}

inline Matrix load_matrix(const std::string &path) {
    return matrix_from_json(read_json_file(path));
}

inline UnitVector load_state(const std::string &path) {
    return state_from_json(read_json_file(path));
}

inline Observable load_observable(const std::string &path, const std::string &name, const ToleranceConfig &tol = {}) {
    return observable_from_json(read_json_file(path), name, tol);
}

// ---------------------------------------------------------------------------
// Models

inline ValueMap value_map_from_json(const json &j) {
    if (!j.is_array()) {
        detail::schema_error("label maps must be arrays of [eigenvalue, output] pairs");
    }
    ValueMap f;
    for (const auto &pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            detail::schema_error("label map entries must be [eigenvalue, output] pairs");
        }
        f.emplace_back(detail::finite_number(pair[0], "label map eigenvalue"),
                       detail::finite_number(pair[1], "label map output"));
    }
    return f;
}

inline json value_map_to_json(const ValueMap &f) {
    json arr = json::array();
    for (const auto &[in, out] : f) {
        arr.push_back(json::array({in, out}));
    }
    return arr;
}

inline MeasurementModel model_from_json(const json &j, const ToleranceConfig &tol = {}) {
    const std::size_t n = detail::positive_int(j, "sys_dim");
    const std::size_t k = detail::positive_int(j, "probe_dim");
    UnitVector xi = state_from_json(detail::field(j, "probe_state"));
    Matrix u = matrix_from_json(detail::field(j, "unitary"));
    if (u.rows() != n * k) {
        throw Error(ErrorKind::DimMismatch, "unitary has dim " + std::to_string(u.rows()) + ", expected " +
                                                std::to_string(n * k));
    }
    if (!is_unitary(u, kUnitaryTolerance)) {
        throw Error(ErrorKind::NotUnitary, "unitary deviates from unitarity by more than 1e-8");
    }
    Observable meter = observable_from_json(detail::field(j, "meter"), "M", tol);
    std::map<std::string, ValueMap> maps;
    if (j.contains("label_maps")) {
        const json &lm = j.at("label_maps");
        if (!lm.is_object()) {
            detail::schema_error("'label_maps' must be an object");
        }
        for (const auto &[name, body] : lm.items()) {
            maps.emplace(name, value_map_from_json(body));
        }
    }
    ToleranceConfig load_tol = tol;
    load_tol.eq_tol = std::max(tol.eq_tol, kUnitaryTolerance);
    return MeasurementModel(n, k, std::move(xi), std::move(u), std::move(meter), std::move(maps), load_tol);
}

inline json model_to_json(const MeasurementModel &m) {
    json maps = json::object();
    for (const auto &[name, f] : m.label_maps()) {
        maps[name] = value_map_to_json(f);
    }
    return json{{"sys_dim", m.sys_dim()},
                {"probe_dim", m.probe_dim()},
                {"probe_state", state_to_json(m.probe_state())},
                {"unitary", matrix_to_json(m.coupling())},
                {"meter", matrix_to_json(m.meter().matrix())},
                {"label_maps", std::move(maps)}};
}

inline MeasurementModel load_model(const std::string &path, const ToleranceConfig &tol = {}) {
    return model_from_json(read_json_file(path), tol);
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const Distribution &d, const char *key = "value") {
    json arr = json::array();
    for (const auto &vp : d) {
        arr.push_back(json{{key, vp.value}, {"probability", vp.probability}});
    }
    return arr;
}

inline json to_json(const TruthReport &r) {
    return json{{"probability", r.probability}, {"holds", r.holds}, {"projection_rank", r.projection.rank()}};
}

inline json to_json(const CorrelationCertificate &c) {
    return json{{"defect", c.defect}, {"passed", c.passed}};
}

inline json to_json(const UncertaintyReport &r) {
    return json{{"epsilon", r.epsilon}, {"eta", r.eta},     {"sigma_a", r.sigma_a},
                {"sigma_b", r.sigma_b}, {"lhs", r.lhs},     {"bound", r.bound},
                {"satisfied", r.satisfied}};
}

inline json to_json(const JpdResult &r) {
    json cand = json::array();
    for (const auto &c : r.candidate) {
        cand.push_back(json{{"a", c.a_value}, {"b", c.b_value}, {"probability", c.probability}});
    }
    return json{{"exists", r.exists}, {"candidate", std::move(cand)}};
}

inline json to_json(const StateTruth &t) {
    return json{{"probability", t.probability}, {"holds", t.holds}};
}

inline json to_json(const ContextReport &r) {
    return json{{"a", r.a_name},
                {"b", r.b_name},
                {"cert_a", to_json(r.cert_a)},
                {"cert_b", to_json(r.cert_b)},
                {"both_measured", r.both_measured},
                {"nowhere_commuting", r.nowhere_commuting},
                {"com_rank", r.com_rank},
                {"jointly_determinate", r.jointly_determinate},
                {"jpd", to_json(r.jpd)},
                {"equal_in_state", to_json(r.equal_in_state)},
                {"output_equals_a", to_json(r.output_equals_a)},
                {"output_equals_b", to_json(r.output_equals_b)},
                {"extended_equal", to_json(r.extended_equal)},
                {"non_transitivity_exhibited", r.non_transitivity_exhibited}};
}

/// Witness file: a model file plus the state, the defect and search metadata.
inline json to_json(const SearchRecord &r) {
    json j = model_to_json(r.model);
    j["state"] = state_to_json(r.psi);
    j["defect"] = r.defect;
    j["defect_a"] = r.defect_a;
    j["defect_b"] = r.defect_b;
    j["restart_index"] = r.restart_index;
    return j;
}

}  // namespace qreal::io
