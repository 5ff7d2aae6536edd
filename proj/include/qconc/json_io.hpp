#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include <json.hpp>

#include "qconc/kraus.hpp"
#include "qconc/matrix.hpp"
#include "qconc/state.hpp"
#include "qconc/theorem.hpp"

namespace qconc {

using Json = nlohmann::json;

namespace detail {

inline Json real_part_rows(const ComplexMatrix& m, bool imaginary) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_parts(const Json& re, const Json& im, std::size_t rows,
                                       std::size_t cols, const std::string& what) {
    if (!re.is_array() || !im.is_array() || re.size() != rows || im.size() != rows)
        throw InvalidInputError(what + ": 're'/'im' must be arrays of " + std::to_string(rows)
                                + " rows");
    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const Json& rrow = re[i];
        const Json& irow = im[i];
        if (!rrow.is_array() || !irow.is_array() || rrow.size() != cols || irow.size() != cols)
            throw InvalidInputError(what + ": row " + std::to_string(i) + " must have "
                                    + std::to_string(cols) + " entries");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!rrow[j].is_number() || !irow[j].is_number())
                throw InvalidInputError(what + ": entries must be numbers");
            entries.emplace_back(rrow[j].get<double>(), irow[j].get<double>());
        }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

inline std::size_t positive_dim(const Json& j, const char* key, const std::string& what) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() <= 0)
        throw InvalidInputError(what + ": '" + key + "' must be a positive integer");
    return static_cast<std::size_t>(j[key].get<long long>());
}

} // namespace detail

/// {"re": [[..]], "im": [[..]]} matrix block.
inline Json matrix_to_json(const ComplexMatrix& m) {
    return Json{{"re", detail::real_part_rows(m, false)}, {"im", detail::real_part_rows(m, true)}};
}

/// State format: {"dimA": m, "dimB": n, "re": m x n rows, "im": m x n rows}.
inline Json state_to_json(const PureBipartiteState& s) {
    Json j = matrix_to_json(s.coeff());
    j["dimA"] = s.dim_a();
    j["dimB"] = s.dim_b();
    return j;
}

inline PureBipartiteState state_from_json(const Json& j, double tol = tolerance::kEquality) {
    if (!j.is_object()) throw InvalidInputError("state: expected a JSON object");
    const std::size_t dim_a = detail::positive_dim(j, "dimA", "state");
    const std::size_t dim_b = detail::positive_dim(j, "dimB", "state");
    if (!j.contains("re") || !j.contains("im"))
        throw InvalidInputError("state: missing 're'/'im' coefficient arrays");
    ComplexMatrix coeff = detail::matrix_from_parts(j["re"], j["im"], dim_a, dim_b, "state");
    return PureBipartiteState(std::move(coeff), tol);
}

/// Operation format: {"party": "Alice"|"Bob", "re": .., "im": ..}.
inline Json operation_to_json(const LocalOperation& op) {
    Json j = matrix_to_json(op.kraus());
    j["party"] = to_string(op.party());
    return j;
}

inline LocalOperation operation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("party") || !j["party"].is_string())
        throw InvalidInputError("operation: expected an object with a 'party' string");
    const std::string party = j["party"].get<std::string>();
    if (party != "Alice" && party != "Bob")
        throw InvalidInputError("operation: party must be 'Alice' or 'Bob'");
    if (!j.contains("re") || !j.contains("im"))
        throw InvalidInputError("operation: missing 're'/'im' arrays");
    if (!j["re"].is_array() || j["re"].empty())
        throw InvalidInputError("operation: 're' must be a nonempty array");
    const std::size_t dim = j["re"].size();
    ComplexMatrix kraus = detail::matrix_from_parts(j["re"], j["im"], dim, dim, "operation");
    return LocalOperation(party == "Alice" ? Party::Alice : Party::Bob, std::move(kraus));
}

/// Density operator format: {"dim": d, "re": d x d rows, "im": d x d rows}.
inline Json density_to_json(const DensityMatrix& rho) {
    Json j = matrix_to_json(rho.matrix());
    j["dim"] = rho.dim();
    return j;
}

inline DensityMatrix density_from_json(const Json& j, double tol = tolerance::kEquality) {
    if (!j.is_object()) throw InvalidInputError("density: expected a JSON object");
    const std::size_t dim = detail::positive_dim(j, "dim", "density");
    if (!j.contains("re") || !j.contains("im"))
        throw InvalidInputError("density: missing 're'/'im' arrays");
    ComplexMatrix m = detail::matrix_from_parts(j["re"], j["im"], dim, dim, "density");
    return DensityMatrix(std::move(m), tol);
}

/// {"trials", "bestScore", "seed", "bestOperation": {"A": .., "B": ..},
///  "clauses": [..]} falsifier report.
inline Json falsifier_report_to_json(const FalsifierReport& r) {
    return Json{{"trials", r.trials},
                {"bestScore", r.best_score},
                {"seed", r.seed},
                {"bestOperation",
                 Json{{"A", matrix_to_json(r.best_alice.kraus())},
                      {"B", matrix_to_json(r.best_bob.kraus())}}},
                {"clauses", r.clauses}};
}

} // namespace qconc
