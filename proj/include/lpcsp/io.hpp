#pragma once

#include <string>

#include "json.hpp"
#include "lpcsp/gap.hpp"
#include "lpcsp/lp.hpp"

namespace lpcsp {

using Json = nlohmann::ordered_json;

/// Instance file: q, s, t, w, n, predicates[{name, arity, truth_table}],
/// constraints[{predicate, scope, weight}], and optionally degree_index
/// (per variable, 0-based constraint ids in index order) when it differs
/// from the order of appearance.
Json instance_to_json(const CspInstance& instance);
/// Throws BadInstance on malformed input; build() validates the rest.
CspInstance instance_from_json(const Json& j);

/// {value, x: [[...]], mu: [{constraint, table}]}
Json solution_to_json(const LpSolution& sol);
LpSolution solution_from_json(const Json& j);

/// Instance fields plus mode, N, T, label, origin and (Lp) alpha.
Json gap_to_json(const GapInstance& gap);

/// {columns: [{label, objective}], rows: [{label, cmp, rhs, coeffs}]}
Json program_to_json(const LinearProgram& lp);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

CspInstance load_instance(const std::string& path);
LpSolution load_solution(const std::string& path);

/// Shortest round-trip decimal form, always with a '.' or exponent.
std::string format_double(double x);

}  // namespace lpcsp
