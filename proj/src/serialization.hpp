#ifndef BROYDEN_LAB_SRC_SERIALIZATION_HPP
#define BROYDEN_LAB_SRC_SERIALIZATION_HPP

#include <cstdint>
#include <string>

#include "broyden_lab/problems.hpp"
#include "broyden_lab/solver.hpp"
#include "json.hpp"

namespace broyden_lab::io {

using json = nlohmann::json;

/// Instance from {kind, n, m?, spectrum? | a_rows?, b?, mu?, L?, gamma?, seed?}.
/// A missing seed is taken from default_seed. Throws ConfigError.
ProblemInstance instance_from_json(const json& j, std::uint64_t default_seed);

/// The instance JSON with its seed resolved, used for hashing.
json resolved_instance_json(const json& j, std::uint64_t default_seed);

/// "BFGS" | "DFP" | number | {"tau": t} | {"sequence": [...]}.
TauSchedule schedule_from_json(const json& j);

/// Missing keys keep their defaults.
SolverConfig solver_from_json(const json& j);

/// 64-bit FNV-1a of text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

/// JSON number, or null when not finite.
json json_number(double v);

}  // namespace broyden_lab::io

#endif  // BROYDEN_LAB_SRC_SERIALIZATION_HPP
