#pragma once

#include <stdexcept>
#include <string>

namespace prequant {

/// Domain error categories surfaced by the engine. Each maps to one named
/// failure mode of an operation's contract.
enum class errc {
  removed_point,            // evaluation within 1e-9 of a deleted point
  dimension_mismatch,       // point/tangent dimension does not match the model
  not_closed,               // a loop was required but endpoints differ
  endpoint_mismatch,        // concatenation or composition endpoints disagree
  not_homotopic,            // no canonical interpolation between the inputs
  antipodal_degeneracy,     // sphere interpolation through antipodal points
  quadrature_not_converged, // error estimate above the requested tolerance
  unsupported_model,        // operation not defined on this model space
  unsupported_symmetry,     // symmetry incompatible with the model space
  not_a_relation,           // word does not reduce to the identity
  missing_declared_value,   // declared cocycle table has no entry for a pair
  basis_mismatch,           // exact values over different symbol registries
  unmarked_endpoint,        // morphism endpoint is not a marked point
  not_flat,                 // flat-twist operation on a non-flat scenario
  unreachable_phase,        // no loop in the constructive family fits
  incompatible_character,   // character does not annihilate the period group
  parse_error,              // malformed JSON/CSV input
  schema_error,             // well-formed input violating the schema
  io_error,                 // filesystem failure
  invalid_argument          // precondition violated (catch-all)
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::removed_point: return "removed_point";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::not_closed: return "not_closed";
    case errc::endpoint_mismatch: return "endpoint_mismatch";
    case errc::not_homotopic: return "not_homotopic";
    case errc::antipodal_degeneracy: return "antipodal_degeneracy";
    case errc::quadrature_not_converged: return "quadrature_not_converged";
    case errc::unsupported_model: return "unsupported_model";
    case errc::unsupported_symmetry: return "unsupported_symmetry";
    case errc::not_a_relation: return "not_a_relation";
    case errc::missing_declared_value: return "missing_declared_value";
    case errc::basis_mismatch: return "basis_mismatch";
    case errc::unmarked_endpoint: return "unmarked_endpoint";
    case errc::not_flat: return "not_flat";
    case errc::unreachable_phase: return "unreachable_phase";
    case errc::incompatible_character: return "incompatible_character";
    case errc::parse_error: return "parse_error";
    case errc::schema_error: return "schema_error";
    case errc::io_error: return "io_error";
    case errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace prequant
