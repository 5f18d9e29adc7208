#pragma once

#include <stdexcept>
#include <string>

namespace dgm {

enum class Errc {
  unknown_symbol,
  unknown_reference,
  out_of_domain,
  type_mismatch,
  self_wiring,
  algebraic_loop,
  invalid_partition,
  budget_exceeded,
  compile_error,
  dangling_port,
  unknown_kind,
  environment_contract,
  snapshot_mismatch,
  stale_basis,
  certificate_invalid,
  forbidden_edit,
  unresolvable_hash,
  missing_artifact,
  bad_input,
};

/// Single exception type carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace dgm
