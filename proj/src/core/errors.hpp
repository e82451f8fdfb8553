#pragma once

#include <stdexcept>
#include <string>

namespace hodo {

// Failure vocabulary shared by the whole library. Codes are stable because the
// C API maps them one-to-one onto its status enum.
enum class errc {
  invalid_argument,
  parse,
  config,
  domain,          // point outside the map's validity region
  derivative,      // FD stencil left the domain or derivative unavailable
  singular,        // det M below tolerance, i.e. the blowup surface itself
  degenerate,      // D1 ~ 0 or pole order too high for the requested fit
  no_convergence,
  branch_violation,
  no_blowup,
  empty_locus,
  window,          // asymptotic window contaminated by another root
  contamination,   // another blowup sheet crosses the sampling ray
  not_available,   // optional ingredient (e.g. initial data) absent
  full_rank,       // null vectors requested of a regular matrix
  zero_vorticity,
  io,
  internal,
};

constexpr const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::parse: return "parse";
    case errc::config: return "config";
    case errc::domain: return "domain";
    case errc::derivative: return "derivative";
    case errc::singular: return "singular";
    case errc::degenerate: return "degenerate";
    case errc::no_convergence: return "no_convergence";
    case errc::branch_violation: return "branch_violation";
    case errc::no_blowup: return "no_blowup";
    case errc::empty_locus: return "empty_locus";
    case errc::window: return "window";
    case errc::contamination: return "contamination";
    case errc::not_available: return "not_available";
    case errc::full_rank: return "full_rank";
    case errc::zero_vorticity: return "zero_vorticity";
    case errc::io: return "io";
    case errc::internal: return "internal";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

}  // namespace hodo
