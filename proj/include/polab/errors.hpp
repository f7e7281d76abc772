#pragma once

#include <stdexcept>
#include <string>

namespace polab {

// Invalid arguments or out-of-domain inputs (bad tokens, length mismatches,
// malformed configs).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// DDRO's loser term log(2 - exp(zt_l)) leaves its domain as zt_l -> log 2.
// The offending value rides along so callers can decide to clamp.
class DdroDomainError : public DomainError {
 public:
  explicit DdroDomainError(double zt_l)
      : DomainError("ddro loser statistic out of domain: zt_l = " +
                    std::to_string(zt_l) + " >= log(2) - eps"),
        zt_l(zt_l) {}
  double zt_l;
};

// Operation asked for geometry with a zero-norm score direction.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite-difference oracle refuses to probe next to a hinge kink or a
// domain boundary, where central differences are meaningless.
class KinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite diagnostic during training; carries step context for the abort.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config file problems, reported with file:line context.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polab
