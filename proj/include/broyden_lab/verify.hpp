#ifndef BROYDEN_LAB_VERIFY_HPP
#define BROYDEN_LAB_VERIFY_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "broyden_lab/operator_core.hpp"

namespace broyden_lab {

/// Random SPD operator Q diag(e^{s_i}) Q^T with s_i uniform in [-log_spread, log_spread].
SpdOperator random_spd(std::mt19937_64& rng, int n, double log_spread, Role role = Role::PrimalToDual);

struct UpdateCase {
  SpdOperator a;
  SpdOperator g;
  PrimalVector u;
  double tau;
};

/// Random (A, G, u). With a_below_g, G = A + W for a random PSD W of random rank.
UpdateCase random_update_case(std::mt19937_64& rng, int n, double tau, bool a_below_g);

struct CheckResult {
  std::string name;
  int trials = 0;
  int violations = 0;
  double worst_slack = 0.0;  // smallest observed (bound side - measured side)
  double seconds = 0.0;
  bool passed() const { return trials > 0 && violations == 0; }
};

struct VerifyReport {
  std::vector<CheckResult> results;
  bool passed() const;
};

/// Randomized identity and inequality suites for the update class:
/// inverse and determinant identities, eigenvalue bracket preservation,
/// potential decrease bounds, metric change bound and the scalar inequality
/// on a trials-sized (alpha, beta) grid. Dimensions cycle through 1..n_max and
/// tau through {0, 0.25, 0.5, 0.75, 1}.
VerifyReport run_verify_suite(int n_max, int trials, std::uint64_t seed);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_VERIFY_HPP
