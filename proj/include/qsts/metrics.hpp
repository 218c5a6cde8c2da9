#pragma once

#include <cstdint>

#include <boost/rational.hpp>

#include "qsts/protocol.hpp"

namespace qsts {

using Rational = boost::rational<std::int64_t>;

struct EfficiencyReport {
  std::int64_t useful_qubits = 0;       // q_u
  std::int64_t transmitted_qubits = 0;  // q_t
  std::int64_t classical_bits = 0;      // b_t
  Rational qubit_efficiency;            // q_u / q_t
  Rational total_efficiency;            // q_u / (q_t + b_t)
};

// q_u = q_t = (n+1) m, b_t = (n+2) m. Throws InvalidArgument unless m, n >= 1.
EfficiencyReport efficiency(int m, int n);

// Fidelity at or above this counts as a successful reconstruction.
inline constexpr double kSuccessFidelity = 1.0 - 1e-9;
// Every wrong guess must stay below this for the secret to count as generic.
inline constexpr double kGenericFidelityCeiling = 1.0 - 1e-6;

// Fraction of the 2^m sign guesses for one withheld controller that still
// reconstruct the secret, over one fixed branch (sampled from branch_seed).
// Throws DegenerateSecretError if a wrong guess also reaches fidelity
// kGenericFidelityCeiling.
Rational threshold_success(int m, int n, const SecretState& secret,
                           int withheld_controller = 1,
                           std::uint64_t branch_seed = 0);

std::string to_string(const Rational& r);  // "2/5", "1"

}  // namespace qsts
