#include "qsts/metrics.hpp"

#include <string>

#include "qsts/error.hpp"
#include "qsts/parties.hpp"

namespace qsts {

EfficiencyReport efficiency(int m, int n) {
  if (m < 1 || n < 1) throw InvalidArgument("efficiency needs m, n >= 1");
  EfficiencyReport r;
  r.useful_qubits = static_cast<std::int64_t>(n + 1) * m;
  r.transmitted_qubits = r.useful_qubits;
  r.classical_bits = static_cast<std::int64_t>(n + 2) * m;
  r.qubit_efficiency = Rational(r.useful_qubits, r.transmitted_qubits);
  r.total_efficiency =
      Rational(r.useful_qubits, r.transmitted_qubits + r.classical_bits);
  return r;
}

Rational threshold_success(int m, int n, const SecretState& secret,
                           int withheld_controller, std::uint64_t branch_seed) {
  if (m < 1 || n < 1) throw InvalidArgument("threshold needs m, n >= 1");
  if (withheld_controller < 1 || withheld_controller > n) {
    throw InvalidArgument("withheld controller out of range");
  }
  ProtocolConfig config = make_config(m, n, branch_seed);
  const Transcript actual = run_protocol(config, secret);

  ForcedOutcomes branch{actual.bell_outcomes, {}};
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < n; ++c) branch.signs.push_back(actual.sign_outcomes[i][c]);
  }
  config.policy = branch;

  const PartyId withheld = PartyId::controller_at(withheld_controller);
  std::int64_t successes = 0;
  const std::uint64_t guesses = std::uint64_t{1} << m;
  for (std::uint64_t g = 0; g < guesses; ++g) {
    std::vector<SignOutcome> guess(m);
    bool correct = true;
    for (int i = 0; i < m; ++i) {
      guess[i] = ((g >> (m - 1 - i)) & 1U) ? SignOutcome::Minus : SignOutcome::Plus;
      correct = correct && guess[i] == actual.sign_outcomes[i][withheld_controller - 1];
    }
    const Transcript t = run_session_with_withholding(config, secret, withheld, guess);
    if (!correct && t.fidelity >= kGenericFidelityCeiling) {
      throw DegenerateSecretError(
          "a wrong guess reconstructs the secret (fidelity " +
          std::to_string(t.fidelity) + "); use a generic secret");
    }
    if (t.fidelity >= kSuccessFidelity) ++successes;
  }
  return Rational(successes, static_cast<std::int64_t>(guesses));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace qsts
