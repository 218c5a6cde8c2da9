#pragma once

// One run of symmetric multiparty state sharing of an m-qubit secret over m
// (n+2)-qubit GHZ channels: the sender Bell-measures each secret qubit with
// her channel photon, n controllers measure their photons in the sigma-x
// basis, and the receiver repairs each of its m photons with one of U0..U3.

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "qsts/statevector.hpp"

namespace qsts {

enum class CorrectionOp : std::uint8_t { U0, U1, U2, U3 };

inline constexpr std::array<CorrectionOp, 4> kCorrectionOps{
    CorrectionOp::U0, CorrectionOp::U1, CorrectionOp::U2, CorrectionOp::U3};

Gate2x2 gate(CorrectionOp op);
std::string_view to_string(CorrectionOp op);
std::optional<CorrectionOp> parse_correction(std::string_view text);

// (0,+) -> U0, (0,-) -> U1, (1,+) -> U2, (1,-) -> U3.
CorrectionOp compute_correction(int bit_value, Parity parity);

struct SampleOutcomes {
  friend bool operator==(const SampleOutcomes&, const SampleOutcomes&) = default;
};
struct EnumerateOutcomes {
  friend bool operator==(const EnumerateOutcomes&,
                         const EnumerateOutcomes&) = default;
};
// Flat forced list: m Bell outcomes, then the m x n sign matrix group-major
// (signs[i * n + c] is controller c+1's result on group i+1).
struct ForcedOutcomes {
  std::vector<BellOutcome> bell;
  std::vector<SignOutcome> signs;
  friend bool operator==(const ForcedOutcomes&, const ForcedOutcomes&) = default;
};

using OutcomePolicy =
    std::variant<SampleOutcomes, EnumerateOutcomes, ForcedOutcomes>;

struct ProtocolConfig {
  int m = 1;         // secret qubits
  int n = 1;         // controllers; agents are 1..n+1
  int receiver = 2;  // agent index in [1, n+1]
  std::uint64_t seed = 0;
  OutcomePolicy policy = SampleOutcomes{};

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

// Config with the last agent (n+1) as receiver.
ProtocolConfig make_config(int m, int n, std::uint64_t seed = 0,
                           OutcomePolicy policy = SampleOutcomes{});

// Throws InvalidArgument / CapacityError.
void validate(const ProtocolConfig& config);

// Register positions. Secret qubit i sits at i; the GHZ photon of group i held
// by holder j (0 = sender, 1..n+1 = agents) sits at m + i*(n+2) + j.
// Groups are 0-based here; controllers are 1-based ordinals.
class RegisterLayout {
public:
  explicit RegisterLayout(const ProtocolConfig& config);

  int m() const { return m_; }
  int n() const { return n_; }
  int total_qubits() const { return m_ * (n_ + 3); }
  int receiver_agent() const { return receiver_; }

  int secret(int group) const { return group; }
  int photon(int group, int holder) const {
    return m_ + group * (n_ + 2) + holder;
  }
  int sender_photon(int group) const { return photon(group, 0); }
  int receiver_photon(int group) const { return photon(group, receiver_); }
  // Agent index of the c-th controller (c in [1, n]).
  int controller_agent(int c) const;
  int controller_photon(int group, int c) const {
    return photon(group, controller_agent(c));
  }

private:
  int m_;
  int n_;
  int receiver_;
};

// Statevector whose qubits carry stable labels (original layout positions),
// so measurements can address qubits after earlier ones were removed.
class TrackedRegister {
public:
  explicit TrackedRegister(PureState state);

  const PureState& state() const { return state_; }
  const std::vector<int>& labels() const { return labels_; }
  bool contains(int label) const;

  Measurement<BellOutcome> measure_bell(int label_a, int label_b,
                                        std::optional<BellOutcome> forced,
                                        RandomStream& rng);
  Measurement<SignOutcome> measure_sigma_x(int label,
                                           std::optional<SignOutcome> forced,
                                           RandomStream& rng);

private:
  int position(int label) const;
  void drop(std::initializer_list<int> dropped);

  PureState state_;
  std::vector<int> labels_;
};

class SecretState {
public:
  explicit SecretState(PureState state);

  int m() const { return state_.num_qubits(); }
  const PureState& state() const { return state_; }
  std::span<const Amplitude> amplitudes() const { return state_.amplitudes(); }

  friend bool operator==(const SecretState&, const SecretState&) = default;

private:
  PureState state_;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<BellOutcome> bell_outcomes;               // per group
  std::vector<std::vector<SignOutcome>> sign_outcomes;  // [group][controller]
  std::vector<int> minus_counts;                        // per group
  std::vector<Parity> parities;                         // P_i per group
  std::vector<CorrectionOp> corrections;
  double branch_probability = 0.0;
  double fidelity = 0.0;
  int classical_bits = 0;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// Equal on every discrete field; reals within real_tolerance.
bool equivalent(const Transcript& a, const Transcript& b,
                double real_tolerance);

struct BranchRun {
  Transcript transcript;
  PureState received;       // receiver photons before correction
  PureState reconstructed;  // after correction
};

// (|0..0> + |1..1>)/sqrt(2) over k >= 2 qubits.
PureState prepare_ghz(int k);

// Haar-random m-qubit secret (normalized complex Gaussian vector).
SecretState random_secret(int m, RandomStream& rng);

// Policy must be Sample or Forced.
Transcript run_protocol(const ProtocolConfig& config,
                        const SecretState& secret);
BranchRun run_protocol_detailed(const ProtocolConfig& config,
                                const SecretState& secret);

inline constexpr std::uint64_t kDefaultBranchLimit = std::uint64_t{1} << 20;

std::uint64_t branch_count(int m, int n);

// One transcript per element of {Bell}^m x {sign}^(m n), ordered as the flat
// forced list (Bell outcomes most significant). The config's policy is
// ignored.
std::vector<Transcript> enumerate_branches(
    const ProtocolConfig& config, const SecretState& secret,
    std::uint64_t branch_limit = kDefaultBranchLimit);

// Forced outcomes for a flat branch index in enumerate_branches order.
ForcedOutcomes branch_outcomes(int m, int n, std::uint64_t index);

// Receiver-side bookkeeping shared with the party harness.
struct ReceiverDecision {
  std::vector<int> minus_counts;
  std::vector<Parity> parities;
  std::vector<CorrectionOp> corrections;
};
ReceiverDecision decide_corrections(
    const std::vector<BellOutcome>& bell,
    const std::vector<std::vector<SignOutcome>>& signs);
PureState apply_corrections(const PureState& received,
                            const std::vector<CorrectionOp>& corrections);

// Independent stream for measurement slot k of a run with the given seed.
RandomStream slot_stream(std::uint64_t seed, std::uint64_t slot);

}  // namespace qsts
