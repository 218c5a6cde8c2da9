#pragma once

// The protocol run as n+2 sequential state machines (sender, n controllers,
// receiver) exchanging classical results over an in-memory bus. The quantum
// state lives in one shared backend; each party may only touch the photons
// the register layout assigns to it.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsts/protocol.hpp"

namespace qsts {

struct PartyId {
  enum class Role : std::uint8_t { Alice, Controller, Receiver };
  Role role = Role::Alice;
  int controller = 0;  // 1..n for controllers, 0 otherwise

  static PartyId alice() { return {Role::Alice, 0}; }
  static PartyId controller_at(int c) { return {Role::Controller, c}; }
  static PartyId receiver() { return {Role::Receiver, 0}; }

  friend bool operator==(const PartyId&, const PartyId&) = default;
};

std::string to_string(const PartyId& id);  // "Alice", "Controller:2", "Receiver"
std::optional<PartyId> parse_party_id(std::string_view text);

enum class MessageKind : std::uint8_t { BellResults, SignResults, Done };
std::string_view to_string(MessageKind kind);

struct ClassicalMessage {
  std::uint64_t session = 0;
  PartyId sender;
  MessageKind kind = MessageKind::Done;
  std::vector<BellOutcome> bell;  // BellResults payload, one per group
  std::vector<SignOutcome> signs;  // SignResults payload, one per group

  friend bool operator==(const ClassicalMessage&,
                         const ClassicalMessage&) = default;
};

// One JSON object per line: {"session":..,"sender":..,"kind":..,"payload":[..]}.
std::string to_line(const ClassicalMessage& msg);
ClassicalMessage parse_line(std::string_view line);
std::string serialize_log(const std::vector<ClassicalMessage>& log);
std::vector<ClassicalMessage> parse_log(std::string_view text);

// Information content of the published results: 2 bits per Bell outcome and
// 1 bit per sign.
int published_bits(const std::vector<ClassicalMessage>& log);

// Shared simulated photons; enforces ownership and accumulates the Born
// probability of the realized branch.
class QuantumBackend {
public:
  QuantumBackend(const ProtocolConfig& config, const SecretState& secret);

  const RegisterLayout& layout() const { return layout_; }

  BellOutcome measure_bell(const PartyId& who, int group);
  SignOutcome measure_sign(const PartyId& who, int group);
  // The receiver's photons, group order; only valid once every other photon
  // has been measured.
  PureState receiver_state(const PartyId& who) const;
  double branch_probability() const { return probability_; }

private:
  int owner_agent(const PartyId& who) const;

  ProtocolConfig config_;
  RegisterLayout layout_;
  TrackedRegister reg_;
  double probability_ = 1.0;
};

// Validates every posted message and queues it for delivery.
class MessageBus {
public:
  MessageBus(std::uint64_t session, int m, int n);

  // Throws SessionError on a wrong session, a kind the sender may not send,
  // a malformed payload, or a second message from the same party.
  void post(ClassicalMessage msg);

  bool has_pending() const { return !pending_.empty(); }
  std::size_t pending_count() const { return pending_.size(); }
  ClassicalMessage take(std::size_t index);

private:
  std::uint64_t session_;
  int m_;
  int n_;
  std::vector<PartyId> sent_;
  std::deque<ClassicalMessage> pending_;
};

enum class Scheduling { Fifo, Adversarial };

struct SessionOptions {
  Scheduling scheduling = Scheduling::Fifo;
  std::uint64_t scheduler_seed = 0;
  std::uint64_t session = 1;
  // This party runs its measurements but never publishes (receiver not told).
  std::optional<PartyId> silent;
  int step_budget = 0;  // 0 -> 10 (n + 2)
};

struct SessionResult {
  Transcript transcript;
  std::vector<ClassicalMessage> log;  // delivery order
};

// Throws SessionError if the session is incomplete after the step budget.
SessionResult run_session(const ProtocolConfig& config,
                          const SecretState& secret,
                          const SessionOptions& options = {});

// The withheld controller measures but publishes nothing; the receiver
// substitutes guesses for its m signs. Recorded sign_outcomes hold what the
// receiver used.
Transcript run_session_with_withholding(const ProtocolConfig& config,
                                        const SecretState& secret,
                                        const PartyId& withheld,
                                        RandomStream& guess_rng);
Transcript run_session_with_withholding(const ProtocolConfig& config,
                                        const SecretState& secret,
                                        const PartyId& withheld,
                                        const std::vector<SignOutcome>& guesses);

}  // namespace qsts
