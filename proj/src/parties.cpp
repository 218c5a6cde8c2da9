#include "qsts/parties.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qsts/error.hpp"

namespace qsts {
namespace {

using json = nlohmann::json;

class Party {
public:
  explicit Party(PartyId id) : id_(id) {}
  virtual ~Party() = default;

  const PartyId& id() const { return id_; }
  bool finished() const { return finished_; }
  virtual bool wants_step() const { return !finished_; }
  virtual void step(QuantumBackend& backend, MessageBus& bus) = 0;
  virtual void receive(const ClassicalMessage&) {}

protected:
  PartyId id_;
  bool finished_ = false;
};

class Sender final : public Party {
public:
  Sender(std::uint64_t session, bool silent)
      : Party(PartyId::alice()), session_(session), silent_(silent) {}

  void step(QuantumBackend& backend, MessageBus& bus) override {
    ClassicalMessage msg{session_, id_, MessageKind::BellResults, {}, {}};
    for (int i = 0; i < backend.layout().m(); ++i) {
      msg.bell.push_back(backend.measure_bell(id_, i));
    }
    if (!silent_) bus.post(std::move(msg));
    finished_ = true;
  }

private:
  std::uint64_t session_;
  bool silent_;
};

class Controller final : public Party {
public:
  Controller(int c, std::uint64_t session, bool silent)
      : Party(PartyId::controller_at(c)), session_(session), silent_(silent) {}

  void step(QuantumBackend& backend, MessageBus& bus) override {
    ClassicalMessage msg{session_, id_, MessageKind::SignResults, {}, {}};
    for (int i = 0; i < backend.layout().m(); ++i) {
      msg.signs.push_back(backend.measure_sign(id_, i));
    }
    if (!silent_) bus.post(std::move(msg));
    finished_ = true;
  }

private:
  std::uint64_t session_;
  bool silent_;
};

class Receiver final : public Party {
public:
  Receiver(std::uint64_t session, int m, int n, std::optional<int> withheld,
           std::vector<SignOutcome> guesses)
      : Party(PartyId::receiver()),
        session_(session),
        m_(m),
        n_(n),
        withheld_(withheld),
        guesses_(std::move(guesses)),
        signs_(m, std::vector<SignOutcome>(n, SignOutcome::Plus)),
        have_signs_(n, false) {}

  bool wants_step() const override {
    if (finished_ || !bell_) return false;
    for (int c = 1; c <= n_; ++c) {
      if (c != withheld_ && !have_signs_[c - 1]) return false;
    }
    return true;
  }

  void receive(const ClassicalMessage& msg) override {
    if (msg.kind == MessageKind::BellResults) {
      bell_ = msg.bell;
    } else if (msg.kind == MessageKind::SignResults) {
      const int c = msg.sender.controller;
      for (int i = 0; i < m_; ++i) signs_[i][c - 1] = msg.signs[i];
      have_signs_[c - 1] = true;
    }
  }

  void step(QuantumBackend& backend, MessageBus& bus) override {
    if (!wants_step()) {
      throw SessionError("receiver acted before all results arrived");
    }
    if (withheld_) {
      for (int i = 0; i < m_; ++i) signs_[i][*withheld_ - 1] = guesses_[i];
    }
    decision_ = decide_corrections(*bell_, signs_);
    reconstructed_ =
        apply_corrections(backend.receiver_state(id_), decision_.corrections);
    bus.post({session_, id_, MessageKind::Done, {}, {}});
    finished_ = true;
  }

  const std::vector<BellOutcome>& bell() const { return *bell_; }
  const std::vector<std::vector<SignOutcome>>& signs() const { return signs_; }
  const ReceiverDecision& decision() const { return decision_; }
  const PureState& reconstructed() const { return reconstructed_; }

private:
  std::uint64_t session_;
  int m_;
  int n_;
  std::optional<int> withheld_;
  std::vector<SignOutcome> guesses_;
  std::optional<std::vector<BellOutcome>> bell_;
  std::vector<std::vector<SignOutcome>> signs_;
  std::vector<bool> have_signs_;
  ReceiverDecision decision_;
  PureState reconstructed_;
};

struct SessionSetup {
  std::optional<int> withheld;
  std::vector<SignOutcome> guesses;
};

SessionResult drive(const ProtocolConfig& config, const SecretState& secret,
                    const SessionOptions& options, const SessionSetup& setup) {
  validate(config);
  if (std::holds_alternative<EnumerateOutcomes>(config.policy)) {
    throw InvalidArgument("a session runs a single branch");
  }
  if (secret.m() != config.m) {
    throw InvalidArgument("secret qubit count does not match config");
  }
  const int m = config.m;
  const int n = config.n;
  QuantumBackend backend(config, secret);
  MessageBus bus(options.session, m, n);

  const auto silent = [&](const PartyId& id) {
    return options.silent && *options.silent == id;
  };
  std::vector<std::unique_ptr<Party>> parties;
  parties.push_back(
      std::make_unique<Sender>(options.session, silent(PartyId::alice())));
  for (int c = 1; c <= n; ++c) {
    parties.push_back(std::make_unique<Controller>(
        c, options.session, silent(PartyId::controller_at(c))));
  }
  auto receiver_owned = std::make_unique<Receiver>(options.session, m, n,
                                                   setup.withheld, setup.guesses);
  Receiver& receiver = *receiver_owned;
  parties.push_back(std::move(receiver_owned));

  const int budget = options.step_budget > 0 ? options.step_budget : 10 * (n + 2);
  RandomStream scheduler(options.scheduler_seed);
  std::vector<ClassicalMessage> log;
  std::size_t cursor = 0;
  bool done = false;

  const auto deliver = [&](std::size_t index) {
    ClassicalMessage msg = bus.take(index);
    for (auto& p : parties) {
      if (!(p->id() == msg.sender)) p->receive(msg);
    }
    if (msg.kind == MessageKind::Done) done = true;
    log.push_back(std::move(msg));
  };

  for (int step = 0; step < budget && !done; ++step) {
    std::vector<Party*> runnable;
    for (auto& p : parties) {
      if (p->wants_step()) runnable.push_back(p.get());
    }
    if (options.scheduling == Scheduling::Fifo) {
      if (bus.has_pending()) {
        deliver(0);
      } else if (!runnable.empty()) {
        // Round-robin from the cursor over the fixed party order.
        for (std::size_t k = 0; k < parties.size(); ++k) {
          Party* p = parties[(cursor + k) % parties.size()].get();
          if (p->wants_step()) {
            p->step(backend, bus);
            cursor = (cursor + k + 1) % parties.size();
            break;
          }
        }
      }
    } else {
      const std::size_t actions = bus.pending_count() + runnable.size();
      if (actions == 0) continue;
      const std::size_t pick = scheduler() % actions;
      if (pick < bus.pending_count()) {
        deliver(pick);
      } else {
        runnable[pick - bus.pending_count()]->step(backend, bus);
      }
    }
  }
  if (!done) {
    throw SessionError("session incomplete after " + std::to_string(budget) +
                       " steps");
  }

  Transcript t;
  t.config = config;
  t.bell_outcomes = receiver.bell();
  t.sign_outcomes = receiver.signs();
  t.minus_counts = receiver.decision().minus_counts;
  t.parities = receiver.decision().parities;
  t.corrections = receiver.decision().corrections;
  t.branch_probability = backend.branch_probability();
  t.fidelity = fidelity(receiver.reconstructed(), secret.state());
  t.classical_bits = (n + 2) * m;
  return {std::move(t), std::move(log)};
}

}  // namespace

std::string to_string(const PartyId& id) {
  switch (id.role) {
    case PartyId::Role::Alice: return "Alice";
    case PartyId::Role::Controller:
      return "Controller:" + std::to_string(id.controller);
    case PartyId::Role::Receiver: return "Receiver";
  }
  return "?";
}

std::optional<PartyId> parse_party_id(std::string_view text) {
  if (text == "Alice") return PartyId::alice();
  if (text == "Receiver") return PartyId::receiver();
  constexpr std::string_view prefix = "Controller:";
  if (text.starts_with(prefix)) {
    const std::string digits(text.substr(prefix.size()));
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      return std::nullopt;
    }
    return PartyId::controller_at(std::stoi(digits));
  }
  return std::nullopt;
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::BellResults: return "BellResults";
    case MessageKind::SignResults: return "SignResults";
    case MessageKind::Done: return "Done";
  }
  return "?";
}

std::string to_line(const ClassicalMessage& msg) {
  json payload = json::array();
  for (BellOutcome b : msg.bell) payload.push_back(to_string(b));
  for (SignOutcome s : msg.signs) payload.push_back(to_string(s));
  json j;
  j["session"] = msg.session;
  j["sender"] = to_string(msg.sender);
  j["kind"] = to_string(msg.kind);
  j["payload"] = std::move(payload);
  return j.dump();
}

ClassicalMessage parse_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    ClassicalMessage msg;
    msg.session = j.at("session").get<std::uint64_t>();
    const auto sender = parse_party_id(j.at("sender").get<std::string>());
    if (!sender) throw InvalidArgument("unknown sender");
    msg.sender = *sender;
    const auto kind = j.at("kind").get<std::string>();
    for (const auto& item : j.at("payload")) {
      const auto text = item.get<std::string>();
      if (kind == "BellResults") {
        const auto b = parse_bell_outcome(text);
        if (!b) throw InvalidArgument("bad Bell outcome '" + text + "'");
        msg.bell.push_back(*b);
      } else if (kind == "SignResults") {
        const auto s = parse_sign_outcome(text);
        if (!s) throw InvalidArgument("bad sign '" + text + "'");
        msg.signs.push_back(*s);
      } else {
        throw InvalidArgument("unexpected payload");
      }
    }
    if (kind == "BellResults") {
      msg.kind = MessageKind::BellResults;
    } else if (kind == "SignResults") {
      msg.kind = MessageKind::SignResults;
    } else if (kind == "Done") {
      msg.kind = MessageKind::Done;
    } else {
      throw InvalidArgument("unknown message kind '" + kind + "'");
    }
    return msg;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed message line: ") + e.what());
  }
}

std::string serialize_log(const std::vector<ClassicalMessage>& log) {
  std::string out;
  for (const auto& msg : log) {
    out += to_line(msg);
    out += '\n';
  }
  return out;
}

std::vector<ClassicalMessage> parse_log(std::string_view text) {
  std::vector<ClassicalMessage> log;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    log.push_back(parse_line(line));
  }
  return log;
}

int published_bits(const std::vector<ClassicalMessage>& log) {
  int bits = 0;
  for (const auto& msg : log) {
    bits += 2 * static_cast<int>(msg.bell.size());
    bits += static_cast<int>(msg.signs.size());
  }
  return bits;
}

QuantumBackend::QuantumBackend(const ProtocolConfig& config,
                               const SecretState& secret)
    : config_(config), layout_(config), reg_([&] {
        PureState s = secret.state();
        const PureState ghz = prepare_ghz(config.n + 2);
        for (int i = 0; i < config.m; ++i) s = tensor(s, ghz);
        return s;
      }()) {}

int QuantumBackend::owner_agent(const PartyId& who) const {
  switch (who.role) {
    case PartyId::Role::Alice: return 0;
    case PartyId::Role::Controller: return layout_.controller_agent(who.controller);
    case PartyId::Role::Receiver: return layout_.receiver_agent();
  }
  return -1;
}

BellOutcome QuantumBackend::measure_bell(const PartyId& who, int group) {
  if (who.role != PartyId::Role::Alice) {
    throw SessionError(to_string(who) + " does not hold the secret qubits");
  }
  if (group < 0 || group >= layout_.m()) throw IndexError("group out of range");
  std::optional<BellOutcome> forced;
  if (const auto* f = std::get_if<ForcedOutcomes>(&config_.policy)) {
    forced = f->bell[group];
  }
  RandomStream rng = slot_stream(config_.seed, static_cast<std::uint64_t>(group));
  const auto r = reg_.measure_bell(layout_.secret(group),
                                   layout_.sender_photon(group), forced, rng);
  probability_ *= r.probability;
  return r.outcome;
}

SignOutcome QuantumBackend::measure_sign(const PartyId& who, int group) {
  if (who.role != PartyId::Role::Controller) {
    throw SessionError(to_string(who) + " is not a controller");
  }
  if (group < 0 || group >= layout_.m()) throw IndexError("group out of range");
  const int c = who.controller;
  const int m = layout_.m();
  const int n = layout_.n();
  std::optional<SignOutcome> forced;
  if (const auto* f = std::get_if<ForcedOutcomes>(&config_.policy)) {
    forced = f->signs[group * n + (c - 1)];
  }
  RandomStream rng = slot_stream(
      config_.seed, static_cast<std::uint64_t>(m + group * n + (c - 1)));
  const int label = layout_.photon(group, owner_agent(who));
  const auto r = reg_.measure_sigma_x(label, forced, rng);
  probability_ *= r.probability;
  return r.outcome;
}

PureState QuantumBackend::receiver_state(const PartyId& who) const {
  if (who.role != PartyId::Role::Receiver) {
    throw SessionError(to_string(who) + " is not the receiver");
  }
  std::vector<int> expected;
  for (int i = 0; i < layout_.m(); ++i) {
    expected.push_back(layout_.receiver_photon(i));
  }
  if (reg_.labels() != expected) {
    throw SessionError("receiver state requested while other photons are "
                       "still unmeasured");
  }
  return reg_.state();
}

MessageBus::MessageBus(std::uint64_t session, int m, int n)
    : session_(session), m_(m), n_(n) {}

void MessageBus::post(ClassicalMessage msg) {
  if (msg.session != session_) throw SessionError("message for another session");
  const auto& s = msg.sender;
  switch (msg.kind) {
    case MessageKind::BellResults:
      if (s.role != PartyId::Role::Alice) {
        throw SessionError("BellResults from " + to_string(s));
      }
      if (msg.bell.size() != static_cast<std::size_t>(m_) || !msg.signs.empty()) {
        throw SessionError("malformed BellResults payload");
      }
      break;
    case MessageKind::SignResults:
      if (s.role != PartyId::Role::Controller || s.controller < 1 ||
          s.controller > n_) {
        throw SessionError("SignResults from " + to_string(s));
      }
      if (msg.signs.size() != static_cast<std::size_t>(m_) || !msg.bell.empty()) {
        throw SessionError("malformed SignResults payload");
      }
      break;
    case MessageKind::Done:
      if (s.role != PartyId::Role::Receiver) {
        throw SessionError("Done from " + to_string(s));
      }
      break;
  }
  if (std::find(sent_.begin(), sent_.end(), s) != sent_.end()) {
    throw SessionError(to_string(s) + " already published in this session");
  }
  sent_.push_back(s);
  pending_.push_back(std::move(msg));
}

ClassicalMessage MessageBus::take(std::size_t index) {
  if (index >= pending_.size()) throw IndexError("no such pending message");
  ClassicalMessage msg = std::move(pending_[index]);
  pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(index));
  return msg;
}

SessionResult run_session(const ProtocolConfig& config,
                          const SecretState& secret,
                          const SessionOptions& options) {
  return drive(config, secret, options, {});
}

Transcript run_session_with_withholding(const ProtocolConfig& config,
                                        const SecretState& secret,
                                        const PartyId& withheld,
                                        const std::vector<SignOutcome>& guesses) {
  if (withheld.role != PartyId::Role::Controller) {
    throw UnsupportedError("only a controller can withhold its results");
  }
  if (withheld.controller < 1 || withheld.controller > config.n) {
    throw InvalidArgument("withheld controller out of range");
  }
  if (guesses.size() != static_cast<std::size_t>(config.m)) {
    throw InvalidArgument("one guess per group required");
  }
  SessionOptions options;
  options.silent = withheld;
  return drive(config, secret, options, {withheld.controller, guesses})
      .transcript;
}

Transcript run_session_with_withholding(const ProtocolConfig& config,
                                        const SecretState& secret,
                                        const PartyId& withheld,
                                        RandomStream& guess_rng) {
  std::vector<SignOutcome> guesses;
  for (int i = 0; i < config.m; ++i) {
    guesses.push_back(uniform01(guess_rng) < 0.5 ? SignOutcome::Plus
                                                 : SignOutcome::Minus);
  }
  return run_session_with_withholding(config, secret, withheld, guesses);
}

}  // namespace qsts
