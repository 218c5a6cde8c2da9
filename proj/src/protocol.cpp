#include "qsts/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "qsts/error.hpp"

namespace qsts {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t bell_slot(int group) { return static_cast<std::uint64_t>(group); }

std::uint64_t sign_slot(int m, int n, int group, int c) {
  return static_cast<std::uint64_t>(m + group * n + (c - 1));
}

PureState composite_state(const SecretState& secret, int m, int n) {
  const PureState ghz = prepare_ghz(n + 2);
  PureState s = secret.state();
  for (int i = 0; i < m; ++i) s = tensor(s, ghz);
  return s;
}

struct Outcomes {
  std::vector<BellOutcome> bell;
  std::vector<std::vector<SignOutcome>> signs;  // [group][controller-1]
  double probability = 1.0;
};

// Builds the transcript once only the receiver photons remain.
BranchRun finish(const ProtocolConfig& config, const SecretState& secret,
                 const TrackedRegister& reg, Outcomes outcomes) {
  ReceiverDecision d = decide_corrections(outcomes.bell, outcomes.signs);
  PureState reconstructed = apply_corrections(reg.state(), d.corrections);

  Transcript t;
  t.config = config;
  t.bell_outcomes = std::move(outcomes.bell);
  t.sign_outcomes = std::move(outcomes.signs);
  t.minus_counts = std::move(d.minus_counts);
  t.parities = std::move(d.parities);
  t.corrections = std::move(d.corrections);
  t.branch_probability = outcomes.probability;
  t.fidelity = fidelity(reconstructed, secret.state());
  t.classical_bits = (config.n + 2) * config.m;
  return {std::move(t), reg.state(), std::move(reconstructed)};
}

void check_enumerable(const ProtocolConfig& config, std::uint64_t limit) {
  // 4^m 2^(mn) = 2^(m(n+2)); anything past 63 bits is over every limit.
  const int log2_count = config.m * (config.n + 2);
  if (log2_count >= 63 || branch_count(config.m, config.n) > limit) {
    throw BranchLimitError("branch count 2^" + std::to_string(log2_count) +
                           " exceeds limit " + std::to_string(limit));
  }
}

}  // namespace

Gate2x2 gate(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::U0: return gates::u0();
    case CorrectionOp::U1: return gates::u1();
    case CorrectionOp::U2: return gates::u2();
    case CorrectionOp::U3: return gates::u3();
  }
  return gates::u0();
}

std::string_view to_string(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::U0: return "U0";
    case CorrectionOp::U1: return "U1";
    case CorrectionOp::U2: return "U2";
    case CorrectionOp::U3: return "U3";
  }
  return "?";
}

std::optional<CorrectionOp> parse_correction(std::string_view text) {
  for (CorrectionOp op : kCorrectionOps) {
    if (text == to_string(op)) return op;
  }
  return std::nullopt;
}

CorrectionOp compute_correction(int bit_value, Parity parity) {
  if (bit_value != 0 && bit_value != 1) {
    throw InvalidArgument("bit value must be 0 or 1");
  }
  if (bit_value == 0) {
    return parity == Parity::Plus ? CorrectionOp::U0 : CorrectionOp::U1;
  }
  return parity == Parity::Plus ? CorrectionOp::U2 : CorrectionOp::U3;
}

ProtocolConfig make_config(int m, int n, std::uint64_t seed,
                           OutcomePolicy policy) {
  return ProtocolConfig{m, n, n + 1, seed, std::move(policy)};
}

void validate(const ProtocolConfig& config) {
  if (config.m < 1) throw InvalidArgument("m must be >= 1");
  if (config.n < 1) throw InvalidArgument("n must be >= 1");
  const long long qubits =
      static_cast<long long>(config.m) * (static_cast<long long>(config.n) + 3);
  if (qubits > qubit_cap()) {
    throw CapacityError("m(n+3) = " + std::to_string(qubits) +
                        " qubits exceeds the cap of " +
                        std::to_string(qubit_cap()));
  }
  if (config.receiver < 1 || config.receiver > config.n + 1) {
    throw InvalidArgument("receiver " + std::to_string(config.receiver) +
                          " outside [1, " + std::to_string(config.n + 1) +
                          "]");
  }
  if (const auto* f = std::get_if<ForcedOutcomes>(&config.policy)) {
    if (f->bell.size() != static_cast<std::size_t>(config.m) ||
        f->signs.size() != static_cast<std::size_t>(config.m * config.n)) {
      throw InvalidArgument("forced outcomes need " + std::to_string(config.m) +
                            " Bell results and " +
                            std::to_string(config.m * config.n) + " signs");
    }
  }
}

RegisterLayout::RegisterLayout(const ProtocolConfig& config)
    : m_(config.m), n_(config.n), receiver_(config.receiver) {}

int RegisterLayout::controller_agent(int c) const {
  if (c < 1 || c > n_) throw IndexError("controller ordinal out of range");
  return c < receiver_ ? c : c + 1;
}

TrackedRegister::TrackedRegister(PureState state)
    : state_(std::move(state)), labels_(state_.num_qubits()) {
  for (int k = 0; k < state_.num_qubits(); ++k) labels_[k] = k;
}

bool TrackedRegister::contains(int label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

int TrackedRegister::position(int label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw IndexError("qubit label " + std::to_string(label) +
                     " is not in the register");
  }
  return static_cast<int>(it - labels_.begin());
}

void TrackedRegister::drop(std::initializer_list<int> dropped) {
  std::erase_if(labels_, [&](int l) {
    return std::find(dropped.begin(), dropped.end(), l) != dropped.end();
  });
}

Measurement<BellOutcome> TrackedRegister::measure_bell(
    int label_a, int label_b, std::optional<BellOutcome> forced,
    RandomStream& rng) {
  auto r = qsts::measure_bell(state_, position(label_a), position(label_b),
                              forced, rng);
  state_ = r.state;
  drop({label_a, label_b});
  return r;
}

Measurement<SignOutcome> TrackedRegister::measure_sigma_x(
    int label, std::optional<SignOutcome> forced, RandomStream& rng) {
  auto r = qsts::measure_sigma_x(state_, position(label), forced, rng);
  state_ = r.state;
  drop({label});
  return r;
}

SecretState::SecretState(PureState state) : state_(std::move(state)) {
  if (state_.num_qubits() < 1) {
    throw InvalidArgument("secret needs at least one qubit");
  }
}

bool equivalent(const Transcript& a, const Transcript& b,
                double real_tolerance) {
  return a.config == b.config && a.bell_outcomes == b.bell_outcomes &&
         a.sign_outcomes == b.sign_outcomes &&
         a.minus_counts == b.minus_counts && a.parities == b.parities &&
         a.corrections == b.corrections &&
         a.classical_bits == b.classical_bits &&
         std::abs(a.branch_probability - b.branch_probability) <=
             real_tolerance &&
         std::abs(a.fidelity - b.fidelity) <= real_tolerance;
}

PureState prepare_ghz(int k) {
  if (k < 2) throw InvalidArgument("GHZ state needs at least 2 qubits");
  if (k > qubit_cap()) {
    throw CapacityError("GHZ state of " + std::to_string(k) +
                        " qubits exceeds the cap");
  }
  std::vector<Amplitude> amps(std::size_t{1} << k);
  const double s = 1.0 / std::sqrt(2.0);
  amps.front() = s;
  amps.back() = s;
  return PureState::from_amplitudes(std::move(amps));
}

SecretState random_secret(int m, RandomStream& rng) {
  if (m < 1) throw InvalidArgument("secret needs at least one qubit");
  if (m > qubit_cap()) throw CapacityError("secret exceeds the qubit cap");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Amplitude> amps(std::size_t{1} << m);
  for (auto& a : amps) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    a = {re, im};
  }
  return SecretState(PureState::normalized(std::move(amps)));
}

RandomStream slot_stream(std::uint64_t seed, std::uint64_t slot) {
  return RandomStream(splitmix64(splitmix64(seed) ^ (slot + 1)));
}

ReceiverDecision decide_corrections(
    const std::vector<BellOutcome>& bell,
    const std::vector<std::vector<SignOutcome>>& signs) {
  ReceiverDecision d;
  for (std::size_t i = 0; i < bell.size(); ++i) {
    Parity p = parity(bell[i]);
    int minus = 0;
    for (SignOutcome s : signs.at(i)) {
      p = p * parity(s);
      if (s == SignOutcome::Minus) ++minus;
    }
    d.minus_counts.push_back(minus);
    d.parities.push_back(p);
    d.corrections.push_back(compute_correction(bit_value(bell[i]), p));
  }
  return d;
}

PureState apply_corrections(const PureState& received,
                            const std::vector<CorrectionOp>& corrections) {
  if (static_cast<int>(corrections.size()) != received.num_qubits()) {
    throw InvalidArgument("one correction per received qubit required");
  }
  PureState out = received;
  for (std::size_t i = 0; i < corrections.size(); ++i) {
    out = apply_gate(out, static_cast<int>(i), gate(corrections[i]));
  }
  return out;
}

BranchRun run_protocol_detailed(const ProtocolConfig& config,
                                const SecretState& secret) {
  validate(config);
  if (secret.m() != config.m) {
    throw InvalidArgument("secret has " + std::to_string(secret.m()) +
                          " qubits, config expects " +
                          std::to_string(config.m));
  }
  if (std::holds_alternative<EnumerateOutcomes>(config.policy)) {
    throw InvalidArgument(
        "run_protocol runs a single branch; use enumerate_branches");
  }
  const auto* forced = std::get_if<ForcedOutcomes>(&config.policy);
  const int m = config.m;
  const int n = config.n;
  const RegisterLayout layout(config);

  TrackedRegister reg(composite_state(secret, m, n));
  Outcomes out;
  out.signs.assign(m, std::vector<SignOutcome>(n, SignOutcome::Plus));

  for (int i = 0; i < m; ++i) {
    RandomStream rng = slot_stream(config.seed, bell_slot(i));
    std::optional<BellOutcome> f;
    if (forced) f = forced->bell[i];
    auto r = reg.measure_bell(layout.secret(i), layout.sender_photon(i), f, rng);
    out.bell.push_back(r.outcome);
    out.probability *= r.probability;
  }
  for (int c = 1; c <= n; ++c) {
    for (int i = 0; i < m; ++i) {
      RandomStream rng = slot_stream(config.seed, sign_slot(m, n, i, c));
      std::optional<SignOutcome> f;
      if (forced) f = forced->signs[i * n + (c - 1)];
      auto r = reg.measure_sigma_x(layout.controller_photon(i, c), f, rng);
      out.signs[i][c - 1] = r.outcome;
      out.probability *= r.probability;
    }
  }
  return finish(config, secret, reg, std::move(out));
}

Transcript run_protocol(const ProtocolConfig& config,
                        const SecretState& secret) {
  return run_protocol_detailed(config, secret).transcript;
}

std::uint64_t branch_count(int m, int n) {
  const int log2_count = m * (n + 2);
  if (log2_count >= 64) return ~std::uint64_t{0};
  return std::uint64_t{1} << log2_count;
}

ForcedOutcomes branch_outcomes(int m, int n, std::uint64_t index) {
  ForcedOutcomes f;
  f.bell.resize(m);
  f.signs.resize(static_cast<std::size_t>(m) * n);
  for (int k = m * n - 1; k >= 0; --k) {
    f.signs[k] = (index & 1U) ? SignOutcome::Minus : SignOutcome::Plus;
    index >>= 1;
  }
  for (int i = m - 1; i >= 0; --i) {
    f.bell[i] = kBellOutcomes[index & 3U];
    index >>= 2;
  }
  return f;
}

std::vector<Transcript> enumerate_branches(const ProtocolConfig& config,
                                           const SecretState& secret,
                                           std::uint64_t branch_limit) {
  ProtocolConfig base = config;
  base.policy = SampleOutcomes{};
  validate(base);
  if (secret.m() != config.m) {
    throw InvalidArgument("secret qubit count does not match config");
  }
  check_enumerable(config, branch_limit);

  const int m = config.m;
  const int n = config.n;
  const RegisterLayout layout(config);
  const std::uint64_t sign_branches = std::uint64_t{1} << (m * n);
  RandomStream unused(0);

  // Expand the sender's Bell measurements serially: 4^m prefixes.
  struct Prefix {
    TrackedRegister reg;
    std::vector<BellOutcome> bell;
    double probability;
    std::uint64_t index;
  };
  std::vector<Prefix> prefixes{
      {TrackedRegister(composite_state(secret, m, n)), {}, 1.0, 0}};
  for (int i = 0; i < m; ++i) {
    std::vector<Prefix> next;
    next.reserve(prefixes.size() * 4);
    for (const auto& p : prefixes) {
      for (std::uint64_t k = 0; k < 4; ++k) {
        Prefix child = p;
        auto r = child.reg.measure_bell(layout.secret(i),
                                        layout.sender_photon(i),
                                        kBellOutcomes[k], unused);
        child.bell.push_back(r.outcome);
        child.probability *= r.probability;
        child.index = p.index * 4 + k;
        next.push_back(std::move(child));
      }
    }
    prefixes = std::move(next);
  }

  std::vector<Transcript> results(prefixes.size() * sign_branches);
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(prefixes.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < count; ++p) {
    try {
      const Prefix& prefix = prefixes[p];
      // Depth-first over the controller measurements, in run order.
      struct Frame {
        TrackedRegister reg;
        Outcomes outcomes;
        std::uint64_t sign_bits;  // group-major flat sign index
      };
      Outcomes start;
      start.bell = prefix.bell;
      start.probability = prefix.probability;
      start.signs.assign(m, std::vector<SignOutcome>(n, SignOutcome::Plus));
      std::vector<Frame> stack;
      stack.push_back({prefix.reg, std::move(start), 0});
      std::vector<std::pair<int, int>> order;  // (controller, group)
      for (int c = 1; c <= n; ++c) {
        for (int i = 0; i < m; ++i) order.emplace_back(c, i);
      }
      std::vector<std::size_t> depth{0};
      while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        const std::size_t d = depth.back();
        stack.pop_back();
        depth.pop_back();
        if (d == order.size()) {
          const std::uint64_t index = prefix.index * sign_branches + frame.sign_bits;
          results[index] =
              finish(config, secret, frame.reg, std::move(frame.outcomes))
                  .transcript;
          continue;
        }
        const auto [c, i] = order[d];
        const int flat = m * n - 1 - (i * n + (c - 1));
        for (SignOutcome s : {SignOutcome::Minus, SignOutcome::Plus}) {
          Frame child = frame;
          auto r = child.reg.measure_sigma_x(layout.controller_photon(i, c), s,
                                             unused);
          child.outcomes.signs[i][c - 1] = s;
          child.outcomes.probability *= r.probability;
          if (s == SignOutcome::Minus) child.sign_bits |= std::uint64_t{1} << flat;
          stack.push_back(std::move(child));
          depth.push_back(d + 1);
        }
      }
    } catch (...) {
#pragma omp critical(qsts_enumerate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace qsts
