#include "qsts/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "qsts/error.hpp"
#include "qsts/kernels.hpp"

namespace qsts {

struct StateAccess {
  static PureState make(int num_qubits, std::vector<Amplitude> amps) {
    return PureState(num_qubits, std::move(amps));
  }
  static std::vector<Amplitude>& amps(PureState& s) { return s.amps_; }
};

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_cap(int num_qubits) {
  if (num_qubits > qubit_cap()) {
    throw CapacityError("register of " + std::to_string(num_qubits) +
                        " qubits exceeds the cap of " +
                        std::to_string(qubit_cap()));
  }
}

void check_position(const PureState& s, int q) {
  if (q < 0 || q >= s.num_qubits()) {
    throw IndexError("qubit " + std::to_string(q) + " out of range for " +
                     std::to_string(s.num_qubits()) + "-qubit register");
  }
}

int log2_exact(std::size_t size) {
  if (size == 0 || !std::has_single_bit(size)) {
    throw InvalidArgument("amplitude count " + std::to_string(size) +
                          " is not a power of two");
  }
  return std::countr_zero(size);
}

void check_finite(const std::vector<Amplitude>& amps) {
  for (const auto& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidArgument("non-finite amplitude");
    }
  }
}

// Contract the measured qubits against each candidate ket; pick one outcome.
template <class Outcome, std::size_t K, class Contract>
Measurement<Outcome> measure(const PureState& state,
                             const std::array<Outcome, K>& outcomes,
                             int removed, std::optional<Outcome> forced,
                             RandomStream& rng, Contract contract) {
  const int out_qubits = state.num_qubits() - removed;
  std::array<std::vector<Amplitude>, K> branches;
  std::array<double, K> probs{};
  for (std::size_t k = 0; k < K; ++k) {
    branches[k].resize(std::size_t{1} << out_qubits);
    contract(outcomes[k], branches[k]);
    probs[k] = kernels::norm_squared(branches[k]);
  }

  std::size_t chosen = 0;
  if (forced) {
    chosen = static_cast<std::size_t>(
        std::find(outcomes.begin(), outcomes.end(), *forced) -
        outcomes.begin());
    if (probs[chosen] < kZeroProbability) {
      throw ZeroProbabilityError("forced outcome " +
                                 std::string(to_string(*forced)) +
                                 " has zero Born probability");
    }
  } else {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform01(rng) * total;
    chosen = K;
    for (std::size_t k = 0; k < K; ++k) {
      if (probs[k] < kZeroProbability) continue;
      chosen = k;
      if (u < probs[k]) break;
      u -= probs[k];
    }
  }

  auto& amps = branches[chosen];
  kernels::scale(amps, 1.0 / std::sqrt(probs[chosen]));
  return {outcomes[chosen], probs[chosen],
          StateAccess::make(out_qubits, std::move(amps))};
}

}  // namespace

int qubit_cap() {
  if (const char* env = std::getenv("QSTS_MAX_QUBITS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) {
      return static_cast<int>(std::min<long>(v, kMaxQubits));
    }
  }
  return kMaxQubits;
}

double uniform01(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PureState::PureState() = default;

PureState::PureState(int num_qubits, std::vector<Amplitude> amps)
    : num_qubits_(num_qubits), amps_(std::move(amps)) {}

PureState PureState::from_amplitudes(std::vector<Amplitude> amps) {
  const int n = log2_exact(amps.size());
  check_cap(n);
  check_finite(amps);
  const double norm = kernels::norm_squared(amps);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw InvalidArgument("state is not normalized (norm^2 = " +
                          std::to_string(norm) + ")");
  }
  return PureState(n, std::move(amps));
}

PureState PureState::normalized(std::vector<Amplitude> amps) {
  const int n = log2_exact(amps.size());
  check_cap(n);
  check_finite(amps);
  const double norm = kernels::norm_squared(amps);
  if (!(norm > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  kernels::scale(amps, 1.0 / std::sqrt(norm));
  return PureState(n, std::move(amps));
}

PureState PureState::basis(int num_qubits, std::uint64_t index) {
  if (num_qubits < 0) throw InvalidArgument("negative qubit count");
  check_cap(num_qubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw IndexError("basis index out of range");
  std::vector<Amplitude> amps(dim);
  amps[index] = 1.0;
  return PureState(num_qubits, std::move(amps));
}

double PureState::norm_squared() const { return kernels::norm_squared(amps_); }

Gate2x2 Gate2x2::make(const std::array<Amplitude, 4>& m) {
  const Gate2x2 g(m);
  const Gate2x2 p = g.adjoint() * g;
  const std::array<Amplitude, 4> id{1.0, 0.0, 0.0, 1.0};
  for (int k = 0; k < 4; ++k) {
    if (std::abs(p.m_[k] - id[k]) > kUnitaryTolerance) {
      throw InvalidArgument("gate is not unitary");
    }
  }
  return g;
}

Gate2x2 Gate2x2::operator*(const Gate2x2& rhs) const {
  const auto& a = m_;
  const auto& b = rhs.m_;
  return Gate2x2({a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                  a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]});
}

Gate2x2 Gate2x2::adjoint() const {
  return Gate2x2({std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]),
                  std::conj(m_[3])});
}

namespace gates {
Gate2x2 u0() { return Gate2x2::make({1.0, 0.0, 0.0, 1.0}); }
Gate2x2 u1() { return Gate2x2::make({1.0, 0.0, 0.0, -1.0}); }
Gate2x2 u2() { return Gate2x2::make({0.0, 1.0, 1.0, 0.0}); }
Gate2x2 u3() { return Gate2x2::make({0.0, 1.0, -1.0, 0.0}); }
Gate2x2 hadamard() {
  return Gate2x2::make({kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2});
}
}  // namespace gates

char to_char(Parity p) { return p == Parity::Plus ? '+' : '-'; }

int bit_value(BellOutcome b) {
  return (b == BellOutcome::PsiPlus || b == BellOutcome::PsiMinus) ? 1 : 0;
}

Parity parity(BellOutcome b) {
  return (b == BellOutcome::PhiPlus || b == BellOutcome::PsiPlus)
             ? Parity::Plus
             : Parity::Minus;
}

BellOutcome bell_outcome(int bit_value, Parity parity) {
  if (bit_value == 0) {
    return parity == Parity::Plus ? BellOutcome::PhiPlus
                                  : BellOutcome::PhiMinus;
  }
  return parity == Parity::Plus ? BellOutcome::PsiPlus : BellOutcome::PsiMinus;
}

std::string_view to_string(BellOutcome b) {
  switch (b) {
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PsiPlus: return "PsiPlus";
    case BellOutcome::PsiMinus: return "PsiMinus";
  }
  return "?";
}

std::optional<BellOutcome> parse_bell_outcome(std::string_view text) {
  for (BellOutcome b : kBellOutcomes) {
    if (text == to_string(b)) return b;
  }
  return std::nullopt;
}

std::array<Amplitude, 4> bell_ket(BellOutcome b) {
  const double s = kInvSqrt2;
  switch (b) {
    case BellOutcome::PhiPlus: return {s, 0.0, 0.0, s};
    case BellOutcome::PhiMinus: return {s, 0.0, 0.0, -s};
    case BellOutcome::PsiPlus: return {0.0, s, s, 0.0};
    case BellOutcome::PsiMinus: return {0.0, s, -s, 0.0};
  }
  return {};
}

std::string_view to_string(SignOutcome s) {
  return s == SignOutcome::Plus ? "+" : "-";
}

std::optional<SignOutcome> parse_sign_outcome(std::string_view text) {
  if (text == "+" || text == "Plus") return SignOutcome::Plus;
  if (text == "-" || text == "Minus") return SignOutcome::Minus;
  return std::nullopt;
}

std::array<Amplitude, 2> sign_ket(SignOutcome s) {
  return s == SignOutcome::Plus ? std::array<Amplitude, 2>{kInvSqrt2, kInvSqrt2}
                                : std::array<Amplitude, 2>{kInvSqrt2, -kInvSqrt2};
}

PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  check_cap(n);
  std::vector<Amplitude> out(a.dimension() * b.dimension());
  kernels::tensor(a.amplitudes(), b.amplitudes(), out);
  return StateAccess::make(n, std::move(out));
}

PureState apply_gate(const PureState& state, int q, const Gate2x2& g) {
  check_position(state, q);
  PureState out = state;
  kernels::apply_1q(StateAccess::amps(out), out.num_qubits(), q, g.matrix());
  return out;
}

namespace {

void check_pair(const PureState& state, int qa, int qb) {
  check_position(state, qa);
  check_position(state, qb);
  if (qa == qb) throw IndexError("Bell measurement needs two distinct qubits");
}

}  // namespace

std::array<double, 4> bell_probabilities(const PureState& state, int qa,
                                         int qb) {
  check_pair(state, qa, qb);
  std::array<double, 4> probs{};
  std::vector<Amplitude> buf(state.dimension() / 4);
  for (std::size_t k = 0; k < 4; ++k) {
    kernels::contract_pair(state.amplitudes(), state.num_qubits(), qa, qb,
                           bell_ket(kBellOutcomes[k]), buf);
    probs[k] = kernels::norm_squared(buf);
  }
  return probs;
}

std::array<double, 2> sigma_x_probabilities(const PureState& state, int q) {
  check_position(state, q);
  std::array<double, 2> probs{};
  std::vector<Amplitude> buf(state.dimension() / 2);
  for (std::size_t k = 0; k < 2; ++k) {
    kernels::contract_qubit(state.amplitudes(), state.num_qubits(), q,
                            sign_ket(kSignOutcomes[k]), buf);
    probs[k] = kernels::norm_squared(buf);
  }
  return probs;
}

Measurement<BellOutcome> measure_bell(const PureState& state, int qa, int qb,
                                      std::optional<BellOutcome> forced,
                                      RandomStream& rng) {
  check_pair(state, qa, qb);
  return measure(state, kBellOutcomes, 2, forced, rng,
                 [&](BellOutcome b, std::vector<Amplitude>& out) {
                   kernels::contract_pair(state.amplitudes(),
                                          state.num_qubits(), qa, qb,
                                          bell_ket(b), out);
                 });
}

Measurement<SignOutcome> measure_sigma_x(const PureState& state, int q,
                                         std::optional<SignOutcome> forced,
                                         RandomStream& rng) {
  check_position(state, q);
  return measure(state, kSignOutcomes, 1, forced, rng,
                 [&](SignOutcome s, std::vector<Amplitude>& out) {
                   kernels::contract_qubit(state.amplitudes(),
                                           state.num_qubits(), q, sign_ket(s),
                                           out);
                 });
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw InvalidArgument("fidelity of states with different qubit counts");
  }
  const double f = std::norm(kernels::inner_product(a.amplitudes(),
                                                    b.amplitudes()));
  return std::clamp(f, 0.0, 1.0);
}

namespace detail {

PureState project_bell(const PureState& state, int qa, int qb,
                       BellOutcome outcome) {
  check_pair(state, qa, qb);
  // |B><B| on (qa, qb): contract, then re-expand with the same ket.
  std::vector<Amplitude> rest(state.dimension() / 4);
  kernels::contract_pair(state.amplitudes(), state.num_qubits(), qa, qb,
                         bell_ket(outcome), rest);
  const int n = state.num_qubits();
  const auto ket = bell_ket(outcome);
  std::vector<Amplitude> out(state.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto bit = [&](int q) { return (i >> (n - 1 - q)) & 1U; };
    std::size_t r = 0;
    for (int k = 0; k < n; ++k) {
      if (k != qa && k != qb) r = (r << 1) | bit(k);
    }
    out[i] = ket[2 * bit(qa) + bit(qb)] * rest[r];
  }
  return PureState::normalized(std::move(out));
}

PureState project_sigma_x(const PureState& state, int q, SignOutcome outcome) {
  check_position(state, q);
  std::vector<Amplitude> rest(state.dimension() / 2);
  kernels::contract_qubit(state.amplitudes(), state.num_qubits(), q,
                          sign_ket(outcome), rest);
  const int n = state.num_qubits();
  const auto ket = sign_ket(outcome);
  std::vector<Amplitude> out(state.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t r = 0;
    for (int k = 0; k < n; ++k) {
      if (k != q) r = (r << 1) | ((i >> (n - 1 - k)) & 1U);
    }
    out[i] = ket[(i >> (n - 1 - q)) & 1U] * rest[r];
  }
  return PureState::normalized(std::move(out));
}

}  // namespace detail
}  // namespace qsts
