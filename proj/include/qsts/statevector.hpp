#pragma once

// Dense pure-state simulation: tensor assembly, single-qubit unitaries and
// projective measurements (computational, sigma-x and Bell bases) that remove
// the measured qubits from the register.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsts {

using Amplitude = std::complex<double>;
using RandomStream = std::mt19937_64;

inline constexpr int kMaxQubits = 22;
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kUnitaryTolerance = 1e-12;
// Forced outcomes whose Born weight is below this are rejected.
inline constexpr double kZeroProbability = 1e-12;

// Active qubit cap: kMaxQubits, lowered (never raised) by QSTS_MAX_QUBITS.
int qubit_cap();

// Uniform double in [0, 1) with 53 random bits; identical on every platform.
double uniform01(RandomStream& rng);

class PureState {
public:
  // Zero-qubit register holding the scalar 1.
  PureState();

  // Takes ownership of amps; size must be a power of two, every entry finite
  // and the norm 1 within kNormTolerance.
  static PureState from_amplitudes(std::vector<Amplitude> amps);
  // As above but rescales any nonzero finite vector to unit norm.
  static PureState normalized(std::vector<Amplitude> amps);
  static PureState basis(int num_qubits, std::uint64_t index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }
  double norm_squared() const;

  friend bool operator==(const PureState&, const PureState&) = default;

private:
  PureState(int num_qubits, std::vector<Amplitude> amps);

  friend struct StateAccess;

  int num_qubits_ = 0;
  std::vector<Amplitude> amps_{Amplitude{1.0, 0.0}};
};

// Unitary 2x2 matrix, row-major.
class Gate2x2 {
public:
  // Throws InvalidArgument unless U^dagger U = I within kUnitaryTolerance.
  static Gate2x2 make(const std::array<Amplitude, 4>& m);

  const std::array<Amplitude, 4>& matrix() const { return m_; }
  Amplitude operator()(int row, int col) const { return m_[2 * row + col]; }
  Gate2x2 operator*(const Gate2x2& rhs) const;
  Gate2x2 adjoint() const;

  friend bool operator==(const Gate2x2&, const Gate2x2&) = default;

private:
  explicit Gate2x2(const std::array<Amplitude, 4>& m) : m_(m) {}
  std::array<Amplitude, 4> m_;
};

namespace gates {
Gate2x2 u0();  // |0><0| + |1><1|
Gate2x2 u1();  // |0><0| - |1><1|
Gate2x2 u2();  // |1><0| + |0><1|
Gate2x2 u3();  // |0><1| - |1><0|
Gate2x2 hadamard();
}  // namespace gates

enum class Parity : std::uint8_t { Plus, Minus };

inline Parity operator*(Parity a, Parity b) {
  return a == b ? Parity::Plus : Parity::Minus;
}
char to_char(Parity p);

enum class BellOutcome : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes{
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus,
    BellOutcome::PsiMinus};

// Bit value: 0 for phi (parallel), 1 for psi (anti-parallel).
int bit_value(BellOutcome b);
Parity parity(BellOutcome b);
BellOutcome bell_outcome(int bit_value, Parity parity);
std::string_view to_string(BellOutcome b);
std::optional<BellOutcome> parse_bell_outcome(std::string_view text);
// Coefficients of the Bell ket over |00>,|01>,|10>,|11>.
std::array<Amplitude, 4> bell_ket(BellOutcome b);

enum class SignOutcome : std::uint8_t { Plus, Minus };

inline constexpr std::array<SignOutcome, 2> kSignOutcomes{SignOutcome::Plus,
                                                          SignOutcome::Minus};

inline Parity parity(SignOutcome s) {
  return s == SignOutcome::Plus ? Parity::Plus : Parity::Minus;
}
std::string_view to_string(SignOutcome s);  // "+" or "-"
std::optional<SignOutcome> parse_sign_outcome(std::string_view text);
std::array<Amplitude, 2> sign_ket(SignOutcome s);

template <class Outcome>
struct Measurement {
  Outcome outcome;
  double probability;
  PureState state;  // measured qubits removed, renormalized
};

// a's qubits occupy the lower register positions of the result.
PureState tensor(const PureState& a, const PureState& b);

PureState apply_gate(const PureState& state, int q, const Gate2x2& g);

// Born weights of the four Bell outcomes on (qa, qb), in kBellOutcomes order.
std::array<double, 4> bell_probabilities(const PureState& state, int qa,
                                         int qb);
std::array<double, 2> sigma_x_probabilities(const PureState& state, int q);

// Without a forced outcome the result is sampled from the Born distribution.
Measurement<BellOutcome> measure_bell(const PureState& state, int qa, int qb,
                                      std::optional<BellOutcome> forced,
                                      RandomStream& rng);
Measurement<SignOutcome> measure_sigma_x(const PureState& state, int q,
                                         std::optional<SignOutcome> forced,
                                         RandomStream& rng);

// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

namespace detail {
// Non-shrinking projections (register size unchanged), for tests.
PureState project_bell(const PureState& state, int qa, int qb,
                       BellOutcome outcome);
PureState project_sigma_x(const PureState& state, int q, SignOutcome outcome);
}  // namespace detail

}  // namespace qsts
