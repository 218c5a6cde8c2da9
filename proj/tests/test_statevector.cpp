#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracle.hpp"
#include "qsts/error.hpp"
#include "qsts/protocol.hpp"
#include "qsts/statevector.hpp"

using namespace qsts;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState plus_x() { return PureState::from_amplitudes({kInvSqrt2, kInvSqrt2}); }
PureState minus_x() { return PureState::from_amplitudes({kInvSqrt2, -kInvSqrt2}); }

void check_amps(const PureState& s, const std::vector<Amplitude>& want,
                double tol = 1e-12) {
  REQUIRE(s.dimension() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::abs(s[i] - want[i]) < tol);
  }
}

struct ScopedCap {
  explicit ScopedCap(const char* v) { setenv("QSTS_MAX_QUBITS", v, 1); }
  ~ScopedCap() { unsetenv("QSTS_MAX_QUBITS"); }
};

}  // namespace

TEST_CASE("construction validates input") {
  CHECK(PureState().num_qubits() == 0);
  CHECK_THROWS_AS(PureState::from_amplitudes({1.0, 0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(PureState::from_amplitudes({1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(PureState::from_amplitudes({NAN, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(PureState::normalized({0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(PureState::basis(2, 4), IndexError);
  CHECK(PureState::normalized({3.0, 4.0})[1] == Amplitude(0.8));
  CHECK_THROWS_AS(Gate2x2::make({1.0, 1.0, 0.0, 1.0}), InvalidArgument);
}

TEST_CASE("qubit cap can be lowered but not raised") {
  CHECK(qubit_cap() == kMaxQubits);
  {
    ScopedCap cap("4");
    CHECK(qubit_cap() == 4);
    CHECK_THROWS_AS(tensor(prepare_ghz(3), prepare_ghz(2)), CapacityError);
    CHECK_THROWS_AS(prepare_ghz(5), CapacityError);
  }
  {
    ScopedCap cap("40");
    CHECK(qubit_cap() == kMaxQubits);
  }
  CHECK_THROWS_AS(tensor(prepare_ghz(12), prepare_ghz(11)), CapacityError);
}

TEST_CASE("tensor examples") {
  check_amps(tensor(PureState::basis(1, 0), PureState::basis(1, 1)),
             {0, 1, 0, 0});
  check_amps(tensor(plus_x(), minus_x()), {0.5, -0.5, 0.5, -0.5});

  // GHZ3 x GHZ3: 1/2 at 000000, 000111, 111000, 111111.
  const PureState g = tensor(prepare_ghz(3), prepare_ghz(3));
  REQUIRE(g.num_qubits() == 6);
  for (std::size_t i = 0; i < 64; ++i) {
    const bool hit = i == 0b000000 || i == 0b000111 || i == 0b111000 ||
                     i == 0b111111;
    CHECK(std::abs(g[i] - Amplitude(hit ? 0.5 : 0.0)) < 1e-15);
  }
  const auto o = oracle::kron(oracle::ghz(3), oracle::ghz(3));
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(g[i] - o[i]) < 1e-15);
}

TEST_CASE("apply_gate examples") {
  const Amplitude a{0.6, 0.0}, b{0.0, 0.8};
  const PureState s = PureState::from_amplitudes({a, b, 0, 0});
  check_amps(apply_gate(s, 1, gates::u1()), {a, -b, 0, 0});
  check_amps(apply_gate(PureState::basis(1, 0), 0, gates::u2()), {0, 1});
  check_amps(apply_gate(PureState::basis(1, 1), 0, gates::u3()), {1, 0});
  check_amps(apply_gate(PureState::basis(1, 0), 0, gates::u3()), {0, -1});
  CHECK_THROWS_AS(apply_gate(s, 2, gates::u0()), IndexError);
  CHECK_THROWS_AS(apply_gate(s, -1, gates::u0()), IndexError);
}

TEST_CASE("correction operators") {
  const Gate2x2 id = gates::u0();
  for (const Gate2x2& g : {gates::u0(), gates::u1(), gates::u2()}) {
    CHECK(g * g == id);
  }
  // U3 squares to -I: its inverse is -U3.
  const Gate2x2 u33 = gates::u3() * gates::u3();
  CHECK(u33(0, 0) == Amplitude(-1));
  CHECK(u33(1, 1) == Amplitude(-1));
  CHECK(gates::u3().adjoint() * gates::u3() == id);
}

TEST_CASE("measure_bell examples") {
  RandomStream rng(1);
  const PureState phi_plus = prepare_ghz(2);
  auto m = measure_bell(phi_plus, 0, 1, BellOutcome::PhiPlus, rng);
  CHECK(m.probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.state.num_qubits() == 0);

  const PureState psi_minus =
      PureState::from_amplitudes({0, kInvSqrt2, -kInvSqrt2, 0});
  CHECK_THROWS_AS(measure_bell(psi_minus, 0, 1, BellOutcome::PhiPlus, rng),
                  ZeroProbabilityError);
  CHECK_THROWS_AS(measure_bell(psi_minus, 0, 0, std::nullopt, rng), IndexError);
  CHECK_THROWS_AS(measure_bell(psi_minus, 0, 2, std::nullopt, rng), IndexError);
}

TEST_CASE("Bell measurement of a secret qubit against a GHZ photon is uniform") {
  // Secret x y, GHZ a1 a2 a3, GHZ b1 b2 b3; measure (x, a1) = (0, 2).
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    RandomStream srng(seed);
    const SecretState secret = random_secret(2, srng);
    const PureState full =
        tensor(tensor(secret.state(), prepare_ghz(3)), prepare_ghz(3));
    const auto probs = bell_probabilities(full, 0, 2);

    // Oracle: sum of |<bell| (x) I psi|^2 over the rest, by explicit bits.
    oracle::Vec psi(full.amplitudes().begin(), full.amplitudes().end());
    for (int b = 0; b < 4; ++b) {
      std::vector<Amplitude> rest(psi.size() / 4, 0.0);
      for (std::size_t i = 0; i < psi.size(); ++i) {
        const int x = oracle::bit(i, 8, 0), a1 = oracle::bit(i, 8, 2);
        std::size_t r = 0;
        for (int p = 0; p < 8; ++p) {
          if (p == 0 || p == 2) continue;
          r = (r << 1) | static_cast<std::size_t>(oracle::bit(i, 8, p));
        }
        rest[r] += std::conj(oracle::bell_coeff(b, x, a1)) * psi[i];
      }
      const double w = oracle::norm2(rest);
      CHECK(w == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(probs[b] == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("measure_sigma_x examples") {
  RandomStream rng(2);
  auto m = measure_sigma_x(plus_x(), 0, SignOutcome::Plus, rng);
  CHECK(m.probability == doctest::Approx(1.0));
  CHECK_THROWS_AS(measure_sigma_x(plus_x(), 0, SignOutcome::Minus, rng),
                  ZeroProbabilityError);

  const auto p0 = sigma_x_probabilities(PureState::basis(1, 0), 0);
  CHECK(p0[0] == doctest::Approx(0.5));
  CHECK(p0[1] == doctest::Approx(0.5));

  const PureState ghz = prepare_ghz(3);
  const auto plus = measure_sigma_x(ghz, 0, SignOutcome::Plus, rng);
  const auto minus = measure_sigma_x(ghz, 0, SignOutcome::Minus, rng);
  CHECK(plus.probability == doctest::Approx(0.5));
  CHECK(minus.probability == doctest::Approx(0.5));
  check_amps(plus.state, {kInvSqrt2, 0, 0, kInvSqrt2});
  check_amps(minus.state, {kInvSqrt2, 0, 0, -kInvSqrt2});
  CHECK_THROWS_AS(measure_sigma_x(ghz, 3, std::nullopt, rng), IndexError);
}

TEST_CASE("sampling follows the Born weights") {
  // |0> measured in sigma-x: roughly half each way over many seeds.
  int plus = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng(static_cast<std::uint64_t>(t));
    if (measure_sigma_x(PureState::basis(1, 0), 0, std::nullopt, rng).outcome ==
        SignOutcome::Plus) {
      ++plus;
    }
  }
  CHECK(std::abs(plus - trials / 2) < 200);

  // Deterministic outcome is always chosen.
  for (int t = 0; t < 50; ++t) {
    RandomStream rng(static_cast<std::uint64_t>(t));
    CHECK(measure_bell(prepare_ghz(2), 0, 1, std::nullopt, rng).outcome ==
          BellOutcome::PhiPlus);
  }
}

TEST_CASE("fidelity examples") {
  RandomStream rng(3);
  const PureState s = gen::random_state(3, rng);
  CHECK(fidelity(s, s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(PureState::basis(1, 0), PureState::basis(1, 1)) == 0.0);
  std::vector<Amplitude> neg(s.amplitudes().begin(), s.amplitudes().end());
  for (auto& x : neg) x = -x;
  CHECK(fidelity(s, PureState::from_amplitudes(neg)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity(s, PureState::basis(2, 0)), InvalidArgument);
}

TEST_CASE("Bell outcome metadata") {
  CHECK(bit_value(BellOutcome::PhiPlus) == 0);
  CHECK(bit_value(BellOutcome::PhiMinus) == 0);
  CHECK(bit_value(BellOutcome::PsiPlus) == 1);
  CHECK(bit_value(BellOutcome::PsiMinus) == 1);
  CHECK(parity(BellOutcome::PhiMinus) == Parity::Minus);
  CHECK(parity(BellOutcome::PsiPlus) == Parity::Plus);
  for (BellOutcome b : kBellOutcomes) {
    CHECK(bell_outcome(bit_value(b), parity(b)) == b);
    CHECK(parse_bell_outcome(to_string(b)) == b);
  }
  CHECK(!parse_bell_outcome("Phi+").has_value());
  CHECK(parse_sign_outcome("-") == SignOutcome::Minus);
  CHECK(parse_sign_outcome("Plus") == SignOutcome::Plus);
  CHECK((Parity::Minus * Parity::Minus) == Parity::Plus);
}

// Properties over generated states. Each iteration derives its own seed.

TEST_CASE("property: norm preserved by every public operation") {
  std::mt19937_64 meta(100);
  for (int it = 0; it < 200; ++it) {
    const std::uint64_t seed = meta();
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const int n = gen::uniform_int(rng, 2, 9);
    const PureState s = gen::random_state(n, rng);
    const int q = gen::uniform_int(rng, 0, n - 1);
    const auto [qa, qb] = gen::distinct_pair(rng, n);
    RandomStream mrng(seed);

    CHECK(std::abs(apply_gate(s, q, gen::random_gate(rng)).norm_squared() - 1) <= 1e-9);
    CHECK(std::abs(tensor(s, gen::random_state(2, rng)).norm_squared() - 1) <= 1e-9);
    CHECK(std::abs(measure_sigma_x(s, q, std::nullopt, mrng).state.norm_squared() - 1) <= 1e-9);
    const auto bm = measure_bell(s, qa, qb, std::nullopt, mrng);
    CHECK(bm.state.num_qubits() == n - 2);
    CHECK(std::abs(bm.state.norm_squared() - 1) <= 1e-9);
  }
}

TEST_CASE("property: measurement probabilities are complete") {
  std::mt19937_64 meta(101);
  for (int it = 0; it < 200; ++it) {
    const std::uint64_t seed = meta();
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const int n = gen::uniform_int(rng, 2, 10);
    const PureState s = gen::random_state(n, rng);
    const auto [qa, qb] = gen::distinct_pair(rng, n);
    const auto pb = bell_probabilities(s, qa, qb);
    CHECK(std::abs(pb[0] + pb[1] + pb[2] + pb[3] - 1.0) <= 1e-9);
    const auto px = sigma_x_probabilities(s, qa);
    CHECK(std::abs(px[0] + px[1] - 1.0) <= 1e-9);
  }
}

TEST_CASE("property: collapse is idempotent") {
  std::mt19937_64 meta(102);
  for (int it = 0; it < 100; ++it) {
    const std::uint64_t seed = meta();
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const int n = gen::uniform_int(rng, 2, 7);
    const PureState s = gen::random_state(n, rng);
    const auto [qa, qb] = gen::distinct_pair(rng, n);
    for (BellOutcome b : kBellOutcomes) {
      const PureState c = detail::project_bell(s, qa, qb, b);
      CHECK(c.num_qubits() == n);
      const auto p = bell_probabilities(c, qa, qb);
      CHECK(p[static_cast<int>(b)] == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (SignOutcome x : kSignOutcomes) {
      const PureState c = detail::project_sigma_x(s, qa, x);
      const auto p = sigma_x_probabilities(c, qa);
      CHECK(p[static_cast<int>(x)] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: unitaries preserve fidelity") {
  std::mt19937_64 meta(103);
  for (int it = 0; it < 200; ++it) {
    const std::uint64_t seed = meta();
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const int n = gen::uniform_int(rng, 1, 8);
    const PureState s = gen::random_state(n, rng);
    const PureState t = gen::random_state(n, rng);
    const int q = gen::uniform_int(rng, 0, n - 1);
    const Gate2x2 g = gen::random_gate(rng);
    CHECK(std::abs(fidelity(apply_gate(s, q, g), apply_gate(t, q, g)) -
                   fidelity(s, t)) <= 1e-12);
  }
}

TEST_CASE("property: fidelity ignores global phase") {
  std::mt19937_64 meta(104);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int it = 0; it < 200; ++it) {
    const std::uint64_t seed = meta();
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const PureState s = gen::random_state(gen::uniform_int(rng, 1, 8), rng);
    const Amplitude phase = std::polar(1.0, ang(rng));
    std::vector<Amplitude> v(s.amplitudes().begin(), s.amplitudes().end());
    for (auto& x : v) x *= phase;
    CHECK(fidelity(s, PureState::from_amplitudes(v)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}
