// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// all pass. Tolerances and time limits are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <fmt/core.h>

#include "qsts/metrics.hpp"
#include "qsts/parties.hpp"
#include "qsts/protocol.hpp"
#include "qsts/table_oracle.hpp"

using namespace qsts;

namespace {

constexpr double kFidelityTol = 1e-9;
constexpr double kProbabilityTol = 1e-9;
constexpr double kNormTol = 1e-9;
constexpr double kPhaseTol = 1e-12;
constexpr double kSessionRealTol = 1e-12;

constexpr double kTablesSeconds = 5.0;
constexpr double kEnumerateSeconds = 60.0;
constexpr double kThresholdSeconds = 10.0;

struct Outcome {
  bool pass;
  std::string detail;
};

SecretState haar(int m, std::uint64_t seed) {
  RandomStream rng(seed);
  return random_secret(m, rng);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::pair<int, int>> enumerable_grid() {
  std::vector<std::pair<int, int>> g;
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      if (m * (n + 3) <= kMaxQubits && branch_count(m, n) <= kDefaultBranchLimit) {
        g.emplace_back(m, n);
      }
    }
  }
  return g;
}

// Counts branches failing reconstruction or equiprobability.
struct EnumStats {
  std::uint64_t branches = 0;
  std::uint64_t bad_fidelity = 0;
  std::uint64_t bad_probability = 0;
  double sum = 0.0;
};

EnumStats enumerate_stats(const ProtocolConfig& c, const SecretState& s) {
  EnumStats st;
  const double p = 1.0 / static_cast<double>(branch_count(c.m, c.n));
  for (const auto& t : enumerate_branches(c, s)) {
    ++st.branches;
    st.sum += t.branch_probability;
    st.bad_fidelity += t.fidelity < 1.0 - kFidelityTol;
    st.bad_probability += std::abs(t.branch_probability - p) > kProbabilityTol;
  }
  return st;
}

Outcome tables() {
  const auto t0 = std::chrono::steady_clock::now();
  const DiffReport r = diff_against_golden(load_golden(default_golden_dir()));
  const double dt = seconds_since(t0);
  return {r.rows_checked == 36 && r.ok() && dt < kTablesSeconds,
          fmt::format("{} rows, {} mismatches, {:.2f} s", r.rows_checked,
                      r.mismatches.size(), dt)};
}

Outcome enumeration() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::uint64_t total = 0;
  for (auto [m, n] : enumerable_grid()) {
    const EnumStats st = enumerate_stats(make_config(m, n), haar(m, 1000 + 10 * m + n));
    total += st.branches;
    ok = ok && st.branches == branch_count(m, n) && st.bad_fidelity == 0 &&
         st.bad_probability == 0 && std::abs(st.sum - 1.0) <= kProbabilityTol;
  }
  const double dt = seconds_since(t0);
  return {ok && dt < kEnumerateSeconds,
          fmt::format("{} grid points, {} branches, {:.2f} s",
                      enumerable_grid().size(), total, dt)};
}

Outcome threshold() {
  const auto t0 = std::chrono::steady_clock::now();
  int checks = 0, wrong = 0;
  for (int m = 1; m <= 3; ++m) {
    const Rational want(1, std::int64_t{1} << m);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SecretState s = haar(m, 5000 + 100 * m + seed);
      for (int n = 1; n <= 2; ++n) {
        for (int w = 1; w <= n; ++w) {
          ++checks;
          wrong += threshold_success(m, n, s, w, seed) != want;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  return {wrong == 0 && dt < kThresholdSeconds,
          fmt::format("{} checks, {} off 2^-m, {:.2f} s", checks, wrong, dt)};
}

Outcome efficiency_check() {
  bool ok = efficiency(1, 1).total_efficiency == Rational(2, 5) &&
            efficiency(1, 2).total_efficiency == Rational(3, 7);
  int sessions = 0;
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      const EfficiencyReport e = efficiency(m, n);
      ok = ok && e.qubit_efficiency == Rational(1) &&
           e.total_efficiency == Rational(n + 1, 2 * n + 3) &&
           e.classical_bits == (n + 2) * m;
      const SessionResult r = run_session(make_config(m, n, 17), haar(m, 17));
      ok = ok && published_bits(r.log) == e.classical_bits;
      ++sessions;
    }
  }
  return {ok, fmt::format("eta_t(1)={}, eta_t(2)={}, {} logs counted",
                          to_string(efficiency(1, 1).total_efficiency),
                          to_string(efficiency(1, 2).total_efficiency), sessions)};
}

Outcome distributed() {
  std::vector<std::pair<int, int>> grid;
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) grid.emplace_back(m, n);
  }
  int fifo_equal = 0, adv_equiv = 0, adv_bitwise = 0;
  const int configs = 100;
  for (int k = 0; k < configs; ++k) {
    const auto [m, n] = grid[k % grid.size()];
    const std::uint64_t seed = 0x9e37u + 7919u * static_cast<std::uint64_t>(k);
    const ProtocolConfig c = make_config(m, n, seed);
    const SecretState s = haar(m, seed);
    const Transcript direct = run_protocol(c, s);
    fifo_equal += run_session(c, s).transcript == direct;
    SessionOptions o;
    o.scheduling = Scheduling::Adversarial;
    o.scheduler_seed = seed + 1;
    const Transcript a = run_session(c, s, o).transcript;
    adv_equiv += equivalent(a, direct, kSessionRealTol);
    adv_bitwise += a == direct;
  }
  return {fifo_equal == configs && adv_equiv == configs,
          fmt::format("fifo {}/{} identical, adversarial {}/{} equivalent "
                      "({} bit-identical)",
                      fifo_equal, configs, adv_equiv, configs, adv_bitwise)};
}

Outcome properties() {
  std::mt19937_64 rng(6006);
  std::normal_distribution<double> g;
  auto random_state = [&](int q) {
    std::vector<Amplitude> v(std::size_t{1} << q);
    for (auto& x : v) x = {g(rng), g(rng)};
    return PureState::normalized(std::move(v));
  };
  int norm_bad = 0, complete_bad = 0, phase_bad = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const int q = 2 + t % 9;
    const PureState s = random_state(q);
    const int a = t % q, b = (t + 1) % q;
    RandomStream mr(static_cast<std::uint64_t>(t));
    const double n1 = apply_gate(s, a, gates::hadamard()).norm_squared();
    const double n2 = measure_bell(s, a, b, std::nullopt, mr).state.norm_squared();
    const double n3 = measure_sigma_x(s, b, std::nullopt, mr).state.norm_squared();
    const double n4 = tensor(s, random_state(1)).norm_squared();
    for (double x : {n1, n2, n3, n4}) norm_bad += std::abs(x - 1.0) > kNormTol;

    const auto pb = bell_probabilities(s, a, b);
    const auto px = sigma_x_probabilities(s, a);
    complete_bad += std::abs(pb[0] + pb[1] + pb[2] + pb[3] - 1.0) > kProbabilityTol;
    complete_bad += std::abs(px[0] + px[1] - 1.0) > kProbabilityTol;

    const Amplitude phase = std::polar(1.0, 0.1 + t);
    std::vector<Amplitude> v(s.amplitudes().begin(), s.amplitudes().end());
    for (auto& x : v) x *= phase;
    phase_bad += std::abs(fidelity(s, PureState::from_amplitudes(v)) - 1.0) > kPhaseTol;
  }

  int symmetry_bad = 0;
  const SecretState secret = haar(2, 2222);
  for (int r = 1; r <= 3; ++r) {
    ProtocolConfig c = make_config(2, 2);
    c.receiver = r;
    const EnumStats st = enumerate_stats(c, secret);
    symmetry_bad += st.bad_fidelity + st.bad_probability +
                    (std::abs(st.sum - 1.0) > kProbabilityTol);
  }
  return {norm_bad + complete_bad + phase_bad + symmetry_bad == 0,
          fmt::format("norm {}, completeness {}, receiver symmetry {}, "
                      "phase invariance {} failures",
                      norm_bad, complete_bad, symmetry_bad, phase_bad)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 table reproduction", tables},
      {"2 perfect-reconstruction enumeration", enumeration},
      {"3 threshold", threshold},
      {"4 efficiency", efficiency_check},
      {"5 distributed equivalence", distributed},
      {"6 property suite", properties},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    fmt::print("criterion {}: {} ({})\n", name, o.pass ? "PASS" : "FAIL", o.detail);
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
