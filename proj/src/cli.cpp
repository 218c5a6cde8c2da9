#include "qsts/cli.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qsts/error.hpp"
#include "qsts/io.hpp"
#include "qsts/metrics.hpp"
#include "qsts/table_oracle.hpp"

namespace qsts::cli {
namespace {

using json = nlohmann::json;

constexpr double kEnumerateTolerance = 1e-9;
constexpr int kThresholdSeeds = 10;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    std::string part(text.substr(start, pos == std::string_view::npos
                                            ? std::string_view::npos
                                            : pos - start));
    const auto b = part.find_first_not_of(' ');
    const auto e = part.find_last_not_of(' ');
    parts.push_back(b == std::string::npos ? "" : part.substr(b, e - b + 1));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

struct RunOptions {
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::string secret_path;
  int receiver = 0;
  std::string forced;
  std::string out_path;
};

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ProtocolConfig config = make_config(o.m, o.n, o.seed);
  if (o.receiver != 0) config.receiver = o.receiver;
  if (!o.forced.empty()) config.policy = parse_forced(o.forced, o.m, o.n);
  validate(config);

  std::optional<SecretState> secret;
  if (!o.secret_path.empty()) {
    LoadedSecret loaded = parse_secret(read_text(o.secret_path));
    if (!loaded.warning.empty()) err << "warning: " << loaded.warning << "\n";
    secret = std::move(loaded.secret);
  } else {
    RandomStream rng(o.seed);
    secret = random_secret(o.m, rng);
  }

  const Transcript t = run_protocol(config, *secret);
  if (!o.out_path.empty()) write_text(o.out_path, format_transcript(t));

  std::string bell;
  for (std::size_t i = 0; i < t.bell_outcomes.size(); ++i) {
    bell += (i ? "," : "") + std::string(to_string(t.bell_outcomes[i]));
  }
  std::string corrections;
  for (std::size_t i = 0; i < t.corrections.size(); ++i) {
    corrections += (i ? "," : "") + std::string(to_string(t.corrections[i]));
  }
  out << "bell_outcomes: " << bell << "\n"
      << "corrections: " << corrections << "\n"
      << "branch_probability: " << num(t.branch_probability) << "\n"
      << "fidelity: " << num(t.fidelity) << "\n";
  return t.fidelity >= kSuccessFidelity ? kVerified : kVerificationFailed;
}

json verify_tables(const std::string& golden_dir, std::uint64_t seed) {
  const GoldenTables golden =
      load_golden(golden_dir.empty() ? default_golden_dir()
                                     : std::filesystem::path(golden_dir));
  const DiffReport report = diff_against_golden(golden, seed);
  json mismatches = json::array();
  for (const auto& mm : report.mismatches) {
    mismatches.push_back({{"table", mm.table},
                          {"key", mm.key},
                          {"derived", mm.derived},
                          {"golden", mm.golden}});
  }
  return {{"suite", "tables"},
          {"rows_checked", report.rows_checked},
          {"mismatches", mismatches},
          {"passed", report.ok()}};
}

json verify_enumerate(int m, int n, std::uint64_t seed) {
  RandomStream rng(seed);
  const SecretState secret = random_secret(m, rng);
  const auto branches = enumerate_branches(make_config(m, n, seed), secret);
  const double expected = 1.0 / static_cast<double>(branch_count(m, n));
  double total = 0.0;
  double min_fidelity = 1.0;
  int bad_probability = 0;
  for (const auto& t : branches) {
    total += t.branch_probability;
    min_fidelity = std::min(min_fidelity, t.fidelity);
    if (std::abs(t.branch_probability - expected) > kEnumerateTolerance) {
      ++bad_probability;
    }
  }
  const bool passed = min_fidelity >= 1.0 - kEnumerateTolerance &&
                      std::abs(total - 1.0) <= kEnumerateTolerance &&
                      bad_probability == 0;
  return {{"suite", "enumerate"},
          {"m", m},
          {"n", n},
          {"branches", branches.size()},
          {"min_fidelity", num(min_fidelity)},
          {"probability_sum", num(total)},
          {"unequal_probabilities", bad_probability},
          {"passed", passed}};
}

json verify_threshold(int m, int n, std::uint64_t seed) {
  const Rational expected(1, std::int64_t{1} << m);
  std::set<std::string> observed;
  bool passed = true;
  for (int s = 0; s < kThresholdSeeds; ++s) {
    RandomStream rng(seed + static_cast<std::uint64_t>(s));
    const SecretState secret = random_secret(m, rng);
    for (int c = 1; c <= n; ++c) {
      const Rational r = threshold_success(m, n, secret, c, seed + s);
      observed.insert(to_string(r));
      passed = passed && r == expected;
    }
  }
  return {{"suite", "threshold"},
          {"m", m},
          {"n", n},
          {"expected", to_string(expected)},
          {"observed", observed},
          {"passed", passed}};
}

std::vector<std::pair<int, int>> enumerate_grid(int m, int n) {
  if (m > 0 && n > 0) return {{m, n}};
  std::vector<std::pair<int, int>> grid;
  for (int mm = 1; mm <= 3; ++mm) {
    for (int nn = 1; nn <= 3; ++nn) {
      if ((m > 0 && mm != m) || (n > 0 && nn != n)) continue;
      if (mm * (nn + 3) > qubit_cap()) continue;
      if (branch_count(mm, nn) > kDefaultBranchLimit) continue;
      grid.emplace_back(mm, nn);
    }
  }
  return grid;
}

std::vector<std::pair<int, int>> threshold_grid(int m, int n) {
  if (m > 0 && n > 0) return {{m, n}};
  std::vector<std::pair<int, int>> grid;
  for (int mm = 1; mm <= 3; ++mm) {
    for (int nn = 1; nn <= 2; ++nn) {
      if ((m > 0 && mm != m) || (n > 0 && nn != n)) continue;
      grid.emplace_back(mm, nn);
    }
  }
  return grid;
}

int cmd_verify(const std::string& suite, int m, int n, std::uint64_t seed,
               const std::string& golden_dir, std::ostream& out) {
  if ((m != 0 && m < 1) || (n != 0 && n < 1)) {
    throw InvalidArgument("m and n must be >= 1");
  }
  json results = json::array();
  if (suite == "tables" || suite == "all") {
    results.push_back(verify_tables(golden_dir, seed));
  }
  if (suite == "enumerate" || suite == "all") {
    for (auto [mm, nn] : enumerate_grid(m, n)) {
      results.push_back(verify_enumerate(mm, nn, seed));
    }
  }
  if (suite == "threshold" || suite == "all") {
    for (auto [mm, nn] : threshold_grid(m, n)) {
      results.push_back(verify_threshold(mm, nn, seed));
    }
  }
  int failures = 0;
  for (const auto& r : results) {
    if (!r.at("passed").get<bool>()) ++failures;
  }
  out << json{{"suite", suite}, {"results", results}, {"failures", failures}}
             .dump(2)
      << "\n";
  return failures == 0 ? kVerified : kVerificationFailed;
}

int cmd_metrics(int m, int n, std::ostream& out) {
  const EfficiencyReport r = efficiency(m, n);
  out << "q_u=" << r.useful_qubits << "\n"
      << "q_t=" << r.transmitted_qubits << "\n"
      << "b_t=" << r.classical_bits << "\n"
      << "eta_q=" << to_string(r.qubit_efficiency) << "\n"
      << "eta_t=" << to_string(r.total_efficiency) << "\n";
  return kVerified;
}

}  // namespace

ForcedOutcomes parse_forced(std::string_view text, int m, int n) {
  const auto rows = split(text, ';');
  if (rows.size() != static_cast<std::size_t>(n) + 1) {
    throw InvalidArgument("--forced needs the Bell row plus " +
                          std::to_string(n) + " controller rows");
  }
  ForcedOutcomes f;
  for (const auto& token : split(rows[0], ',')) {
    const auto b = parse_bell_outcome(token);
    if (!b) throw InvalidArgument("bad Bell outcome '" + token + "'");
    f.bell.push_back(*b);
  }
  if (f.bell.size() != static_cast<std::size_t>(m)) {
    throw InvalidArgument("--forced needs " + std::to_string(m) +
                          " Bell outcomes");
  }
  f.signs.assign(static_cast<std::size_t>(m) * n, SignOutcome::Plus);
  for (int c = 0; c < n; ++c) {
    const auto tokens = split(rows[c + 1], ',');
    if (tokens.size() != static_cast<std::size_t>(m)) {
      throw InvalidArgument("controller row " + std::to_string(c + 1) +
                            " needs " + std::to_string(m) + " signs");
    }
    for (int i = 0; i < m; ++i) {
      const auto s = parse_sign_outcome(tokens[i]);
      if (!s) throw InvalidArgument("bad sign '" + tokens[i] + "'");
      f.signs[i * n + c] = *s;
    }
  }
  return f;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Multiparty quantum state sharing simulator and verifier", "qsts"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run the protocol once and write a transcript");
  run_cmd->add_option("--m", run_opts.m, "Secret qubits")->required();
  run_cmd->add_option("--n", run_opts.n, "Controllers (agents = n+1)")->required();
  run_cmd->add_option("--seed", run_opts.seed, "Seed for secret and outcomes");
  run_cmd->add_option("--secret", run_opts.secret_path, "SecretFile (JSON); Haar-random from seed if absent");
  run_cmd->add_option("--receiver", run_opts.receiver, "Receiving agent in [1, n+1] (default n+1)");
  run_cmd->add_option("--forced", run_opts.forced,
                      "Forced outcomes: Bell outcomes comma-separated, then ';' and one "
                      "comma-separated row of m signs (+/-) per controller, "
                      "e.g. \"PhiPlus,PhiPlus;+,-\"");
  run_cmd->add_option("--out", run_opts.out_path, "TranscriptFile path");

  std::string suite = "all";
  int verify_m = 0;
  int verify_n = 0;
  std::uint64_t verify_seed = 1;
  std::string golden_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("--suite", suite, "tables | enumerate | threshold | all")
      ->check(CLI::IsMember({"tables", "enumerate", "threshold", "all"}));
  verify_cmd->add_option("--m", verify_m, "Restrict to this m");
  verify_cmd->add_option("--n", verify_n, "Restrict to this n");
  verify_cmd->add_option("--seed", verify_seed, "Base seed for secrets");
  verify_cmd->add_option("--golden-dir", golden_dir, "Directory with table1.txt..table3.txt");

  int metrics_m = 1;
  int metrics_n = 0;
  auto* metrics_cmd = app.add_subcommand("metrics", "Print efficiency figures as exact fractions");
  metrics_cmd->add_option("--n", metrics_n, "Controllers")->required();
  metrics_cmd->add_option("--m", metrics_m, "Secret qubits");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kVerified : kInvalidInput;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, out, err);
    if (*verify_cmd) {
      return cmd_verify(suite, verify_m, verify_n, verify_seed, golden_dir, out);
    }
    if (*metrics_cmd) return cmd_metrics(metrics_m, metrics_n, out);
  } catch (const DegenerateSecretError& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const DerivationError& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const AmbiguityError& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace qsts::cli
