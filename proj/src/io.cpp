#include "qsts/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qsts/error.hpp"

namespace qsts {
namespace {

using json = nlohmann::json;

template <class T, class Parse>
T parse_enum(const json& j, Parse parse, const char* what) {
  const auto text = j.get<std::string>();
  const auto v = parse(text);
  if (!v) throw InvalidArgument(std::string("bad ") + what + " '" + text + "'");
  return *v;
}

Parity parse_parity_json(const json& j) {
  const auto text = j.get<std::string>();
  if (text == "+") return Parity::Plus;
  if (text == "-") return Parity::Minus;
  throw InvalidArgument("bad parity '" + text + "'");
}

json policy_json(const OutcomePolicy& policy) {
  json j;
  if (std::holds_alternative<SampleOutcomes>(policy)) {
    j["kind"] = "Sample";
  } else if (std::holds_alternative<EnumerateOutcomes>(policy)) {
    j["kind"] = "Enumerate";
  } else {
    const auto& f = std::get<ForcedOutcomes>(policy);
    j["kind"] = "Forced";
    j["bell"] = json::array();
    for (BellOutcome b : f.bell) j["bell"].push_back(to_string(b));
    j["signs"] = json::array();
    for (SignOutcome s : f.signs) j["signs"].push_back(to_string(s));
  }
  return j;
}

OutcomePolicy parse_policy(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Sample") return SampleOutcomes{};
  if (kind == "Enumerate") return EnumerateOutcomes{};
  if (kind != "Forced") throw InvalidArgument("bad outcome policy '" + kind + "'");
  ForcedOutcomes f;
  for (const auto& b : j.at("bell")) {
    f.bell.push_back(parse_enum<BellOutcome>(b, parse_bell_outcome, "Bell outcome"));
  }
  for (const auto& s : j.at("signs")) {
    f.signs.push_back(parse_enum<SignOutcome>(s, parse_sign_outcome, "sign"));
  }
  return f;
}

}  // namespace

LoadedSecret parse_secret(std::string_view text) {
  try {
    const json j = json::parse(text);
    const int m = j.at("m").get<int>();
    if (m < 1) throw InvalidArgument("secret m must be >= 1");
    if (m > qubit_cap()) throw CapacityError("secret exceeds the qubit cap");
    const auto& list = j.at("amplitudes");
    if (!list.is_array() || list.size() != (std::size_t{1} << m)) {
      throw InvalidArgument("secret with m = " + std::to_string(m) + " needs " +
                            std::to_string(std::size_t{1} << m) + " amplitudes");
    }
    std::vector<Amplitude> amps;
    for (const auto& pair : list) {
      if (!pair.is_array() || pair.size() != 2) {
        throw InvalidArgument("each amplitude must be [re, im]");
      }
      amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    double norm2 = 0.0;
    for (const auto& a : amps) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw InvalidArgument("non-finite amplitude");
      }
      norm2 += std::norm(a);
    }
    const double deviation = std::abs(std::sqrt(norm2) - 1.0);
    if (deviation > kSecretNormRepairable) {
      throw InvalidArgument("secret norm is off by " + std::to_string(deviation));
    }
    std::string warning;
    if (deviation > kSecretNormExact) {
      warning = "secret norm off by " + std::to_string(deviation) +
                "; renormalized";
    }
    // Already unit norm: keep the bits as written so files round-trip exactly.
    if (std::abs(norm2 - 1.0) <= kNormTolerance) {
      return {SecretState(PureState::from_amplitudes(std::move(amps))), warning};
    }
    return {SecretState(PureState::normalized(std::move(amps))), warning};
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed secret file: ") + e.what());
  }
}

std::string format_secret(const SecretState& secret) {
  json j;
  j["m"] = secret.m();
  j["amplitudes"] = json::array();
  for (const auto& a : secret.amplitudes()) {
    j["amplitudes"].push_back({a.real(), a.imag()});
  }
  return j.dump(2) + "\n";
}

std::string format_transcript(const Transcript& t) {
  json j;
  j["tool_version"] = kToolVersion;
  j["config"] = {{"m", t.config.m},
                 {"n", t.config.n},
                 {"receiver", t.config.receiver},
                 {"seed", t.config.seed},
                 {"outcome_policy", policy_json(t.config.policy)}};
  j["bell_outcomes"] = json::array();
  for (BellOutcome b : t.bell_outcomes) j["bell_outcomes"].push_back(to_string(b));
  j["sign_outcomes"] = json::array();
  for (const auto& row : t.sign_outcomes) {
    json r = json::array();
    for (SignOutcome s : row) r.push_back(to_string(s));
    j["sign_outcomes"].push_back(std::move(r));
  }
  j["minus_counts"] = t.minus_counts;
  j["parities"] = json::array();
  for (Parity p : t.parities) j["parities"].push_back(std::string(1, to_char(p)));
  j["corrections"] = json::array();
  for (CorrectionOp op : t.corrections) j["corrections"].push_back(to_string(op));
  j["branch_probability"] = t.branch_probability;
  j["fidelity"] = t.fidelity;
  j["classical_bits"] = t.classical_bits;
  return j.dump(2) + "\n";
}

Transcript parse_transcript(std::string_view text) {
  try {
    const json j = json::parse(text);
    Transcript t;
    const auto& c = j.at("config");
    t.config.m = c.at("m").get<int>();
    t.config.n = c.at("n").get<int>();
    t.config.receiver = c.at("receiver").get<int>();
    t.config.seed = c.at("seed").get<std::uint64_t>();
    t.config.policy = parse_policy(c.at("outcome_policy"));
    for (const auto& b : j.at("bell_outcomes")) {
      t.bell_outcomes.push_back(
          parse_enum<BellOutcome>(b, parse_bell_outcome, "Bell outcome"));
    }
    for (const auto& row : j.at("sign_outcomes")) {
      std::vector<SignOutcome> r;
      for (const auto& s : row) {
        r.push_back(parse_enum<SignOutcome>(s, parse_sign_outcome, "sign"));
      }
      t.sign_outcomes.push_back(std::move(r));
    }
    t.minus_counts = j.at("minus_counts").get<std::vector<int>>();
    for (const auto& p : j.at("parities")) t.parities.push_back(parse_parity_json(p));
    for (const auto& op : j.at("corrections")) {
      t.corrections.push_back(
          parse_enum<CorrectionOp>(op, parse_correction, "correction"));
    }
    t.branch_probability = j.at("branch_probability").get<double>();
    t.fidelity = j.at("fidelity").get<double>();
    t.classical_bits = j.at("classical_bits").get<int>();
    return t;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed transcript file: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

}  // namespace qsts
