#include "qsts/table_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "qsts/error.hpp"

#ifndef QSTS_GOLDEN_DIR
#define QSTS_GOLDEN_DIR "data/golden"
#endif

namespace qsts {
namespace {

constexpr double kProbeTolerance = 1e-9;

SignedSymbol negate(SignedSymbol s) {
  s.sign = s.sign == Parity::Plus ? Parity::Minus : Parity::Plus;
  return s;
}

SymbolSlots negate(SymbolSlots slots) {
  for (auto& s : slots) s = negate(s);
  return slots;
}

const SymbolSlots kIdentityPattern{SignedSymbol{Parity::Plus, 'a'},
                                   SignedSymbol{Parity::Plus, 'b'},
                                   SignedSymbol{Parity::Plus, 'c'},
                                   SignedSymbol{Parity::Plus, 'd'}};

std::string key_string(int v1, int v2, Parity p1, Parity p2) {
  std::string k;
  k += static_cast<char>('0' + v1);
  k += ' ';
  k += static_cast<char>('0' + v2);
  k += ' ';
  k += to_char(p1);
  k += ' ';
  k += to_char(p2);
  return k;
}

template <class Row>
auto row_key(const Row& r) {
  return std::make_tuple(r.v1, r.v2, r.p1, r.p2);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

// Non-comment lines split on '|' and tokenized.
std::vector<std::vector<std::vector<std::string>>> table_lines(
    std::string_view text, std::size_t sections) {
  std::vector<std::vector<std::vector<std::string>>> rows;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) continue;
    std::vector<std::vector<std::string>> parts;
    std::size_t start = 0;
    while (true) {
      const auto bar = line.find('|', start);
      parts.push_back(tokens(std::string_view(line).substr(
          start, bar == std::string::npos ? std::string::npos : bar - start)));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (parts.size() != sections) {
      throw InvalidArgument("golden line " + std::to_string(line_no) +
                            ": expected " + std::to_string(sections) +
                            " '|'-separated sections");
    }
    rows.push_back(std::move(parts));
  }
  return rows;
}

int parse_bit(const std::string& t) {
  if (t == "0") return 0;
  if (t == "1") return 1;
  throw InvalidArgument("bad bit value '" + t + "'");
}

Parity parse_parity(const std::string& t) {
  if (t == "+") return Parity::Plus;
  if (t == "-") return Parity::Minus;
  throw InvalidArgument("bad parity '" + t + "'");
}

CorrectionOp parse_op(const std::string& t) {
  if (auto op = parse_correction(t)) return *op;
  throw InvalidArgument("bad correction '" + t + "'");
}

SymbolSlots parse_slots(const std::vector<std::string>& t) {
  if (t.size() != 4) throw InvalidArgument("expected four signed symbols");
  SymbolSlots slots;
  for (std::size_t k = 0; k < 4; ++k) {
    auto s = parse_signed_symbol(t[k]);
    if (!s) throw InvalidArgument("bad signed symbol '" + t[k] + "'");
    slots[k] = *s;
  }
  return slots;
}

void expect_size(const std::vector<std::string>& t, std::size_t n,
                 const char* what) {
  if (t.size() != n) {
    throw InvalidArgument(std::string("expected ") + std::to_string(n) + " " +
                          what);
  }
}

std::string slots_string(const SymbolSlots& slots) {
  std::string s;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k) s += ' ';
    s += to_string(slots[k]);
  }
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Row, class KeyFn>
void diff_rows(const std::string& table, const std::vector<Row>& derived,
               const std::vector<Row>& golden, KeyFn key, DiffReport& report) {
  std::map<std::string, const Row*> by_key;
  for (const auto& r : derived) by_key[key(r)] = &r;
  std::map<std::string, bool> seen;
  for (const auto& g : golden) {
    ++report.rows_checked;
    const std::string k = key(g);
    seen[k] = true;
    const auto it = by_key.find(k);
    if (it == by_key.end()) {
      report.mismatches.push_back({table, k, "<missing>", format_row(g)});
    } else if (!(*it->second == g)) {
      report.mismatches.push_back(
          {table, k, format_row(*it->second), format_row(g)});
    }
  }
  for (const auto& [k, r] : by_key) {
    if (!seen.count(k)) {
      report.mismatches.push_back({table, k, format_row(*r), "<missing>"});
    }
  }
}

}  // namespace

std::string to_string(const SignedSymbol& s) {
  return std::string(1, to_char(s.sign)) + s.symbol;
}

std::optional<SignedSymbol> parse_signed_symbol(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  if (text[0] != '+' && text[0] != '-') return std::nullopt;
  if (text[1] < 'a' || text[1] > 'd') return std::nullopt;
  return SignedSymbol{text[0] == '+' ? Parity::Plus : Parity::Minus, text[1]};
}

SymbolSlots probe_receiver_pattern(const ProtocolConfig& config) {
  if (config.m != 2) throw InvalidArgument("pattern probes need m = 2");
  std::array<bool, 4> filled{};
  SymbolSlots slots;
  for (std::uint64_t probe = 0; probe < 4; ++probe) {
    const SecretState secret(PureState::basis(2, probe));
    const PureState received = run_protocol_detailed(config, secret).received;
    int landing = -1;
    for (std::size_t k = 0; k < 4; ++k) {
      const Amplitude a = received[k];
      if (std::abs(a) <= kProbeTolerance) continue;
      if (landing >= 0) {
        throw DerivationError("basis probe spread over several basis states");
      }
      Parity sign;
      if (std::abs(a - 1.0) <= kProbeTolerance) {
        sign = Parity::Plus;
      } else if (std::abs(a + 1.0) <= kProbeTolerance) {
        sign = Parity::Minus;
      } else {
        throw DerivationError("basis probe amplitude is not +-1");
      }
      landing = static_cast<int>(k);
      if (filled[k]) throw DerivationError("two probes landed on one slot");
      filled[k] = true;
      slots[k] = {sign, static_cast<char>('a' + probe)};
    }
    if (landing < 0) throw DerivationError("basis probe vanished");
  }
  return slots;
}

SymbolSlots apply_corrections(const SymbolSlots& pattern,
                              const std::array<CorrectionOp, 2>& ops) {
  SymbolSlots cur = pattern;
  for (int q = 0; q < 2; ++q) {
    const std::size_t mask = q == 0 ? 2 : 1;
    SymbolSlots next;
    for (std::size_t idx = 0; idx < 4; ++idx) {
      const bool one = (idx & mask) != 0;
      const SignedSymbol s = cur[idx];
      switch (ops[q]) {
        case CorrectionOp::U0: next[idx] = s; break;
        case CorrectionOp::U1: next[idx] = one ? negate(s) : s; break;
        case CorrectionOp::U2: next[idx ^ mask] = s; break;
        // |1> -> |0>, |0> -> -|1>
        case CorrectionOp::U3: next[idx ^ mask] = one ? s : negate(s); break;
      }
    }
    cur = next;
  }
  return cur;
}

std::vector<TableRowI> derive_table1() {
  std::map<std::tuple<int, int, Parity, Parity>, TableRowI> rows;
  for (BellOutcome b1 : kBellOutcomes) {
    for (BellOutcome b2 : kBellOutcomes) {
      for (SignOutcome s1 : kSignOutcomes) {
        for (SignOutcome s2 : kSignOutcomes) {
          const ProtocolConfig config =
              make_config(2, 1, 0, ForcedOutcomes{{b1, b2}, {s1, s2}});
          SymbolSlots phi = probe_receiver_pattern(config);
          // Fix the global sign so that 'a' appears with '+'.
          for (const auto& s : phi) {
            if (s.symbol == 'a' && s.sign == Parity::Minus) {
              phi = negate(phi);
              break;
            }
          }
          TableRowI row;
          row.v1 = bit_value(b1);
          row.v2 = bit_value(b2);
          row.p1 = parity(b1) * parity(s1);
          row.p2 = parity(b2) * parity(s2);
          row.phi = phi;
          row.ops = {compute_correction(row.v1, row.p1),
                     compute_correction(row.v2, row.p2)};
          const SymbolSlots repaired = apply_corrections(phi, row.ops);
          if (repaired != kIdentityPattern &&
              repaired != negate(kIdentityPattern)) {
            throw DerivationError("corrections do not repair key " +
                                  key_string(row.v1, row.v2, row.p1, row.p2));
          }
          const auto key = row_key(row);
          const auto [it, inserted] = rows.emplace(key, row);
          if (!inserted && !(it->second == row)) {
            throw DerivationError("branches sharing key " +
                                  key_string(row.v1, row.v2, row.p1, row.p2) +
                                  " disagree");
          }
        }
      }
    }
  }
  std::vector<TableRowI> out;
  for (auto& [k, r] : rows) out.push_back(r);
  return out;
}

std::vector<TableRowII> derive_table2(int n) {
  std::vector<TableRowII> out;
  for (BellOutcome b1 : kBellOutcomes) {
    for (BellOutcome b2 : kBellOutcomes) {
      ForcedOutcomes forced{{b1, b2},
                            std::vector<SignOutcome>(2 * n, SignOutcome::Plus)};
      const ProtocolConfig config = make_config(2, n, 0, std::move(forced));
      TableRowII row;
      row.v1 = bit_value(b1);
      row.v2 = bit_value(b2);
      row.p1 = parity(b1);
      row.p2 = parity(b2);
      row.coeffs = probe_receiver_pattern(config);
      out.push_back(row);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return row_key(a) < row_key(b); });
  return out;
}

std::vector<TableRowIII> derive_table3(std::uint64_t seed) {
  RandomStream rng(seed);
  const SecretState secret = random_secret(1, rng);
  std::vector<TableRowIII> out;
  for (int v : {0, 1}) {
    for (Parity p : {Parity::Plus, Parity::Minus}) {
      std::optional<CorrectionOp> found;
      // Every branch in the (V, P) class: Bell parity times sign equals P.
      for (Parity bell_parity : {Parity::Plus, Parity::Minus}) {
        const BellOutcome bell = bell_outcome(v, bell_parity);
        const SignOutcome sign = (bell_parity * p) == Parity::Plus
                                     ? SignOutcome::Plus
                                     : SignOutcome::Minus;
        const ProtocolConfig config =
            make_config(1, 1, seed, ForcedOutcomes{{bell}, {sign}});
        const PureState received =
            run_protocol_detailed(config, secret).received;
        std::vector<CorrectionOp> repairs;
        for (CorrectionOp op : kCorrectionOps) {
          const double f =
              fidelity(apply_gate(received, 0, gate(op)), secret.state());
          if (f >= 1.0 - kProbeTolerance) repairs.push_back(op);
        }
        if (repairs.size() != 1) {
          throw AmbiguityError(std::to_string(repairs.size()) +
                               " corrections repair class " +
                               std::to_string(v) + " " + to_char(p));
        }
        if (found && *found != repairs.front()) {
          throw DerivationError("branches of one (V, P) class need different "
                                "corrections");
        }
        found = repairs.front();
      }
      out.push_back({v, p, *found});
    }
  }
  return out;
}

std::vector<TableRowI> parse_table1(std::string_view text) {
  std::vector<TableRowI> rows;
  for (const auto& parts : table_lines(text, 3)) {
    expect_size(parts[0], 4, "key fields");
    expect_size(parts[2], 2, "corrections");
    TableRowI r;
    r.v1 = parse_bit(parts[0][0]);
    r.v2 = parse_bit(parts[0][1]);
    r.p1 = parse_parity(parts[0][2]);
    r.p2 = parse_parity(parts[0][3]);
    r.phi = parse_slots(parts[1]);
    r.ops = {parse_op(parts[2][0]), parse_op(parts[2][1])};
    rows.push_back(r);
  }
  return rows;
}

std::vector<TableRowII> parse_table2(std::string_view text) {
  std::vector<TableRowII> rows;
  for (const auto& parts : table_lines(text, 2)) {
    expect_size(parts[0], 4, "key fields");
    TableRowII r;
    r.v1 = parse_bit(parts[0][0]);
    r.v2 = parse_bit(parts[0][1]);
    r.p1 = parse_parity(parts[0][2]);
    r.p2 = parse_parity(parts[0][3]);
    r.coeffs = parse_slots(parts[1]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TableRowIII> parse_table3(std::string_view text) {
  std::vector<TableRowIII> rows;
  for (const auto& parts : table_lines(text, 2)) {
    expect_size(parts[0], 2, "key fields");
    expect_size(parts[1], 1, "correction");
    rows.push_back({parse_bit(parts[0][0]), parse_parity(parts[0][1]),
                    parse_op(parts[1][0])});
  }
  return rows;
}

std::string format_row(const TableRowI& r) {
  return key_string(r.v1, r.v2, r.p1, r.p2) + " | " + slots_string(r.phi) +
         " | " + std::string(to_string(r.ops[0])) + " " +
         std::string(to_string(r.ops[1]));
}

std::string format_row(const TableRowII& r) {
  return key_string(r.v1, r.v2, r.p1, r.p2) + " | " + slots_string(r.coeffs);
}

std::string format_row(const TableRowIII& r) {
  return std::string(1, static_cast<char>('0' + r.v)) + " " + to_char(r.p) +
         " | " + std::string(to_string(r.op));
}

std::filesystem::path default_golden_dir() {
  if (const char* env = std::getenv("QSTS_GOLDEN_DIR"); env && *env) {
    return env;
  }
  return QSTS_GOLDEN_DIR;
}

GoldenTables load_golden(const std::filesystem::path& dir) {
  return {parse_table1(read_file(dir / "table1.txt")),
          parse_table2(read_file(dir / "table2.txt")),
          parse_table3(read_file(dir / "table3.txt"))};
}

DiffReport diff_tables(const GoldenTables& derived, const GoldenTables& golden) {
  DiffReport report;
  const auto key4 = [](const auto& r) {
    return key_string(r.v1, r.v2, r.p1, r.p2);
  };
  diff_rows("I", derived.table1, golden.table1, key4, report);
  diff_rows("II", derived.table2, golden.table2, key4, report);
  diff_rows("III", derived.table3, golden.table3, [](const TableRowIII& r) {
    return std::string(1, static_cast<char>('0' + r.v)) + " " + to_char(r.p);
  }, report);
  return report;
}

DiffReport diff_against_golden(const GoldenTables& golden, std::uint64_t seed) {
  const GoldenTables derived{derive_table1(), derive_table2(), derive_table3(seed)};
  return diff_tables(derived, golden);
}

}  // namespace qsts
