#pragma once

// Brute-force re-derivation of the correction tables and comparison against
// golden rows shipped under data/golden/.
//
// Table I   (m=2, n=1): key (V1, V2, P1, P2) -> receiver state as four signed
//           symbols over |00>,|01>,|10>,|11>, plus the two corrections.
// Table II  (m=2, any n, controllers all '+'): key (V1, V2, Pbell1, Pbell2)
//           -> (alpha, beta, gamma, delta) as signed symbols.
// Table III (m=1): (V, P) -> correction.
//
// Derivation teleports each computational basis vector of the secret through
// the forced branch and reads off where it lands and with which sign.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "qsts/protocol.hpp"

namespace qsts {

// +a, -c, ...; symbol is one of 'a'..'d' (secret basis |00>..|11>).
struct SignedSymbol {
  Parity sign = Parity::Plus;
  char symbol = 'a';
  friend bool operator==(const SignedSymbol&, const SignedSymbol&) = default;
};
std::string to_string(const SignedSymbol& s);
std::optional<SignedSymbol> parse_signed_symbol(std::string_view text);

using SymbolSlots = std::array<SignedSymbol, 4>;

struct TableRowI {
  int v1 = 0;
  int v2 = 0;
  Parity p1 = Parity::Plus;
  Parity p2 = Parity::Plus;
  SymbolSlots phi;
  std::array<CorrectionOp, 2> ops{};
  friend bool operator==(const TableRowI&, const TableRowI&) = default;
};

struct TableRowII {
  int v1 = 0;
  int v2 = 0;
  Parity p1 = Parity::Plus;
  Parity p2 = Parity::Plus;
  SymbolSlots coeffs;  // alpha, beta, gamma, delta
  friend bool operator==(const TableRowII&, const TableRowII&) = default;
};

struct TableRowIII {
  int v = 0;
  Parity p = Parity::Plus;
  CorrectionOp op = CorrectionOp::U0;
  friend bool operator==(const TableRowIII&, const TableRowIII&) = default;
};

// Receiver pattern of a forced m=2 branch: slot k holds the signed symbol of
// the secret basis vector that lands on |k>. Throws DerivationError unless
// every probe lands on exactly one basis vector with amplitude +-1 (1e-9).
SymbolSlots probe_receiver_pattern(const ProtocolConfig& config);

// Apply corrections to a symbolic two-qubit pattern.
SymbolSlots apply_corrections(const SymbolSlots& pattern,
                              const std::array<CorrectionOp, 2>& ops);

// All derivations return rows sorted by key.
std::vector<TableRowI> derive_table1();
std::vector<TableRowII> derive_table2(int n = 2);
std::vector<TableRowIII> derive_table3(std::uint64_t seed = 2024);

struct GoldenTables {
  std::vector<TableRowI> table1;
  std::vector<TableRowII> table2;
  std::vector<TableRowIII> table3;
};

// Text grammar (see docs/formats.md). Throws InvalidArgument on bad input.
std::vector<TableRowI> parse_table1(std::string_view text);
std::vector<TableRowII> parse_table2(std::string_view text);
std::vector<TableRowIII> parse_table3(std::string_view text);
std::string format_row(const TableRowI& row);
std::string format_row(const TableRowII& row);
std::string format_row(const TableRowIII& row);

std::filesystem::path default_golden_dir();
// Reads table1.txt, table2.txt and table3.txt from dir.
GoldenTables load_golden(const std::filesystem::path& dir);

struct Mismatch {
  std::string table;  // "I", "II", "III"
  std::string key;    // e.g. "0 0 + -"
  std::string derived;
  std::string golden;
};

struct DiffReport {
  int rows_checked = 0;
  std::vector<Mismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

DiffReport diff_tables(const GoldenTables& derived, const GoldenTables& golden);

// Derive all three tables (Table III with the given seed) and diff.
DiffReport diff_against_golden(const GoldenTables& golden,
                               std::uint64_t seed = 2024);

}  // namespace qsts
