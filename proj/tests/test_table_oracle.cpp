#include <map>

#include "doctest.h"
#include "qsts/error.hpp"
#include "qsts/table_oracle.hpp"

using namespace qsts;

namespace {

const std::filesystem::path kGolden = QSTS_TEST_GOLDEN_DIR;

SymbolSlots slots(const char* a, const char* b, const char* c, const char* d) {
  return {*parse_signed_symbol(a), *parse_signed_symbol(b),
          *parse_signed_symbol(c), *parse_signed_symbol(d)};
}

Parity sign_of(char c) { return c == '+' ? Parity::Plus : Parity::Minus; }

SymbolSlots negate(SymbolSlots s) {
  for (auto& x : s) x.sign = x.sign * Parity::Minus;
  return s;
}

SymbolSlots a_positive(SymbolSlots s) {
  for (const auto& x : s) {
    if (x.symbol == 'a' && x.sign == Parity::Minus) return negate(s);
  }
  return s;
}

template <class Row>
const Row& find_row(const std::vector<Row>& rows, int v1, int v2, char p1,
                    char p2) {
  for (const Row& r : rows) {
    if (r.v1 == v1 && r.v2 == v2 && r.p1 == sign_of(p1) && r.p2 == sign_of(p2)) {
      return r;
    }
  }
  FAIL("missing row");
  return rows.front();
}

}  // namespace

TEST_CASE("derived Table I rows") {
  const auto t1 = derive_table1();
  REQUIRE(t1.size() == 16);
  const auto& r1 = find_row(t1, 0, 0, '+', '+');
  CHECK(r1.phi == slots("+a", "+b", "+c", "+d"));
  CHECK(r1.ops == std::array{CorrectionOp::U0, CorrectionOp::U0});
  // a|10> + b|11> - c|00> - d|01>
  const auto& r11 = find_row(t1, 1, 0, '-', '+');
  CHECK(r11.phi == slots("-c", "-d", "+a", "+b"));
  CHECK(r11.ops == std::array{CorrectionOp::U3, CorrectionOp::U0});
  // a|11> - b|10> - c|01> + d|00>
  const auto& r16 = find_row(t1, 1, 1, '-', '-');
  CHECK(r16.phi == slots("+d", "-c", "-b", "+a"));
  CHECK(r16.ops == std::array{CorrectionOp::U3, CorrectionOp::U3});
}

TEST_CASE("derived Table II rows") {
  for (int n : {1, 2, 3}) {
    const auto t2 = derive_table2(n);
    REQUIRE(t2.size() == 16);
    CHECK(find_row(t2, 0, 0, '+', '+').coeffs == slots("+a", "+b", "+c", "+d"));
    CHECK(find_row(t2, 0, 1, '+', '-').coeffs == slots("-b", "+a", "-d", "+c"));
    CHECK(find_row(t2, 1, 1, '-', '-').coeffs == slots("+d", "-c", "-b", "+a"));
  }
}

TEST_CASE("derived Table III") {
  const auto t3 = derive_table3();
  REQUIRE(t3.size() == 4);
  const std::map<std::pair<int, Parity>, CorrectionOp> want{
      {{0, Parity::Plus}, CorrectionOp::U0},
      {{0, Parity::Minus}, CorrectionOp::U1},
      {{1, Parity::Plus}, CorrectionOp::U2},
      {{1, Parity::Minus}, CorrectionOp::U3}};
  for (const auto& r : t3) CHECK(want.at({r.v, r.p}) == r.op);
  for (std::uint64_t seed : {1u, 77u, 31337u}) CHECK(derive_table3(seed) == t3);
}

TEST_CASE("golden tables diff clean") {
  const GoldenTables g = load_golden(kGolden);
  CHECK(g.table1.size() == 16);
  CHECK(g.table2.size() == 16);
  CHECK(g.table3.size() == 4);
  const DiffReport r = diff_against_golden(g);
  CHECK(r.rows_checked == 36);
  CHECK(r.ok());
  // Table III recomputed from a different Haar secret.
  CHECK(diff_against_golden(g, 987654321).ok());
}

TEST_CASE("a corrupted golden row is reported once") {
  GoldenTables g = load_golden(kGolden);
  REQUIRE(format_row(g.table1[1]) == "0 0 + - | +a -b +c -d | U0 U1");
  g.table1[1].phi[1].sign = Parity::Plus;
  const DiffReport r = diff_against_golden(g);
  REQUIRE(r.mismatches.size() == 1);
  CHECK(r.mismatches[0].table == "I");
  CHECK(r.mismatches[0].key == "0 0 + -");
  CHECK(r.rows_checked == 36);

  GoldenTables h = load_golden(kGolden);
  h.table3[3].op = CorrectionOp::U2;
  h.table1.pop_back();
  const DiffReport r2 = diff_against_golden(h);
  CHECK(r2.mismatches.size() == 2);
}

TEST_CASE("golden grammar") {
  const auto rows = parse_table1("# c\n\n0 1 - + | +b +a -d -c | U1 U2\n");
  REQUIRE(rows.size() == 1);
  CHECK(format_row(rows[0]) == "0 1 - + | +b +a -d -c | U1 U2");
  CHECK(format_row(parse_table2("1 1 + - | -d +c -b +a").at(0)) ==
        "1 1 + - | -d +c -b +a");
  CHECK(format_row(parse_table3("1 - | U3").at(0)) == "1 - | U3");
  CHECK_THROWS_AS(parse_table1("0 0 + + | +a +b +c | U0 U0"), InvalidArgument);
  CHECK_THROWS_AS(parse_table1("0 2 + + | +a +b +c +d | U0 U0"), InvalidArgument);
  CHECK_THROWS_AS(parse_table2("0 0 + + | +a +b +c +e"), InvalidArgument);
  CHECK_THROWS_AS(parse_table3("0 + | U4"), InvalidArgument);
  CHECK_THROWS_AS(load_golden("/nonexistent-golden-dir"), Error);
}

TEST_CASE("property: basis probes land on one slot with unit amplitude") {
  // Every m=2 branch for n=1..3 (probe throws DerivationError otherwise), and
  // each pattern is a signed permutation of a..d.
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t k = 0; k < branch_count(2, n); ++k) {
      const SymbolSlots p =
          probe_receiver_pattern(make_config(2, n, 0, branch_outcomes(2, n, k)));
      std::array<int, 4> seen{};
      for (const auto& s : p) ++seen[s.symbol - 'a'];
      CHECK(seen == std::array{1, 1, 1, 1});
    }
  }
}

TEST_CASE("Table II with controller signs gives the (-1)^q, (-1)^t pattern") {
  // n=2; group 1 has t minus results, group 2 has q.
  const int n = 2;
  const auto t2 = derive_table2(n);
  for (const auto& row : t2) {
    for (int t = 0; t <= n; ++t) {
      for (int q = 0; q <= n; ++q) {
        ForcedOutcomes f;
        f.bell = {bell_outcome(row.v1, row.p1), bell_outcome(row.v2, row.p2)};
        for (int c = 0; c < n; ++c) {
          f.signs.push_back(c < t ? SignOutcome::Minus : SignOutcome::Plus);
        }
        for (int c = 0; c < n; ++c) {
          f.signs.push_back(c < q ? SignOutcome::Minus : SignOutcome::Plus);
        }
        SymbolSlots want = row.coeffs;
        if (q % 2) want[1].sign = want[1].sign * Parity::Minus;
        if (t % 2) want[2].sign = want[2].sign * Parity::Minus;
        if ((q + t) % 2) want[3].sign = want[3].sign * Parity::Minus;
        CHECK(probe_receiver_pattern(make_config(2, n, 0, f)) == want);
      }
    }
  }
}

TEST_CASE("Table I follows from Table II and Table III") {
  const auto t1 = derive_table1();
  const auto t2 = derive_table2(1);
  const auto t3 = derive_table3();
  auto lookup3 = [&](int v, Parity p) {
    for (const auto& r : t3) {
      if (r.v == v && r.p == p) return r.op;
    }
    FAIL("missing Table III entry");
    return CorrectionOp::U0;
  };
  for (const auto& r1 : t1) {
    for (Parity s1 : {Parity::Plus, Parity::Minus}) {
      for (Parity s2 : {Parity::Plus, Parity::Minus}) {
        // Bell parities that combine with the controller signs to P1, P2.
        const Parity b1 = r1.p1 * s1, b2 = r1.p2 * s2;
        SymbolSlots phi;
        bool found = false;
        for (const auto& r2 : t2) {
          if (r2.v1 == r1.v1 && r2.v2 == r1.v2 && r2.p1 == b1 && r2.p2 == b2) {
            phi = r2.coeffs;
            found = true;
          }
        }
        REQUIRE(found);
        if (s2 == Parity::Minus) {
          phi[1].sign = phi[1].sign * Parity::Minus;
          phi[3].sign = phi[3].sign * Parity::Minus;
        }
        if (s1 == Parity::Minus) {
          phi[2].sign = phi[2].sign * Parity::Minus;
          phi[3].sign = phi[3].sign * Parity::Minus;
        }
        CHECK(a_positive(phi) == r1.phi);
        CHECK(std::array{lookup3(r1.v1, r1.p1), lookup3(r1.v2, r1.p2)} == r1.ops);
      }
    }
  }
}

TEST_CASE("symbolic corrections") {
  const SymbolSlots id = slots("+a", "+b", "+c", "+d");
  CHECK(apply_corrections(id, {CorrectionOp::U0, CorrectionOp::U0}) == id);
  CHECK(apply_corrections(id, {CorrectionOp::U0, CorrectionOp::U1}) ==
        slots("+a", "-b", "+c", "-d"));
  CHECK(apply_corrections(id, {CorrectionOp::U2, CorrectionOp::U0}) ==
        slots("+c", "+d", "+a", "+b"));
  // U3|0> = -|1>, U3|1> = |0>
  CHECK(apply_corrections(id, {CorrectionOp::U0, CorrectionOp::U3}) ==
        slots("+b", "-a", "+d", "-c"));
  CHECK_THROWS_AS(probe_receiver_pattern(make_config(1, 1)), InvalidArgument);
}
