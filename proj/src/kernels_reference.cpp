// Serial reference kernels. These walk every full index and test bits
// directly, deliberately avoiding the index-insertion tricks of the OpenMP
// versions so the two can check each other.

#include "qsts/kernels.hpp"

namespace qsts::kernels::reference {
namespace {

inline int bit_value(std::size_t index, int n, int q) {
  return static_cast<int>((index >> (n - 1 - q)) & 1U);
}

// Drop the bits of the listed register positions, keeping the rest in order.
std::size_t remove_positions(std::size_t index, int n, int qa, int qb) {
  std::size_t out = 0;
  for (int k = 0; k < n; ++k) {
    if (k == qa || k == qb) continue;
    out = (out << 1) | static_cast<std::size_t>(bit_value(index, n, k));
  }
  return out;
}

}  // namespace

void tensor(std::span<const Amplitude> a, std::span<const Amplitude> b,
            std::span<Amplitude> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = a[k / b.size()] * b[k % b.size()];
  }
}

void apply_1q(std::span<Amplitude> amps, int n, int q,
              const std::array<Amplitude, 4>& m) {
  const std::size_t flip = std::size_t{1} << (n - 1 - q);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (bit_value(i, n, q) != 0) continue;
    const Amplitude v0 = amps[i];
    const Amplitude v1 = amps[i ^ flip];
    amps[i] = m[0] * v0 + m[1] * v1;
    amps[i ^ flip] = m[2] * v0 + m[3] * v1;
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  double sum = 0.0;
  for (const auto& a : amps) sum += std::norm(a);
  return sum;
}

Amplitude inner_product(std::span<const Amplitude> a,
                        std::span<const Amplitude> b) {
  Amplitude sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

void scale(std::span<Amplitude> amps, double factor) {
  for (auto& a : amps) a *= factor;
}

void contract_qubit(std::span<const Amplitude> in, int n, int q,
                    const std::array<Amplitude, 2>& ket,
                    std::span<Amplitude> out) {
  for (auto& o : out) o = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int v = bit_value(i, n, q);
    out[remove_positions(i, n, q, q)] += std::conj(ket[v]) * in[i];
  }
}

void contract_pair(std::span<const Amplitude> in, int n, int qa, int qb,
                   const std::array<Amplitude, 4>& ket,
                   std::span<Amplitude> out) {
  for (auto& o : out) o = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int slot = 2 * bit_value(i, n, qa) + bit_value(i, n, qb);
    out[remove_positions(i, n, qa, qb)] += std::conj(ket[slot]) * in[i];
  }
}

}  // namespace qsts::kernels::reference
