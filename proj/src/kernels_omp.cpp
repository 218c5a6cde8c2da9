#include "qsts/kernels.hpp"

#include <cstdint>
#include <utility>

namespace qsts::kernels {
namespace {

using Index = std::int64_t;

inline Index bit_of(int n, int q) { return Index{n - 1 - q}; }

// Insert a zero at bit position b of x.
inline Index insert_zero(Index x, Index b) {
  const Index low = x & ((Index{1} << b) - 1);
  return ((x >> b) << (b + 1)) | low;
}

inline bool parallel(std::size_t size) { return size >= kParallelThreshold; }

}  // namespace

void tensor(std::span<const Amplitude> a, std::span<const Amplitude> b,
            std::span<Amplitude> out) {
  const Index na = static_cast<Index>(a.size());
  const Index nb = static_cast<Index>(b.size());
#pragma omp parallel for if (parallel(out.size())) schedule(static)
  for (Index i = 0; i < na; ++i) {
    const Amplitude ai = a[i];
    Amplitude* row = out.data() + i * nb;
    for (Index j = 0; j < nb; ++j) row[j] = ai * b[j];
  }
}

void apply_1q(std::span<Amplitude> amps, int n, int q,
              const std::array<Amplitude, 4>& m) {
  const Index b = bit_of(n, q);
  const Index stride = Index{1} << b;
  const Index pairs = static_cast<Index>(amps.size() / 2);
  Amplitude* data = amps.data();
#pragma omp parallel for if (parallel(amps.size())) schedule(static)
  for (Index r = 0; r < pairs; ++r) {
    const Index i0 = insert_zero(r, b);
    const Index i1 = i0 | stride;
    const Amplitude v0 = data[i0];
    const Amplitude v1 = data[i1];
    data[i0] = m[0] * v0 + m[1] * v1;
    data[i1] = m[2] * v0 + m[3] * v1;
  }
}

double norm_squared(std::span<const Amplitude> amps) {
  const Index size = static_cast<Index>(amps.size());
  double sum = 0.0;
#pragma omp parallel for if (parallel(amps.size())) reduction(+ : sum) \
    schedule(static)
  for (Index i = 0; i < size; ++i) sum += std::norm(amps[i]);
  return sum;
}

Amplitude inner_product(std::span<const Amplitude> a,
                        std::span<const Amplitude> b) {
  const Index size = static_cast<Index>(a.size());
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for if (parallel(a.size())) reduction(+ : re, im) \
    schedule(static)
  for (Index i = 0; i < size; ++i) {
    const Amplitude t = std::conj(a[i]) * b[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

void scale(std::span<Amplitude> amps, double factor) {
  const Index size = static_cast<Index>(amps.size());
#pragma omp parallel for if (parallel(amps.size())) schedule(static)
  for (Index i = 0; i < size; ++i) amps[i] *= factor;
}

void contract_qubit(std::span<const Amplitude> in, int n, int q,
                    const std::array<Amplitude, 2>& ket,
                    std::span<Amplitude> out) {
  const Index b = bit_of(n, q);
  const Index stride = Index{1} << b;
  const Amplitude c0 = std::conj(ket[0]);
  const Amplitude c1 = std::conj(ket[1]);
  const Index size = static_cast<Index>(out.size());
#pragma omp parallel for if (parallel(in.size())) schedule(static)
  for (Index r = 0; r < size; ++r) {
    const Index i0 = insert_zero(r, b);
    out[r] = c0 * in[i0] + c1 * in[i0 | stride];
  }
}

void contract_pair(std::span<const Amplitude> in, int n, int qa, int qb,
                   const std::array<Amplitude, 4>& ket,
                   std::span<Amplitude> out) {
  const Index ba = bit_of(n, qa);
  const Index bb = bit_of(n, qb);
  const Index lo = ba < bb ? ba : bb;
  const Index hi = ba < bb ? bb : ba;
  const Index sa = Index{1} << ba;
  const Index sb = Index{1} << bb;
  const Amplitude c00 = std::conj(ket[0]);
  const Amplitude c01 = std::conj(ket[1]);
  const Amplitude c10 = std::conj(ket[2]);
  const Amplitude c11 = std::conj(ket[3]);
  const Index size = static_cast<Index>(out.size());
#pragma omp parallel for if (parallel(in.size())) schedule(static)
  for (Index r = 0; r < size; ++r) {
    const Index i = insert_zero(insert_zero(r, lo), hi);
    out[r] = c00 * in[i] + c01 * in[i | sb] + c10 * in[i | sa] +
             c11 * in[i | sa | sb];
  }
}

}  // namespace qsts::kernels
