#pragma once

// Dense statevector kernels.
//
// Index convention: in an N-qubit register, register position k is bit
// (N - 1 - k) of the amplitude index, i.e. position 0 is the most significant
// bit and kets read left to right.
//
// qsts::kernels holds the OpenMP implementations used by the library;
// qsts::kernels::reference holds straightforward serial versions that the
// tests and benchmarks compare against. Both expose identical signatures and
// perform no argument validation (PureState does that).

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace qsts::kernels {

using Amplitude = std::complex<double>;

// Below this many amplitudes the OpenMP kernels run single-threaded.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

// out = a (x) b; a occupies the high (left) register positions.
void tensor(std::span<const Amplitude> a, std::span<const Amplitude> b,
            std::span<Amplitude> out);

// Apply the row-major 2x2 matrix m to position q of an n-qubit register.
void apply_1q(std::span<Amplitude> amps, int n, int q,
              const std::array<Amplitude, 4>& m);

double norm_squared(std::span<const Amplitude> amps);

// <a|b>
Amplitude inner_product(std::span<const Amplitude> a,
                        std::span<const Amplitude> b);

void scale(std::span<Amplitude> amps, double factor);

// Contract position q with <ket| where ket = ket[0]|0> + ket[1]|1>.
// out has 2^(n-1) entries and covers the remaining positions in order.
void contract_qubit(std::span<const Amplitude> in, int n, int q,
                    const std::array<Amplitude, 2>& ket,
                    std::span<Amplitude> out);

// Contract positions (qa, qb) with <ket| where ket[2*x + y] multiplies
// |x>_qa |y>_qb. out has 2^(n-2) entries.
void contract_pair(std::span<const Amplitude> in, int n, int qa, int qb,
                   const std::array<Amplitude, 4>& ket,
                   std::span<Amplitude> out);

namespace reference {

void tensor(std::span<const Amplitude> a, std::span<const Amplitude> b,
            std::span<Amplitude> out);
void apply_1q(std::span<Amplitude> amps, int n, int q,
              const std::array<Amplitude, 4>& m);
double norm_squared(std::span<const Amplitude> amps);
Amplitude inner_product(std::span<const Amplitude> a,
                        std::span<const Amplitude> b);
void scale(std::span<Amplitude> amps, double factor);
void contract_qubit(std::span<const Amplitude> in, int n, int q,
                    const std::array<Amplitude, 2>& ket,
                    std::span<Amplitude> out);
void contract_pair(std::span<const Amplitude> in, int n, int qa, int qb,
                   const std::array<Amplitude, 4>& ket,
                   std::span<Amplitude> out);

}  // namespace reference
}  // namespace qsts::kernels
