#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace udset::detail {

// Squared modulus |D(u, v)|^2 of the unnormalized 2D DFT
// D(u, v) = sum_{j,k} a[k*m + j] exp(-2 pi i (u j + v k) / m), stored as the
// r2c half plane: entry (v, u) at v * (m/2 + 1) + u for u in [0, m/2].
struct HalfPower {
  int m = 0;
  std::vector<double> power;
  double at(long u, long v) const;  // any integers; folds by conjugate symmetry
};

HalfPower power_spectrum(std::span<const std::uint8_t> cells, int m);

// Cyclic autocorrelation C(p, q) = #{c : a(c) = a(c + (p, q))= 1}, row-major.
std::vector<std::int64_t> autocorrelation_counts(std::span<const std::uint8_t> cells, int m);

}  // namespace udset::detail
