#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "udset/grid_set.hpp"

namespace udset {

// Radial Fourier mass kappa(m) = sum over xi = (2 pi / K)(a, b) with
// a^2 + b^2 = m of |1_A^(xi)|^2, for m <= cutoff_m. Only shells that contain
// lattice points are stored, in increasing m.
struct Spectrum {
  int K = 1;
  double density = 0.0;
  std::int64_t cutoff_m = 0;
  std::vector<std::int64_t> m;
  std::vector<double> kappa;
  double tail_mass = 0.0;
  // Bound on the accumulated floating-point error of sum(kappa) (and hence of tail_mass).
  double kappa_error = 0.0;

  double frequency(std::int64_t mm) const;  // (2 pi / K) sqrt(m)
  double kappa_at(std::int64_t mm) const;   // 0 for empty or absent shells
  double kappa_sum() const;
};

struct SpectrumOptions {
  // Upper limit on cutoff_m * (N K)^2.
  double work_budget = 4e12;
};

Spectrum spectrum(const GridSet& a, std::int64_t cutoff_m, const SpectrumOptions& opts = {});

// Smallest cutoff in a doubling sequence starting at 64 with
// tail_mass * j0_envelope(r_min (2 pi / K) sqrt(cutoff)) <= target, capped at max_cutoff.
inline constexpr double kDefaultRMin = 0.5;
inline constexpr double kDefaultTailTarget = 1e-4;
Spectrum spectrum_auto(const GridSet& a, double r_min = kDefaultRMin, double target = kDefaultTailTarget,
                       std::int64_t max_cutoff = 1 << 22, const SpectrumOptions& opts = {});

struct PairCorrEval {
  double r = 0.0;
  double value = 0.0;
  double rigor_bound = 0.0;
};

// f°(r) from the spectral expansion with a truncation and rounding bound.
PairCorrEval pair_correlation(const Spectrum& s, double r);

// f°(r) / density^2. Throws DegenerateError when density is zero.
double s_value(const Spectrum& s, double r);

// Writes "r,f,rigor_bound,s" rows (%.17g) for each radius.
void write_pair_correlation_csv(std::ostream& out, const Spectrum& s, std::span<const double> radii);

}  // namespace udset
