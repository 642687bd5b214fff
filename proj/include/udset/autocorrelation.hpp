#pragma once

#include <cstdint>
#include <vector>

#include "udset/grid_set.hpp"

namespace udset {

// f(u) = area(A ∩ (A - u)) / K^2 for shifts u, from the integer cell
// autocorrelation. Within a cell-offset square f is bilinear in u.
class CellAutocorrelation {
 public:
  explicit CellAutocorrelation(const GridSet& a);

  int side() const { return m_; }
  int N() const { return N_; }
  double density() const { return density_; }
  std::int64_t count(long p, long q) const;  // overlapping cell pairs at offset (p, q)

  // Shift given in cell units (length units times N).
  double at_cells(double ux, double uy) const;
  double at(double x, double y) const { return at_cells(x * N_, y * N_); }

 private:
  int m_;
  int N_;
  double density_;
  std::vector<std::int64_t> counts_;
};

// f°(r) by integrating f over the circle of radius r; the circle is cut where
// it crosses cell-offset lines so each arc is integrated by Gauss-Legendre on
// a smooth integrand. Agrees with the exact value to near rounding.
double pair_correlation_exact(const CellAutocorrelation& c, double r);
double pair_correlation_exact(const GridSet& a, double r);

// Stratified Monte Carlo over angle_samples jittered angles.
double pair_correlation_direct(const GridSet& a, double r, int angle_samples, std::uint64_t rng_seed);

// Mean of f over the l-infinity unit sphere, divided by the density.
// boundary_samples (>= 4) sets the midpoint sub-intervals per side; it is
// rounded up to a multiple of 2N, where f is piecewise linear, so the result is exact.
double linf_unit_pair_density(const GridSet& a, int boundary_samples);

// s(r) through the direct route. Throws DegenerateError for density zero.
double s_value(const GridSet& a, double r);

}  // namespace udset
