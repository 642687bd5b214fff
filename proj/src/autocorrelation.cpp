#include "udset/autocorrelation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "udset/errors.hpp"
#include "udset/rng.hpp"

namespace udset {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

void check_r(double r) {
  if (!std::isfinite(r) || r < 0.0) throw DomainError("pair correlation: r must be finite and >= 0");
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

}  // namespace

CellAutocorrelation::CellAutocorrelation(const GridSet& a)
    : m_(a.side()), N_(a.N()), density_(udset::density(a)), counts_(detail::autocorrelation_counts(a.cells(), a.side())) {}

std::int64_t CellAutocorrelation::count(long p, long q) const {
  p %= m_;
  q %= m_;
  if (p < 0) p += m_;
  if (q < 0) q += m_;
  return counts_[static_cast<std::size_t>(q) * m_ + static_cast<std::size_t>(p)];
}

double CellAutocorrelation::at_cells(double ux, double uy) const {
  const double fpx = std::floor(ux), fpy = std::floor(uy);
  const double fx = ux - fpx, fy = uy - fpy;
  const long p = static_cast<long>(fpx), q = static_cast<long>(fpy);
  const double v = (1 - fx) * (1 - fy) * static_cast<double>(count(p, q)) +
                   fx * (1 - fy) * static_cast<double>(count(p + 1, q)) +
                   (1 - fx) * fy * static_cast<double>(count(p, q + 1)) +
                   fx * fy * static_cast<double>(count(p + 1, q + 1));
  return v / (static_cast<double>(m_) * m_);
}

double pair_correlation_exact(const CellAutocorrelation& c, double r) {
  check_r(r);
  if (r == 0.0) return c.density();
  const double R = r * c.N();
  std::vector<double> cuts = {0.0, kTwoPi};
  const long nmax = static_cast<long>(std::floor(R));
  for (long n = -nmax; n <= nmax; ++n) {
    const double t = std::clamp(static_cast<double>(n) / R, -1.0, 1.0);
    const double ac = std::acos(t), as = std::asin(t);
    cuts.push_back(wrap_angle(ac));
    cuts.push_back(wrap_angle(-ac));
    cuts.push_back(wrap_angle(as));
    cuts.push_back(wrap_angle(std::numbers::pi - as));
  }
  for (int q = 1; q < 8; ++q) cuts.push_back(q * std::numbers::pi / 4);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double half = 0.5 * (hi - lo);
    if (half <= 0) continue;
    const double mid = 0.5 * (hi + lo);
    // Offset square is fixed on the open arc; take it from the midpoint.
    const long p = static_cast<long>(std::floor(R * std::cos(mid)));
    const long q = static_cast<long>(std::floor(R * std::sin(mid)));
    const double c00 = static_cast<double>(c.count(p, q)), c10 = static_cast<double>(c.count(p + 1, q));
    const double c01 = static_cast<double>(c.count(p, q + 1)), c11 = static_cast<double>(c.count(p + 1, q + 1));
    double seg = 0.0;
    for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
      for (int sgn : {-1, 1}) {
        const double th = mid + sgn * half * kGlNodes[k];
        const double fx = std::clamp(R * std::cos(th) - static_cast<double>(p), 0.0, 1.0);
        const double fy = std::clamp(R * std::sin(th) - static_cast<double>(q), 0.0, 1.0);
        const double v = (1 - fx) * (1 - fy) * c00 + fx * (1 - fy) * c10 + (1 - fx) * fy * c01 + fx * fy * c11;
        seg += kGlWeights[k] * v;
      }
    }
    total += seg * half;
  }
  const double m = c.side();
  return total / kTwoPi / (m * m);
}

double pair_correlation_exact(const GridSet& a, double r) {
  check_r(r);
  if (r == 0.0) return density(a);
  return pair_correlation_exact(CellAutocorrelation(a), r);
}

double pair_correlation_direct(const GridSet& a, double r, int angle_samples, std::uint64_t rng_seed) {
  check_r(r);
  if (angle_samples < 1) throw std::invalid_argument("pair_correlation_direct: angle_samples must be >= 1");
  if (r == 0.0) return density(a);
  const CellAutocorrelation c(a);
  Rng rng(rng_seed);
  double sum = 0.0;
  for (int i = 0; i < angle_samples; ++i) {
    const double th = kTwoPi * (i + rng.uniform()) / angle_samples;
    sum += c.at(r * std::cos(th), r * std::sin(th));
  }
  return sum / angle_samples;
}

double linf_unit_pair_density(const GridSet& a, int boundary_samples) {
  if (boundary_samples < 4) throw std::invalid_argument("linf_unit_pair_density: boundary_samples must be >= 4");
  const double d = density(a);
  if (d == 0.0) return 0.0;
  const CellAutocorrelation c(a);
  const long n2 = 2L * a.N();
  const long per_side = ((boundary_samples / 4 + n2 - 1) / n2) * n2;
  const double N = a.N();
  double sum = 0.0;
  for (long i = 0; i < per_side; ++i) {
    const double t = N * (-1.0 + 2.0 * (i + 0.5) / per_side);  // cell units along the side
    sum += c.at_cells(N, t) + c.at_cells(-N, t) + c.at_cells(t, N) + c.at_cells(t, -N);
  }
  return sum / (4.0 * per_side) / d;
}

double s_value(const GridSet& a, double r) {
  const double d = density(a);
  if (d <= 0.0) throw DegenerateError("s(r) is undefined for a set of density zero");
  return pair_correlation_exact(a, r) / (d * d);
}

}  // namespace udset
