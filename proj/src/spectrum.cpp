#include "udset/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "fft.hpp"
#include "udset/bessel.hpp"
#include "udset/errors.hpp"

namespace udset {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// sin(pi a / m) / (pi a / m), exactly 0 at nonzero multiples of m.
double sinc_factor(long a, int m) {
  if (a == 0) return 1.0;
  if (a % m == 0) return 0.0;
  const double x = std::numbers::pi * static_cast<double>(a) / m;
  return std::sin(x) / x;
}

Spectrum accumulate(const GridSet& a, const detail::HalfPower& hp, std::int64_t cutoff_m) {
  const int m = a.side();
  const double m4 = std::pow(static_cast<double>(m), 4);
  const long radius = static_cast<long>(std::floor(std::sqrt(static_cast<double>(cutoff_m))));
  std::vector<double> sinc2(2 * radius + 1);
  for (long t = -radius; t <= radius; ++t) {
    const double s = sinc_factor(t, m);
    sinc2[t + radius] = s * s;
  }

  std::vector<double> dense(static_cast<std::size_t>(cutoff_m) + 1, 0.0);
  std::vector<std::uint8_t> present(dense.size(), 0);
  std::size_t terms = 0;
  for (long x = -radius; x <= radius; ++x) {
    const std::int64_t x2 = static_cast<std::int64_t>(x) * x;
    for (long y = -radius; y <= radius; ++y) {
      const std::int64_t mm = x2 + static_cast<std::int64_t>(y) * y;
      if (mm > cutoff_m) continue;
      const double w = sinc2[x + radius] * sinc2[y + radius] * hp.at(x, y) / m4;
      dense[mm] += w;
      present[mm] = 1;
      ++terms;
    }
  }

  Spectrum s;
  s.K = a.K();
  s.density = density(a);
  s.cutoff_m = cutoff_m;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (!present[i]) continue;
    s.m.push_back(static_cast<std::int64_t>(i));
    s.kappa.push_back(dense[i]);
  }
  s.kappa[0] = s.density * s.density;  // |1_A^(0)|^2 exactly
  const double sum = s.kappa_sum();
  // FFT error per coefficient is at most ~ eps log2(m^2) * popcount; squared
  // and normalized by m^4 this is a multiple of density^2 per term.
  const double per_term = 4.0 * kEps * (2.0 * std::log2(static_cast<double>(m)) + 4.0) * s.density * s.density;
  s.kappa_error = static_cast<double>(terms) * per_term + 2.0 * static_cast<double>(terms) * kEps * sum;
  s.tail_mass = std::max(0.0, s.density - sum);
  return s;
}

void check_budget(const GridSet& a, std::int64_t cutoff_m, const SpectrumOptions& opts) {
  if (cutoff_m < 1) throw std::invalid_argument("spectrum: cutoff_m must be >= 1");
  const double m = a.side();
  if (static_cast<double>(cutoff_m) * m * m > opts.work_budget) {
    throw ResourceError("spectrum: cutoff_m * (NK)^2 exceeds the work budget");
  }
}

}  // namespace

double Spectrum::frequency(std::int64_t mm) const {
  return 2.0 * std::numbers::pi / K * std::sqrt(static_cast<double>(mm));
}

double Spectrum::kappa_at(std::int64_t mm) const {
  auto it = std::lower_bound(m.begin(), m.end(), mm);
  if (it == m.end() || *it != mm) return 0.0;
  return kappa[static_cast<std::size_t>(it - m.begin())];
}

double Spectrum::kappa_sum() const {
  double sum = 0.0;
  for (double k : kappa) sum += k;
  return sum;
}

Spectrum spectrum(const GridSet& a, std::int64_t cutoff_m, const SpectrumOptions& opts) {
  check_budget(a, cutoff_m, opts);
  const auto hp = detail::power_spectrum(a.cells(), a.side());
  return accumulate(a, hp, cutoff_m);
}

Spectrum spectrum_auto(const GridSet& a, double r_min, double target, std::int64_t max_cutoff,
                       const SpectrumOptions& opts) {
  if (!(r_min > 0.0) || !(target > 0.0)) throw std::invalid_argument("spectrum_auto: r_min and target must be positive");
  check_budget(a, std::min<std::int64_t>(64, max_cutoff), opts);
  const auto hp = detail::power_spectrum(a.cells(), a.side());
  std::int64_t cutoff = std::min<std::int64_t>(64, max_cutoff);
  while (true) {
    Spectrum s = accumulate(a, hp, cutoff);
    const double bound = (s.tail_mass + s.kappa_error) * bessel::j0_envelope(r_min * s.frequency(cutoff));
    if (bound <= target || cutoff >= max_cutoff) return s;
    const std::int64_t next = std::min(cutoff * 2, max_cutoff);
    const double m = a.side();
    if (static_cast<double>(next) * m * m > opts.work_budget) return s;
    cutoff = next;
  }
}

PairCorrEval pair_correlation(const Spectrum& s, double r) {
  if (!std::isfinite(r) || r < 0.0) throw DomainError("pair_correlation: r must be finite and >= 0");
  PairCorrEval out{r, 0.0, 0.0};
  if (r == 0.0) {
    out.value = s.density;
    return out;
  }
  double value = 0.0;
  double eval_err = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    const double k = s.kappa[i];
    if (s.m[i] == 0) {
      value += k;
      abs_sum += k;
      continue;
    }
    const auto j = bessel::j0(r * s.frequency(s.m[i]));
    value += k * j.value;
    eval_err += k * j.abs_error_bound;
    abs_sum += k * std::abs(j.value);
  }
  const double rounding = 2.0 * static_cast<double>(s.m.size() + 1) * kEps * abs_sum;
  const double tail = (s.tail_mass + s.kappa_error) * bessel::j0_envelope(r * s.frequency(s.cutoff_m));
  out.value = value;
  out.rigor_bound = tail + eval_err + s.kappa_error + rounding;
  return out;
}

double s_value(const Spectrum& s, double r) {
  if (s.density <= 0.0) throw DegenerateError("s(r) is undefined for a set of density zero");
  return pair_correlation(s, r).value / (s.density * s.density);
}

void write_pair_correlation_csv(std::ostream& out, const Spectrum& s, std::span<const double> radii) {
  out << "r,f,rigor_bound,s\n";
  char buf[160];
  for (double r : radii) {
    const auto e = pair_correlation(s, r);
    const double sv = s.density > 0.0 ? e.value / (s.density * s.density) : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r, e.value, e.rigor_bound, sv);
    out << buf;
  }
}

}  // namespace udset
