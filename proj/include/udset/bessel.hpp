#pragma once

namespace udset::bessel {

// A value together with a bound on |value - exact|.
struct BesselEval {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

// Arguments below this use the power series (double-double accumulation,
// up to kMaxSeriesTerms terms); at or above it the Hankel asymptotic
// expansion truncated at its smallest term.
inline constexpr double kSeriesLimit = 25.0;
inline constexpr int kMaxSeriesTerms = 90;

// J0(x) for finite x >= 0. Throws DomainError otherwise.
BesselEval j0(double x);

// J1(x) for finite x >= 0. Note d/dx J0 = -J1.
BesselEval j1(double x);

inline double deriv_j0(double x) { return -j1(x).value; }

// min(1, sqrt(2 / (pi x))): bounds sup_{y >= x} |J0(y)| (x M0(x)^2 increases
// to 2/pi, so |J0| <= M0 <= sqrt(2/(pi x))). Throws DomainError for x <= 0.
double j0_envelope(double x);

// Upper bound on sup_x |J1(x)| used by Lipschitz estimates.
inline constexpr double kJ1Sup = 0.6;

}  // namespace udset::bessel
