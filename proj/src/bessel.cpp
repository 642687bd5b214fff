#include "udset/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "udset/errors.hpp"

namespace udset::bessel {
namespace {

// Unit roundoff of double and a conservative one for double-double ops.
constexpr double kEps = 0x1.0p-53;
constexpr double kDDEps = 0x1.0p-102;

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD mul(DD a, DD b) {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p);
  return quick_two_sum(p, e + (a.hi * b.lo + a.lo * b.hi));
}

inline DD div(DD a, double b) {
  const double q1 = a.hi / b;
  const double p = q1 * b;
  const double pe = std::fma(q1, b, -p);
  const double r = ((a.hi - p) - pe + a.lo) / b;
  return quick_two_sum(q1, r);
}

void check_argument(double x) {
  if (!std::isfinite(x) || x < 0.0) throw DomainError("bessel: argument must be finite and >= 0");
}

// sum_k (-y)^k / (k! (k+order)!) with y = x^2/4, in double-double.
// Returns the series value (without the (x/2)^order prefactor) and its error.
BesselEval series(double x, int order) {
  const double xx = x * x;
  const DD y = div(DD{xx, std::fma(x, x, -xx)}, 4.0);
  const DD neg_y{-y.hi, -y.lo};
  DD term{1.0, 0.0};
  DD sum = term;
  double abs_sum = 1.0;
  int k = 1;
  for (; k <= kMaxSeriesTerms; ++k) {
    term = div(mul(term, neg_y), static_cast<double>(k) * static_cast<double>(k + order));
    sum = add(sum, term);
    const double mag = std::fabs(term.hi);
    abs_sum += mag;
    if (static_cast<double>(k + 1) * (k + 1 + order) > y.hi && mag < 1e-32 * std::max(1.0, abs_sum)) break;
  }
  // Alternating with decreasing magnitude once (k+1)(k+1+order) > y, so the
  // remainder is bounded by the next term.
  const double next = std::fabs(term.hi) * y.hi / ((k + 1.0) * (k + 1.0 + order));
  const double rounding = abs_sum * kDDEps * 8.0 * (k + 2);
  return {sum.hi + sum.lo, next + rounding};
}

// Hankel expansion pieces P, Q and the truncation bound.
struct HankelPQ {
  double p = 0.0;
  double q = 0.0;
  double abs_pq = 0.0;
  double truncation = 0.0;
};

HankelPQ hankel(double x, int order) {
  const double mu = 4.0 * order * order;
  HankelPQ out;
  double u = 1.0;  // u_k = a_k(nu) / x^k
  out.p = 1.0;
  out.abs_pq = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    const double next = u * f;
    const double mag = std::fabs(next);
    if (mag >= prev || mag < 1e-18) {
      // Remainders of P and Q are each below their first omitted term.
      const double f2 = (mu - (2.0 * k + 1.0) * (2.0 * k + 1.0)) / (8.0 * (k + 1) * x);
      out.truncation = mag + std::fabs(next * f2);
      break;
    }
    u = next;
    prev = mag;
    // Sign pattern: P = u0 - u2 + u4 ..., Q = u1 - u3 + ...
    const int idx = k / 2;
    const double signed_u = (idx % 2 == 0) ? u : -u;
    if (k % 2 == 0) {
      out.p += signed_u;
    } else {
      out.q += signed_u;
    }
    out.abs_pq += mag;
  }
  return out;
}

BesselEval asymptotic(double x, int order) {
  const HankelPQ h = hankel(x, order);
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  const double c = std::cos(x);
  const double s = std::sin(x);
  double cos_phase = 0.0;
  double sin_phase = 0.0;
  if (order == 0) {
    cos_phase = (c + s) * std::numbers::sqrt2 * 0.5;
    sin_phase = (s - c) * std::numbers::sqrt2 * 0.5;
  } else {
    cos_phase = (s - c) * std::numbers::sqrt2 * 0.5;
    sin_phase = -(s + c) * std::numbers::sqrt2 * 0.5;
  }
  const double value = amp * (h.p * cos_phase - h.q * sin_phase);
  const double err = amp * (h.truncation + 24.0 * kEps * h.abs_pq) + 4.0 * kEps * std::fabs(value);
  return {value, err};
}

}  // namespace

BesselEval j0(double x) {
  check_argument(x);
  if (x == 0.0) return {1.0, 0.0};
  if (x < kSeriesLimit) {
    const BesselEval s = series(x, 0);
    return {s.value, s.abs_error_bound + kEps * std::fabs(s.value)};
  }
  return asymptotic(x, 0);
}

BesselEval j1(double x) {
  check_argument(x);
  if (x == 0.0) return {0.0, 0.0};
  if (x < kSeriesLimit) {
    const BesselEval s = series(x, 1);
    const double half = 0.5 * x;
    const double v = half * s.value;
    return {v, half * s.abs_error_bound + 2.0 * kEps * std::fabs(v)};
  }
  return asymptotic(x, 1);
}

double j0_envelope(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("j0_envelope: argument must be > 0");
  return std::min(1.0, std::sqrt(2.0 / (std::numbers::pi * x)));
}

}  // namespace udset::bessel
