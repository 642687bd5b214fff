#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>

namespace udset::detail {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_array(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

std::unique_ptr<fftw_complex[], FftwFree> forward(std::span<const std::uint8_t> cells, int m) {
  const std::size_t n = static_cast<std::size_t>(m) * m;
  const std::size_t half = static_cast<std::size_t>(m) * (m / 2 + 1);
  auto in = fftw_array<double>(n);
  auto out = fftw_array<fftw_complex>(half);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(m, m, in.get(), out.get(), FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = cells[i];
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

double HalfPower::at(long u, long v) const {
  u %= m;
  v %= m;
  if (u < 0) u += m;
  if (v < 0) v += m;
  const long w = m / 2 + 1;
  if (u >= w) {
    u = (m - u) % m;
    v = (m - v) % m;
  }
  return power[static_cast<std::size_t>(v) * w + u];
}

HalfPower power_spectrum(std::span<const std::uint8_t> cells, int m) {
  auto out = forward(cells, m);
  HalfPower hp;
  hp.m = m;
  const std::size_t half = static_cast<std::size_t>(m) * (m / 2 + 1);
  hp.power.resize(half);
  for (std::size_t i = 0; i < half; ++i) hp.power[i] = out[i][0] * out[i][0] + out[i][1] * out[i][1];
  return hp;
}

std::vector<std::int64_t> autocorrelation_counts(std::span<const std::uint8_t> cells, int m) {
  const std::size_t n = static_cast<std::size_t>(m) * m;
  const std::size_t half = static_cast<std::size_t>(m) * (m / 2 + 1);
  auto spec = forward(cells, m);
  for (std::size_t i = 0; i < half; ++i) {
    spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
    spec[i][1] = 0.0;
  }
  auto back = fftw_array<double>(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_2d(m, m, spec.get(), back.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<std::int64_t> counts(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = std::llround(back[i] * scale);
  return counts;
}

}  // namespace udset::detail
