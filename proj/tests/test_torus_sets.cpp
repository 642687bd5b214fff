#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "udset/autocorrelation.hpp"
#include "udset/bessel.hpp"
#include "udset/errors.hpp"
#include "udset/grid_set.hpp"
#include "udset/spectrum.hpp"

using namespace udset;

namespace {

GridSet random_set(int K, int N, double p, unsigned long seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(p);
  const std::size_t n = static_cast<std::size_t>(K) * N * K * N;
  std::vector<std::uint8_t> cells(n);
  for (auto& c : cells) c = coin(gen);
  return GridSet(K, N, std::move(cells));
}

GridSet one_cell(int K, int N) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(K) * N * K * N, 0);
  cells[0] = 1;
  return GridSet(K, N, std::move(cells));
}

}  // namespace

TEST_CASE("density") {
  CHECK(density(GridSet(3, 2)) == 0.0);
  CHECK(density(GridSet::full(3, 2)) == 1.0);
  CHECK(density(one_cell(2, 4)) == 1.0 / 64);
  CHECK_THROWS_AS(GridSet(2, 2, std::vector<std::uint8_t>(15)), std::invalid_argument);
}

TEST_CASE("checkerboard") {
  const auto c = checkerboard(2, 2);
  CHECK(c.popcount() == 4);
  CHECK(c.cell_count() == 16);
  CHECK(density(checkerboard(3, 4)) == 0.25);
  CHECK_THROWS_AS(checkerboard(2, 3), std::invalid_argument);
  const auto s = spectrum(checkerboard(5, 4), 4);
  CHECK(s.kappa_at(0) == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("spectrum of the full set") {
  const auto s = spectrum(GridSet::full(4, 2), 200);
  CHECK(std::fabs(s.kappa_at(0) - 1.0) <= 1e-12);
  for (std::size_t i = 1; i < s.m.size(); ++i) CHECK(std::fabs(s.kappa[i]) <= 1e-12);
  CHECK(s.tail_mass <= 1e-12);
  for (double r : {0.3, 1.0, 1.96, 7.5}) CHECK(std::fabs(pair_correlation(s, r).value - 1.0) <= 1e-12);
  CHECK(s_value(s, 1.3) == doctest::Approx(1.0));
}

TEST_CASE("kappa matches direct summation of cell coefficients") {
  const auto g = random_set(4, 2, 0.4, 7);
  const auto s = spectrum(g, 10000);
  const double d = density(g);
  CHECK(s.kappa_at(0) == doctest::Approx(d * d).epsilon(1e-12));
  CHECK(std::fabs(s.kappa_sum() + s.tail_mass - d) <= 1e-9);
  for (std::int64_t m = 0; m <= 50; ++m) {
    double expect = 0.0;
    const long r = static_cast<long>(std::sqrt(static_cast<double>(m))) + 1;
    for (long a = -r; a <= r; ++a)
      for (long b = -r; b <= r; ++b)
        if (a * a + b * b == m) expect += oracle::cell_fourier_power(g, a, b);
    CHECK(std::fabs(s.kappa_at(m) - expect) <= 1e-13);
  }
  for (double k : s.kappa) CHECK(k >= 0.0);
}

TEST_CASE("Plancherel and monotone cutoff on random sets") {
  for (unsigned long seed = 1; seed <= 6; ++seed) {
    const auto g = random_set(3 + seed % 3, 1 + seed % 4, 0.3, seed);
    double prev_tail = 2.0;
    for (std::int64_t cut : {1, 10, 100, 1000, 20000}) {
      const auto s = spectrum(g, cut);
      CHECK(std::fabs(s.kappa_sum() + s.tail_mass - density(g)) <= 1e-9);
      CHECK(s.tail_mass <= prev_tail + 1e-15);
      prev_tail = s.tail_mass;
    }
  }
}

TEST_CASE("work budget") {
  SpectrumOptions opts;
  opts.work_budget = 1e6;
  CHECK_THROWS_AS(spectrum(GridSet::full(10, 10), 1000, opts), ResourceError);
  CHECK_THROWS_AS(spectrum(GridSet::full(2, 2), 0), std::invalid_argument);
}

TEST_CASE("pair correlation at r = 0 is the density") {
  const auto g = random_set(4, 3, 0.5, 11);
  const auto s = spectrum(g, 100);
  CHECK(pair_correlation(s, 0.0).value == doctest::Approx(density(g)).epsilon(1e-12));
  CHECK(pair_correlation_direct(g, 0.0, 5, 1) == doctest::Approx(density(g)).epsilon(1e-12));
  CHECK(pair_correlation_exact(g, 0.0) == density(g));
}

TEST_CASE("one cell against a Monte Carlo oracle") {
  const auto g = one_cell(4, 2);
  const auto s = spectrum(g, 40000);
  const auto e = pair_correlation(s, 0.25);
  const long n = 10000000;
  const double mc = oracle::mc_pair_correlation(g, 0.25, n, 2024);
  const double sigma = std::sqrt(mc * (1 - mc) / n);
  CHECK(std::fabs(e.value - mc) <= e.rigor_bound + 5 * sigma);
  CHECK(std::fabs(pair_correlation_exact(g, 0.25) - mc) <= 5 * sigma);
  CHECK(std::fabs(e.value - pair_correlation_exact(g, 0.25)) <= e.rigor_bound);
}

TEST_CASE("spectral and direct routes agree on random sets") {
  for (unsigned long seed = 100; seed < 120; ++seed) {
    const auto g = random_set(4, 1 + seed % 3, 0.35, seed);
    const auto s = spectrum(g, 20000);
    const CellAutocorrelation c(g);
    for (double r : {0.5, 1.0, 1.96, 2.7}) {
      const auto e = pair_correlation(s, r);
      const double exact = pair_correlation_exact(c, r);
      CHECK(e.rigor_bound < 0.05);
      CHECK(std::fabs(e.value - exact) <= e.rigor_bound + 1e-10);
      const double mc = pair_correlation_direct(g, r, 4000, seed);
      CHECK(std::fabs(mc - exact) <= 1e-3);
    }
  }
}

TEST_CASE("all 512 sets with N = 1, K = 3") {
  for (unsigned mask = 0; mask < 512; ++mask) {
    std::vector<std::uint8_t> cells(9);
    for (int i = 0; i < 9; ++i) cells[i] = (mask >> i) & 1;
    const GridSet g(3, 1, cells);
    const auto s = spectrum(g, 10000);
    const CellAutocorrelation c(g);
    for (double r : {0.4, 1.0, 1.5}) {
      const auto e = pair_correlation(s, r);
      REQUIRE(std::fabs(e.value - pair_correlation_exact(c, r)) <= e.rigor_bound + 1e-10);
    }
  }
}

TEST_CASE("translation invariance") {
  const auto g = random_set(5, 2, 0.3, 5);
  const auto h = translated(g, 3, -7);
  CHECK(h.popcount() == g.popcount());
  const auto sg = spectrum(g, 500), sh = spectrum(h, 500);
  for (double r : {0.2, 1.0, 3.3}) {
    CHECK(std::fabs(pair_correlation(sg, r).value - pair_correlation(sh, r).value) <= 1e-12);
    CHECK(std::fabs(pair_correlation_exact(g, r) - pair_correlation_exact(h, r)) <= 1e-12);
  }
}

TEST_CASE("l-infinity unit pair density of the checkerboard") {
  for (int N : {2, 4, 6}) CHECK(std::fabs(linf_unit_pair_density(checkerboard(N, 4), 16) - 0.5) <= 1e-9);
  for (int N : {1, 3, 5}) CHECK(std::fabs(linf_unit_pair_density(checkerboard(N, 4), 16)) <= 1e-9);
  CHECK(std::fabs(linf_unit_pair_density(GridSet::full(3, 2), 4) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(linf_unit_pair_density(GridSet::full(3, 2), 3), std::invalid_argument);
}

TEST_CASE("s is undefined at density zero") {
  CHECK_THROWS_AS(s_value(spectrum(GridSet(3, 1), 10), 1.0), DegenerateError);
  CHECK_THROWS_AS(s_value(GridSet(3, 1), 1.0), DegenerateError);
  CHECK(s_value(GridSet::full(3, 1), 1.0) == doctest::Approx(1.0));
}

TEST_CASE("automatic cutoff meets the tail target") {
  const auto g = random_set(4, 4, 0.3, 9);
  const auto s = spectrum_auto(g);
  const double bound = (s.tail_mass + s.kappa_error) * bessel::j0_envelope(0.5 * s.frequency(s.cutoff_m));
  CHECK(bound <= kDefaultTailTarget);
}

TEST_CASE("gridset file round trip") {
  const auto c = checkerboard(1, 2);
  CHECK(encode_gridset(c) ==
        "{\"format\":\"udset-gridset\",\"version\":1,\"K\":2,\"N\":1,\"cells\":4,\"ones\":1,"
        "\"encoding\":\"rle-leb128-base64\",\"payload\":\"AAED\"}\n");
  for (unsigned long seed = 0; seed < 5; ++seed) {
    const auto g = random_set(7, 3, 0.2 + 0.1 * seed, seed);
    CHECK(decode_gridset(encode_gridset(g)) == g);
  }
  const auto big = GridSet::full(40, 10);
  CHECK(decode_gridset(encode_gridset(big)) == big);
  CHECK_THROWS_AS(decode_gridset("{"), FormatError);
  CHECK_THROWS_AS(decode_gridset("{\"format\":\"udset-gridset\",\"version\":1,\"K\":2,\"N\":1,"
                                 "\"encoding\":\"rle-leb128-base64\",\"payload\":\"AAEC\"}"),
                  FormatError);
  CHECK_THROWS_AS(decode_gridset("{\"format\":\"other\",\"version\":1,\"K\":2,\"N\":1,"
                                 "\"encoding\":\"rle-leb128-base64\",\"payload\":\"AAED\"}"),
                  FormatError);
}

TEST_CASE("csv export") {
  std::ostringstream out;
  const double radii[] = {0.0, 1.0};
  write_pair_correlation_csv(out, spectrum(GridSet::full(2, 1), 10), radii);
  const auto text = out.str();
  CHECK(text.rfind("r,f,rigor_bound,s\n0,1,0,1\n1,1,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
