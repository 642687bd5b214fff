#include "udset/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "json.hpp"
#include "udset/errors.hpp"
#include "udset/parallel.hpp"

namespace udset {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

// Circular segment cut from a disk of radius r by a chord at distance h < r.
double segment_area(double r, double h) { return r * r * std::acos(h / r) - h * std::sqrt(r * r - h * h); }

void gauss_reduce(Vec2& u, Vec2& v) {
  for (int it = 0; it < 200; ++it) {
    if (dot(u, u) > dot(v, v)) std::swap(u, v);
    const double mu = std::round(dot(u, v) / dot(u, u));
    if (mu == 0.0) break;
    v = v - mu * u;
  }
  if (dot(u, u) > dot(v, v)) std::swap(u, v);
}

// Every lattice vector other than 0 has inter-block gap > 1 after shrinking.
bool lattice_feasible(Vec2 u, Vec2 v, const BlockShape& b, double beta) {
  const double reach = 1.0 + 2.0 * (1.0 - beta) * block_diameter(b) + 1e-9;
  const int bound = static_cast<int>(std::floor(2.0 * reach / (kSqrt3 * norm(u)))) + 1;
  for (int i = -bound; i <= bound; ++i) {
    for (int j = -bound; j <= bound; ++j) {
      if (i == 0 && j == 0) continue;
      const Vec2 w = static_cast<double>(i) * u + static_cast<double>(j) * v;
      const double len = norm(w);
      if (len > reach) continue;
      const Vec2 dir{w.x / len, w.y / len};
      if (len - 2.0 * (1.0 - beta) * block_support(b, dir) <= 1.0 + 1e-12) return false;
    }
  }
  return true;
}

double shape_score(Vec2 u, Vec2 v) {
  const double nu = norm(u), nv = norm(v);
  const double c = std::abs(dot(u, v)) / (nu * nv);
  return std::abs(nv / nu - 1.0) + std::abs(c - 0.5);
}

BlockShape oriented(const BlockShape& b, double angle) {
  if (const auto* t = std::get_if<TortoiseShape>(&b)) {
    TortoiseShape out = *t;
    out.orientation = std::fmod(angle, kPi / 3);
    if (out.orientation < 0) out.orientation += kPi / 3;
    return out;
  }
  return b;
}

}  // namespace

PlanarPattern hex_disk_packing() {
  return PlanarPattern{"hexdisk", {Vec2{2.0, 0.0}, Vec2{1.0, kSqrt3}}, DiskShape{0.5}, 0.0};
}

PlanarPattern croft_tortoise(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("croft_tortoise: x must lie in (0, 1)");
  const double s = 1.0 + x;
  return PlanarPattern{"croft", {Vec2{s, 0.0}, Vec2{s / 2, s * kSqrt3 / 2}}, TortoiseShape{0.5, x, 0.0}, x};
}

double tortoise_area(double x) {
  const double h = x / 2;
  const double r = 0.5;
  if (x <= kSqrt3 / 2) return kSqrt3 / 2 * x * x;
  return kPi * r * r - 6.0 * segment_area(r, h);
}

double block_area(const BlockShape& b) {
  if (const auto* d = std::get_if<DiskShape>(&b)) return kPi * d->radius * d->radius;
  const auto& t = std::get<TortoiseShape>(b);
  if (t.disk_radius != 0.5) throw DomainError("tortoise blocks use disk radius 1/2");
  return tortoise_area(t.hex_height);
}

double block_diameter(const BlockShape& b) {
  if (const auto* d = std::get_if<DiskShape>(&b)) return 2.0 * d->radius;
  const auto& t = std::get<TortoiseShape>(b);
  return std::min(2.0 * t.disk_radius, 2.0 * t.hex_height / kSqrt3);
}

double block_support(const BlockShape& b, Vec2 unit) {
  if (const auto* d = std::get_if<DiskShape>(&b)) return d->radius;
  const auto& t = std::get<TortoiseShape>(b);
  const double apothem = t.hex_height / 2;
  // Angular distance from the direction to the nearest flat normal.
  double off = std::fmod(std::atan2(unit.y, unit.x) - t.orientation, kPi / 3);
  if (off < 0) off += kPi / 3;
  off = std::min(off, kPi / 3 - off);
  return std::min(t.disk_radius, apothem / std::cos(off));
}

bool block_contains(const BlockShape& b, Vec2 p, double scale) {
  if (const auto* d = std::get_if<DiskShape>(&b)) {
    const double r = scale * d->radius;
    return dot(p, p) < r * r;
  }
  const auto& t = std::get<TortoiseShape>(b);
  const double r = scale * t.disk_radius;
  if (!(dot(p, p) < r * r)) return false;
  const double apothem = scale * t.hex_height / 2;
  for (int k = 0; k < 3; ++k) {
    const double a = t.orientation + k * kPi / 3;
    if (!(std::abs(p.x * std::cos(a) + p.y * std::sin(a)) < apothem)) return false;
  }
  return true;
}

double analytic_density(const PlanarPattern& p) {
  const double det = std::abs(p.basis[0].x * p.basis[1].y - p.basis[0].y * p.basis[1].x);
  return block_area(p.block) / det;
}

double croft_density(double x) { return analytic_density(croft_tortoise(x)); }

CroftOptimum optimize_croft(double step) {
  if (!(step > 0.0 && step <= 1e-4)) throw std::invalid_argument("optimize_croft: step must lie in (0, 1e-4]");
  double best_x = step, best = croft_density(step);
  for (double x = step; x < 1.0; x += step) {
    const double d = croft_density(x);
    if (d > best) {
      best = d;
      best_x = x;
    }
  }
  double lo = std::max(step / 2, best_x - step), hi = std::min(1.0 - step / 4, best_x + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = croft_density(a), fb = croft_density(b);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = croft_density(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = croft_density(a);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, croft_density(x)};
}

TorusEmbedding embed_pattern(const PlanarPattern& p, int K, double beta) {
  if (K < 1) throw std::invalid_argument("embed_pattern: K must be positive");
  if (!(beta >= 0.0 && beta < 0.5)) throw DomainError("embed_pattern: beta must lie in [0, 0.5)");
  const double ideal_cell = std::abs(p.basis[0].x * p.basis[1].y - p.basis[0].y * p.basis[1].x);
  const double area = block_area(p.block);
  const int n_hi = std::max(1, static_cast<int>(std::floor(K * K / (0.8 * ideal_cell))));

  for (int n = n_hi; n >= 1; --n) {
    TorusEmbedding best;
    double best_score = 1e300;
    const double scale = static_cast<double>(K) / n;
    for (int a = 1; a <= n; ++a) {
      if (n % a != 0) continue;
      const int c = n / a;
      for (int b = 0; b < a; ++b) {
        Vec2 u{scale * a, 0.0}, v{scale * b, scale * c};
        gauss_reduce(u, v);
        const double score = shape_score(u, v);
        if (score >= best_score) continue;
        // Tortoises: flats facing the shortest lattice vector, else the pattern's own frame.
        for (double angle : {std::atan2(u.y, u.x), 0.0}) {
          const BlockShape blk = oriented(p.block, angle);
          if (!lattice_feasible(u, v, blk, beta)) continue;
          best_score = score;
          best.K = K;
          best.points = n;
          best.basis = {u, v};
          best.hnf = {a, b, c};
          best.block = blk;
          break;
        }
      }
    }
    if (best.points > 0) {
      best.analytic_density = analytic_density(p);
      best.approximant_density = n * area / (static_cast<double>(K) * K);
      return best;
    }
  }
  throw FeasibilityError("pattern has no 1-avoiding lattice embedding in the K-torus");
}

RasterResult rasterize_detailed(const PlanarPattern& p, int N, int K, double beta) {
  if (N < 1) throw std::invalid_argument("rasterize: N must be positive");
  auto emb = embed_pattern(p, K, beta);
  const int m = N * K;
  const Vec2 u = emb.basis[0], v = emb.basis[1];
  const double det = u.x * v.y - u.y * v.x;
  const double shrink = 1.0 - beta;
  const double half = 0.5 / (N * shrink);  // half side of the dilated cell
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(m) * m, 0);

  parallel_chunks(static_cast<std::size_t>(m), std::min<std::size_t>(m, 64), [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t k = lo; k < hi; ++k) {
      for (int j = 0; j < m; ++j) {
        const Vec2 c{(j + 0.5) / N, (static_cast<double>(k) + 0.5) / N};
        const double s = (c.x * v.y - c.y * v.x) / det;
        const double t = (u.x * c.y - u.y * c.x) / det;
        const double s0 = std::round(s), t0 = std::round(t);
        bool inside = false;
        for (int di = -1; di <= 1 && !inside; ++di) {
          for (int dj = -1; dj <= 1 && !inside; ++dj) {
            const Vec2 centre = (s0 + di) * u + (t0 + dj) * v;
            inside = true;
            for (int corner = 0; corner < 4 && inside; ++corner) {
              const Vec2 q{c.x + ((corner & 1) ? half : -half), c.y + ((corner & 2) ? half : -half)};
              inside = block_contains(emb.block, q - centre, shrink);
            }
          }
        }
        if (inside) cells[k * m + j] = 1;
      }
    }
  });

  GridSet set(K, N, std::move(cells));
  const double rd = density(set);
  return RasterResult{std::move(set), emb, beta, rd};
}

GridSet rasterize(const PlanarPattern& p, int N, int K, double beta) {
  return rasterize_detailed(p, N, K, beta).set;
}

std::string raster_sidecar_json(const PlanarPattern& p, const RasterResult& r) {
  nlohmann::ordered_json j;
  j["pattern"] = p.name;
  j["x"] = p.x;
  j["beta"] = r.beta;
  j["N"] = r.set.N();
  j["K"] = r.set.K();
  j["analytic_density"] = r.embedding.analytic_density;
  j["approximant_density"] = r.embedding.approximant_density;
  j["raster_density"] = r.raster_density;
  j["blocks_per_torus"] = r.embedding.points;
  j["lattice_hnf"] = r.embedding.hnf;
  j["lattice_basis"] = {{r.embedding.basis[0].x, r.embedding.basis[0].y},
                        {r.embedding.basis[1].x, r.embedding.basis[1].y}};
  if (const auto* t = std::get_if<TortoiseShape>(&r.embedding.block)) j["hex_orientation"] = t->orientation;
  return j.dump(2) + "\n";
}

}  // namespace udset
