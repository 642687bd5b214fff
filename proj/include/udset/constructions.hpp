#pragma once

#include <array>
#include <string>
#include <variant>

#include "udset/geometry.hpp"
#include "udset/grid_set.hpp"

namespace udset {

struct DiskShape {
  double radius = 0.5;
};

// Open disk of radius disk_radius intersected with a concentric open regular
// hexagon of height (flat-to-flat width) hex_height. The flat normals point
// at orientation + k pi/3.
struct TortoiseShape {
  double disk_radius = 0.5;
  double hex_height = 0.0;
  double orientation = 0.0;
};

using BlockShape = std::variant<DiskShape, TortoiseShape>;

struct PlanarPattern {
  std::string name;
  std::array<Vec2, 2> basis;
  BlockShape block;
  double x = 0.0;  // tortoise parameter; 0 for the disk packing
};

PlanarPattern hex_disk_packing();
// Throws DomainError unless 0 < x < 1.
PlanarPattern croft_tortoise(double x);

double block_area(const BlockShape& b);
// Supremum of distances inside the (open) block.
double block_diameter(const BlockShape& b);
// max over the block of <p, u> for a unit vector u (an upper bound for tortoises).
double block_support(const BlockShape& b, Vec2 unit);
// p strictly inside scale * block.
bool block_contains(const BlockShape& b, Vec2 p, double scale = 1.0);

double analytic_density(const PlanarPattern& p);
double tortoise_area(double x);
double croft_density(double x);

struct CroftOptimum {
  double x = 0.0;
  double density = 0.0;
};
// Grid scan with the given step, then golden-section refinement. step <= 1e-4.
CroftOptimum optimize_croft(double step = 1e-4);

// A lattice containing K Z^2 that carries the pattern on the K-torus.
struct TorusEmbedding {
  int K = 0;
  int points = 0;                // blocks per torus
  std::array<Vec2, 2> basis;     // reduced basis of the embedded lattice
  std::array<int, 3> hnf{};      // (a, b, c): lattice (K/n) <(a,0), (b,c)>, n = a c
  BlockShape block;              // orientation adjusted for tortoises
  double analytic_density = 0.0;
  double approximant_density = 0.0;
};

// Densest lattice containing K Z^2 on which the (1 - beta)-shrunk blocks keep
// every inter-block distance above 1; ties go to the lattice closest to the
// pattern's shape. Throws FeasibilityError if none exists.
TorusEmbedding embed_pattern(const PlanarPattern& p, int K, double beta);

struct RasterResult {
  GridSet set;
  TorusEmbedding embedding;
  double beta = 0.0;
  double raster_density = 0.0;
};

inline constexpr double kDefaultBeta = 0.01;

// A cell is kept iff the cell dilated by 1/(1 - beta) about its centre lies
// inside some (1 - beta)-shrunk block. Requires N >= 1, K >= 1, 0 <= beta < 0.5.
RasterResult rasterize_detailed(const PlanarPattern& p, int N, int K, double beta = kDefaultBeta);
GridSet rasterize(const PlanarPattern& p, int N, int K, double beta = kDefaultBeta);

// {pattern, x, beta, N, K, analytic_density, approximant_density, raster_density, ...}
std::string raster_sidecar_json(const PlanarPattern& p, const RasterResult& r);

}  // namespace udset
