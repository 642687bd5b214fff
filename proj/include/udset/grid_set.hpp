#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace udset {

// A K-periodic subset of the torus R^2 / (K Z^2) that is a union of closed
// 1/N x 1/N grid squares. Cell (j, k) is [j/N, (j+1)/N] x [k/N, (k+1)/N];
// storage is row-major with index k * side() + j.
class GridSet {
 public:
  GridSet(int K, int N);  // empty set
  GridSet(int K, int N, std::vector<std::uint8_t> cells);

  static GridSet full(int K, int N);

  int K() const { return K_; }
  int N() const { return N_; }
  int side() const { return K_ * N_; }
  std::size_t cell_count() const { return cells_.size(); }

  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(side()) + static_cast<std::size_t>(j);
  }
  // Periodic lookup; any integer (j, k) is reduced mod side().
  bool contains(long j, long k) const;
  bool at(std::size_t idx) const { return cells_[idx] != 0; }

  std::size_t popcount() const { return popcount_; }
  std::span<const std::uint8_t> cells() const { return cells_; }

  friend bool operator==(const GridSet& a, const GridSet& b) {
    return a.K_ == b.K_ && a.N_ == b.N_ && a.cells_ == b.cells_;
  }

 private:
  int K_;
  int N_;
  std::vector<std::uint8_t> cells_;
  std::size_t popcount_ = 0;
};

// popcount / (NK)^2.
double density(const GridSet& a);

// Cyclic shift of every cell by (dj, dk).
GridSet translated(const GridSet& a, long dj, long dk);

// Cells (j, k) with j and k both even. K must be even.
GridSet checkerboard(int N, int K);

// Single-line JSON with a run-length/LEB128/base64 payload; see docs/formats.md.
std::string encode_gridset(const GridSet& a);
GridSet decode_gridset(const std::string& text);
void save_gridset(const std::filesystem::path& path, const GridSet& a);
GridSet load_gridset(const std::filesystem::path& path);

namespace detail {
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);
}  // namespace detail

}  // namespace udset
