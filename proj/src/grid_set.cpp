#include "udset/grid_set.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "udset/errors.hpp"

namespace udset {
namespace {

constexpr const char* kFormatName = "udset-gridset";
constexpr const char* kEncoding = "rle-leb128-base64";
constexpr int kFormatVersion = 1;

void validate_dims(int K, int N) {
  if (K < 1 || N < 1) throw std::invalid_argument("GridSet: K and N must be positive");
  const long long side = static_cast<long long>(K) * N;
  if (side > 1 << 15) throw ResourceError("GridSet: side N*K too large");
}

void put_leb128(std::vector<std::uint8_t>& out, std::uint64_t v) {
  do {
    std::uint8_t byte = v & 0x7f;
    v >>= 7;
    if (v != 0) byte |= 0x80;
    out.push_back(byte);
  } while (v != 0);
}

}  // namespace

GridSet::GridSet(int K, int N) : K_(K), N_(N) {
  validate_dims(K, N);
  cells_.assign(static_cast<std::size_t>(side()) * side(), 0);
}

GridSet::GridSet(int K, int N, std::vector<std::uint8_t> cells) : K_(K), N_(N), cells_(std::move(cells)) {
  validate_dims(K, N);
  if (cells_.size() != static_cast<std::size_t>(side()) * side()) {
    throw std::invalid_argument("GridSet: cell array length must be (N*K)^2");
  }
  for (auto& c : cells_) c = c ? 1 : 0;
  popcount_ = static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

GridSet GridSet::full(int K, int N) {
  const auto m = static_cast<std::size_t>(K) * N;
  return GridSet(K, N, std::vector<std::uint8_t>(m * m, 1));
}

bool GridSet::contains(long j, long k) const {
  const long m = side();
  j %= m;
  k %= m;
  if (j < 0) j += m;
  if (k < 0) k += m;
  return cells_[index(static_cast<int>(j), static_cast<int>(k))] != 0;
}

double density(const GridSet& a) {
  return static_cast<double>(a.popcount()) / static_cast<double>(a.cell_count());
}

GridSet translated(const GridSet& a, long dj, long dk) {
  const int m = a.side();
  std::vector<std::uint8_t> out(a.cell_count(), 0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      if (!a.at(a.index(j, k))) continue;
      long nj = (j + dj) % m, nk = (k + dk) % m;
      if (nj < 0) nj += m;
      if (nk < 0) nk += m;
      out[a.index(static_cast<int>(nj), static_cast<int>(nk))] = 1;
    }
  }
  return GridSet(a.K(), a.N(), std::move(out));
}

GridSet checkerboard(int N, int K) {
  if (N < 1) throw std::invalid_argument("checkerboard: N must be >= 1");
  if (K < 2 || K % 2 != 0) throw std::invalid_argument("checkerboard: K must be even");
  const int m = N * K;
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(m) * m, 0);
  for (int k = 0; k < m; k += 2)
    for (int j = 0; j < m; j += 2) cells[static_cast<std::size_t>(k) * m + j] = 1;
  return GridSet(K, N, std::move(cells));
}

std::string encode_gridset(const GridSet& a) {
  std::vector<std::uint8_t> runs;
  auto cells = a.cells();
  std::uint8_t current = 0;
  std::uint64_t run = 0;
  for (std::uint8_t c : cells) {
    if (c == current) {
      ++run;
    } else {
      put_leb128(runs, run);
      current = c;
      run = 1;
    }
  }
  put_leb128(runs, run);

  nlohmann::ordered_json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["K"] = a.K();
  j["N"] = a.N();
  j["cells"] = a.cell_count();
  j["ones"] = a.popcount();
  j["encoding"] = kEncoding;
  j["payload"] = detail::base64_encode(runs);
  return j.dump() + "\n";
}

GridSet decode_gridset(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("gridset: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatName) throw FormatError("gridset: wrong format tag");
    if (j.at("version").get<int>() != kFormatVersion) throw FormatError("gridset: unsupported version");
    if (j.at("encoding").get<std::string>() != kEncoding) throw FormatError("gridset: unsupported encoding");
    const int K = j.at("K").get<int>();
    const int N = j.at("N").get<int>();
    if (K < 1 || N < 1) throw FormatError("gridset: K and N must be positive");
    const std::size_t total = static_cast<std::size_t>(K) * N * K * N;
    if (j.contains("cells") && j["cells"].get<std::size_t>() != total) throw FormatError("gridset: cell count mismatch");
    const auto bytes = detail::base64_decode(j.at("payload").get<std::string>());
    std::vector<std::uint8_t> cells;
    cells.reserve(total);
    std::uint8_t value = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
      std::uint64_t run = 0;
      int shift = 0;
      while (true) {
        if (pos >= bytes.size() || shift > 56) throw FormatError("gridset: truncated run length");
        const std::uint8_t b = bytes[pos++];
        run |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        shift += 7;
        if ((b & 0x80) == 0) break;
      }
      if (cells.size() + run > total) throw FormatError("gridset: runs exceed cell count");
      cells.insert(cells.end(), run, value);
      value ^= 1;
    }
    if (cells.size() != total) throw FormatError("gridset: runs do not cover all cells");
    GridSet out(K, N, std::move(cells));
    if (j.contains("ones") && j["ones"].get<std::size_t>() != out.popcount()) throw FormatError("gridset: popcount mismatch");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("gridset: ") + e.what());
  }
}

void save_gridset(const std::filesystem::path& path, const GridSet& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << encode_gridset(a);
}

GridSet load_gridset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_gridset(ss.str());
}

namespace detail {

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int t = 0; t < 4; ++t) {
      const char c = text[i + t];
      if (c == '=' && i + 4 == text.size() && t >= 2) {
        vals[t] = 0;
        ++pad;
      } else {
        if (pad > 0) throw FormatError("base64: data after padding");
        vals[t] = lookup[static_cast<unsigned char>(c)];
        if (vals[t] < 0) throw FormatError("base64: invalid character");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back((v >> 16) & 0xff);
    if (pad < 2) out.push_back((v >> 8) & 0xff);
    if (pad < 1) out.push_back(v & 0xff);
  }
  return out;
}

}  // namespace detail
}  // namespace udset
