#include "dfrc/qam.hpp"

#include <algorithm>
#include <cmath>

namespace dfrc {

namespace {

int int_log2(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

std::uint32_t gray_encode(std::uint32_t j) { return j ^ (j >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t j = 0;
  for (; g; g >>= 1) j ^= g;
  return j;
}

double amplitude_scale(int side) {
  // Mean symbol energy of the unscaled grid is 2(side^2-1)/3.
  return std::sqrt(3.0 / (2.0 * (side * side - 1)));
}

/// Nearest axis position for a scaled coordinate; midpoint ties go to the
/// position with the smaller Gray label.
int decide_axis(double coord, int side) {
  const double t = (coord + (side - 1)) / 2.0;
  const double lo = std::floor(t);
  int j;
  if (t - lo == 0.5) {
    const int a = static_cast<int>(lo);
    const int b = a + 1;
    const int ja = std::clamp(a, 0, side - 1);
    const int jb = std::clamp(b, 0, side - 1);
    j = gray_encode(ja) < gray_encode(jb) ? ja : jb;
  } else {
    j = static_cast<int>(std::lround(t));
  }
  return std::clamp(j, 0, side - 1);
}

}  // namespace

int bits_per_qam_symbol(int order) { return int_log2(order); }

cxd qam_point(std::uint32_t label, int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
  const int half = int_log2(side);
  const std::uint32_t gi = label >> half;
  const std::uint32_t gq = label & ((1u << half) - 1);
  const int ji = static_cast<int>(gray_decode(gi));
  const int jq = static_cast<int>(gray_decode(gq));
  const double s = amplitude_scale(side);
  return {s * (2 * ji - (side - 1)), s * (2 * jq - (side - 1))};
}

std::vector<cxd> qam_constellation(int order) {
  std::vector<cxd> pts(order);
  for (int l = 0; l < order; ++l) pts[l] = qam_point(static_cast<std::uint32_t>(l), order);
  return pts;
}

std::vector<cxd> map_qam(const BitVec& bits, int order) {
  const int bps = bits_per_qam_symbol(order);
  if (bits.size() % bps != 0)
    throw QamError("bit count not divisible by bits per symbol");
  std::vector<cxd> out;
  out.reserve(bits.size() / bps);
  for (std::size_t k = 0; k < bits.size(); k += bps) {
    std::uint32_t label = 0;
    for (int b = 0; b < bps; ++b) label = (label << 1) | bits[k + b];
    out.push_back(qam_point(label, order));
  }
  return out;
}

BitVec demap_qam(const std::vector<cxd>& symbols, int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
  const int half = int_log2(side);
  const double s = amplitude_scale(side);
  BitVec out;
  out.reserve(symbols.size() * 2 * half);
  for (const cxd& z : symbols) {
    const int ji = decide_axis(z.real() / s, side);
    const int jq = decide_axis(z.imag() / s, side);
    const std::uint32_t label =
        (gray_encode(static_cast<std::uint32_t>(ji)) << half) |
        gray_encode(static_cast<std::uint32_t>(jq));
    for (int b = 2 * half - 1; b >= 0; --b)
      out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
  }
  return out;
}

}  // namespace dfrc
