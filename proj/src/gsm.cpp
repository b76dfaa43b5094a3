#include "dfrc/gsm.hpp"

#include <algorithm>
#include <string>

namespace dfrc {

namespace {

constexpr std::uint64_t kSaturate = 1ULL << 63;

void check_args(int num_tx, int num_active, bool fixed_endpoints = false) {
  if (num_active < 1 || num_active > num_tx)
    throw GsmError("need 1 <= N_x <= N_t, got N_x=" + std::to_string(num_active) +
                   " N_t=" + std::to_string(num_tx));
  if (fixed_endpoints && num_active < 2)
    throw GsmError("fixed endpoints need N_x >= 2");
}

/// Lexicographic rank of a sorted k-combination of {0..n-1}.
std::uint64_t combination_rank(const std::vector<int>& combo, int n) {
  std::uint64_t rank = 0;
  int prev = -1;
  const int k = static_cast<int>(combo.size());
  for (int j = 0; j < k; ++j) {
    for (int v = prev + 1; v < combo[j]; ++v) rank += binomial(n - 1 - v, k - 1 - j);
    prev = combo[j];
  }
  return rank;
}

/// Sorted k-combination of {0..n-1} with the given lexicographic rank.
std::vector<int> combination_unrank(std::uint64_t rank, int n, int k) {
  std::vector<int> combo(k);
  int v = 0;
  for (int j = 0; j < k; ++j) {
    while (true) {
      const std::uint64_t block = binomial(n - 1 - v, k - 1 - j);
      if (rank < block) break;
      rank -= block;
      ++v;
    }
    combo[j] = v++;
  }
  return combo;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int j = 1; j <= k; ++j) {
    // c * (n-k+j) / j is always integral at this point
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + j);
    if (c > (kSaturate - 1) / num) return kSaturate;
    c = c * num / j;
  }
  return c;
}

std::uint64_t pattern_count(int num_tx, int num_active, bool fixed_endpoints) {
  check_args(num_tx, num_active, fixed_endpoints);
  return fixed_endpoints ? binomial(num_tx - 2, num_active - 2)
                         : binomial(num_tx, num_active);
}

int bits_per_pattern(int num_tx, int num_active, bool fixed_endpoints) {
  const std::uint64_t count = pattern_count(num_tx, num_active, fixed_endpoints);
  int b = 0;
  while ((2ULL << b) <= count && b < 63) ++b;
  return b;
}

AntennaPattern encode_pattern(std::uint64_t bits, int num_tx, int num_active,
                              bool fixed_endpoints) {
  const int b = bits_per_pattern(num_tx, num_active, fixed_endpoints);
  if (b < 64 && bits >= (1ULL << b))
    throw GsmError("index bits out of range: " + std::to_string(bits) +
                   " >= 2^" + std::to_string(b));

  AntennaPattern p;
  p.fixed_endpoints = fixed_endpoints;
  if (fixed_endpoints) {
    auto middle = combination_unrank(bits, num_tx - 2, num_active - 2);
    p.indices.push_back(0);
    for (int v : middle) p.indices.push_back(v + 1);
    p.indices.push_back(num_tx - 1);
  } else {
    p.indices = combination_unrank(bits, num_tx, num_active);
  }
  return p;
}

std::uint64_t decode_pattern(const AntennaPattern& pattern, int num_tx, int num_active) {
  validate_pattern(pattern, num_tx, num_active);
  std::uint64_t rank;
  if (pattern.fixed_endpoints) {
    std::vector<int> middle(pattern.indices.begin() + 1, pattern.indices.end() - 1);
    for (auto& v : middle) --v;
    rank = combination_rank(middle, num_tx - 2);
  } else {
    rank = combination_rank(pattern.indices, num_tx);
  }
  const int b = bits_per_pattern(num_tx, num_active, pattern.fixed_endpoints);
  if (b < 64 && rank >= (1ULL << b))
    throw GsmError("unencodable pattern: combinadic rank " + std::to_string(rank) +
                   " >= 2^" + std::to_string(b));
  return rank;
}

void validate_pattern(const AntennaPattern& p, int num_tx, int num_active) {
  check_args(num_tx, num_active, p.fixed_endpoints);
  if (static_cast<int>(p.indices.size()) != num_active)
    throw GsmError("pattern must have exactly N_x indices");
  for (std::size_t j = 0; j < p.indices.size(); ++j) {
    if (p.indices[j] < 0 || p.indices[j] >= num_tx)
      throw GsmError("pattern index out of [0, N_t)");
    if (j > 0 && p.indices[j] <= p.indices[j - 1])
      throw GsmError("pattern indices must be strictly increasing");
  }
  if (p.fixed_endpoints &&
      (p.indices.front() != 0 || p.indices.back() != num_tx - 1))
    throw GsmError("fixed-endpoint pattern must contain antennas 0 and N_t-1");
}

}  // namespace dfrc
