#include "masm/sm_codec.hpp"

#include "masm/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace masm::sm {

namespace {

constexpr std::uint64_t kMaxMaterializedSubsets = 1u << 20;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int s = 0;
  while ((std::size_t{1} << s) < n) ++s;
  return s;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // result * num never overflows for n <= 64 with u64 arithmetic done
    // as (result / i) exact-divide pattern; use 128-bit to be safe.
    const unsigned __int128 wide = static_cast<unsigned __int128>(result) * num;
    if (wide / i > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("binomial: overflow");
    result = static_cast<std::uint64_t>(wide / i);
  }
  return result;
}

std::uint64_t unrank_combination(std::uint64_t rank, int n, int k) {
  // Colexicographic unranking: pick the largest element first.
  std::uint64_t mask = 0;
  for (int j = k; j >= 1; --j) {
    int c = j - 1;
    while (c + 1 <= n - 1 && binomial(c + 1, j) <= rank) ++c;
    rank -= binomial(c, j);
    mask |= (std::uint64_t{1} << c);
  }
  return mask;
}

std::vector<int> SmCodebook::subset_antennas(int i) const {
  std::vector<int> out;
  out.reserve(l_u);
  std::uint64_t mask = subsets.at(i);
  while (mask != 0) {
    const int b = std::countr_zero(mask);
    out.push_back(b);
    mask &= mask - 1;
  }
  return out;
}

double TransmitVector::activity_factor() const {
  if (entries.size() == 0) return 0.0;
  int nonzero = 0;
  for (Eigen::Index i = 0; i < entries.size(); ++i)
    if (entries(i) != std::complex<double>{0.0, 0.0}) ++nonzero;
  return static_cast<double>(nonzero) / static_cast<double>(entries.size());
}

SmCodebook build_codebook(int m_u, int l_u,
                          const std::vector<std::complex<double>>& alphabet,
                          SubsetPolicy policy) {
  if (m_u < 1 || m_u > 64)
    throw std::invalid_argument("build_codebook: need 1 <= m_u <= 64");
  if (l_u < 1 || l_u > m_u)
    throw std::invalid_argument("build_codebook: need 1 <= l_u <= m_u");
  if (alphabet.empty() || !is_power_of_two(alphabet.size()))
    throw std::invalid_argument("build_codebook: alphabet must have power-of-two size");
  for (const auto& s : alphabet)
    if (s == std::complex<double>{0.0, 0.0})
      throw std::invalid_argument("build_codebook: zero symbol is reserved for inactive antennas");

  const std::uint64_t total = binomial(m_u, l_u);
  const int index_bits = static_cast<int>(std::bit_width(total)) - 1;  // floor(log2)
  const std::uint64_t count = std::uint64_t{1} << index_bits;
  if (count > kMaxMaterializedSubsets)
    throw std::invalid_argument("build_codebook: 2^I subsets too large to materialize");

  SmCodebook cb;
  cb.m_u = m_u;
  cb.l_u = l_u;
  cb.index_bits = index_bits;
  cb.symbol_bits = log2_exact(alphabet.size());
  cb.alphabet = alphabet;
  cb.subsets.reserve(count);

  if (policy.kind == SubsetPolicy::Kind::Lexicographic) {
    for (std::uint64_t r = 0; r < count; ++r)
      cb.subsets.push_back(unrank_combination(r, m_u, l_u));
  } else {
    RngStream rng(policy.seed);
    std::unordered_set<std::uint64_t> seen;
    while (cb.subsets.size() < count) {
      const std::uint64_t r = rng.uniform_below(total);
      if (seen.insert(r).second)
        cb.subsets.push_back(unrank_combination(r, m_u, l_u));
    }
  }
  return cb;
}

Eigen::VectorXcd encode(const SmCodebook& cb, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != cb.bits_per_terminal())
    throw std::invalid_argument("encode: expected " + std::to_string(cb.bits_per_terminal()) +
                                " bits, got " + std::to_string(bits.size()));
  std::size_t pos = 0;
  std::uint64_t index = 0;
  for (int i = 0; i < cb.index_bits; ++i) index = (index << 1) | (bits[pos++] & 1u);

  Eigen::VectorXcd block = Eigen::VectorXcd::Zero(cb.m_u);
  for (int antenna : cb.subset_antennas(static_cast<int>(index))) {
    std::uint64_t sym = 0;
    for (int b = 0; b < cb.symbol_bits; ++b) sym = (sym << 1) | (bits[pos++] & 1u);
    block(antenna) = cb.alphabet[sym];
  }
  return block;
}

DecodeResult decode(const SmCodebook& cb, const Eigen::VectorXcd& block) {
  if (block.size() != cb.m_u) throw std::invalid_argument("decode: block length != m_u");

  std::uint64_t support = 0;
  for (int m = 0; m < cb.m_u; ++m)
    if (block(m) != std::complex<double>{0.0, 0.0}) support |= (std::uint64_t{1} << m);

  DecodeResult res;
  int best = 0;
  int best_dist = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < cb.subsets.size(); ++i) {
    const int dist = std::popcount(support ^ cb.subsets[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  res.valid = (best_dist == 0);

  res.bits.reserve(cb.bits_per_terminal());
  for (int b = cb.index_bits - 1; b >= 0; --b)
    res.bits.push_back(static_cast<std::uint8_t>((best >> b) & 1));
  for (int antenna : cb.subset_antennas(best)) {
    // Exact alphabet match when the entry is a symbol; otherwise nearest
    // symbol (all-zero or mismatched entries fall back to index 0 on ties).
    std::size_t sym = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < cb.alphabet.size(); ++s) {
      const double d = std::abs(block(antenna) - cb.alphabet[s]);
      if (d < best_d) {
        best_d = d;
        sym = s;
      }
    }
    for (int b = cb.symbol_bits - 1; b >= 0; --b)
      res.bits.push_back(static_cast<std::uint8_t>((sym >> b) & 1));
  }
  return res;
}

}  // namespace masm::sm
