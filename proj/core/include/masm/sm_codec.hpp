#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace masm::sm {

/// How the 2^I antenna subsets are picked from the C(Mu, Lu) candidates.
/// Lexicographic takes the first 2^I subsets in combinadic (colexicographic
/// rank) order and is the reproducible default; SeededRandom matches the
/// uniform random assignment of the transmission scheme.
struct SubsetPolicy {
  enum class Kind { Lexicographic, SeededRandom };
  Kind kind = Kind::Lexicographic;
  std::uint64_t seed = 0;

  static SubsetPolicy lexicographic() { return {}; }
  static SubsetPolicy seeded_random(std::uint64_t seed) {
    return {Kind::SeededRandom, seed};
  }
};

/// Per-terminal mapping between bit blocks, modulation indices, antenna
/// subsets and symbols. Immutable after construction.
struct SmCodebook {
  int m_u = 0;        // antennas per terminal
  int l_u = 0;        // active antennas (RF chains)
  int index_bits = 0; // I = floor(log2 C(Mu, Lu))
  int symbol_bits = 0;  // S = log2 |alphabet|

  /// 2^I subsets as bitmasks over antennas 0..m_u-1, ordered by modulation
  /// index.
  std::vector<std::uint64_t> subsets;
  std::vector<std::complex<double>> alphabet;

  int bits_per_terminal() const { return index_bits + l_u * symbol_bits; }

  /// Antenna indices (ascending, 0-based) of subset i.
  std::vector<int> subset_antennas(int i) const;
};

/// Full length-M transmit vector, K terminal blocks of length Mu.
struct TransmitVector {
  Eigen::VectorXcd entries;
  int m_u = 0;

  int terminals() const { return m_u > 0 ? static_cast<int>(entries.size()) / m_u : 0; }
  double activity_factor() const;
};

/// Builds the codebook. The alphabet must have power-of-two size and no zero
/// symbol (zero marks inactive antennas). Throws std::invalid_argument on a
/// bad configuration.
SmCodebook build_codebook(int m_u, int l_u,
                          const std::vector<std::complex<double>>& alphabet,
                          SubsetPolicy policy = SubsetPolicy::lexicographic());

/// Encodes one terminal's bits (length I + Lu*S, MSB first) into a length-Mu
/// block. The first I bits are the modulation index; the remaining Lu groups
/// of S bits pick symbols for the active antennas in ascending antenna order.
Eigen::VectorXcd encode(const SmCodebook& cb, const std::vector<std::uint8_t>& bits);

struct DecodeResult {
  std::vector<std::uint8_t> bits;
  bool valid = false;
};

/// Inverse of encode on a detected block over S0 = {0} union alphabet. If the
/// support is not a codebook subset, valid=false and the bits come from the
/// nearest subset by support Hamming distance (ties to the lowest index).
DecodeResult decode(const SmCodebook& cb, const Eigen::VectorXcd& block);

/// Number of lexicographically ranked Lu-subsets of [m_u]; guards overflow.
std::uint64_t binomial(int n, int k);

/// Subset of given colexicographic rank, as a bitmask.
std::uint64_t unrank_combination(std::uint64_t rank, int n, int k);

}  // namespace masm::sm
