#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace wills {

/// (seed, stream) fully determines a stream's output regardless of thread
/// scheduling; distinct streams are independent counter blocks.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  SeedSpec with_stream(std::uint64_t s) const { return {seed, s}; }
  bool operator==(const SeedSpec&) const = default;
};

/// Counter-based Philox4x32-10 generator (Salmon et al., SC 2011).
/// The key carries the user seed, the upper counter words carry the stream
/// index, and the lower counter words advance per 128-bit block.
class Philox {
public:
  explicit Philox(SeedSpec spec) : Philox(spec.seed, spec.stream) {}
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1), safe under log().
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform index in {0, ..., n-1}.
  std::size_t uniform_index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Standard normal via Box-Muller (second draw cached).
  double gaussian();

  /// Gamma(shape, rate 1). Marsaglia-Tsang rejection for shape >= 1 with the
  /// boost G(a) = G(a+1) U^{1/a} below 1; shape 0 returns exactly 0.
  double gamma(double shape);

  /// Raw Philox block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

/// Walker/Vose alias table for O(1) draws from a fixed discrete law.
class AliasTable {
public:
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t sample(Philox& rng) const {
    const std::size_t i = rng.uniform_index(prob_.size());
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

  std::size_t size() const { return prob_.size(); }

private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

} // namespace wills
