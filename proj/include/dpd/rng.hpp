#pragma once

#include <array>
#include <cstdint>

namespace dpd {

/// Philox-4x32-10 counter-based block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// A reproducible random stream addressed by (master_seed, stream_index).
///
/// Draw k of a stream is a pure function of (master_seed, stream_index, k), so
/// parallel tasks that each own a stream produce the same numbers regardless
/// of scheduling. Copying a stream copies its position.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : master_seed_(master_seed), stream_index_(stream_index) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double next_uniform() noexcept;

  /// Standard normal via Box-Muller.
  double next_gaussian() noexcept;

 private:
  std::uint64_t next_u64() noexcept;

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpd
