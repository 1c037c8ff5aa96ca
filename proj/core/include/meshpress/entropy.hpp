#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace meshpress {

/// Order-0 adaptive frequency table. Counts start at 1, grow by
/// `kIncrement` after each coded symbol and are halved (rounding up) once
/// the total passes `kRescaleLimit`.
class AdaptiveModel {
 public:
  static constexpr std::uint32_t kIncrement = 16;
  static constexpr std::uint32_t kRescaleLimit = 1u << 14;

  explicit AdaptiveModel(std::size_t alphabet);

  std::size_t alphabet() const { return counts_.size(); }
  std::uint32_t total() const { return total_; }
  std::uint32_t count(std::size_t symbol) const { return counts_[symbol]; }
  std::uint32_t cumulative(std::size_t symbol) const;
  /// Symbol whose cumulative interval contains `target` (< total).
  std::size_t find(std::uint32_t target, std::uint32_t* cum) const;
  void update(std::size_t symbol);

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t total_ = 0;
};

/// Carry-less range coder (Subbotin): 32-bit low and range, byte output,
/// renormalization at 2^24 with the range forced up when it drops below
/// 2^16. Totals must not exceed 2^16.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);
  void encode(AdaptiveModel& model, std::size_t symbol);
  /// Up to 32 bits at flat probability, sent 16 at a time.
  void encode_bits(std::uint32_t value, int bits);

  /// Emits the fewest bytes that pin the final interval (missing bytes read
  /// as zero) and returns the buffer. The encoder is spent afterwards.
  std::vector<std::uint8_t> finish();

 private:
  void normalize();

  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  std::size_t decode(AdaptiveModel& model);
  std::uint32_t decode_bits(int bits);

  /// Bytes consumed past the end of the input; more than 4 means the data
  /// ran out before the symbols did.
  std::size_t overrun() const { return overrun_; }

 private:
  std::uint32_t target(std::uint32_t total);
  void consume(std::uint32_t cum, std::uint32_t freq);
  std::uint8_t next_byte();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::size_t overrun_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint32_t code_ = 0;
};

/// Magnitude bucket 0..15 codes |v| directly; bucket 16 is followed by
/// |v| - 16 as `escape_bits` raw bits. Bucket 17 is the long escape for
/// magnitudes that overflow that width: |v| - 16 follows in 32 raw bits. A
/// non-zero value is followed by its sign under a separate binary model.
class SignedEscapeCoder {
 public:
  static constexpr int kDirect = 16;
  static constexpr int kLong = 17;
  static constexpr int kBuckets = 18;

  explicit SignedEscapeCoder(int escape_bits);

  int escape_bits() const { return escape_bits_; }
  /// Throws std::out_of_range for |v| >= 2^31.
  void encode(RangeEncoder& enc, std::int64_t v);
  std::int64_t decode(RangeDecoder& dec);

 private:
  int escape_bits_;
  AdaptiveModel buckets_{kBuckets};
  AdaptiveModel sign_{2};
};

}  // namespace meshpress
