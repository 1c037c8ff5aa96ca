#include "meshpress/entropy.hpp"

#include <string>

namespace meshpress {
namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kBottom = 1u << 16;
constexpr int kRawChunk = 16;

}  // namespace

AdaptiveModel::AdaptiveModel(std::size_t alphabet) : counts_(alphabet, 1), total_(static_cast<std::uint32_t>(alphabet)) {
  if (alphabet == 0 || alphabet > kRescaleLimit) throw std::invalid_argument("AdaptiveModel: bad alphabet size");
}

std::uint32_t AdaptiveModel::cumulative(std::size_t symbol) const {
  std::uint32_t c = 0;
  for (std::size_t s = 0; s < symbol; ++s) c += counts_[s];
  return c;
}

std::size_t AdaptiveModel::find(std::uint32_t target, std::uint32_t* cum) const {
  std::uint32_t c = 0;
  std::size_t s = 0;
  while (s + 1 < counts_.size() && c + counts_[s] <= target) c += counts_[s++];
  *cum = c;
  return s;
}

void AdaptiveModel::update(std::size_t symbol) {
  counts_[symbol] += kIncrement;
  total_ += kIncrement;
  if (total_ > kRescaleLimit) {
    total_ = 0;
    for (auto& c : counts_) {
      c = (c + 1) / 2;
      total_ += c;
    }
  }
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  range_ /= total;
  low_ += cum * range_;
  range_ *= freq;
  normalize();
}

void RangeEncoder::normalize() {
  while (true) {
    if ((low_ ^ (low_ + range_)) >= kTop) {
      if (range_ >= kBottom) break;
      range_ = (0u - low_) & (kBottom - 1);
    }
    out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeEncoder::encode(AdaptiveModel& model, std::size_t symbol) {
  if (symbol >= model.alphabet()) {
    throw std::out_of_range("symbol " + std::to_string(symbol) + " outside alphabet of " +
                            std::to_string(model.alphabet()));
  }
  // A one-symbol alphabet carries no information.
  if (model.alphabet() > 1) encode(model.cumulative(symbol), model.count(symbol), model.total());
  model.update(symbol);
}

void RangeEncoder::encode_bits(std::uint32_t value, int bits) {
  if (bits < 0 || bits > 32 || (bits < 32 && (value >> bits) != 0)) {
    throw std::out_of_range("value does not fit in " + std::to_string(bits) + " bits");
  }
  while (bits > 0) {
    const int n = bits > kRawChunk ? kRawChunk : bits;
    bits -= n;
    encode((value >> bits) & ((1u << n) - 1), 1, 1u << n);
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  const std::uint64_t low = low_;
  const std::uint64_t end = low + range_;
  for (int n = 0; n <= 4; ++n) {
    const std::uint64_t unit = std::uint64_t{1} << (32 - 8 * n);
    const std::uint64_t v = (low + unit - 1) / unit * unit;
    if (v < end) {
      for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (24 - 8 * i)));
      break;
    }
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ < in_.size()) return in_[pos_++];
  ++overrun_;
  return 0;
}

std::uint32_t RangeDecoder::target(std::uint32_t total) {
  range_ /= total;
  const std::uint32_t t = (code_ - low_) / range_;
  // Only reachable on damaged input.
  return t < total ? t : total - 1;
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq) {
  low_ += cum * range_;
  range_ *= freq;
  while (true) {
    if ((low_ ^ (low_ + range_)) >= kTop) {
      if (range_ >= kBottom) break;
      range_ = (0u - low_) & (kBottom - 1);
    }
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

std::size_t RangeDecoder::decode(AdaptiveModel& model) {
  std::size_t symbol = 0;
  if (model.alphabet() > 1) {
    std::uint32_t cum = 0;
    symbol = model.find(target(model.total()), &cum);
    consume(cum, model.count(symbol));
  }
  model.update(symbol);
  return symbol;
}

std::uint32_t RangeDecoder::decode_bits(int bits) {
  std::uint32_t value = 0;
  while (bits > 0) {
    const int n = bits > kRawChunk ? kRawChunk : bits;
    bits -= n;
    const std::uint32_t v = target(1u << n);
    consume(v, 1);
    value = (n == 32 ? 0 : value << n) | v;
  }
  return value;
}

SignedEscapeCoder::SignedEscapeCoder(int escape_bits) : escape_bits_(escape_bits) {
  if (escape_bits < 1 || escape_bits > 32) throw std::invalid_argument("escape width must lie in [1, 32]");
}

void SignedEscapeCoder::encode(RangeEncoder& enc, std::int64_t v) {
  const std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
  if (mag >= (std::uint64_t{1} << 31)) throw std::out_of_range("magnitude " + std::to_string(mag) + " needs 32 bits");
  if (mag < kDirect) {
    enc.encode(buckets_, static_cast<std::size_t>(mag));
  } else if (const std::uint64_t rest = mag - kDirect; escape_bits_ >= 32 || (rest >> escape_bits_) == 0) {
    enc.encode(buckets_, kDirect);
    enc.encode_bits(static_cast<std::uint32_t>(rest), escape_bits_);
  } else {
    enc.encode(buckets_, kLong);
    enc.encode_bits(static_cast<std::uint32_t>(rest), 32);
  }
  if (v != 0) enc.encode(sign_, v < 0 ? 1 : 0);
}

std::int64_t SignedEscapeCoder::decode(RangeDecoder& dec) {
  const auto bucket = dec.decode(buckets_);
  std::int64_t mag = 0;
  if (bucket < kDirect) {
    mag = static_cast<std::int64_t>(bucket);
  } else {
    mag = kDirect + static_cast<std::int64_t>(dec.decode_bits(bucket == kDirect ? escape_bits_ : 32));
  }
  if (mag == 0) return 0;
  return dec.decode(sign_) == 1 ? -mag : mag;
}

}  // namespace meshpress
