#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "apir/field.hpp"
#include "apir/scheme.hpp"

namespace apir {

// Database file layout:
//   "APDB" | version u8 (=1) | p u64 | n u32 | w u32 | n*w elements u64, block-major
// Integers little-endian.
inline constexpr std::uint8_t kDbFileVersion = 1;
inline constexpr std::size_t kDbHeaderBytes = 4 + 1 + 8 + 4 + 4;

std::vector<std::uint8_t> encode_database(const Database& db);
/// Throws FormatError on bad magic, version or length and ValidationError on
/// a non-prime modulus or an element >= p.
Database decode_database(std::span<const std::uint8_t> bytes);

void write_database(const std::filesystem::path& path, const Database& db);
Database read_database(const std::filesystem::path& path);

/// Packs m-bit blocks into w = ceil(m / floor(log2 p)) field elements.
///
/// Bits are read least-significant first from a byte string of ceil(m/8)
/// bytes; element k carries bits [k*b, (k+1)*b) with b = floor(log2 p), so
/// every element value is below 2^b <= p.
class BlockCodec {
 public:
  BlockCodec(const PrimeField& field, std::size_t m);

  std::size_t bits() const noexcept { return m_; }
  std::size_t width() const noexcept { return w_; }

  /// Throws UsageError when the byte count is wrong or padding bits are set.
  std::vector<FieldElement> encode(std::span<const std::uint8_t> block) const;
  /// Throws ValidationError when an element does not fit its bit slot.
  std::vector<std::uint8_t> decode(const std::vector<FieldElement>& elements) const;

 private:
  PrimeField field_;
  std::size_t m_;
  unsigned bits_per_element_;
  std::size_t w_;
};

}  // namespace apir
