#include "apir/storage.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "apir/errors.hpp"
#include "apir/wire.hpp"

namespace apir {
namespace {

constexpr char kMagic[4] = {'A', 'P', 'D', 'B'};

}  // namespace

std::vector<std::uint8_t> encode_database(const Database& db) {
  std::vector<std::uint8_t> out;
  out.reserve(kDbHeaderBytes + db.elements().size() * wire::kElementBytes);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kDbFileVersion);
  wire::put_u64(out, db.field().modulus());
  wire::put_u32(out, static_cast<std::uint32_t>(db.n()));
  wire::put_u32(out, static_cast<std::uint32_t>(db.w()));
  for (const auto& e : db.elements()) wire::put_u64(out, e.value());
  return out;
}

Database decode_database(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kDbHeaderBytes) throw FormatError("database file truncated in header");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError("bad database magic");
  }
  if (bytes[4] != kDbFileVersion) throw FormatError("unsupported database version " + std::to_string(bytes[4]));
  const std::uint64_t p = wire::get_u64(bytes, 5);
  const std::uint32_t n = wire::get_u32(bytes, 13);
  const std::uint32_t w = wire::get_u32(bytes, 17);
  if (n == 0 || w == 0) throw FormatError("database dimensions must be positive");
  const std::uint64_t payload = std::uint64_t{n} * w * wire::kElementBytes;
  if (bytes.size() != kDbHeaderBytes + payload) throw FormatError("database payload length mismatch");
  const PrimeField field(p);
  std::vector<FieldElement> elements;
  elements.reserve(std::size_t{n} * w);
  for (std::size_t i = 0; i < std::size_t{n} * w; ++i) {
    elements.push_back(field.checked(wire::get_u64(bytes, kDbHeaderBytes + i * wire::kElementBytes)));
  }
  return Database(field, n, w, std::move(elements));
}

void write_database(const std::filesystem::path& path, const Database& db) {
  const auto bytes = encode_database(db);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Database read_database(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_database(bytes);
}

BlockCodec::BlockCodec(const PrimeField& field, std::size_t m)
    : field_(field), m_(m), bits_per_element_(field.bits_per_element()) {
  if (m_ == 0) throw UsageError("block length must be positive");
  w_ = (m_ + bits_per_element_ - 1) / bits_per_element_;
}

std::vector<FieldElement> BlockCodec::encode(std::span<const std::uint8_t> block) const {
  if (block.size() != (m_ + 7) / 8) throw UsageError("block byte length does not match m");
  if (m_ % 8 != 0 && (block.back() >> (m_ % 8)) != 0) throw UsageError("padding bits set beyond m");
  std::vector<FieldElement> out;
  out.reserve(w_);
  for (std::size_t k = 0; k < w_; ++k) {
    std::uint64_t v = 0;
    for (unsigned b = 0; b < bits_per_element_; ++b) {
      const std::size_t bit = k * bits_per_element_ + b;
      if (bit >= m_) break;
      v |= static_cast<std::uint64_t>((block[bit / 8] >> (bit % 8)) & 1U) << b;
    }
    out.push_back(field_.element(v));
  }
  return out;
}

std::vector<std::uint8_t> BlockCodec::decode(const std::vector<FieldElement>& elements) const {
  if (elements.size() != w_) throw UsageError("element count does not match block width");
  std::vector<std::uint8_t> out((m_ + 7) / 8, 0);
  for (std::size_t k = 0; k < w_; ++k) {
    const std::uint64_t v = elements[k].value();
    const std::size_t slot_bits = std::min<std::size_t>(bits_per_element_, m_ - k * bits_per_element_);
    if (slot_bits < 64 && (v >> slot_bits) != 0) throw ValidationError("element does not fit its bit slot");
    for (std::size_t b = 0; b < slot_bits; ++b) {
      const std::size_t bit = k * bits_per_element_ + b;
      out[bit / 8] |= static_cast<std::uint8_t>(((v >> b) & 1U) << (bit % 8));
    }
  }
  return out;
}

}  // namespace apir
