#include "apir/wire.hpp"

#include <optional>
#include <string>

#include "apir/errors.hpp"

namespace apir::wire {
namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + sizeof(T) > in.size()) throw FormatError("truncated integer");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[offset + i]) << (8 * i);
  return v;
}

void put_elements(std::vector<std::uint8_t>& out, const std::vector<FieldElement>& elements) {
  for (const auto& e : elements) put_u64(out, e.value());
}

std::vector<FieldElement> get_elements(std::span<const std::uint8_t> in, std::size_t offset, std::size_t count,
                                       const PrimeField& field) {
  std::vector<FieldElement> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t v = get_u64(in, offset + i * kElementBytes);
    if (v >= field.modulus()) throw FormatError("element not below modulus");
    out.push_back(field.element(v));
  }
  return out;
}

}  // namespace

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) { put_le(out, v); }
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) { put_le(out, v); }
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) { put_le(out, v); }
std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t offset) { return get_le<std::uint16_t>(in, offset); }
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) { return get_le<std::uint32_t>(in, offset); }
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset) { return get_le<std::uint64_t>(in, offset); }

std::vector<std::uint8_t> encode_frame(FrameType type, std::span<const std::uint8_t> body) {
  if (body.size() > kMaxBodyBytes) throw UsageError("frame body too large");
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + body.size());
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.push_back(static_cast<std::uint8_t>(type));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) throw FormatError("truncated frame header");
  const std::uint32_t length = get_u32(bytes, 0);
  if (bytes.size() != kFrameHeaderBytes + length) throw FormatError("frame length mismatch");
  const std::uint8_t type = bytes[4];
  if (type < 1 || type > 3) throw FormatError("unknown frame type " + std::to_string(type));
  return Frame{static_cast<FrameType>(type), {bytes.begin() + kFrameHeaderBytes, bytes.end()}};
}

std::vector<std::uint8_t> encode_query_frame(const SchemeParams& params, const Query& query) {
  std::vector<std::uint8_t> body;
  body.reserve(kQueryHeaderBytes + 2 * params.n * kElementBytes);
  put_u64(body, params.modulus());
  put_u32(body, static_cast<std::uint32_t>(params.n));
  put_u32(body, static_cast<std::uint32_t>(params.w));
  put_u64(body, query.server_point.value());
  put_elements(body, query.f_shares);
  put_elements(body, query.h_shares);
  return encode_frame(FrameType::query, body);
}

std::vector<std::uint8_t> encode_answer_frame(const Answer& answer) {
  std::vector<std::uint8_t> body;
  body.reserve((answer.a.size() + answer.b.size()) * kElementBytes);
  put_elements(body, answer.a);
  put_elements(body, answer.b);
  return encode_frame(FrameType::answer, body);
}

std::vector<std::uint8_t> encode_error_frame(ErrorCode code) {
  std::vector<std::uint8_t> body;
  put_u16(body, static_cast<std::uint16_t>(code));
  return encode_frame(FrameType::error, body);
}

QueryFrame decode_query_body(std::span<const std::uint8_t> body) {
  if (body.size() < kQueryHeaderBytes) throw FormatError("truncated query header");
  const std::uint64_t p = get_u64(body, 0);
  const std::uint32_t n = get_u32(body, 8);
  const std::uint32_t w = get_u32(body, 12);
  const std::uint64_t point = get_u64(body, 16);
  if (body.size() != kQueryHeaderBytes + 2 * std::uint64_t{n} * kElementBytes) {
    throw FormatError("query body length does not match n");
  }
  std::optional<PrimeField> field;
  try {
    field.emplace(p);
  } catch (const ValidationError& e) {
    throw FormatError(std::string("query modulus invalid: ") + e.what());
  }
  if (point == 0 || point >= p) throw FormatError("query server point out of range");
  QueryFrame out{p, n, w, Query{field->element(point), {}, {}}};
  out.query.f_shares = get_elements(body, kQueryHeaderBytes, n, *field);
  out.query.h_shares = get_elements(body, kQueryHeaderBytes + n * kElementBytes, n, *field);
  return out;
}

Answer decode_answer_body(std::span<const std::uint8_t> body, const PrimeField& field, std::size_t w) {
  if (body.size() != 2 * w * kElementBytes) throw FormatError("answer body length does not match w");
  return Answer{get_elements(body, 0, w, field), get_elements(body, w * kElementBytes, w, field)};
}

ErrorCode decode_error_body(std::span<const std::uint8_t> body) {
  if (body.size() != 2) throw FormatError("error body must be 2 bytes");
  return static_cast<ErrorCode>(get_u16(body, 0));
}

}  // namespace apir::wire
