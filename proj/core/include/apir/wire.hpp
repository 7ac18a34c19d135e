#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "apir/scheme.hpp"

// Binary message layout shared by client, server and proxy.
//
// Every frame is  length(u32 LE, body bytes) | type(u8) | body.
//   QUERY  body: p(u64) n(u32) w(u32) server_point(u64) f_shares(n x u64) h_shares(n x u64)
//   ANSWER body: a(w x u64) b(w x u64)
//   ERROR  body: code(u16)
// All integers little-endian.
namespace apir::wire {

inline constexpr std::size_t kElementBytes = 8;
inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::size_t kQueryHeaderBytes = 24;
inline constexpr std::uint32_t kMaxBodyBytes = std::uint32_t{1} << 30;

enum class FrameType : std::uint8_t { query = 1, answer = 2, error = 3 };

enum class ErrorCode : std::uint16_t {
  parameter_mismatch = 1,
  malformed = 2,
  upstream_unavailable = 3,
};

struct Frame {
  FrameType type;
  std::vector<std::uint8_t> body;
};

struct QueryFrame {
  std::uint64_t p;
  std::uint32_t n;
  std::uint32_t w;
  Query query;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t offset);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset);

std::vector<std::uint8_t> encode_frame(FrameType type, std::span<const std::uint8_t> body);
/// Parses exactly one complete frame; throws FormatError otherwise.
Frame decode_frame(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_query_frame(const SchemeParams& params, const Query& query);
std::vector<std::uint8_t> encode_answer_frame(const Answer& answer);
std::vector<std::uint8_t> encode_error_frame(ErrorCode code);

/// Throws FormatError on bad length, a non-prime p, or an element >= p.
QueryFrame decode_query_body(std::span<const std::uint8_t> body);
/// Throws FormatError unless the body holds exactly 2w elements below p.
Answer decode_answer_body(std::span<const std::uint8_t> body, const PrimeField& field, std::size_t w);
ErrorCode decode_error_body(std::span<const std::uint8_t> body);

}  // namespace apir::wire
