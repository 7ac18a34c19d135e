#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "apir/errors.hpp"
#include "apir/storage.hpp"
#include "apir/wire.hpp"

namespace apir {
namespace {

using Bytes = std::vector<std::uint8_t>;

std::vector<FieldElement> elems(const PrimeField& f, std::initializer_list<std::uint64_t> vs) {
  std::vector<FieldElement> out;
  for (auto v : vs) out.push_back(f.element(v));
  return out;
}

Bytes le64(std::uint64_t v) {
  Bytes out;
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return out;
}

Bytes cat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const Bytes kDbGolden = cat({{'A', 'P', 'D', 'B', 1}, le64(7), {2, 0, 0, 0}, {1, 0, 0, 0}, le64(3), le64(5)});

TEST(DbFile, GoldenBytes) {
  const PrimeField f(7);
  const Database db(f, 2, 1, elems(f, {3, 5}));
  const Bytes encoded = encode_database(db);
  EXPECT_EQ(encoded.size(), 37U);
  EXPECT_EQ(encoded, kDbGolden);
  EXPECT_EQ(decode_database(kDbGolden), db);
}

TEST(DbFile, FileRoundTrip) {
  const PrimeField f(257);
  SeededRandom rng(1);
  const Database db = Database::random(f, 9, 3, rng);
  const auto path = std::filesystem::temp_directory_path() / "apir_storage_test.db";
  write_database(path, db);
  EXPECT_EQ(std::filesystem::file_size(path), kDbHeaderBytes + 8 * 27);
  EXPECT_EQ(read_database(path), db);
  std::filesystem::remove(path);
  EXPECT_THROW(read_database(path), FormatError);
}

TEST(DbFile, Rejections) {
  Bytes bad = kDbGolden;
  bad[0] = 'X';
  EXPECT_THROW(decode_database(bad), FormatError);
  bad = kDbGolden;
  bad[4] = 2;
  EXPECT_THROW(decode_database(bad), FormatError);
  bad = kDbGolden;
  bad.pop_back();
  EXPECT_THROW(decode_database(bad), FormatError);
  bad = kDbGolden;
  bad.push_back(0);
  EXPECT_THROW(decode_database(bad), FormatError);
  bad = kDbGolden;
  bad[13] = 0;  // n = 0
  EXPECT_THROW(decode_database(bad), FormatError);
  bad = kDbGolden;
  bad[21] = 7;  // element == p
  EXPECT_THROW(decode_database(bad), ValidationError);
  bad = kDbGolden;
  bad[5] = 8;  // p = 8
  EXPECT_THROW(decode_database(bad), ValidationError);
  EXPECT_THROW(decode_database(Bytes{'A', 'P'}), FormatError);
}

TEST(WireFrame, QueryGolden) {
  const auto params = SchemeParams::make(7, 3, 1, 1, 1);
  const PrimeField& f = params.field;
  const Bytes expected =
      cat({{40, 0, 0, 0, 1}, le64(7), {1, 0, 0, 0}, {1, 0, 0, 0}, le64(2), le64(3), le64(4)});
  const Bytes got = wire::encode_query_frame(params, Query{f.element(2), elems(f, {3}), elems(f, {4})});
  EXPECT_EQ(got.size(), 29U + 16U);
  EXPECT_EQ(got, expected);

  const auto frame = wire::decode_frame(got);
  EXPECT_EQ(frame.type, wire::FrameType::query);
  const auto q = wire::decode_query_body(frame.body);
  EXPECT_EQ(q.p, 7U);
  EXPECT_EQ(q.n, 1U);
  EXPECT_EQ(q.w, 1U);
  EXPECT_EQ(q.query, (Query{f.element(2), elems(f, {3}), elems(f, {4})}));
}

TEST(WireFrame, AnswerGolden) {
  const PrimeField f(7);
  const Bytes expected = cat({{16, 0, 0, 0, 2}, le64(6), le64(5)});
  const Answer a{elems(f, {6}), elems(f, {5})};
  EXPECT_EQ(wire::encode_answer_frame(a), expected);
  const auto frame = wire::decode_frame(expected);
  EXPECT_EQ(wire::decode_answer_body(frame.body, f, 1), a);
}

TEST(WireFrame, ErrorGolden) {
  EXPECT_EQ(wire::encode_error_frame(wire::ErrorCode::parameter_mismatch), (Bytes{2, 0, 0, 0, 3, 1, 0}));
  EXPECT_EQ(wire::encode_error_frame(wire::ErrorCode::malformed), (Bytes{2, 0, 0, 0, 3, 2, 0}));
  EXPECT_EQ(wire::decode_error_body(Bytes{1, 0}), wire::ErrorCode::parameter_mismatch);
}

TEST(WireFrame, FrameSizesFollowParameters) {
  const auto params = SchemeParams::make(257, 4, 2, 10, 3);
  SeededRandom rng(2);
  const auto bundle = que(params, 4, rng);
  const Database db = Database::random(params.field, 10, 3, rng);
  EXPECT_EQ(wire::encode_query_frame(params, bundle.queries[0]).size(), 29U + 16 * 10);
  EXPECT_EQ(wire::encode_answer_frame(ans(db, bundle.queries[0])).size(), 5U + 16 * 3);
}

TEST(WireFrame, Rejections) {
  EXPECT_THROW(wire::decode_frame(Bytes{1, 0, 0}), FormatError);
  EXPECT_THROW(wire::decode_frame(Bytes{2, 0, 0, 0, 3, 1}), FormatError);
  EXPECT_THROW(wire::decode_frame(Bytes{0, 0, 0, 0, 9}), FormatError);

  const auto params = SchemeParams::make(7, 3, 1, 1, 1);
  const PrimeField& f = params.field;
  const Bytes good = wire::encode_query_frame(params, Query{f.element(2), elems(f, {3}), elems(f, {4})});
  Bytes body(good.begin() + 5, good.end());
  Bytes bad = body;
  bad.pop_back();
  EXPECT_THROW(wire::decode_query_body(bad), FormatError);
  bad = body;
  bad[0] = 8;  // p not prime
  EXPECT_THROW(wire::decode_query_body(bad), FormatError);
  bad = body;
  bad[16] = 0;  // server point 0
  EXPECT_THROW(wire::decode_query_body(bad), FormatError);
  bad = body;
  bad[24] = 7;  // share >= p
  EXPECT_THROW(wire::decode_query_body(bad), FormatError);
  EXPECT_THROW(wire::decode_answer_body(Bytes(8, 0), f, 1), FormatError);
  EXPECT_THROW(wire::decode_error_body(Bytes{1}), FormatError);
}

TEST(BlockCodec, PacksLeastSignificantBitsFirst) {
  const PrimeField f(5);
  const BlockCodec codec(f, 8);
  EXPECT_EQ(codec.width(), 4U);
  const Bytes block{0xE4};  // 11 10 01 00
  EXPECT_EQ(codec.encode(block), elems(f, {0, 1, 2, 3}));
  EXPECT_EQ(codec.decode(elems(f, {0, 1, 2, 3})), block);
}

TEST(BlockCodec, RoundTripsAcrossPrimesAndLengths) {
  SeededRandom rng(3);
  for (std::uint64_t p : {2ULL, 5ULL, 257ULL, 65537ULL, (1ULL << 61) - 1}) {
    const PrimeField f(p);
    for (std::size_t m : {1U, 8U, 64U, 1000U}) {
      const BlockCodec codec(f, m);
      const std::size_t b = f.bits_per_element();
      EXPECT_EQ(codec.width(), (m + b - 1) / b);
      for (int trial = 0; trial < 20; ++trial) {
        Bytes block((m + 7) / 8);
        for (std::size_t k = 0; k < block.size(); ++k) {
          const std::size_t live = std::min<std::size_t>(8, m - 8 * k);
          block[k] = static_cast<std::uint8_t>(rng.below(1U << live));
        }
        const auto encoded = codec.encode(block);
        ASSERT_EQ(encoded.size(), codec.width());
        for (const auto& e : encoded) ASSERT_LT(e.value(), std::uint64_t{1} << b);
        EXPECT_EQ(codec.decode(encoded), block) << "p=" << p << " m=" << m;
      }
    }
  }
}

TEST(BlockCodec, Rejections) {
  const PrimeField f(5);
  EXPECT_THROW(BlockCodec(f, 0), UsageError);
  const BlockCodec one_bit(f, 1);
  EXPECT_THROW(one_bit.encode(Bytes{0x02}), UsageError);  // padding bit set
  EXPECT_THROW(one_bit.encode(Bytes{0x01, 0x00}), UsageError);
  const BlockCodec byte(f, 8);
  EXPECT_THROW(byte.decode(elems(f, {0, 1, 4, 0})), ValidationError);  // 4 needs 3 bits
  EXPECT_THROW(byte.decode(elems(f, {0, 1})), UsageError);
}

}  // namespace
}  // namespace apir
