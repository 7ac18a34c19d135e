#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "apir/field.hpp"
#include "apir/random.hpp"

namespace apir {

/// Parameters of one protocol instance.
///
/// ell servers, privacy threshold t, n database blocks of w field elements
/// each, over Z_p with p >= 2^kappa. The scheme tolerates ell-1 malicious
/// servers for integrity and is perfectly t-private for queries.
struct SchemeParams {
  unsigned kappa;
  std::size_t ell;
  std::size_t t;
  std::size_t n;
  std::size_t w;
  PrimeField field;

  /// kappa defaults to floor(log2 p), the largest value the field supports.
  static SchemeParams make(std::uint64_t p, std::size_t ell, std::size_t t, std::size_t n, std::size_t w,
                           std::optional<unsigned> kappa = std::nullopt);

  /// Throws UsageError when an invariant does not hold.
  void validate() const;

  std::uint64_t modulus() const noexcept { return field.modulus(); }
};

/// n blocks of w elements, stored block-major. Immutable once built.
class Database {
 public:
  Database(const PrimeField& field, std::size_t n, std::size_t w, std::vector<FieldElement> elements);
  static Database from_blocks(const PrimeField& field, const std::vector<std::vector<FieldElement>>& blocks);
  static Database random(const PrimeField& field, std::size_t n, std::size_t w, RandomSource& rng);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t w() const noexcept { return w_; }
  /// Block i for i in [1, n].
  std::span<const FieldElement> block(std::size_t index) const;
  std::vector<FieldElement> block_copy(std::size_t index) const;
  const std::vector<FieldElement>& elements() const noexcept { return elements_; }

  friend bool operator==(const Database&, const Database&) = default;

 private:
  PrimeField field_;
  std::size_t n_;
  std::size_t w_;
  std::vector<FieldElement> elements_;
};

/// What server j receives: its share of e_alpha (degree t) and of r * e_alpha
/// (degree ell-1).
struct Query {
  FieldElement server_point;
  std::vector<FieldElement> f_shares;
  std::vector<FieldElement> h_shares;

  friend bool operator==(const Query&, const Query&) = default;
};

/// Client-side reconstruction state. Never sent to a server.
struct Aux {
  std::size_t alpha;
  FieldElement r;
  SchemeParams params;
};

/// Server reply: data channel a and tag channel b, w elements each.
struct Answer {
  std::vector<FieldElement> a;
  std::vector<FieldElement> b;

  friend bool operator==(const Answer&, const Answer&) = default;
};

/// Either the retrieved block or the rejection symbol.
class RetrievalResult {
 public:
  static RetrievalResult value(std::vector<FieldElement> block) { return RetrievalResult(std::move(block)); }
  static RetrievalResult bot() { return RetrievalResult(std::nullopt); }

  bool is_bot() const noexcept { return !block_.has_value(); }
  /// Throws UsageError on Bot.
  const std::vector<FieldElement>& block() const;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;

 private:
  explicit RetrievalResult(std::optional<std::vector<FieldElement>> block) : block_(std::move(block)) {}
  std::optional<std::vector<FieldElement>> block_;
};

struct QueryBundle {
  std::vector<Query> queries;  // server order, queries[j-1] goes to server j
  Aux aux;
};

/// Client query generation for 1-based index alpha.
///
/// Randomness is consumed in a fixed order: r (nonzero), then the data
/// sharing coefficients, then the tag sharing coefficients.
QueryBundle que(const SchemeParams& params, std::size_t alpha, RandomSource& rng);

/// Server answer: per component c, a[c] = sum_i x_i[c] f_i and b[c] = sum_i x_i[c] h_i.
Answer ans(const Database& db, const Query& query);

/// Reconstruction with degree-consistency and tag checks. answers[j-1] must be
/// server j's answer; a wrong count or width throws UsageError.
RetrievalResult rec(const std::vector<Answer>& answers, const Aux& aux);

/// Coalition queries drawn without alpha: every share uniform and independent.
/// Members are 1-based server indices; at most ell-1 of them.
std::map<std::size_t, Query> sim_queries(const SchemeParams& params, const std::vector<std::size_t>& coalition,
                                         RandomSource& rng);

/// Bytes moved by one retrieval. Payload counts field elements only; totals
/// include the QUERY / ANSWER frame headers of the wire protocol.
struct CommCost {
  std::uint64_t upload_payload;
  std::uint64_t download_payload;
  std::uint64_t upload_total;
  std::uint64_t download_total;

  friend bool operator==(const CommCost&, const CommCost&) = default;
};

CommCost comm_cost(const SchemeParams& params);

}  // namespace apir
