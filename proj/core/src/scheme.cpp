#include "apir/scheme.hpp"

#include <algorithm>
#include <string>

#include "apir/errors.hpp"
#include "apir/polynomial.hpp"
#include "apir/sharing.hpp"
#include "apir/wire.hpp"

namespace apir {

SchemeParams SchemeParams::make(std::uint64_t p, std::size_t ell, std::size_t t, std::size_t n, std::size_t w,
                                std::optional<unsigned> kappa) {
  PrimeField field(p);
  SchemeParams params{kappa.value_or(field.bits_per_element()), ell, t, n, w, field};
  params.validate();
  return params;
}

void SchemeParams::validate() const {
  if (ell < 2) throw UsageError("need at least 2 servers");
  if (t < 1 || t > ell - 1) throw UsageError("privacy threshold t must lie in [1, ell-1]");
  if (n < 1) throw UsageError("database must hold at least one block");
  if (w < 1) throw UsageError("blocks must hold at least one element");
  if (field.modulus() <= ell) throw UsageError("need p > ell for evaluation points 1..ell");
  if (kappa < 1 || kappa > 62 || field.modulus() < (std::uint64_t{1} << kappa)) {
    throw UsageError("need p >= 2^kappa (kappa=" + std::to_string(kappa) + ")");
  }
}

Database::Database(const PrimeField& field, std::size_t n, std::size_t w, std::vector<FieldElement> elements)
    : field_(field), n_(n), w_(w), elements_(std::move(elements)) {
  if (n_ == 0 || w_ == 0) throw UsageError("database dimensions must be positive");
  if (elements_.size() != n_ * w_) throw UsageError("database is not rectangular");
  for (const auto& e : elements_) {
    if (e.modulus() != field_.modulus()) throw UsageError("database element from another field");
  }
}

Database Database::from_blocks(const PrimeField& field, const std::vector<std::vector<FieldElement>>& blocks) {
  if (blocks.empty()) throw UsageError("empty database");
  const std::size_t w = blocks.front().size();
  std::vector<FieldElement> flat;
  flat.reserve(blocks.size() * w);
  for (const auto& block : blocks) {
    if (block.size() != w) throw UsageError("database is not rectangular");
    flat.insert(flat.end(), block.begin(), block.end());
  }
  return Database(field, blocks.size(), w, std::move(flat));
}

Database Database::random(const PrimeField& field, std::size_t n, std::size_t w, RandomSource& rng) {
  std::vector<FieldElement> flat;
  flat.reserve(n * w);
  for (std::size_t i = 0; i < n * w; ++i) flat.push_back(sample_uniform(field, false, rng));
  return Database(field, n, w, std::move(flat));
}

std::span<const FieldElement> Database::block(std::size_t index) const {
  if (index < 1 || index > n_) throw UsageError("block index out of range");
  return std::span<const FieldElement>(elements_).subspan((index - 1) * w_, w_);
}

std::vector<FieldElement> Database::block_copy(std::size_t index) const {
  const auto b = block(index);
  return {b.begin(), b.end()};
}

const std::vector<FieldElement>& RetrievalResult::block() const {
  if (!block_) throw UsageError("retrieval result is Bot");
  return *block_;
}

QueryBundle que(const SchemeParams& params, std::size_t alpha, RandomSource& rng) {
  params.validate();
  if (alpha < 1 || alpha > params.n) throw UsageError("retrieval index out of range");
  const PrimeField& field = params.field;

  const FieldElement r = sample_uniform(field, true, rng);
  std::vector<FieldElement> unit(params.n, field.zero());
  unit[alpha - 1] = field.one();
  std::vector<FieldElement> tagged(params.n, field.zero());
  tagged[alpha - 1] = r;

  const auto points = canonical_points(field, params.ell);
  auto f = share_vector(unit, params.t, points, rng);
  auto h = share_vector(tagged, params.ell - 1, points, rng);

  QueryBundle bundle{{}, Aux{alpha, r, params}};
  bundle.queries.reserve(params.ell);
  for (std::size_t j = 0; j < params.ell; ++j) {
    bundle.queries.push_back(Query{points[j], std::move(f[j].values), std::move(h[j].values)});
  }
  return bundle;
}

Answer ans(const Database& db, const Query& query) {
  if (query.f_shares.size() != db.n() || query.h_shares.size() != db.n()) {
    throw UsageError("query length does not match database size");
  }
  const std::uint64_t p = db.field().modulus();
  for (const auto* shares : {&query.f_shares, &query.h_shares}) {
    for (const auto& e : *shares) {
      if (e.modulus() != p) throw UsageError("query field does not match database field");
    }
  }
  std::vector<std::uint64_t> a(db.w(), 0);
  std::vector<std::uint64_t> b(db.w(), 0);
  const auto& x = db.elements();
  for (std::size_t i = 0; i < db.n(); ++i) {
    const std::uint64_t f = query.f_shares[i].value();
    const std::uint64_t h = query.h_shares[i].value();
    for (std::size_t c = 0; c < db.w(); ++c) {
      const std::uint64_t v = x[i * db.w() + c].value();
      a[c] = detail::add_mod(a[c], detail::mul_mod(v, f, p), p);
      b[c] = detail::add_mod(b[c], detail::mul_mod(v, h, p), p);
    }
  }
  Answer out;
  out.a.reserve(db.w());
  out.b.reserve(db.w());
  for (std::size_t c = 0; c < db.w(); ++c) {
    out.a.push_back(db.field().element(a[c]));
    out.b.push_back(db.field().element(b[c]));
  }
  return out;
}

RetrievalResult rec(const std::vector<Answer>& answers, const Aux& aux) {
  const SchemeParams& params = aux.params;
  if (answers.size() != params.ell) throw UsageError("expected one answer per server");
  for (const auto& answer : answers) {
    if (answer.a.size() != params.w || answer.b.size() != params.w) {
      throw UsageError("answer width does not match block width");
    }
  }
  const PrimeField& field = params.field;
  const auto points = canonical_points(field, params.ell);
  const auto data_weights =
      lagrange_weights_at_zero(std::vector<FieldElement>(points.begin(), points.begin() + params.t + 1));
  const auto tag_weights = lagrange_weights_at_zero(points);
  const bool check_consistency = params.ell > params.t + 1;

  std::vector<FieldElement> block;
  block.reserve(params.w);
  for (std::size_t c = 0; c < params.w; ++c) {
    if (check_consistency) {
      std::vector<Point> data_points;
      data_points.reserve(params.ell);
      for (std::size_t j = 0; j < params.ell; ++j) data_points.emplace_back(points[j], answers[j].a[c]);
      if (!consistent_with_degree(data_points, params.t)) return RetrievalResult::bot();
    }
    FieldElement data = field.zero();
    for (std::size_t j = 0; j <= params.t; ++j) data += data_weights[j] * answers[j].a[c];
    FieldElement tag = field.zero();
    for (std::size_t j = 0; j < params.ell; ++j) tag += tag_weights[j] * answers[j].b[c];
    if (tag != aux.r * data) return RetrievalResult::bot();
    block.push_back(data);
  }
  return RetrievalResult::value(std::move(block));
}

std::map<std::size_t, Query> sim_queries(const SchemeParams& params, const std::vector<std::size_t>& coalition,
                                         RandomSource& rng) {
  params.validate();
  if (coalition.size() >= params.ell) throw UsageError("simulation of a full coalition is unsupported");
  std::map<std::size_t, Query> out;
  for (std::size_t j : coalition) {
    if (j < 1 || j > params.ell) throw UsageError("coalition member out of range");
    if (out.contains(j)) throw UsageError("duplicate coalition member");
    Query q{params.field.element(j), {}, {}};
    q.f_shares.reserve(params.n);
    q.h_shares.reserve(params.n);
    for (std::size_t i = 0; i < params.n; ++i) q.f_shares.push_back(sample_uniform(params.field, false, rng));
    for (std::size_t i = 0; i < params.n; ++i) q.h_shares.push_back(sample_uniform(params.field, false, rng));
    out.emplace(j, std::move(q));
  }
  return out;
}

CommCost comm_cost(const SchemeParams& params) {
  const std::uint64_t ell = params.ell;
  const std::uint64_t upload_payload = ell * 2 * params.n * wire::kElementBytes;
  const std::uint64_t download_payload = ell * 2 * params.w * wire::kElementBytes;
  return CommCost{
      upload_payload,
      download_payload,
      upload_payload + ell * (wire::kFrameHeaderBytes + wire::kQueryHeaderBytes),
      download_payload + ell * wire::kFrameHeaderBytes,
  };
}

}  // namespace apir
