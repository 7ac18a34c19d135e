#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace apir {

class FieldElement;

/// The prime field Z_p for a prime p < 2^62.
///
/// Construction verifies primality with a deterministic Miller-Rabin test, so
/// every PrimeField in existence describes a genuine field. Two PrimeField
/// values with the same modulus describe the same field.
class PrimeField {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

  /// Throws ValidationError unless 2 <= p < 2^62 and p is prime.
  explicit PrimeField(std::uint64_t p);

  std::uint64_t modulus() const noexcept { return p_; }

  /// Reduces v modulo p.
  FieldElement element(std::uint64_t v) const;
  /// Throws ValidationError when v >= p.
  FieldElement checked(std::uint64_t v) const;
  FieldElement zero() const;
  FieldElement one() const;

  /// floor(log2 p): the number of payload bits an element can carry verbatim.
  unsigned bits_per_element() const noexcept;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_;
};

bool is_prime_u64(std::uint64_t n) noexcept;

/// A residue in [0, p) tagged with its modulus. Arithmetic across different
/// moduli throws UsageError.
class FieldElement {
 public:
  FieldElement(std::uint64_t value, const PrimeField& field);

  std::uint64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return p_; }
  PrimeField field() const { return PrimeField(p_); }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement& operator+=(const FieldElement& rhs);
  FieldElement& operator-=(const FieldElement& rhs);
  FieldElement& operator*=(const FieldElement& rhs);

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  FieldElement operator-() const;

  FieldElement pow(std::uint64_t exponent) const;
  /// Fermat inverse a^(p-2). Throws DomainError for zero.
  FieldElement inverse() const;
  /// a / b; throws DomainError when b is zero.
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inverse(); }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  struct Unchecked {};
  FieldElement(std::uint64_t value, std::uint64_t p, Unchecked) noexcept : value_(value), p_(p) {}
  void require_same_field(const FieldElement& other) const;

  std::uint64_t value_;
  std::uint64_t p_;

  friend class PrimeField;
};

std::ostream& operator<<(std::ostream& os, const FieldElement& e);

/// Raw values of a sequence of elements, in order.
std::vector<std::uint64_t> values_of(const std::vector<FieldElement>& elements);

namespace detail {

__extension__ using u128 = unsigned __int128;

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) noexcept {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % p);
}

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) noexcept {
  // a, b < p < 2^62 so the sum cannot wrap.
  const std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}

}  // namespace detail

}  // namespace apir
