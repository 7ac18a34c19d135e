#include "apir/field.hpp"

#include <array>
#include <bit>
#include <ostream>
#include <string>

#include "apir/errors.hpp"

namespace apir {
namespace {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exponent, std::uint64_t m) noexcept {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exponent != 0) {
    if (exponent & 1U) result = detail::mul_mod(result, base, m);
    base = detail::mul_mod(base, base, m);
    exponent >>= 1U;
  }
  return result;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  // These twelve bases make Miller-Rabin deterministic for all n < 2^64.
  constexpr std::array<std::uint64_t, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = detail::mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p < 2 || p >= kMaxModulus) {
    throw ValidationError("field modulus " + std::to_string(p) + " outside [2, 2^62)");
  }
  if (!is_prime_u64(p)) throw ValidationError("field modulus " + std::to_string(p) + " is not prime");
}

FieldElement PrimeField::element(std::uint64_t v) const {
  return FieldElement(v % p_, p_, FieldElement::Unchecked{});
}

FieldElement PrimeField::checked(std::uint64_t v) const {
  if (v >= p_) {
    throw ValidationError("element " + std::to_string(v) + " not below modulus " + std::to_string(p_));
  }
  return FieldElement(v, p_, FieldElement::Unchecked{});
}

FieldElement PrimeField::zero() const { return FieldElement(0, p_, FieldElement::Unchecked{}); }
FieldElement PrimeField::one() const { return FieldElement(1, p_, FieldElement::Unchecked{}); }

unsigned PrimeField::bits_per_element() const noexcept {
  return static_cast<unsigned>(std::bit_width(p_) - 1);
}

FieldElement::FieldElement(std::uint64_t value, const PrimeField& field)
    : FieldElement(field.checked(value)) {}

void FieldElement::require_same_field(const FieldElement& other) const {
  if (p_ != other.p_) {
    throw UsageError("arithmetic between Z_" + std::to_string(p_) + " and Z_" + std::to_string(other.p_));
  }
}

FieldElement& FieldElement::operator+=(const FieldElement& rhs) {
  require_same_field(rhs);
  value_ = detail::add_mod(value_, rhs.value_, p_);
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& rhs) {
  require_same_field(rhs);
  value_ = value_ >= rhs.value_ ? value_ - rhs.value_ : value_ + p_ - rhs.value_;
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& rhs) {
  require_same_field(rhs);
  value_ = detail::mul_mod(value_, rhs.value_, p_);
  return *this;
}

FieldElement FieldElement::operator-() const {
  return FieldElement(value_ == 0 ? 0 : p_ - value_, p_, Unchecked{});
}

FieldElement FieldElement::pow(std::uint64_t exponent) const {
  return FieldElement(pow_mod(value_, exponent, p_), p_, Unchecked{});
}

FieldElement FieldElement::inverse() const {
  if (value_ == 0) throw DomainError("zero has no inverse in Z_" + std::to_string(p_));
  return pow(p_ - 2);
}

std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
  return os << e.value() << " (mod " << e.modulus() << ')';
}

std::vector<std::uint64_t> values_of(const std::vector<FieldElement>& elements) {
  std::vector<std::uint64_t> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(e.value());
  return out;
}

}  // namespace apir
