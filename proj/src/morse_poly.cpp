#include "lvl/morse_poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace lvl {

IntPolynomial::IntPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntPolynomial::IntPolynomial(std::initializer_list<std::int64_t> coeffs) : coeffs_(coeffs) { trim(); }

IntPolynomial IntPolynomial::monomial(std::int64_t coeff, std::size_t degree) {
  std::vector<std::int64_t> c(degree + 1, 0);
  c[degree] = coeff;
  return IntPolynomial(std::move(c));
}

void IntPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

std::int64_t IntPolynomial::at_minus_one() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += (i % 2 == 0) ? coeffs_[i] : -coeffs_[i];
  return s;
}

IntPolynomial& IntPolynomial::operator+=(const IntPolynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

IntPolynomial& IntPolynomial::operator-=(const IntPolynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

IntPolynomial operator*(const IntPolynomial& p, const IntPolynomial& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<std::int64_t> c(p.coeffs_.size() + q.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < q.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * q.coeffs_[j];
  }
  return IntPolynomial(std::move(c));
}

std::string IntPolynomial::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::int64_t c = coeffs_[i];
    if (c == 0) continue;
    if (!out.empty()) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    const std::int64_t mag = c < 0 ? -c : c;
    if (mag != 1 || i == 0) out += std::to_string(mag);
    if (i >= 1) out += "t";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out;
}

CriticalManifoldDatum datum_from_morse(const MorseData& m) {
  if (m.nullity == 0) return {m.transversal_index, IntPolynomial{1}};
  if (m.nullity == 1) return {m.transversal_index, IntPolynomial{1, 1}};
  throw std::invalid_argument("bott-morse: critical manifolds of dimension > 1 are not supported");
}

BottMorseResult bott_morse_check(std::span<const CriticalManifoldDatum> criticals,
                                 const IntPolynomial& manifold_poincare) {
  BottMorseResult r;
  for (const auto& c : criticals) {
    if (c.lambda < 0) throw std::invalid_argument("bott-morse: lambda must be >= 0");
    r.difference += IntPolynomial::monomial(1, static_cast<std::size_t>(c.lambda)) * c.poincare;
  }
  r.difference -= manifold_poincare;

  r.remainder = r.difference.at_minus_one();
  r.divisible = r.remainder == 0;
  if (!r.divisible) return r;

  // Synthetic division by (t + 1), from the top coefficient down.
  const auto d = r.difference.coeffs();
  if (!d.empty()) {
    std::vector<std::int64_t> q(d.size() - 1, 0);
    std::int64_t carry = 0;
    for (std::size_t i = d.size() - 1; i >= 1; --i) {
      carry = d[i] - carry;
      q[i - 1] = carry;
    }
    r.quotient = IntPolynomial(std::move(q));
  }
  const auto qc = r.quotient.coeffs();
  r.ok = std::none_of(qc.begin(), qc.end(), [](std::int64_t v) { return v < 0; });
  return r;
}

}  // namespace lvl
