#pragma once

// Integer polynomials in t for Poincare-polynomial bookkeeping, and the
// Bott-Morse check
//
//   sum_C t^lambda(C) P_C(t) - P_M(t) = (1 + t) R(t),  R >= 0 coefficientwise.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lvl/variational.hpp"

namespace lvl {

class IntPolynomial {
 public:
  IntPolynomial() = default;
  /// coeffs[i] is the coefficient of t^i; trailing zeros are dropped.
  explicit IntPolynomial(std::vector<std::int64_t> coeffs);
  IntPolynomial(std::initializer_list<std::int64_t> coeffs);

  static IntPolynomial monomial(std::int64_t coeff, std::size_t degree);

  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::int64_t coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }
  std::span<const std::int64_t> coeffs() const { return coeffs_; }

  /// Value at t = -1.
  std::int64_t at_minus_one() const;

  IntPolynomial& operator+=(const IntPolynomial& o);
  IntPolynomial& operator-=(const IntPolynomial& o);
  friend IntPolynomial operator+(IntPolynomial p, const IntPolynomial& q) { return p += q; }
  friend IntPolynomial operator-(IntPolynomial p, const IntPolynomial& q) { return p -= q; }
  friend IntPolynomial operator*(const IntPolynomial& p, const IntPolynomial& q);
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  /// e.g. "t + 2t^2 + t^3"; "0" for the zero polynomial.
  std::string to_string() const;

 private:
  void trim();
  std::vector<std::int64_t> coeffs_;
};

struct CriticalManifoldDatum {
  int lambda = 0;  // transversal index
  IntPolynomial poincare{1};
};

/// Isolated point (nullity 0) -> P = 1, circle (nullity 1) -> P = 1 + t,
/// lambda = transversal index. Throws for nullity > 1.
CriticalManifoldDatum datum_from_morse(const MorseData& m);

struct BottMorseResult {
  IntPolynomial difference;  // sum t^lambda P_C - P_M
  IntPolynomial quotient;    // R(t) when divisible
  std::int64_t remainder = 0;
  bool divisible = false;
  bool ok = false;  // divisible and R has no negative coefficient
};

BottMorseResult bott_morse_check(std::span<const CriticalManifoldDatum> criticals,
                                 const IntPolynomial& manifold_poincare);

}  // namespace lvl
