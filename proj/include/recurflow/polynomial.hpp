#pragma once

// Real polynomials in the weight variable gamma, stored lowest degree first.

#include <cstddef>
#include <vector>

#include "recurflow/double_double.hpp"

namespace recurflow {

class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  // coeffs[n] multiplies gamma^n; trailing zeros removed so that
  // degree() == coeffs().size() - 1 (the zero polynomial has no coefficients).
  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(std::size_t n) const { return n < c_.size() ? c_[n] : 0.0; }

  template <typename T>
  T eval(T x) const {
    T r{0.0};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + T{*it};
    return r;
  }
  double operator()(double x) const { return eval<double>(x); }

  RealPolynomial derivative() const {
    if (c_.size() <= 1) return RealPolynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t n = 1; n < c_.size(); ++n) d[n - 1] = n * c_[n];
    return RealPolynomial(std::move(d));
  }

  // int_0^1 p = sum a_n/(n+1), exact from coefficients.
  double integral01() const {
    double s = 0.0;
    for (std::size_t n = c_.size(); n-- > 0;) s += c_[n] / (n + 1.0);
    return s;
  }

  // int_0^1 p(g) * g dg = sum a_n/(n+2).
  double first_moment01() const {
    double s = 0.0;
    for (std::size_t n = c_.size(); n-- > 0;) s += c_[n] / (n + 2.0);
    return s;
  }

  // p(1 - gamma) by binomial expansion.
  RealPolynomial reflected() const;

  RealPolynomial operator+(const RealPolynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return RealPolynomial(std::move(r));
  }

  // max over [0,1] of |p|, from endpoint values and critical points.
  double sup_norm01() const;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

}  // namespace recurflow
