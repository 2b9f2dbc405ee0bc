#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcan/algebra.hpp"
#include "gcan/error.hpp"

namespace gcan {

/// Tolerance for "is this scalar part zero / is this product scalar" checks.
inline constexpr double kVersorTolerance = 1e-10;

/// Dense multivector: one f64 coefficient per blade in canonical order.
class Multivector {
 public:
  Multivector() = default;
  explicit Multivector(AlgebraPtr alg) : alg_(std::move(alg)), c_(alg_->dim(), 0.0) {}
  Multivector(AlgebraPtr alg, std::vector<double> coeffs) : alg_(std::move(alg)), c_(std::move(coeffs)) {
    if (c_.size() != alg_->dim()) {
      throw Error(ErrorCode::shape_mismatch,
                  "expected " + std::to_string(alg_->dim()) + " coefficients, got " + std::to_string(c_.size()));
    }
  }

  static Multivector scalar(AlgebraPtr alg, double v) {
    Multivector m(std::move(alg));
    m.c_[0] = v;
    return m;
  }

  static Multivector blade(AlgebraPtr alg, std::size_t index, double v = 1.0) {
    Multivector m(std::move(alg));
    m.c_.at(index) = v;
    return m;
  }

  /// Basis vector at position i (0-based, see algebra.hpp for the order).
  static Multivector basis_vector(AlgebraPtr alg, int i, double v = 1.0) {
    const std::size_t idx = alg->index_of(BladeBits{1} << i);
    return blade(std::move(alg), idx, v);
  }

  static Multivector parse(AlgebraPtr alg, std::string_view text);

  const AlgebraPtr& algebra() const noexcept { return alg_; }
  std::size_t size() const noexcept { return c_.size(); }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<double> coeffs() noexcept { return c_; }
  std::span<const double> coeffs() const noexcept { return c_; }

  /// Coefficient by blade name, e.g. m.at("e12").  Sign-canonicalizes "e21".
  double at(std::string_view name) const {
    auto [sign, idx] = lookup(name);
    return sign * c_[idx];
  }

  Multivector& operator+=(const Multivector& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Multivector& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Multivector& operator/=(double s) {
    for (double& v : c_) v /= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, double s) { return a *= s; }
  friend Multivector operator*(double s, Multivector a) { return a *= s; }
  friend Multivector operator/(Multivector a, double s) { return a /= s; }
  friend Multivector operator-(Multivector a) {
    for (double& v : a.c_) v = -v;
    return a;
  }

  bool same_algebra(const Multivector& o) const noexcept {
    return alg_ == o.alg_ || (alg_ && o.alg_ && alg_->signature() == o.alg_->signature());
  }

  void check_same(const Multivector& o) const {
    if (!same_algebra(o)) {
      throw Error(ErrorCode::signature_mismatch,
                  "G(" + alg_->signature().describe() + ") vs G(" + o.alg_->signature().describe() + ")");
    }
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  std::string to_string(int precision = 6) const;

 private:
  std::pair<int, std::size_t> lookup(std::string_view name) const {
    if (name == "1" || name.empty()) return {1, 0};
    if (name.front() != 'e') throw Error(ErrorCode::parse_error, "bad blade name \"" + std::string(name) + "\"");
    return alg_->blade_from_labels(name.substr(1));
  }

  AlgebraPtr alg_;
  std::vector<double> c_;
};

/// out[i] += M[i][j][k] x[j] y[k], driven by the Cayley table.
inline void geometric_product_into(const CayleyTable& table, std::span<const double> x, std::span<const double> y,
                                   std::span<double> out) {
  const std::size_t dim = table.dim();
  for (std::size_t j = 0; j < dim; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t k = 0; k < dim; ++k) {
      const auto& e = table.entry(j, k);
      if (e.sign == 0 || y[k] == 0.0) continue;
      out[e.index] += e.sign * xj * y[k];
    }
  }
}

inline Multivector geometric_product(const Multivector& x, const Multivector& y) {
  x.check_same(y);
  Multivector out(x.algebra());
  geometric_product_into(x.algebra()->table(), x.coeffs(), y.coeffs(), out.coeffs());
  return out;
}

inline Multivector operator*(const Multivector& x, const Multivector& y) { return geometric_product(x, y); }

inline Multivector grade_part(const Multivector& x, int k) {
  const auto& alg = *x.algebra();
  if (k < 0 || k > alg.n()) {
    throw Error(ErrorCode::grade_out_of_range, "grade " + std::to_string(k) + " not in [0, " + std::to_string(alg.n()) + "]");
  }
  Multivector out(x.algebra());
  for (std::size_t i : alg.grade_blades(k)) out[i] = x[i];
  return out;
}

inline double scalar_part(const Multivector& x) { return x[0]; }

inline Multivector reverse(const Multivector& x) {
  Multivector out = x;
  const auto& alg = *x.algebra();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= alg.reverse_sign(i);
  return out;
}

/// Scalar part of reverse(x) x, computed without forming the full product.
inline double reverse_norm_squared(const Multivector& x) {
  const auto& alg = *x.algebra();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += alg.reverse_sign(i) * alg.square_sign(i) * x[i] * x[i];
  return s;
}

/// ||x|| = sqrt(|<x~ x>_0|).  Requires x~ x to be scalar up to tolerance on
/// the non-degenerate blades; components on blades containing a null vector
/// are ignored (the "study norm" reading for r > 0).
inline double norm(const Multivector& x) {
  const auto& alg = *x.algebra();
  const Multivector rx = reverse(x) * x;
  const double scale = std::max(1.0, rx.max_abs());
  for (std::size_t i = 1; i < rx.size(); ++i) {
    if (alg.is_degenerate(i)) continue;
    if (std::abs(rx[i]) > kVersorTolerance * scale) {
      throw Error(ErrorCode::not_normable, "x~x has a " + alg.blade_name(i) + " component " + std::to_string(rx[i]));
    }
  }
  return std::sqrt(std::abs(rx[0]));
}

/// u^{-1} = u~ / <u~ u>_0.  Exact for versors; errors for null u.
inline Multivector versor_inverse(const Multivector& u) {
  const double s = reverse_norm_squared(u);
  if (std::abs(s) <= kVersorTolerance) {
    throw Error(ErrorCode::non_invertible, "<u~u>_0 = " + std::to_string(s));
  }
  return reverse(u) / s;
}

inline Multivector pseudoscalar(const AlgebraPtr& alg) { return Multivector::blade(alg, alg->pseudoscalar()); }

/// x I.  In degenerate algebras components carrying a null vector collapse.
inline Multivector dual(const Multivector& x) { return x * pseudoscalar(x.algebra()); }

inline Multivector grade_involution(const Multivector& x) {
  Multivector out = x;
  const auto& alg = *x.algebra();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (alg.grade(i) % 2 == 1) out[i] = -out[i];
  }
  return out;
}

/// True when every coefficient outside the given grade is below tol.
inline bool is_homogeneous(const Multivector& x, int k, double tol) {
  const auto& alg = *x.algebra();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (alg.grade(i) != k && std::abs(x[i]) > tol) return false;
  }
  return true;
}

inline double max_abs_diff(const Multivector& a, const Multivector& b) {
  a.check_same(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Textual format: "3.0 + 2.0*e1 - 0.5*e12".  Terms are "[coef*]blade" or a
// bare number; whitespace is ignored; "e21" canonicalizes to "-e12".
inline Multivector Multivector::parse(AlgebraPtr alg, std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t' && ch != '\n') s.push_back(ch);
  }
  Multivector out(alg);
  if (s.empty()) throw Error(ErrorCode::parse_error, "empty multivector");
  std::size_t pos = 0;
  while (pos < s.size()) {
    double sign = 1.0;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    std::size_t end = pos;
    // Scan to the next term separator, skipping exponent signs.
    while (end < s.size()) {
      const char ch = s[end];
      if ((ch == '+' || ch == '-') && end > pos) {
        const char prev = s[end - 1];
        const bool exponent = (prev == 'e' || prev == 'E') && end >= 2 &&
                              (std::isdigit(static_cast<unsigned char>(s[end - 2])) || s[end - 2] == '.');
        if (!exponent) break;
      }
      ++end;
    }
    const std::string term = s.substr(pos, end - pos);
    if (term.empty()) throw Error(ErrorCode::parse_error, "dangling sign in \"" + std::string(text) + "\"");
    double coef = 1.0;
    std::string blade_name;
    const auto star = term.find('*');
    if (star != std::string::npos) {
      blade_name = term.substr(star + 1);
      const std::string num = term.substr(0, star);
      std::size_t used = 0;
      try {
        coef = std::stod(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != num.size() || num.empty()) throw Error(ErrorCode::parse_error, "bad coefficient \"" + num + "\"");
    } else if (term[0] == 'e' && term.size() > 1 && std::isdigit(static_cast<unsigned char>(term[1]))) {
      blade_name = term;
    } else {
      std::size_t used = 0;
      try {
        coef = std::stod(term, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != term.size()) throw Error(ErrorCode::parse_error, "bad term \"" + term + "\"");
      blade_name = "1";
    }
    if (blade_name.empty()) throw Error(ErrorCode::parse_error, "missing blade after '*'");
    auto [bsign, idx] = out.lookup(blade_name);
    out[idx] += sign * bsign * coef;
    pos = end;
  }
  return out;
}

inline std::string Multivector::to_string(int precision) const {
  std::ostringstream os;
  os << std::setprecision(precision);
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const double v = c_[i];
    if (v == 0.0) continue;
    if (first) {
      if (v < 0) os << "-";
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    os << std::abs(v);
    if (i != 0) os << "*" << alg_->blade_name(i);
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace gcan
