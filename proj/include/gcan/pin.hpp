#pragma once

// Versors, the Pin-group conjugation action and the plane/point embeddings of
// G_{3,0,0} and G_{3,0,1}.

#include <cmath>
#include <span>
#include <vector>

#include "gcan/multivector.hpp"

namespace gcan {

enum class Parity { even, odd };

/// A product of invertible 1-vectors.  Holds only coefficients of a single
/// parity.
class Versor {
 public:
  /// Checks parity; coefficients of the other parity must vanish (up to
  /// 1e-12 of the largest coefficient) and are zeroed.
  static Versor from_multivector(Multivector value) {
    const auto& alg = *value.algebra();
    const double scale = std::max(1.0, value.max_abs());
    double even = 0.0;
    double odd = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
      double& slot = alg.grade(i) % 2 == 0 ? even : odd;
      slot = std::max(slot, std::abs(value[i]));
    }
    Parity parity;
    if (odd <= 1e-12 * scale) {
      parity = Parity::even;
    } else if (even <= 1e-12 * scale) {
      parity = Parity::odd;
    } else {
      throw Error(ErrorCode::mask_violation, "mixed-parity element is not a versor: " + value.to_string());
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
      if ((alg.grade(i) % 2 == 0) != (parity == Parity::even)) value[i] = 0.0;
    }
    return Versor(std::move(value), parity);
  }

  static Versor identity(AlgebraPtr alg) { return Versor(Multivector::scalar(std::move(alg), 1.0), Parity::even); }

  /// A grade-1 element, i.e. a reflection plane.
  static Versor plane(Multivector u) {
    if (!is_homogeneous(u, 1, 0.0)) throw Error(ErrorCode::mask_violation, "plane must be a pure 1-vector");
    return Versor(std::move(u), Parity::odd);
  }

  const Multivector& value() const noexcept { return value_; }
  Parity parity() const noexcept { return parity_; }
  bool is_odd() const noexcept { return parity_ == Parity::odd; }
  const AlgebraPtr& algebra() const noexcept { return value_.algebra(); }

  /// |<v~ v>_0| == 1 within 1e-10.
  bool normalized() const { return std::abs(std::abs(reverse_norm_squared(value_)) - 1.0) <= 1e-10; }

  Versor normalize() const {
    const double s = std::sqrt(std::abs(reverse_norm_squared(value_)));
    if (s <= kVersorTolerance) throw Error(ErrorCode::non_invertible, "cannot normalize a null versor");
    return Versor(value_ / s, parity_);
  }

  Versor inverse() const { return Versor(versor_inverse(value_), parity_); }

  friend Versor operator-(const Versor& v) { return Versor(-v.value_, v.parity_); }

  friend Versor operator*(const Versor& a, const Versor& b) {
    const bool odd = a.is_odd() != b.is_odd();
    return Versor(a.value_ * b.value_, odd ? Parity::odd : Parity::even);
  }

 private:
  Versor(Multivector value, Parity parity) : value_(std::move(value)), parity_(parity) {}

  Multivector value_;
  Parity parity_;
};

/// v -> (-1)^{kl} u v u^{-1}, with the sign applied to each grade l of v.
inline Multivector pin_action(const Versor& u, const Multivector& v) {
  u.value().check_same(v);
  const Multivector inv = versor_inverse(u.value());
  const Multivector signed_v = u.is_odd() ? grade_involution(v) : v;
  return u.value() * signed_v * inv;
}

/// v -> -u v u^{-1} on vectors (pin_action with k = 1).
inline Multivector reflect(const Versor& u, const Multivector& v) {
  if (!(u.is_odd() && is_homogeneous(u.value(), 1, 0.0))) {
    throw Error(ErrorCode::mask_violation, "reflect expects a single grade-1 plane");
  }
  return pin_action(u, v);
}

/// Product planes[0] planes[1] ... planes[m-1].  Under pin_action the LAST
/// plane acts first: pin_action(compose({p, q}), v) == reflect(p, reflect(q, v)).
inline Versor compose_reflections(const AlgebraPtr& alg, std::span<const Versor> planes) {
  Versor acc = Versor::identity(alg);
  for (const auto& plane : planes) {
    (void)versor_inverse(plane.value());
    acc = acc * plane;
  }
  return acc;
}

/// The 3x3 (or n x n) matrix acting on the vector blades, column j being the
/// image of the j-th basis vector.  Row-major.
inline std::vector<double> induced_vector_map(const Versor& u) {
  const auto& alg = u.algebra();
  const auto blades = alg->grade_blades(1);
  const std::size_t n = blades.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Multivector img = pin_action(u, Multivector::blade(alg, blades[j]));
    for (std::size_t i = 0; i < n; ++i) m[i * n + j] = img[blades[i]];
  }
  return m;
}

// ---------------------------------------------------------------------------
// G_{3,0,1} planes and points.

inline bool is_pga3(const Algebra& alg) { return alg.signature() == Signature(3, 0, 1); }

inline void require_pga3(const Algebra& alg) {
  if (!is_pga3(alg)) throw Error(ErrorCode::signature_mismatch, "expected G(3,0,1), got G(" + alg.signature().describe() + ")");
}

/// Plane a x + b y + c z + delta = 0.
struct PlaneG301 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double delta = 0.0;

  Multivector embed(const AlgebraPtr& alg) const {
    require_pga3(*alg);
    Multivector u(alg);
    u[alg->index_of(0b0001)] = delta;
    u[alg->index_of(0b0010)] = a;
    u[alg->index_of(0b0100)] = b;
    u[alg->index_of(0b1000)] = c;
    return u;
  }

  Versor to_versor(const AlgebraPtr& alg) const {
    if (a == 0.0 && b == 0.0 && c == 0.0) throw Error(ErrorCode::non_invertible, "plane normal is zero");
    return Versor::plane(embed(alg));
  }
};

struct PointG301 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;
};

/// Trivector layout of a point.  x sits on e023, y on e013, z on e012 and the
/// homogeneous weight on e123.  The signs are the ones under which a motor
/// built from reflections moves extracted coordinates by the matching rigid
/// motion (checked by the translation and rotation tests).
struct PointLayout {
  static constexpr BladeBits x_blade = 0b1101;  // e023
  static constexpr BladeBits y_blade = 0b1011;  // e013
  static constexpr BladeBits z_blade = 0b0111;  // e012
  static constexpr BladeBits w_blade = 0b1110;  // e123
  static constexpr double x_sign = -1.0;
  static constexpr double y_sign = 1.0;
  static constexpr double z_sign = -1.0;
};

inline Multivector embed_point(const AlgebraPtr& alg, const PointG301& p) {
  require_pga3(*alg);
  Multivector m(alg);
  m[alg->index_of(PointLayout::x_blade)] = PointLayout::x_sign * p.x * p.w;
  m[alg->index_of(PointLayout::y_blade)] = PointLayout::y_sign * p.y * p.w;
  m[alg->index_of(PointLayout::z_blade)] = PointLayout::z_sign * p.z * p.w;
  m[alg->index_of(PointLayout::w_blade)] = p.w;
  return m;
}

/// Reads (x, y, z) after dividing by the e123 weight; |weight| < 1e-12 is an
/// error (no points at infinity).
inline PointG301 extract_point(const Multivector& m) {
  const auto& alg = *m.algebra();
  require_pga3(alg);
  const double w = m[alg.index_of(PointLayout::w_blade)];
  if (std::abs(w) < 1e-12) throw Error(ErrorCode::non_invertible, "point has zero homogeneous weight");
  PointG301 p;
  p.x = PointLayout::x_sign * m[alg.index_of(PointLayout::x_blade)] / w;
  p.y = PointLayout::y_sign * m[alg.index_of(PointLayout::y_blade)] / w;
  p.z = PointLayout::z_sign * m[alg.index_of(PointLayout::z_blade)] / w;
  p.w = 1.0;
  return p;
}

/// Translator moving points by (dx, dy, dz), built from two reflections in
/// parallel planes half the distance apart.
inline Versor translator(const AlgebraPtr& alg, double dx, double dy, double dz) {
  const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (d == 0.0) return Versor::identity(alg);
  const double nx = dx / d, ny = dy / d, nz = dz / d;
  const Versor planes[] = {PlaneG301{nx, ny, nz, 0.0}.to_versor(alg), PlaneG301{nx, ny, nz, d / 2}.to_versor(alg)};
  return compose_reflections(alg, planes);
}

/// Rotor for a rotation by angle about the unit axis through the origin, as
/// two reflections in planes meeting at angle/2.  Works in G_{3,0,0} and
/// G_{3,0,1}.
inline Versor rotor(const AlgebraPtr& alg, double ax, double ay, double az, double angle) {
  const int off = alg->signature().r();
  if (alg->n() - off != 3) throw Error(ErrorCode::signature_mismatch, "rotor needs three Euclidean basis vectors");
  const double len = std::sqrt(ax * ax + ay * ay + az * az);
  if (len == 0.0) throw Error(ErrorCode::invalid_config, "zero rotation axis");
  ax /= len, ay /= len, az /= len;
  // Any unit vector p orthogonal to the axis, and q = p rotated by angle/2.
  double px = 0, py = 0, pz = 0;
  if (std::abs(ax) < 0.9) {
    // p = axis x e_x
    px = 0, py = az, pz = -ay;
  } else {
    px = -az, py = 0, pz = ax;
  }
  const double pl = std::sqrt(px * px + py * py + pz * pz);
  px /= pl, py /= pl, pz /= pl;
  const double cx = ay * pz - az * py, cy = az * px - ax * pz, cz = ax * py - ay * px;
  const double h = angle / 2;
  const double qx = std::cos(h) * px + std::sin(h) * cx;
  const double qy = std::cos(h) * py + std::sin(h) * cy;
  const double qz = std::cos(h) * pz + std::sin(h) * cz;
  auto vec = [&](double x, double y, double z) {
    Multivector u(alg);
    u[alg->index_of(BladeBits{1} << off)] = x;
    u[alg->index_of(BladeBits{1} << (off + 1))] = y;
    u[alg->index_of(BladeBits{1} << (off + 2))] = z;
    return Versor::plane(u);
  };
  // Reflect in p first, then in q: rotation by 2 * (angle/2) from p toward q.
  const Versor planes[] = {vec(qx, qy, qz), vec(px, py, pz)};
  return compose_reflections(alg, planes);
}

}  // namespace gcan
