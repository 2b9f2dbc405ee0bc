#pragma once

// Building blocks shared by the group-action layers: blade masks, the
// precomputed sandwich structure (with its analytic derivative), the
// Cayley-table Clifford kernels, and the closed-form G_{3,0,0} rotation
// matrix.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcan/multivector.hpp"
#include "gcan/pin.hpp"

namespace gcan {

/// Sorted set of blade indices whose action coefficients are free.
using BladeMask = std::vector<std::size_t>;

inline BladeMask grade_mask(const Algebra& alg, std::initializer_list<int> grades) {
  BladeMask m;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    if (std::find(grades.begin(), grades.end(), alg.grade(i)) != grades.end()) m.push_back(i);
  }
  return m;
}

/// Scalar plus bivectors: rotations (G_{3,0,0}) or rotations and
/// translations (G_{3,0,1}).
inline BladeMask rotor_mask(const Algebra& alg) { return grade_mask(alg, {0, 2}); }

inline BladeMask even_mask(const Algebra& alg) {
  BladeMask m;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    if (alg.grade(i) % 2 == 0) m.push_back(i);
  }
  return m;
}

/// Scalar, six bivectors and the quadvector of G_{3,0,1}: screw motions.
inline BladeMask screw_mask(const Algebra& alg) {
  if (alg.signature() != Signature(3, 0, 1)) {
    throw Error(ErrorCode::signature_mismatch, "screw mask is defined for G(3,0,1)");
  }
  return even_mask(alg);
}

inline BladeMask scalar_mask(const Algebra&) { return {0}; }

/// Parses "1,e12,e13" style blade lists.
inline BladeMask parse_mask(const Algebra& alg, std::string_view text) {
  BladeMask m;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](char c) { return c == ' '; }), item.end());
    if (item.empty()) continue;
    if (item == "1") {
      m.push_back(0);
      continue;
    }
    if (item[0] != 'e') throw Error(ErrorCode::parse_error, "bad blade \"" + item + "\"");
    m.push_back(alg.blade_from_labels(item.substr(1)).second);
  }
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

inline std::string format_mask(const Algebra& alg, const BladeMask& mask) {
  std::string out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (i) out += ",";
    out += alg.blade_name(mask[i]);
  }
  return out;
}

/// Parity of a single-parity mask; mixed masks are rejected.
inline Parity mask_parity(const Algebra& alg, const BladeMask& mask) {
  if (mask.empty()) throw Error(ErrorCode::mask_violation, "empty blade mask");
  const int first = alg.grade(mask.front()) % 2;
  for (std::size_t b : mask) {
    if (b >= alg.dim()) throw Error(ErrorCode::mask_violation, "blade index out of range");
    if (alg.grade(b) % 2 != first) {
      throw Error(ErrorCode::mask_violation, "mask mixes even and odd blades: " + format_mask(alg, mask));
    }
  }
  return first == 0 ? Parity::even : Parity::odd;
}

inline std::vector<int> all_grades(const Algebra& alg) {
  std::vector<int> g(static_cast<std::size_t>(alg.n()) + 1);
  for (int k = 0; k <= alg.n(); ++k) g[static_cast<std::size_t>(k)] = k;
  return g;
}

/// Bilinear structure of the map x -> (-1)^{kl} a x a~ / <a~ a>_0 restricted
/// to the masked coefficients of a, split into one square block per
/// processed grade.  Off-grade terms are dropped; for versors (and for every
/// even element of G_{3,0,0} and G_{3,0,1}) there are none.
class SandwichStructure {
 public:
  struct Term {
    std::uint16_t row;
    std::uint16_t col;
    std::uint16_t m1;
    std::uint16_t m2;
    double sign;
  };

  struct GradeBlock {
    int grade = 0;
    std::vector<std::size_t> blades;
    std::size_t offset = 0;  // into the concatenated block storage
    std::vector<Term> terms;
  };

  SandwichStructure() = default;

  SandwichStructure(AlgebraPtr alg, BladeMask mask, std::vector<int> grades)
      : alg_(std::move(alg)), mask_(std::move(mask)) {
    parity_ = mask_parity(*alg_, mask_);
    if (grades.empty()) grades = all_grades(*alg_);
    std::sort(grades.begin(), grades.end());
    grades.erase(std::unique(grades.begin(), grades.end()), grades.end());
    const auto& table = alg_->table();
    norm_weight_.resize(mask_.size());
    for (std::size_t m = 0; m < mask_.size(); ++m) {
      norm_weight_[m] = alg_->reverse_sign(mask_[m]) * alg_->square_sign(mask_[m]);
    }
    std::size_t offset = 0;
    for (int g : grades) {
      if (g < 0 || g > alg_->n()) throw Error(ErrorCode::grade_out_of_range, "grade " + std::to_string(g));
      GradeBlock blk;
      blk.grade = g;
      const auto span = alg_->grade_blades(g);
      blk.blades.assign(span.begin(), span.end());
      blk.offset = offset;
      std::vector<int> local(alg_->dim(), -1);
      for (std::size_t r = 0; r < blk.blades.size(); ++r) local[blk.blades[r]] = static_cast<int>(r);
      const double prefactor = (parity_ == Parity::odd && g % 2 == 1) ? -1.0 : 1.0;
      for (std::size_t c = 0; c < blk.blades.size(); ++c) {
        for (std::size_t m1 = 0; m1 < mask_.size(); ++m1) {
          const auto& left = table.entry(mask_[m1], blk.blades[c]);
          if (left.sign == 0) continue;
          for (std::size_t m2 = 0; m2 < mask_.size(); ++m2) {
            const auto& right = table.entry(left.index, mask_[m2]);
            if (right.sign == 0 || local[right.index] < 0) continue;
            const double sign = prefactor * left.sign * right.sign * alg_->reverse_sign(mask_[m2]);
            blk.terms.push_back({static_cast<std::uint16_t>(local[right.index]), static_cast<std::uint16_t>(c),
                                 static_cast<std::uint16_t>(m1), static_cast<std::uint16_t>(m2), sign});
          }
        }
      }
      offset += blk.blades.size() * blk.blades.size();
      blocks_.push_back(std::move(blk));
    }
    block_storage_ = offset;
  }

  const AlgebraPtr& algebra() const noexcept { return alg_; }
  const BladeMask& mask() const noexcept { return mask_; }
  Parity parity() const noexcept { return parity_; }
  const std::vector<GradeBlock>& blocks() const noexcept { return blocks_; }
  std::size_t block_storage() const noexcept { return block_storage_; }

  bool processes_grade(int g) const noexcept {
    return std::any_of(blocks_.begin(), blocks_.end(), [g](const GradeBlock& b) { return b.grade == g; });
  }

  /// <a~ a>_0 over the masked coefficients.
  double norm_squared(std::span<const double> a_masked) const noexcept {
    double s = 0.0;
    for (std::size_t m = 0; m < mask_.size(); ++m) s += norm_weight_[m] * a_masked[m] * a_masked[m];
    return s;
  }

  /// Writes every grade block of the action into out (size block_storage()).
  /// Returns <a~ a>_0.
  double build(std::span<const double> a_masked, std::span<double> out) const {
    const double s = norm_squared(a_masked);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& blk : blocks_) {
      const std::size_t n = blk.blades.size();
      double* dst = out.data() + blk.offset;
      for (const auto& t : blk.terms) dst[t.row * n + t.col] += t.sign * a_masked[t.m1] * a_masked[t.m2];
      for (std::size_t i = 0; i < n * n; ++i) dst[i] /= s;
    }
    return s;
  }

  /// Adds d loss / d a_masked given d loss / d blocks.
  void accumulate_grad(std::span<const double> a_masked, std::span<const double> blocks, double s,
                       std::span<const double> grad_blocks, std::span<double> grad_a_masked) const {
    const double inv = 1.0 / s;
    double contraction = 0.0;
    for (std::size_t i = 0; i < block_storage_; ++i) contraction += grad_blocks[i] * blocks[i];
    for (const auto& blk : blocks_) {
      const std::size_t n = blk.blades.size();
      const double* g = grad_blocks.data() + blk.offset;
      for (const auto& t : blk.terms) {
        const double gt = g[t.row * n + t.col] * t.sign * inv;
        grad_a_masked[t.m1] += gt * a_masked[t.m2];
        grad_a_masked[t.m2] += gt * a_masked[t.m1];
      }
    }
    for (std::size_t m = 0; m < mask_.size(); ++m) {
      grad_a_masked[m] -= contraction * 2.0 * norm_weight_[m] * a_masked[m] * inv;
    }
  }

 private:
  AlgebraPtr alg_;
  BladeMask mask_;
  Parity parity_ = Parity::even;
  std::vector<double> norm_weight_;
  std::vector<GradeBlock> blocks_;
  std::size_t block_storage_ = 0;
};

// ---------------------------------------------------------------------------
// Clifford kernels (left multiplication by a, right multiplication by b).

/// Kernels for c_out x c_in actions.  left[o][i] is the dim x dim matrix of
/// x -> a_oi x, right[o][i] the matrix of x -> x a_oi; both indexed
/// [out blade][in blade], row-major.
struct CliffordKernelPair {
  std::size_t c_out = 0;
  std::size_t c_in = 0;
  std::size_t dim = 0;
  std::vector<double> left;
  std::vector<double> right;

  std::span<const double> left_at(std::size_t o, std::size_t i) const {
    return std::span<const double>(left).subspan((o * c_in + i) * dim * dim, dim * dim);
  }
  std::span<const double> right_at(std::size_t o, std::size_t i) const {
    return std::span<const double>(right).subspan((o * c_in + i) * dim * dim, dim * dim);
  }
};

/// K_left[o,i][j][k] = sum_m M[j][m][k] a[o,i][m];
/// K_right[o,i][j][k] = sum_m M[j][k][m] a[o,i][m].
/// actions has shape (c_out, c_in, dim).
inline CliffordKernelPair get_clifford_kernel(const CayleyTable& table, std::span<const double> actions,
                                              std::size_t c_out, std::size_t c_in) {
  const std::size_t dim = table.dim();
  if (actions.size() != c_out * c_in * dim) throw Error(ErrorCode::shape_mismatch, "actions must be (c_out, c_in, dim)");
  CliffordKernelPair k{c_out, c_in, dim, std::vector<double>(c_out * c_in * dim * dim, 0.0),
                       std::vector<double>(c_out * c_in * dim * dim, 0.0)};
  for (std::size_t p = 0; p < c_out * c_in; ++p) {
    const double* a = actions.data() + p * dim;
    double* kl = k.left.data() + p * dim * dim;
    double* kr = k.right.data() + p * dim * dim;
    for (std::size_t m = 0; m < dim; ++m) {
      if (a[m] == 0.0) continue;
      for (std::size_t in = 0; in < dim; ++in) {
        const auto& l = table.entry(m, in);  // e_m e_in
        if (l.sign != 0) kl[l.index * dim + in] += l.sign * a[m];
        const auto& r = table.entry(in, m);  // e_in e_m
        if (r.sign != 0) kr[r.index * dim + in] += r.sign * a[m];
      }
    }
  }
  return k;
}

/// Full dim x dim matrix of x -> (-1)^{kl} a x a^{-1} through the Clifford
/// kernels: K_right(a^{-1}) K_left(a), with the parity sign per input grade.
inline std::vector<double> clifford_sandwich_matrix(const AlgebraPtr& algp, std::span<const double> a, Parity parity) {
  const Algebra& alg = *algp;
  const std::size_t dim = alg.dim();
  const Multivector av(algp, std::vector<double>(a.begin(), a.end()));
  const Multivector inv = versor_inverse(av);
  const auto kl = get_clifford_kernel(alg.table(), a, 1, 1);
  const auto kr = get_clifford_kernel(alg.table(), inv.coeffs(), 1, 1);
  std::vector<double> out(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t m = 0; m < dim; ++m) {
      const double r = kr.right[i * dim + m];
      if (r == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] += r * kl.left[m * dim + j];
    }
  }
  if (parity == Parity::odd) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (alg.grade(j) % 2 == 1) {
        for (std::size_t i = 0; i < dim; ++i) out[i * dim + j] = -out[i * dim + j];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form G_{3,0,0} rotation kernel.

using Mat3 = std::array<std::array<double, 3>, 3>;

/// R with R x = vector part of a x a~ for a = a0 + a12 e12 + a13 e13 + a23 e23.
/// For unit a this is a rotation; in general R^T R = (a~ a)^2 I, and R / (a~ a)
/// is the vector block of the group action.
inline Mat3 rotational_kernel_g300(double a0, double a12, double a13, double a23) {
  const double s0 = a0 * a0, s12 = a12 * a12, s13 = a13 * a13, s23 = a23 * a23;
  Mat3 r{};
  r[0] = {s0 - s12 - s13 + s23, 2 * a0 * a12 - 2 * a23 * a13, 2 * a0 * a13 + 2 * a12 * a23};
  r[1] = {-2 * a0 * a12 - 2 * a13 * a23, s0 - s12 + s13 - s23, 2 * a0 * a23 - 2 * a12 * a13};
  r[2] = {-2 * a0 * a13 + 2 * a12 * a23, -2 * a0 * a23 - 2 * a12 * a13, s12 + s0 - s13 - s23};
  return r;
}

/// Same, reading the coefficients from a dense G_{3,0,0} multivector; any
/// coefficient outside {1, e12, e13, e23} is a mask violation.
inline Mat3 rotational_kernel_g300(const Multivector& a) {
  const auto& alg = *a.algebra();
  if (alg.signature() != Signature(3, 0, 0)) throw Error(ErrorCode::signature_mismatch, "rotational kernel needs G(3,0,0)");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (alg.grade(i) % 2 == 1 && a[i] != 0.0) {
      throw Error(ErrorCode::mask_violation, "rotational kernel takes only 1, e12, e13, e23; got " + a.to_string());
    }
  }
  return rotational_kernel_g300(a[0], a[alg.index_of(0b011)], a[alg.index_of(0b101)], a[alg.index_of(0b110)]);
}

}  // namespace gcan
