#pragma once

// The weighted group action sum_j w_oj (-1)^{kl} a_oj x_j a_oj^{-1} as one
// dense matrix per processed grade.  Linear and convolution layers differ
// only in how they arrange inputs into columns j.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gcan/layers/kernels.hpp"
#include "gcan/train/rng.hpp"

namespace gcan {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// How action blocks are built.  All three give the same numbers; the
/// structured path is the fast default, the others are the reference
/// formulations (Cayley-table kernels, closed-form G_{3,0,0} rotation).
enum class KernelPath { structured, clifford, rotational };

inline const char* to_string(KernelPath p) {
  switch (p) {
    case KernelPath::structured: return "structured";
    case KernelPath::clifford: return "clifford";
    case KernelPath::rotational: return "rotational";
  }
  return "?";
}

inline KernelPath kernel_path_from_string(const std::string& s) {
  if (s == "structured") return KernelPath::structured;
  if (s == "clifford") return KernelPath::clifford;
  if (s == "rotational") return KernelPath::rotational;
  throw Error(ErrorCode::invalid_config, "unknown kernel path \"" + s + "\"");
}

/// Y_g = X_g W_g^T for (rows, cols) matrices; used by every dense product in
/// the library so equal inputs give bit-identical outputs.
inline void gemm_nt(const double* x, std::size_t rows, std::size_t inner, const double* w, std::size_t outs,
                    double* y) {
  Eigen::Map<const RowMat> X(x, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(inner));
  Eigen::Map<const RowMat> W(w, static_cast<Eigen::Index>(outs), static_cast<Eigen::Index>(inner));
  Eigen::Map<RowMat> Y(y, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(outs));
  Y.noalias() = X * W.transpose();
}

class GroupActionKernel {
 public:
  struct State {
    std::vector<double> s;       // <a~ a>_0 per (o, j)
    std::vector<double> blocks;  // per (o, j): block_storage() doubles
    std::vector<RowMat> weff;    // per processed grade: (c_out C_g, cols C_g)
  };

  GroupActionKernel() = default;

  /// cols = number of input slots per output channel; area > 1 marks a
  /// convolution (slot j = i * area + tap) for error messages.
  GroupActionKernel(AlgebraPtr alg, BladeMask mask, std::vector<int> grades, std::size_t c_out, std::size_t cols,
                    KernelPath path, std::size_t area = 1)
      : structure_(alg, std::move(mask), std::move(grades)), c_out_(c_out), cols_(cols), area_(area), path_(path) {
    if (path_ == KernelPath::rotational) {
      if (alg->signature() != Signature(3, 0, 0)) {
        throw Error(ErrorCode::signature_mismatch, "rotational kernel path needs G(3,0,0)");
      }
      for (std::size_t b : structure_.mask()) {
        if (alg->grade(b) != 0 && alg->grade(b) != 2) {
          throw Error(ErrorCode::mask_violation, "rotational kernel path takes only 1, e12, e13, e23");
        }
      }
    }
  }

  const SandwichStructure& structure() const noexcept { return structure_; }
  const AlgebraPtr& algebra() const noexcept { return structure_.algebra(); }
  std::size_t c_out() const noexcept { return c_out_; }
  std::size_t cols() const noexcept { return cols_; }
  KernelPath path() const noexcept { return path_; }

  std::string slot_name(std::size_t o, std::size_t j) const {
    if (area_ == 1) return "(" + std::to_string(o) + ", " + std::to_string(j) + ")";
    return "(" + std::to_string(o) + ", " + std::to_string(j / area_) + ", tap " + std::to_string(j % area_) + ")";
  }

  /// w has c_out * cols entries, a has c_out * cols * dim (dense, masked).
  void build(const double* w, const double* a, State& st) const {
    const auto& mask = structure_.mask();
    const std::size_t dim = algebra()->dim();
    const std::size_t bs = structure_.block_storage();
    const std::size_t pairs = c_out_ * cols_;
    st.s.resize(pairs);
    st.blocks.resize(pairs * bs);
    std::vector<double> am(mask.size());
    for (std::size_t p = 0; p < pairs; ++p) {
      const double* ap = a + p * dim;
      for (std::size_t m = 0; m < mask.size(); ++m) am[m] = ap[mask[m]];
      const double s = structure_.norm_squared(am);
      if (!(std::abs(s) > kVersorTolerance)) {
        throw Error(ErrorCode::non_invertible,
                    "action at slot " + slot_name(p / cols_, p % cols_) + " is not invertible: <a~a>_0 = " + std::to_string(s));
      }
      std::span<double> out(st.blocks.data() + p * bs, bs);
      switch (path_) {
        case KernelPath::structured: structure_.build(am, out); break;
        case KernelPath::clifford: clifford_blocks(ap, out); break;
        case KernelPath::rotational: rotational_blocks(am, s, out); break;
      }
      st.s[p] = s;
    }
    const auto& blks = structure_.blocks();
    st.weff.resize(blks.size());
    for (std::size_t g = 0; g < blks.size(); ++g) {
      const std::size_t c = blks[g].blades.size();
      RowMat& W = st.weff[g];
      W.resize(static_cast<Eigen::Index>(c_out_ * c), static_cast<Eigen::Index>(cols_ * c));
      for (std::size_t o = 0; o < c_out_; ++o) {
        for (std::size_t j = 0; j < cols_; ++j) {
          const std::size_t p = o * cols_ + j;
          const double* blk = st.blocks.data() + p * bs + blks[g].offset;
          const double wp = w[p];
          for (std::size_t r = 0; r < c; ++r) {
            for (std::size_t cc = 0; cc < c; ++cc) {
              W(static_cast<Eigen::Index>(o * c + r), static_cast<Eigen::Index>(j * c + cc)) = wp * blk[r * c + cc];
            }
          }
        }
      }
    }
  }

  /// Accumulates dL/dw and dL/da (dense, only masked entries touched) from
  /// dL/dW_eff per grade.
  void backprop(const double* w, const double* a, const State& st, const std::vector<RowMat>& grad_weff, double* gw,
                double* ga) const {
    const auto& mask = structure_.mask();
    const std::size_t dim = algebra()->dim();
    const std::size_t bs = structure_.block_storage();
    const auto& blks = structure_.blocks();
    std::vector<double> am(mask.size()), gam(mask.size()), gblk(bs);
    for (std::size_t o = 0; o < c_out_; ++o) {
      for (std::size_t j = 0; j < cols_; ++j) {
        const std::size_t p = o * cols_ + j;
        const double* blk = st.blocks.data() + p * bs;
        double gwp = 0.0;
        for (std::size_t g = 0; g < blks.size(); ++g) {
          const std::size_t c = blks[g].blades.size();
          const RowMat& G = grad_weff[g];
          for (std::size_t r = 0; r < c; ++r) {
            for (std::size_t cc = 0; cc < c; ++cc) {
              const double gv = G(static_cast<Eigen::Index>(o * c + r), static_cast<Eigen::Index>(j * c + cc));
              gblk[blks[g].offset + r * c + cc] = gv * w[p];
              gwp += gv * blk[blks[g].offset + r * c + cc];
            }
          }
        }
        gw[p] += gwp;
        const double* ap = a + p * dim;
        for (std::size_t m = 0; m < mask.size(); ++m) am[m] = ap[mask[m]];
        std::fill(gam.begin(), gam.end(), 0.0);
        structure_.accumulate_grad(am, std::span<const double>(blk, bs), st.s[p], gblk, gam);
        double* gap = ga + p * dim;
        for (std::size_t m = 0; m < mask.size(); ++m) gap[mask[m]] += gam[m];
      }
    }
  }

 private:
  void clifford_blocks(const double* ap, std::span<double> out) const {
    const std::size_t dim = algebra()->dim();
    const auto full = clifford_sandwich_matrix(algebra(), std::span<const double>(ap, dim), structure_.parity());
    for (const auto& blk : structure_.blocks()) {
      const std::size_t c = blk.blades.size();
      for (std::size_t r = 0; r < c; ++r) {
        for (std::size_t cc = 0; cc < c; ++cc) out[blk.offset + r * c + cc] = full[blk.blades[r] * dim + blk.blades[cc]];
      }
    }
  }

  void rotational_blocks(const std::vector<double>& am, double s, std::span<double> out) const {
    const auto& alg = *algebra();
    double a0 = 0, a12 = 0, a13 = 0, a23 = 0;
    const auto& mask = structure_.mask();
    for (std::size_t m = 0; m < mask.size(); ++m) {
      switch (alg.bits(mask[m])) {
        case 0b000: a0 = am[m]; break;
        case 0b011: a12 = am[m]; break;
        case 0b101: a13 = am[m]; break;
        case 0b110: a23 = am[m]; break;
        default: break;
      }
    }
    // Grades other than 1 fall back to the structured blocks.
    structure_.build(am, out);
    for (const auto& blk : structure_.blocks()) {
      if (blk.grade != 1) continue;
      const Mat3 R = rotational_kernel_g300(a0, a12, a13, a23);
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) out[blk.offset + r * 3 + c] = R[r][c] / s;
      }
    }
  }

  SandwichStructure structure_;
  std::size_t c_out_ = 0;
  std::size_t cols_ = 0;
  std::size_t area_ = 1;
  KernelPath path_ = KernelPath::structured;
};

/// Glorot-uniform weights and near-identity unit actions: scalar (or first
/// masked blade for odd masks) 1, other masked blades N(0, 0.05^2), then
/// scaled to |<a~a>_0| = 1.
inline void init_actions(const SandwichStructure& st, std::size_t pairs, double* a, Rng& rng) {
  const auto& mask = st.mask();
  const std::size_t dim = st.algebra()->dim();
  std::vector<double> am(mask.size());
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t m = 0; m < mask.size(); ++m) am[m] = rng.normal(0.0, 0.05);
    // Anchor: the first masked blade with nonzero reverse norm weight.
    for (std::size_t m = 0; m < mask.size(); ++m) {
      const std::size_t b = mask[m];
      if (st.algebra()->square_sign(b) != 0) {
        am[m] = 1.0;
        break;
      }
    }
    double s = std::abs(st.norm_squared(am));
    if (!(s > kVersorTolerance)) s = 1.0;
    const double inv = 1.0 / std::sqrt(s);
    double* ap = a + p * dim;
    for (std::size_t m = 0; m < mask.size(); ++m) ap[mask[m]] = am[m] * inv;
  }
}

inline void init_glorot(double* w, std::size_t count, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-limit, limit);
}

inline std::vector<std::uint8_t> dense_mask(const Algebra& alg, const BladeMask& blades, std::size_t pairs) {
  std::vector<std::uint8_t> m(pairs * alg.dim(), 0);
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t b : blades) m[p * alg.dim() + b] = 1;
  }
  return m;
}

}  // namespace gcan
