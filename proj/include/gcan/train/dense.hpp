#pragma once

#include <cstdint>
#include <string>

#include "gcan/layers/action_kernel.hpp"
#include "gcan/train/params.hpp"

namespace gcan {

/// y = x W^T + b on (rows, in) matrices.  Shares gemm_nt with the group
/// action layers.
class DenseLayer {
 public:
  DenseLayer(std::size_t in, std::size_t out, bool bias, ParamStore& store, const std::string& name)
      : in_(in), out_(out) {
    w_ = &store.add(name + ".w", {out, in});
    if (bias) b_ = &store.add(name + ".b", {out});
  }

  std::size_t in() const noexcept { return in_; }
  std::size_t out() const noexcept { return out_; }
  Parameter& weights() noexcept { return *w_; }
  Parameter* bias() noexcept { return b_; }

  void reset_parameters(std::uint64_t seed) {
    Rng rng(seed, w_->name);
    init_glorot(w_->value.data(), w_->size(), in_, out_, rng);
    if (b_) std::fill(b_->value.begin(), b_->value.end(), 0.0);
  }

  RowMat forward(const RowMat& x) const {
    if (static_cast<std::size_t>(x.cols()) != in_) throw Error(ErrorCode::shape_mismatch, "dense: input width");
    RowMat y(x.rows(), static_cast<Eigen::Index>(out_));
    gemm_nt(x.data(), static_cast<std::size_t>(x.rows()), in_, w_->value.data(), out_, y.data());
    if (b_) {
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        for (std::size_t o = 0; o < out_; ++o) y(r, static_cast<Eigen::Index>(o)) += b_->value[o];
      }
    }
    return y;
  }

  RowMat backward(const RowMat& x, const RowMat& gy) {
    Eigen::Map<const RowMat> W(w_->value.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    Eigen::Map<RowMat> GW(w_->grad.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    GW.noalias() += gy.transpose() * x;
    if (b_) {
      for (Eigen::Index r = 0; r < gy.rows(); ++r) {
        for (std::size_t o = 0; o < out_; ++o) b_->grad[o] += gy(r, static_cast<Eigen::Index>(o));
      }
    }
    RowMat gx = gy * W;
    return gx;
  }

 private:
  std::size_t in_, out_;
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
};

inline double silu(double v) { return v / (1.0 + std::exp(-v)); }
inline double silu_grad(double v) {
  const double s = 1.0 / (1.0 + std::exp(-v));
  return s * (1.0 + v * (1.0 - s));
}

}  // namespace gcan
