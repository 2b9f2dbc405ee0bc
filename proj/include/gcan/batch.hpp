#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gcan/multivector.hpp"

namespace gcan {

/// Dense batch of multivectors with dims (batch, channels) or
/// (batch, channels, height, width); coefficients are the innermost axis.
class MultivectorBatch {
 public:
  MultivectorBatch() = default;
  MultivectorBatch(AlgebraPtr alg, std::vector<std::size_t> dims) : alg_(std::move(alg)), dims_(std::move(dims)) {
    if (dims_.size() != 2 && dims_.size() != 4) {
      throw Error(ErrorCode::shape_mismatch, "batch dims must be (b, c) or (b, c, h, w)");
    }
    data_.assign(element_count() * alg_->dim(), 0.0);
  }

  static MultivectorBatch zeros_like(const MultivectorBatch& other) { return MultivectorBatch(other.alg_, other.dims_); }

  const AlgebraPtr& algebra() const noexcept { return alg_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t batch() const noexcept { return dims_[0]; }
  std::size_t channels() const noexcept { return dims_[1]; }
  std::size_t height() const noexcept { return dims_.size() == 4 ? dims_[2] : 1; }
  std::size_t width() const noexcept { return dims_.size() == 4 ? dims_[3] : 1; }
  std::size_t spatial() const noexcept { return height() * width(); }
  std::size_t blades() const noexcept { return alg_->dim(); }
  std::size_t element_count() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Offset of multivector (b, c, position) where position = y * width + x.
  std::size_t offset(std::size_t b, std::size_t c, std::size_t pos = 0) const noexcept {
    return ((b * channels() + c) * spatial() + pos) * blades();
  }

  std::span<double> mv(std::size_t b, std::size_t c, std::size_t pos = 0) noexcept {
    return std::span<double>(data_).subspan(offset(b, c, pos), blades());
  }
  std::span<const double> mv(std::size_t b, std::size_t c, std::size_t pos = 0) const noexcept {
    return std::span<const double>(data_).subspan(offset(b, c, pos), blades());
  }

  Multivector get(std::size_t b, std::size_t c, std::size_t pos = 0) const {
    auto s = mv(b, c, pos);
    return Multivector(alg_, std::vector<double>(s.begin(), s.end()));
  }

  void set(std::size_t b, std::size_t c, std::size_t pos, const Multivector& m) {
    auto s = mv(b, c, pos);
    std::copy(m.coeffs().begin(), m.coeffs().end(), s.begin());
  }

  bool same_shape(const MultivectorBatch& o) const noexcept {
    return dims_ == o.dims_ && alg_ && o.alg_ && alg_->signature() == o.alg_->signature();
  }

  void require_same_shape(const MultivectorBatch& o, const char* what) const {
    if (!same_shape(o)) throw Error(ErrorCode::shape_mismatch, std::string(what) + ": batch shapes differ");
  }

  void require_finite(const char* what) const {
    for (double v : data_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, std::string(what) + " contains a non-finite value");
    }
  }

  /// Largest |coefficient| over blades whose grade is not in keep.
  double off_grade_max(const std::vector<int>& keep) const {
    std::vector<char> keep_blade(blades(), 0);
    for (std::size_t i = 0; i < blades(); ++i) {
      for (int k : keep) {
        if (alg_->grade(i) == k) keep_blade[i] = 1;
      }
    }
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!keep_blade[i % blades()]) m = std::max(m, std::abs(data_[i]));
    }
    return m;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  AlgebraPtr alg_;
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace gcan
