#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <vector>

#include "gcan/error.hpp"

namespace gcan {

/// A named flat f64 buffer with its gradient.  When mask is non-empty only
/// entries with mask[i] != 0 are trainable; the others stay exactly zero.
struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<std::uint8_t> mask;

  std::size_t size() const noexcept { return value.size(); }

  std::size_t trainable_count() const noexcept {
    if (mask.empty()) return value.size();
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  }

  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

  /// Zeroes gradients (and values) outside the mask.
  void apply_mask() {
    if (mask.empty()) return;
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!mask[i]) {
        value[i] = 0.0;
        grad[i] = 0.0;
      }
    }
  }
};

/// Registry with stable insertion-order iteration.  Element addresses never
/// change, so layers keep raw pointers to their buffers.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Parameter& add(std::string name, std::vector<std::size_t> shape, std::vector<std::uint8_t> mask = {}) {
    for (const auto& p : params_) {
      if (p.name == name) throw Error(ErrorCode::invalid_config, "duplicate parameter \"" + name + "\"");
    }
    const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    if (!mask.empty() && mask.size() != n) throw Error(ErrorCode::shape_mismatch, "mask size for " + name);
    params_.push_back(Parameter{std::move(name), std::move(shape), std::vector<double>(n, 0.0),
                                std::vector<double>(n, 0.0), std::move(mask)});
    return params_.back();
  }

  Parameter* find(const std::string& name) noexcept {
    for (auto& p : params_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }
  const Parameter* find(const std::string& name) const noexcept {
    for (const auto& p : params_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  Parameter& at(const std::string& name) {
    if (auto* p = find(name)) return *p;
    throw Error(ErrorCode::invalid_config, "no parameter \"" + name + "\"");
  }

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }
  std::size_t size() const noexcept { return params_.size(); }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  std::size_t trainable_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.trainable_count();
    return n;
  }

 private:
  std::deque<Parameter> params_;
};

}  // namespace gcan
