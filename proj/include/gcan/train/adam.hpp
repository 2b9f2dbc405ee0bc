#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gcan/train/params.hpp"

namespace gcan {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction.  Moments are kept per parameter in store order.
class Adam {
 public:
  explicit Adam(ParamStore& store, AdamConfig cfg = {}) : store_(&store), cfg_(cfg) {
    for (const auto& p : store) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }

  const AdamConfig& config() const noexcept { return cfg_; }
  void set_lr(double lr) noexcept { cfg_.lr = lr; }
  std::uint64_t steps() const noexcept { return t_; }

  /// Throws non_finite naming the first parameter with a NaN/Inf gradient;
  /// no parameter is touched in that case.
  void step() {
    for (const auto& p : *store_) {
      for (double g : p.grad) {
        if (!std::isfinite(g)) throw Error(ErrorCode::non_finite, "gradient of " + p.name + " is not finite");
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::size_t k = 0;
    for (auto& p : *store_) {
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p.mask.empty() && !p.mask[i]) continue;
        const double g = p.grad[i];
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        p.value[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
      }
      ++k;
    }
  }

 private:
  ParamStore* store_;
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace gcan
