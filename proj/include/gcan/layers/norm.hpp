#pragma once

#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gcan/batch.hpp"
#include "gcan/train/params.hpp"

namespace gcan {

struct GcaNormConfig {
  std::size_t channels = 1;
  std::size_t group_size = 0;  // 0: one group over all channels
  double eps = 1e-6;
  /// Statistics over (channels in group) x (positions); false keeps each
  /// position separate.
  bool over_spatial = true;
  /// Norm weight on blades that square to zero.  0 reproduces the table
  /// arithmetic (null components drop out); 1 counts them Euclidean-style.
  double null_weight = 0.0;

  nlohmann::json to_json() const {
    return {{"type", "gca_norm"},   {"channels", channels},         {"group_size", group_size},
            {"eps", eps},           {"over_spatial", over_spatial}, {"null_weight", null_weight}};
  }

  static GcaNormConfig from_json(const nlohmann::json& j) {
    GcaNormConfig c;
    c.channels = j.at("channels").get<std::size_t>();
    c.group_size = j.value("group_size", std::size_t{0});
    c.eps = j.value("eps", 1e-6);
    c.over_spatial = j.value("over_spatial", true);
    c.null_weight = j.value("null_weight", 0.0);
    return c;
  }
};

/// [x]_k -> s_k ([x]_k - E[[x]_k]) / (E[||[x]_k||] + eps), statistics per
/// sample and channel group.  ||y|| = sqrt(|sum_i q_i y_i^2|) with
/// q_i = reverse sign * square sign of blade i.
class GcaNorm {
 public:
  GcaNorm(AlgebraPtr alg, GcaNormConfig cfg, ParamStore& store, const std::string& name)
      : alg_(std::move(alg)), cfg_(cfg) {
    if (cfg_.group_size == 0) cfg_.group_size = cfg_.channels;
    if (cfg_.channels == 0 || cfg_.channels % cfg_.group_size != 0) {
      throw Error(ErrorCode::invalid_config, name + ": group size " + std::to_string(cfg_.group_size) +
                                                 " does not divide " + std::to_string(cfg_.channels) + " channels");
    }
    if (!(cfg_.eps > 0.0)) throw Error(ErrorCode::invalid_config, name + ": eps must be positive");
    s_ = &store.add(name + ".s", {static_cast<std::size_t>(alg_->n()) + 1});
    std::fill(s_->value.begin(), s_->value.end(), 1.0);
    q_.resize(alg_->dim());
    for (std::size_t i = 0; i < alg_->dim(); ++i) {
      const double q = alg_->reverse_sign(i) * alg_->square_sign(i);
      q_[i] = q == 0.0 ? cfg_.null_weight : q;
    }
  }

  GcaNorm(const GcaNorm&) = delete;
  GcaNorm& operator=(const GcaNorm&) = delete;
  GcaNorm(GcaNorm&&) = default;

  const GcaNormConfig& config() const noexcept { return cfg_; }
  Parameter& scale() noexcept { return *s_; }

  void reset_parameters(std::uint64_t) { std::fill(s_->value.begin(), s_->value.end(), 1.0); }

  MultivectorBatch forward(const MultivectorBatch& x) {
    check(x);
    MultivectorBatch y = MultivectorBatch::zeros_like(x);
    for_each_group(x, [&](const std::vector<std::size_t>& elems) {
      for (int k = 0; k <= alg_->n(); ++k) {
        const auto blades = alg_->grade_blades(k);
        Stats st = stats(x, elems, blades);
        const double sk = s_->value[static_cast<std::size_t>(k)];
        for (std::size_t e : elems) {
          for (std::size_t q = 0; q < blades.size(); ++q) {
            const std::size_t idx = e * alg_->dim() + blades[q];
            y.data()[idx] = sk * (x.data()[idx] - st.mean[q]) / st.denom;
          }
        }
      }
    });
    return y;
  }

  MultivectorBatch backward(const MultivectorBatch& x, const MultivectorBatch& grad_y) {
    check(x);
    x.require_same_shape(grad_y, "gca_norm backward");
    MultivectorBatch gx = MultivectorBatch::zeros_like(x);
    const auto xd = x.data();
    const auto gy = grad_y.data();
    auto gxd = gx.data();
    const std::size_t dim = alg_->dim();
    for_each_group(x, [&](const std::vector<std::size_t>& elems) {
      const double inv_n = 1.0 / static_cast<double>(elems.size());
      for (int k = 0; k <= alg_->n(); ++k) {
        const auto blades = alg_->grade_blades(k);
        Stats st = stats(x, elems, blades);
        const double sk = s_->value[static_cast<std::size_t>(k)];
        // Per-blade mean of s g / D and the contraction sum g u.
        std::vector<double> gmean(blades.size(), 0.0);
        double gu = 0.0;
        for (std::size_t e : elems) {
          for (std::size_t q = 0; q < blades.size(); ++q) {
            const std::size_t idx = e * dim + blades[q];
            const double u = xd[idx] - st.mean[q];
            gmean[q] += gy[idx];
            gu += gy[idx] * u;
          }
        }
        s_->grad[static_cast<std::size_t>(k)] += gu / st.denom;
        const double g_denom = -sk * gu / (st.denom * st.denom);
        for (std::size_t e : elems) {
          const double nrm = element_norm(xd.data() + e * dim, blades);
          const double sgn = element_norm_sign(xd.data() + e * dim, blades);
          for (std::size_t q = 0; q < blades.size(); ++q) {
            const std::size_t idx = e * dim + blades[q];
            double g = sk * (gy[idx] - gmean[q] * inv_n) / st.denom;
            if (nrm > kTinyNorm) g += g_denom * inv_n * sgn * q_[blades[q]] * xd[idx] / nrm;
            gxd[idx] += g;
          }
        }
      }
    });
    return gx;
  }

 private:
  static constexpr double kTinyNorm = 1e-300;

  struct Stats {
    std::vector<double> mean;
    double denom;
  };

  void check(const MultivectorBatch& x) const {
    if (!x.algebra() || x.algebra()->signature() != alg_->signature()) {
      throw Error(ErrorCode::signature_mismatch, "gca_norm: input algebra");
    }
    if (x.channels() != cfg_.channels) throw Error(ErrorCode::shape_mismatch, "gca_norm: channel count");
  }

  double element_norm_sign(const double* mv, std::span<const std::size_t> blades) const {
    double s = 0.0;
    for (std::size_t b : blades) s += q_[b] * mv[b] * mv[b];
    return s < 0.0 ? -1.0 : 1.0;
  }

  double element_norm(const double* mv, std::span<const std::size_t> blades) const {
    double s = 0.0;
    for (std::size_t b : blades) s += q_[b] * mv[b] * mv[b];
    return std::sqrt(std::abs(s));
  }

  Stats stats(const MultivectorBatch& x, const std::vector<std::size_t>& elems, std::span<const std::size_t> blades) const {
    Stats st{std::vector<double>(blades.size(), 0.0), 0.0};
    const auto xd = x.data();
    const double inv_n = 1.0 / static_cast<double>(elems.size());
    double norm_sum = 0.0;
    for (std::size_t e : elems) {
      const double* mv = xd.data() + e * alg_->dim();
      for (std::size_t q = 0; q < blades.size(); ++q) st.mean[q] += mv[blades[q]];
      norm_sum += element_norm(mv, blades);
    }
    for (double& m : st.mean) m *= inv_n;
    st.denom = norm_sum * inv_n + cfg_.eps;
    return st;
  }

  /// Calls f with the element indices (multivector slots) of each group.
  template <typename F>
  void for_each_group(const MultivectorBatch& x, F&& f) const {
    const std::size_t hw = x.spatial();
    const std::size_t groups = cfg_.channels / cfg_.group_size;
    std::vector<std::size_t> elems;
    for (std::size_t b = 0; b < x.batch(); ++b) {
      for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t npos = cfg_.over_spatial ? 1 : hw;
        for (std::size_t p = 0; p < npos; ++p) {
          elems.clear();
          for (std::size_t c = g * cfg_.group_size; c < (g + 1) * cfg_.group_size; ++c) {
            if (cfg_.over_spatial) {
              for (std::size_t pos = 0; pos < hw; ++pos) elems.push_back((b * x.channels() + c) * hw + pos);
            } else {
              elems.push_back((b * x.channels() + c) * hw + p);
            }
          }
          f(elems);
        }
      }
    }
  }

  AlgebraPtr alg_;
  GcaNormConfig cfg_;
  Parameter* s_ = nullptr;
  std::vector<double> q_;
};

}  // namespace gcan
