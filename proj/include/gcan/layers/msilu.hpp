#pragma once

#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gcan/batch.hpp"
#include "gcan/train/params.hpp"
#include "gcan/train/rng.hpp"

namespace gcan {

enum class MsiluMode { linear, sum, mean };
/// Which coefficients feed f_k: every blade, or only the blades of grade k.
enum class GateInput { all_blades, own_grade };

inline const char* to_string(MsiluMode m) {
  switch (m) {
    case MsiluMode::linear: return "linear";
    case MsiluMode::sum: return "sum";
    case MsiluMode::mean: return "mean";
  }
  return "?";
}

inline MsiluMode msilu_mode_from_string(const std::string& s) {
  if (s == "linear") return MsiluMode::linear;
  if (s == "sum") return MsiluMode::sum;
  if (s == "mean") return MsiluMode::mean;
  throw Error(ErrorCode::invalid_config, "unknown MSiLU mode \"" + s + "\"");
}

struct MsiluConfig {
  MsiluMode mode = MsiluMode::linear;
  GateInput gate = GateInput::all_blades;
  /// Feed f_k the channel average instead of each channel's own coefficients.
  bool pooled = false;

  nlohmann::json to_json() const {
    return {{"type", "msilu"},
            {"mode", to_string(mode)},
            {"gate", gate == GateInput::all_blades ? "all_blades" : "own_grade"},
            {"pooled", pooled}};
  }

  static MsiluConfig from_json(const nlohmann::json& j) {
    MsiluConfig c;
    c.mode = msilu_mode_from_string(j.value("mode", std::string("linear")));
    const std::string g = j.value("gate", std::string("all_blades"));
    if (g == "all_blades") {
      c.gate = GateInput::all_blades;
    } else if (g == "own_grade") {
      c.gate = GateInput::own_grade;
    } else {
      throw Error(ErrorCode::invalid_config, "unknown MSiLU gate \"" + g + "\"");
    }
    c.pooled = j.value("pooled", false);
    return c;
  }
};

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// [x]_k -> sigmoid(f_k(x)) [x]_k with f_k(x) = sum_i beta[k][i] x_i (linear),
/// sum_i x_i (sum) or the mean (mean) over the gate blades.
class Msilu {
 public:
  Msilu(AlgebraPtr alg, MsiluConfig cfg, ParamStore* store = nullptr, const std::string& name = "msilu")
      : alg_(std::move(alg)), cfg_(cfg) {
    const std::size_t grades = static_cast<std::size_t>(alg_->n()) + 1;
    const std::size_t dim = alg_->dim();
    coef_.assign(grades * dim, 0.0);
    for (std::size_t k = 0; k < grades; ++k) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < dim; ++i) count += in_gate(k, i);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!in_gate(k, i)) continue;
        coef_[k * dim + i] = cfg_.mode == MsiluMode::mean ? 1.0 / static_cast<double>(count) : 1.0;
      }
    }
    if (cfg_.mode == MsiluMode::linear) {
      if (!store) throw Error(ErrorCode::invalid_config, "linear MSiLU needs a parameter store");
      std::vector<std::uint8_t> mask(grades * dim);
      for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = coef_[i] != 0.0;
      beta_ = &store->add(name + ".beta", {grades, dim}, std::move(mask));
      beta_->value = coef_;
    }
  }

  Msilu(const Msilu&) = delete;
  Msilu& operator=(const Msilu&) = delete;
  Msilu(Msilu&&) = default;

  const MsiluConfig& config() const noexcept { return cfg_; }
  Parameter* beta() noexcept { return beta_; }

  /// beta ~ U(-1/sqrt(m), 1/sqrt(m)) over the m gate blades of each grade.
  void reset_parameters(std::uint64_t seed) {
    if (!beta_) return;
    Rng rng(seed, beta_->name);
    const std::size_t dim = alg_->dim();
    for (std::size_t k = 0; k <= static_cast<std::size_t>(alg_->n()); ++k) {
      std::size_t m = 0;
      for (std::size_t i = 0; i < dim; ++i) m += in_gate(k, i);
      const double lim = 1.0 / std::sqrt(static_cast<double>(m));
      for (std::size_t i = 0; i < dim; ++i) {
        beta_->value[k * dim + i] = in_gate(k, i) ? rng.uniform(-lim, lim) : 0.0;
      }
    }
  }

  MultivectorBatch forward(const MultivectorBatch& x) {
    check(x);
    gates(x, pre_);
    MultivectorBatch y = MultivectorBatch::zeros_like(x);
    const std::size_t dim = alg_->dim();
    const std::size_t grades = static_cast<std::size_t>(alg_->n()) + 1;
    const auto xd = x.data();
    auto yd = y.data();
    for (std::size_t e = 0; e < x.element_count(); ++e) {
      const std::size_t g = gate_row(x, e);
      for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t k = static_cast<std::size_t>(alg_->grade(i));
        yd[e * dim + i] = sigmoid(pre_[g * grades + k]) * xd[e * dim + i];
      }
    }
    return y;
  }

  MultivectorBatch backward(const MultivectorBatch& x, const MultivectorBatch& grad_y) {
    check(x);
    x.require_same_shape(grad_y, "msilu backward");
    gates(x, pre_);
    const std::size_t dim = alg_->dim();
    const std::size_t grades = static_cast<std::size_t>(alg_->n()) + 1;
    const double* coef = weights();
    MultivectorBatch gx = MultivectorBatch::zeros_like(x);
    const auto xd = x.data();
    const auto gy = grad_y.data();
    auto gxd = gx.data();
    // d loss / d f_k for every gate row.
    std::vector<double> gpre(pre_.size(), 0.0);
    for (std::size_t e = 0; e < x.element_count(); ++e) {
      const std::size_t g = gate_row(x, e);
      for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t k = static_cast<std::size_t>(alg_->grade(i));
        const double sg = sigmoid(pre_[g * grades + k]);
        gxd[e * dim + i] += sg * gy[e * dim + i];
        gpre[g * grades + k] += gy[e * dim + i] * xd[e * dim + i] * sg * (1.0 - sg);
      }
    }
    const double share = cfg_.pooled ? 1.0 / static_cast<double>(x.channels()) : 1.0;
    for (std::size_t e = 0; e < x.element_count(); ++e) {
      const std::size_t g = gate_row(x, e);
      for (std::size_t k = 0; k < grades; ++k) {
        const double d = gpre[g * grades + k] * share;
        if (d == 0.0) continue;
        for (std::size_t i = 0; i < dim; ++i) {
          gxd[e * dim + i] += d * coef[k * dim + i];
          if (beta_) beta_->grad[k * dim + i] += d * xd[e * dim + i];
        }
      }
    }
    if (beta_) beta_->apply_mask();
    return gx;
  }

 private:
  bool in_gate(std::size_t k, std::size_t i) const {
    return cfg_.gate == GateInput::all_blades || static_cast<std::size_t>(alg_->grade(i)) == k;
  }

  const double* weights() const { return beta_ ? beta_->value.data() : coef_.data(); }

  void check(const MultivectorBatch& x) const {
    if (!x.algebra() || x.algebra()->signature() != alg_->signature()) {
      throw Error(ErrorCode::signature_mismatch, "msilu: input algebra");
    }
  }

  /// Gate rows are multivectors (b, c, pos), or (b, pos) when pooled.
  std::size_t gate_row(const MultivectorBatch& x, std::size_t e) const {
    if (!cfg_.pooled) return e;
    const std::size_t hw = x.spatial();
    const std::size_t b = e / (x.channels() * hw);
    return b * hw + e % hw;
  }

  void gates(const MultivectorBatch& x, std::vector<double>& pre) const {
    const std::size_t dim = alg_->dim();
    const std::size_t grades = static_cast<std::size_t>(alg_->n()) + 1;
    const std::size_t rows = cfg_.pooled ? x.batch() * x.spatial() : x.element_count();
    const double share = cfg_.pooled ? 1.0 / static_cast<double>(x.channels()) : 1.0;
    const double* coef = weights();
    pre.assign(rows * grades, 0.0);
    const auto xd = x.data();
    for (std::size_t e = 0; e < x.element_count(); ++e) {
      const std::size_t g = gate_row(x, e);
      for (std::size_t k = 0; k < grades; ++k) {
        double f = 0.0;
        for (std::size_t i = 0; i < dim; ++i) f += coef[k * dim + i] * xd[e * dim + i];
        pre[g * grades + k] += share * f;
      }
    }
  }

  AlgebraPtr alg_;
  MsiluConfig cfg_;
  std::vector<double> coef_;
  Parameter* beta_ = nullptr;
  std::vector<double> pre_;
};

}  // namespace gcan
