#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gcan/layers/linear.hpp"
#include "gcan/layers/msilu.hpp"
#include "gcan/layers/norm.hpp"
#include "gcan/pin.hpp"
#include "gcan/tetris/dataset.hpp"
#include "gcan/train/dense.hpp"

namespace gcan::tetris {

/// Feature layout per sample: positions [step][location][coord] for four
/// steps, followed by velocities in the same order when enabled.
inline std::size_t feature_size(bool velocities) { return kInputSteps * kLocations * kCoords * (velocities ? 2 : 1); }

/// Features of the given trajectories for steps [first_step, first_step + 4).
inline std::vector<double> features(const Dataset& d, std::span<const std::size_t> rows, std::size_t first_step,
                                    bool velocities) {
  if (velocities && !d.has_velocities) throw Error(ErrorCode::invalid_config, "dataset has no velocities");
  const std::size_t f = feature_size(velocities), half = kInputSteps * kLocations * kCoords;
  std::vector<double> out(rows.size() * f);
  for (std::size_t b = 0; b < rows.size(); ++b) {
    for (std::size_t t = 0; t < kInputSteps; ++t) {
      for (std::size_t o = 0; o < kObjects; ++o) {
        for (std::size_t p = 0; p < kPoints; ++p) {
          for (std::size_t c = 0; c < kCoords; ++c) {
            const std::size_t i = (t * kLocations + o * kPoints + p) * kCoords + c;
            out[b * f + i] = d.position(rows[b], o, p, first_step + t, c);
            if (velocities) out[b * f + half + i] = d.velocity(rows[b], o, p, first_step + t, c);
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<double> inputs(const Dataset& d, std::span<const std::size_t> rows, bool velocities) {
  return features(d, rows, 0, velocities);
}
inline std::vector<double> targets(const Dataset& d, std::span<const std::size_t> rows, bool velocities) {
  return features(d, rows, kInputSteps, velocities);
}

enum class ModelKind { gca_mlp, baseline_mlp };

inline const char* to_string(ModelKind k) { return k == ModelKind::gca_mlp ? "gca" : "mlp"; }
inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gca" || s == "gca_mlp") return ModelKind::gca_mlp;
  if (s == "mlp" || s == "baseline_mlp") return ModelKind::baseline_mlp;
  throw Error(ErrorCode::invalid_config, "unknown model \"" + s + "\" (expected gca or mlp)");
}

struct ModelConfig {
  ModelKind kind = ModelKind::gca_mlp;
  /// Hidden channels (GCA) or hidden features (baseline).
  std::size_t hidden = 38;
  bool velocities = false;
  MsiluConfig msilu{};
  double null_weight = 0.0;
  KernelPath path = KernelPath::structured;

  nlohmann::json to_json() const {
    return {{"kind", to_string(kind)},       {"hidden", hidden},           {"velocities", velocities},
            {"msilu", msilu.to_json()},      {"null_weight", null_weight}, {"path", gcan::to_string(path)}};
  }
  static ModelConfig from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.kind = model_kind_from_string(j.at("kind").get<std::string>());
    c.hidden = j.at("hidden").get<std::size_t>();
    c.velocities = j.value("velocities", false);
    if (j.contains("msilu")) c.msilu = MsiluConfig::from_json(j["msilu"]);
    c.null_weight = j.value("null_weight", 0.0);
    c.path = kernel_path_from_string(j.value("path", std::string("structured")));
    return c;
  }
};

class TetrisModel {
 public:
  virtual ~TetrisModel() = default;
  virtual const ModelConfig& config() const noexcept = 0;
  virtual ParamStore& params() noexcept = 0;
  virtual void reset_parameters(std::uint64_t seed) = 0;
  /// Rows of feature_size() inputs to rows of predicted targets.
  virtual std::vector<double> forward(const std::vector<double>& x, std::size_t batch) = 0;
  /// Accumulates parameter gradients for the last forward call.
  virtual void backward(const std::vector<double>& grad_out) = 0;
  std::size_t parameter_count() { return params().trainable_count(); }
};

/// Points as trivectors (embedding signs of PointLayout), velocities on
/// e1, e2, e3 of the same channel.  Channel = step * 32 + location.
class GcaMlp final : public TetrisModel {
 public:
  static constexpr std::size_t kChannels = kInputSteps * kLocations;

  explicit GcaMlp(ModelConfig cfg) : cfg_(std::move(cfg)), alg_(Algebra::make(3, 0, 1)) {
    if (cfg_.hidden == 0) throw Error(ErrorCode::invalid_config, "gca_mlp: hidden channels must be positive");
    const std::vector<int> grades = cfg_.velocities ? std::vector<int>{1, 3} : std::vector<int>{3};
    const std::size_t widths[] = {kChannels, cfg_.hidden, cfg_.hidden, kChannels};
    for (std::size_t l = 0; l < 3; ++l) {
      const std::string name = "layer" + std::to_string(l);
      Parameter& d = store_.add(name + ".delta", {widths[l]});
      std::fill(d.value.begin(), d.value.end(), 1.0);
      delta_.push_back(&d);
      linear_.emplace_back(alg_, GcaLinearConfig{widths[l], widths[l + 1], screw_mask(*alg_), grades, cfg_.path}, store_, name);
      if (l < 2) {
        act_.emplace_back(alg_, cfg_.msilu, &store_, name + ".msilu");
        norm_.emplace_back(alg_, GcaNormConfig{widths[l + 1], 0, 1e-6, true, cfg_.null_weight}, store_, name + ".norm");
      }
    }
    blade_x_ = alg_->index_of(PointLayout::x_blade);
    blade_y_ = alg_->index_of(PointLayout::y_blade);
    blade_z_ = alg_->index_of(PointLayout::z_blade);
    blade_w_ = alg_->index_of(PointLayout::w_blade);
    for (int k = 0; k < 3; ++k) blade_v_[k] = alg_->index_of(BladeBits{1} << (k + 1));
  }

  const ModelConfig& config() const noexcept override { return cfg_; }
  ParamStore& params() noexcept override { return store_; }
  const AlgebraPtr& algebra() const noexcept { return alg_; }

  void reset_parameters(std::uint64_t seed) override {
    for (auto& l : linear_) l.reset_parameters(seed);
    for (auto& a : act_) a.reset_parameters(seed);
    for (auto& n : norm_) n.reset_parameters(seed);
    for (auto* d : delta_) std::fill(d->value.begin(), d->value.end(), 1.0);
  }

  MultivectorBatch embed(const std::vector<double>& x, std::size_t batch) const {
    const std::size_t f = feature_size(cfg_.velocities), half = kChannels * kCoords;
    if (x.size() != batch * f) throw Error(ErrorCode::shape_mismatch, "gca_mlp: input size");
    MultivectorBatch mv(alg_, {batch, kChannels});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t c = 0; c < kChannels; ++c) {
        auto m = mv.mv(b, c);
        const double* p = x.data() + b * f + c * kCoords;
        m[blade_x_] = PointLayout::x_sign * p[0];
        m[blade_y_] = PointLayout::y_sign * p[1];
        m[blade_z_] = PointLayout::z_sign * p[2];
        m[blade_w_] = 1.0;
        if (cfg_.velocities) {
          for (int k = 0; k < 3; ++k) m[blade_v_[k]] = p[half + k];
        }
      }
    }
    return mv;
  }

  std::vector<double> decode(const MultivectorBatch& y) const {
    const std::size_t f = feature_size(cfg_.velocities), half = kChannels * kCoords;
    std::vector<double> out(y.batch() * f);
    for (std::size_t b = 0; b < y.batch(); ++b) {
      for (std::size_t c = 0; c < kChannels; ++c) {
        const auto m = y.mv(b, c);
        double* p = out.data() + b * f + c * kCoords;
        p[0] = PointLayout::x_sign * m[blade_x_];
        p[1] = PointLayout::y_sign * m[blade_y_];
        p[2] = PointLayout::z_sign * m[blade_z_];
        if (cfg_.velocities) {
          for (int k = 0; k < 3; ++k) p[half + k] = m[blade_v_[k]];
        }
      }
    }
    return out;
  }

  MultivectorBatch forward_mv(const MultivectorBatch& x) {
    MultivectorBatch h = x;
    for (std::size_t l = 0; l < 3; ++l) {
      auto& xin = inputs_[l];
      xin = h;
      for (std::size_t b = 0; b < xin.batch(); ++b) {
        for (std::size_t c = 0; c < xin.channels(); ++c) xin.mv(b, c)[blade_w_] = delta_[l]->value[c];
      }
      MultivectorBatch y = linear_[l].forward(xin);
      if (l == 2) return y;
      pre_act_[l] = y;
      post_act_[l] = act_[l].forward(y);
      h = norm_[l].forward(post_act_[l]);
      hidden_[l] = h;
    }
    return h;
  }

  std::vector<double> forward(const std::vector<double>& x, std::size_t batch) override {
    batch_ = batch;
    return decode(forward_mv(embed(x, batch)));
  }

  void backward_mv(MultivectorBatch g) {
    for (std::size_t l = 3; l-- > 0;) {
      if (l < 2) {
        g = norm_[l].backward(post_act_[l], g);
        g = act_[l].backward(pre_act_[l], g);
      }
      g = linear_[l].backward(inputs_[l], g);
      for (std::size_t b = 0; b < g.batch(); ++b) {
        for (std::size_t c = 0; c < g.channels(); ++c) {
          delta_[l]->grad[c] += g.mv(b, c)[blade_w_];
          g.mv(b, c)[blade_w_] = 0.0;
        }
      }
    }
  }

  void backward(const std::vector<double>& grad_out) override {
    const std::size_t f = feature_size(cfg_.velocities), half = kChannels * kCoords;
    if (grad_out.size() != batch_ * f) throw Error(ErrorCode::shape_mismatch, "gca_mlp: gradient size");
    MultivectorBatch g(alg_, {batch_, kChannels});
    for (std::size_t b = 0; b < batch_; ++b) {
      for (std::size_t c = 0; c < kChannels; ++c) {
        auto m = g.mv(b, c);
        const double* p = grad_out.data() + b * f + c * kCoords;
        m[blade_x_] = PointLayout::x_sign * p[0];
        m[blade_y_] = PointLayout::y_sign * p[1];
        m[blade_z_] = PointLayout::z_sign * p[2];
        if (cfg_.velocities) {
          for (int k = 0; k < 3; ++k) m[blade_v_[k]] = p[half + k];
        }
      }
    }
    backward_mv(std::move(g));
  }

  /// Hidden activations after each normalization, from the last forward.
  const MultivectorBatch& hidden(std::size_t l) const { return hidden_.at(l); }
  std::vector<int> active_grades() const { return cfg_.velocities ? std::vector<int>{1, 3} : std::vector<int>{3}; }

 private:
  ModelConfig cfg_;
  AlgebraPtr alg_;
  ParamStore store_;
  std::vector<Parameter*> delta_;
  std::vector<GcaLinear> linear_;
  std::vector<Msilu> act_;
  std::vector<GcaNorm> norm_;
  std::size_t blade_x_ = 0, blade_y_ = 0, blade_z_ = 0, blade_w_ = 0;
  std::array<std::size_t, 3> blade_v_{};
  std::size_t batch_ = 0;
  std::array<MultivectorBatch, 3> inputs_;
  std::array<MultivectorBatch, 2> pre_act_, post_act_, hidden_;
};

/// Dense F -> H -> H -> F with SiLU and biases.
class BaselineMlp final : public TetrisModel {
 public:
  explicit BaselineMlp(ModelConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.hidden == 0) throw Error(ErrorCode::invalid_config, "baseline_mlp: hidden width must be positive");
    const std::size_t f = feature_size(cfg_.velocities);
    layers_.emplace_back(f, cfg_.hidden, true, store_, "dense0");
    layers_.emplace_back(cfg_.hidden, cfg_.hidden, true, store_, "dense1");
    layers_.emplace_back(cfg_.hidden, f, true, store_, "dense2");
  }

  static std::size_t count_for(std::size_t hidden, bool velocities) {
    const std::size_t f = feature_size(velocities);
    return f * hidden + hidden + hidden * hidden + hidden + hidden * f + f;
  }

  /// Hidden width whose parameter count is closest to target.
  static std::size_t width_matching(std::size_t target, bool velocities) {
    std::size_t best = 1;
    for (std::size_t h = 1; count_for(h, velocities) <= 2 * target + feature_size(velocities); ++h) {
      const auto diff = [&](std::size_t w) {
        const double c = static_cast<double>(count_for(w, velocities));
        return std::abs(c - static_cast<double>(target));
      };
      if (diff(h) < diff(best)) best = h;
    }
    return best;
  }

  const ModelConfig& config() const noexcept override { return cfg_; }
  ParamStore& params() noexcept override { return store_; }

  void reset_parameters(std::uint64_t seed) override {
    for (auto& l : layers_) l.reset_parameters(seed);
  }

  std::vector<double> forward(const std::vector<double>& x, std::size_t batch) override {
    const std::size_t f = feature_size(cfg_.velocities);
    if (x.size() != batch * f) throw Error(ErrorCode::shape_mismatch, "baseline_mlp: input size");
    x_ = Eigen::Map<const RowMat>(x.data(), static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(f));
    h1_ = layers_[0].forward(x_);
    a1_ = h1_.unaryExpr([](double v) { return silu(v); });
    h2_ = layers_[1].forward(a1_);
    a2_ = h2_.unaryExpr([](double v) { return silu(v); });
    const RowMat y = layers_[2].forward(a2_);
    return {y.data(), y.data() + y.size()};
  }

  void backward(const std::vector<double>& grad_out) override {
    const RowMat gy = Eigen::Map<const RowMat>(grad_out.data(), x_.rows(), static_cast<Eigen::Index>(feature_size(cfg_.velocities)));
    RowMat g = layers_[2].backward(a2_, gy);
    g.array() *= h2_.unaryExpr([](double v) { return silu_grad(v); }).array();
    g = layers_[1].backward(a1_, g);
    g.array() *= h1_.unaryExpr([](double v) { return silu_grad(v); }).array();
    (void)layers_[0].backward(x_, g);
  }

 private:
  ModelConfig cfg_;
  ParamStore store_;
  std::vector<DenseLayer> layers_;
  RowMat x_, h1_, a1_, h2_, a2_;
};

inline std::unique_ptr<TetrisModel> build_model(const ModelConfig& cfg) {
  if (cfg.kind == ModelKind::gca_mlp) return std::make_unique<GcaMlp>(cfg);
  return std::make_unique<BaselineMlp>(cfg);
}

/// Baseline config whose parameter count matches the GCA-MLP built from gca.
inline ModelConfig matched_baseline(const ModelConfig& gca) {
  GcaMlp probe(gca);
  ModelConfig b = gca;
  b.kind = ModelKind::baseline_mlp;
  b.hidden = BaselineMlp::width_matching(probe.parameter_count(), gca.velocities);
  return b;
}

}  // namespace gcan::tetris
