#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gcan/batch.hpp"
#include "gcan/layers/action_kernel.hpp"
#include "gcan/train/params.hpp"

namespace gcan {

struct GcaLinearConfig {
  std::size_t c_in = 1;
  std::size_t c_out = 1;
  BladeMask mask{0};
  std::vector<int> grades;  // empty: every grade
  KernelPath path = KernelPath::structured;

  nlohmann::json to_json(const Algebra& alg) const {
    return {{"type", "gca_linear"},
            {"signature", alg.signature().describe()},
            {"c_in", c_in},
            {"c_out", c_out},
            {"mask", format_mask(alg, mask)},
            {"grades", grades},
            {"path", to_string(path)}};
  }

  static GcaLinearConfig from_json(const Algebra& alg, const nlohmann::json& j) {
    GcaLinearConfig c;
    c.c_in = j.at("c_in").get<std::size_t>();
    c.c_out = j.at("c_out").get<std::size_t>();
    c.mask = parse_mask(alg, j.at("mask").get<std::string>());
    c.grades = j.value("grades", std::vector<int>{});
    c.path = kernel_path_from_string(j.value("path", std::string("structured")));
    return c;
  }
};

namespace detail {

/// Rejects inputs with content on grades the layer does not process.
inline void require_grades(const MultivectorBatch& x, const SandwichStructure& st, const char* layer) {
  const auto& alg = *x.algebra();
  std::vector<char> active(alg.dim(), 0);
  for (const auto& blk : st.blocks()) {
    for (std::size_t b : blk.blades) active[b] = 1;
  }
  const auto data = x.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t b = i % alg.dim();
    if (!active[b] && data[i] != 0.0) {
      throw Error(ErrorCode::mask_violation, std::string(layer) + ": input has " + alg.blade_name(b) +
                                                 " content but the layer does not process grade " +
                                                 std::to_string(alg.grade(b)));
    }
  }
}

}  // namespace detail

/// out[o] = sum_i w[o,i] (-1)^{kl} a[o,i] x[i] a[o,i]^{-1}.  Accepts
/// (b, c_in) or (b, c_in, h, w) batches; spatial positions are independent.
class GcaLinear {
 public:
  GcaLinear(AlgebraPtr alg, GcaLinearConfig cfg, ParamStore& store, const std::string& name)
      : alg_(std::move(alg)), cfg_(std::move(cfg)) {
    if (cfg_.c_in == 0 || cfg_.c_out == 0) throw Error(ErrorCode::invalid_config, name + ": zero channels");
    kernel_ = GroupActionKernel(alg_, cfg_.mask, cfg_.grades, cfg_.c_out, cfg_.c_in, cfg_.path);
    const std::size_t pairs = cfg_.c_out * cfg_.c_in;
    w_ = &store.add(name + ".w", {cfg_.c_out, cfg_.c_in});
    a_ = &store.add(name + ".a", {cfg_.c_out, cfg_.c_in, alg_->dim()}, dense_mask(*alg_, kernel_.structure().mask(), pairs));
    // Valid before any reset: identity actions, unit weights.
    std::fill(w_->value.begin(), w_->value.end(), 1.0);
    init_identity();
  }

  GcaLinear(const GcaLinear&) = delete;
  GcaLinear& operator=(const GcaLinear&) = delete;
  GcaLinear(GcaLinear&&) = default;

  const GcaLinearConfig& config() const noexcept { return cfg_; }
  const AlgebraPtr& algebra() const noexcept { return alg_; }
  Parameter& weights() noexcept { return *w_; }
  Parameter& actions() noexcept { return *a_; }
  const GroupActionKernel& kernel() const noexcept { return kernel_; }

  void reset_parameters(std::uint64_t seed) {
    Rng rw(seed, w_->name);
    init_glorot(w_->value.data(), w_->size(), cfg_.c_in, cfg_.c_out, rw);
    Rng ra(seed, a_->name);
    std::fill(a_->value.begin(), a_->value.end(), 0.0);
    init_actions(kernel_.structure(), cfg_.c_out * cfg_.c_in, a_->value.data(), ra);
  }

  MultivectorBatch forward(const MultivectorBatch& x) {
    check_input(x);
    kernel_.build(w_->value.data(), a_->value.data(), state_);
    std::vector<std::size_t> dims = x.dims();
    dims[1] = cfg_.c_out;
    MultivectorBatch y(alg_, dims);
    const auto& blks = kernel_.structure().blocks();
    const std::size_t rows = x.batch() * x.spatial();
    for (std::size_t g = 0; g < blks.size(); ++g) {
      const std::size_t c = blks[g].blades.size();
      gather(x, blks[g].blades, cfg_.c_in, xg_);
      yg_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cfg_.c_out * c));
      gemm_nt(xg_.data(), rows, cfg_.c_in * c, state_.weff[g].data(), cfg_.c_out * c, yg_.data());
      scatter(yg_, blks[g].blades, y, false);
    }
    return y;
  }

  /// Uses the kernel built by the most recent forward.  Accumulates into the
  /// parameter gradients and returns dL/dx.
  MultivectorBatch backward(const MultivectorBatch& x, const MultivectorBatch& grad_y) {
    check_input(x);
    if (grad_y.channels() != cfg_.c_out || grad_y.batch() != x.batch() || grad_y.spatial() != x.spatial()) {
      throw Error(ErrorCode::shape_mismatch, "gca_linear backward: grad shape");
    }
    MultivectorBatch gx = MultivectorBatch::zeros_like(x);
    const auto& blks = kernel_.structure().blocks();
    std::vector<RowMat> gw(blks.size());
    RowMat gy, gxg;
    for (std::size_t g = 0; g < blks.size(); ++g) {
      gather(x, blks[g].blades, cfg_.c_in, xg_);
      gather(grad_y, blks[g].blades, cfg_.c_out, gy);
      gw[g].noalias() = gy.transpose() * xg_;
      gxg.noalias() = gy * state_.weff[g];
      scatter(gxg, blks[g].blades, gx, true);
    }
    kernel_.backprop(w_->value.data(), a_->value.data(), state_, gw, w_->grad.data(), a_->grad.data());
    return gx;
  }

  /// Folded dense matrix of one grade from the last forward.
  const RowMat& effective_weights(std::size_t grade_block) const { return state_.weff.at(grade_block); }

 private:
  void init_identity() {
    std::fill(a_->value.begin(), a_->value.end(), 0.0);
    const auto& mask = kernel_.structure().mask();
    std::size_t anchor = mask.front();
    for (std::size_t b : mask) {
      if (alg_->square_sign(b) != 0) {
        anchor = b;
        break;
      }
    }
    for (std::size_t p = 0; p < cfg_.c_out * cfg_.c_in; ++p) a_->value[p * alg_->dim() + anchor] = 1.0;
  }

  void check_input(const MultivectorBatch& x) const {
    if (!x.algebra() || x.algebra()->signature() != alg_->signature()) {
      throw Error(ErrorCode::signature_mismatch, "gca_linear: input algebra");
    }
    if (x.channels() != cfg_.c_in) {
      throw Error(ErrorCode::shape_mismatch, "gca_linear: expected " + std::to_string(cfg_.c_in) + " channels, got " +
                                                 std::to_string(x.channels()));
    }
    detail::require_grades(x, kernel_.structure(), "gca_linear");
  }

  /// Rows (b, pos), columns (channel, blade of this grade).
  static void gather(const MultivectorBatch& x, const std::vector<std::size_t>& blades, std::size_t channels, RowMat& out) {
    const std::size_t c = blades.size();
    const std::size_t hw = x.spatial();
    out.resize(static_cast<Eigen::Index>(x.batch() * hw), static_cast<Eigen::Index>(channels * c));
    const auto data = x.data();
    for (std::size_t b = 0; b < x.batch(); ++b) {
      for (std::size_t pos = 0; pos < hw; ++pos) {
        double* row = out.data() + (b * hw + pos) * channels * c;
        for (std::size_t i = 0; i < channels; ++i) {
          const double* mv = data.data() + x.offset(b, i, pos);
          for (std::size_t k = 0; k < c; ++k) row[i * c + k] = mv[blades[k]];
        }
      }
    }
  }

  static void scatter(const RowMat& m, const std::vector<std::size_t>& blades, MultivectorBatch& y, bool accumulate) {
    const std::size_t c = blades.size();
    const std::size_t hw = y.spatial();
    const std::size_t channels = y.channels();
    auto data = y.data();
    for (std::size_t b = 0; b < y.batch(); ++b) {
      for (std::size_t pos = 0; pos < hw; ++pos) {
        const double* row = m.data() + (b * hw + pos) * channels * c;
        for (std::size_t o = 0; o < channels; ++o) {
          double* mv = data.data() + y.offset(b, o, pos);
          for (std::size_t k = 0; k < c; ++k) {
            if (accumulate) {
              mv[blades[k]] += row[o * c + k];
            } else {
              mv[blades[k]] = row[o * c + k];
            }
          }
        }
      }
    }
  }

  AlgebraPtr alg_;
  GcaLinearConfig cfg_;
  GroupActionKernel kernel_;
  Parameter* w_ = nullptr;
  Parameter* a_ = nullptr;
  GroupActionKernel::State state_;
  RowMat xg_, yg_;
};

}  // namespace gcan
