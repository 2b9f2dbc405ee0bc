#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gcan/layers/linear.hpp"

namespace gcan {

enum class Padding { none, zero, circular };

inline const char* to_string(Padding p) {
  switch (p) {
    case Padding::none: return "none";
    case Padding::zero: return "zero";
    case Padding::circular: return "circular";
  }
  return "?";
}

inline Padding padding_from_string(const std::string& s) {
  if (s == "none") return Padding::none;
  if (s == "zero") return Padding::zero;
  if (s == "circular") return Padding::circular;
  throw Error(ErrorCode::invalid_config, "unknown padding \"" + s + "\"");
}

struct GcaConv2dConfig {
  std::size_t c_in = 1;
  std::size_t c_out = 1;
  std::size_t kernel = 3;
  Padding padding = Padding::zero;
  BladeMask mask{0};
  std::vector<int> grades;
  KernelPath path = KernelPath::structured;

  nlohmann::json to_json(const Algebra& alg) const {
    return {{"type", "gca_conv2d"},
            {"signature", alg.signature().describe()},
            {"c_in", c_in},
            {"c_out", c_out},
            {"kernel", kernel},
            {"padding", to_string(padding)},
            {"mask", format_mask(alg, mask)},
            {"grades", grades},
            {"path", to_string(path)}};
  }

  static GcaConv2dConfig from_json(const Algebra& alg, const nlohmann::json& j) {
    GcaConv2dConfig c;
    c.c_in = j.at("c_in").get<std::size_t>();
    c.c_out = j.at("c_out").get<std::size_t>();
    c.kernel = j.at("kernel").get<std::size_t>();
    c.padding = padding_from_string(j.value("padding", std::string("zero")));
    c.mask = parse_mask(alg, j.at("mask").get<std::string>());
    c.grades = j.value("grades", std::vector<int>{});
    c.path = kernel_path_from_string(j.value("path", std::string("structured")));
    return c;
  }
};

/// Stride-1 cross-correlation: out[o](y, x) = sum_{i, dy, dx} w (-1)^{kl} a
/// x_i(y + dy - p, x + dx - p) a^{-1}, p = k / 2 with padding, 0 without.
class GcaConv2d {
 public:
  GcaConv2d(AlgebraPtr alg, GcaConv2dConfig cfg, ParamStore& store, const std::string& name)
      : alg_(std::move(alg)), cfg_(std::move(cfg)) {
    if (cfg_.kernel % 2 == 0 || cfg_.kernel == 0) throw Error(ErrorCode::invalid_config, name + ": kernel size must be odd");
    if (cfg_.c_in == 0 || cfg_.c_out == 0) throw Error(ErrorCode::invalid_config, name + ": zero channels");
    const std::size_t area = cfg_.kernel * cfg_.kernel;
    kernel_ = GroupActionKernel(alg_, cfg_.mask, cfg_.grades, cfg_.c_out, cfg_.c_in * area, cfg_.path, area);
    const std::size_t pairs = cfg_.c_out * cfg_.c_in * area;
    w_ = &store.add(name + ".w", {cfg_.c_out, cfg_.c_in, cfg_.kernel, cfg_.kernel});
    a_ = &store.add(name + ".a", {cfg_.c_out, cfg_.c_in, cfg_.kernel, cfg_.kernel, alg_->dim()},
                    dense_mask(*alg_, kernel_.structure().mask(), pairs));
    std::fill(w_->value.begin(), w_->value.end(), 1.0);
    for (std::size_t p = 0; p < pairs; ++p) a_->value[p * alg_->dim() + anchor()] = 1.0;
  }

  GcaConv2d(const GcaConv2d&) = delete;
  GcaConv2d& operator=(const GcaConv2d&) = delete;
  GcaConv2d(GcaConv2d&&) = default;

  const GcaConv2dConfig& config() const noexcept { return cfg_; }
  Parameter& weights() noexcept { return *w_; }
  Parameter& actions() noexcept { return *a_; }

  void reset_parameters(std::uint64_t seed) {
    const std::size_t area = cfg_.kernel * cfg_.kernel;
    Rng rw(seed, w_->name);
    init_glorot(w_->value.data(), w_->size(), cfg_.c_in * area, cfg_.c_out * area, rw);
    Rng ra(seed, a_->name);
    std::fill(a_->value.begin(), a_->value.end(), 0.0);
    init_actions(kernel_.structure(), cfg_.c_out * cfg_.c_in * area, a_->value.data(), ra);
  }

  MultivectorBatch forward(const MultivectorBatch& x) {
    const Geometry geo = check_input(x);
    kernel_.build(w_->value.data(), a_->value.data(), state_);
    MultivectorBatch y(alg_, {x.batch(), cfg_.c_out, geo.oh, geo.ow});
    const auto& blks = kernel_.structure().blocks();
    RowMat cols, out;
    for (std::size_t g = 0; g < blks.size(); ++g) {
      const std::size_t c = blks[g].blades.size();
      im2col(x, geo, blks[g].blades, cols);
      out.resize(cols.rows(), static_cast<Eigen::Index>(cfg_.c_out * c));
      gemm_nt(cols.data(), static_cast<std::size_t>(cols.rows()), static_cast<std::size_t>(cols.cols()),
              state_.weff[g].data(), cfg_.c_out * c, out.data());
      store_rows(out, blks[g].blades, y);
    }
    return y;
  }

  MultivectorBatch backward(const MultivectorBatch& x, const MultivectorBatch& grad_y) {
    const Geometry geo = check_input(x);
    if (grad_y.channels() != cfg_.c_out || grad_y.height() != geo.oh || grad_y.width() != geo.ow ||
        grad_y.batch() != x.batch()) {
      throw Error(ErrorCode::shape_mismatch, "gca_conv2d backward: grad shape");
    }
    MultivectorBatch gx = MultivectorBatch::zeros_like(x);
    const auto& blks = kernel_.structure().blocks();
    std::vector<RowMat> gw(blks.size());
    RowMat cols, gy, gcols;
    for (std::size_t g = 0; g < blks.size(); ++g) {
      im2col(x, geo, blks[g].blades, cols);
      load_rows(grad_y, blks[g].blades, gy);
      gw[g].noalias() = gy.transpose() * cols;
      gcols.noalias() = gy * state_.weff[g];
      col2im(gcols, geo, blks[g].blades, gx);
    }
    kernel_.backprop(w_->value.data(), a_->value.data(), state_, gw, w_->grad.data(), a_->grad.data());
    return gx;
  }

 private:
  struct Geometry {
    std::size_t h, w, oh, ow, pad;
  };

  std::size_t anchor() const {
    for (std::size_t b : kernel_.structure().mask()) {
      if (alg_->square_sign(b) != 0) return b;
    }
    return kernel_.structure().mask().front();
  }

  Geometry check_input(const MultivectorBatch& x) const {
    if (!x.algebra() || x.algebra()->signature() != alg_->signature()) {
      throw Error(ErrorCode::signature_mismatch, "gca_conv2d: input algebra");
    }
    if (x.rank() != 4) throw Error(ErrorCode::shape_mismatch, "gca_conv2d: expected (b, c, h, w) input");
    if (x.channels() != cfg_.c_in) throw Error(ErrorCode::shape_mismatch, "gca_conv2d: channel count");
    detail::require_grades(x, kernel_.structure(), "gca_conv2d");
    Geometry g{x.height(), x.width(), 0, 0, 0};
    const std::size_t k = cfg_.kernel;
    if (cfg_.padding == Padding::none) {
      if (g.h < k || g.w < k) {
        throw Error(ErrorCode::shape_mismatch, "gca_conv2d: " + std::to_string(g.h) + "x" + std::to_string(g.w) +
                                                   " input is smaller than the " + std::to_string(k) + "x" +
                                                   std::to_string(k) + " kernel and padding is off");
      }
      g.oh = g.h - k + 1;
      g.ow = g.w - k + 1;
    } else {
      g.pad = k / 2;
      g.oh = g.h;
      g.ow = g.w;
    }
    return g;
  }

  /// Source position for output (oy, ox) and tap (dy, dx); false when it
  /// falls into zero padding.
  bool source(const Geometry& g, std::size_t oy, std::size_t ox, std::size_t dy, std::size_t dx, std::size_t& pos) const {
    long sy = static_cast<long>(oy + dy) - static_cast<long>(g.pad);
    long sx = static_cast<long>(ox + dx) - static_cast<long>(g.pad);
    const long h = static_cast<long>(g.h), w = static_cast<long>(g.w);
    if (cfg_.padding == Padding::circular) {
      sy = ((sy % h) + h) % h;
      sx = ((sx % w) + w) % w;
    } else if (sy < 0 || sx < 0 || sy >= h || sx >= w) {
      return false;
    }
    pos = static_cast<std::size_t>(sy * w + sx);
    return true;
  }

  /// Rows (b, oy, ox); columns (channel, dy, dx, blade of this grade).
  void im2col(const MultivectorBatch& x, const Geometry& g, const std::vector<std::size_t>& blades, RowMat& out) const {
    const std::size_t c = blades.size();
    const std::size_t k = cfg_.kernel;
    const std::size_t ncols = cfg_.c_in * k * k * c;
    out.setZero(static_cast<Eigen::Index>(x.batch() * g.oh * g.ow), static_cast<Eigen::Index>(ncols));
    const auto data = x.data();
    for (std::size_t b = 0; b < x.batch(); ++b) {
      for (std::size_t oy = 0; oy < g.oh; ++oy) {
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          double* row = out.data() + ((b * g.oh + oy) * g.ow + ox) * ncols;
          for (std::size_t i = 0; i < cfg_.c_in; ++i) {
            for (std::size_t dy = 0; dy < k; ++dy) {
              for (std::size_t dx = 0; dx < k; ++dx) {
                std::size_t pos = 0;
                if (!source(g, oy, ox, dy, dx, pos)) continue;
                const double* mv = data.data() + x.offset(b, i, pos);
                double* dst = row + ((i * k + dy) * k + dx) * c;
                for (std::size_t q = 0; q < c; ++q) dst[q] = mv[blades[q]];
              }
            }
          }
        }
      }
    }
  }

  void col2im(const RowMat& cols, const Geometry& g, const std::vector<std::size_t>& blades, MultivectorBatch& gx) const {
    const std::size_t c = blades.size();
    const std::size_t k = cfg_.kernel;
    const std::size_t ncols = cfg_.c_in * k * k * c;
    auto data = gx.data();
    for (std::size_t b = 0; b < gx.batch(); ++b) {
      for (std::size_t oy = 0; oy < g.oh; ++oy) {
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          const double* row = cols.data() + ((b * g.oh + oy) * g.ow + ox) * ncols;
          for (std::size_t i = 0; i < cfg_.c_in; ++i) {
            for (std::size_t dy = 0; dy < k; ++dy) {
              for (std::size_t dx = 0; dx < k; ++dx) {
                std::size_t pos = 0;
                if (!source(g, oy, ox, dy, dx, pos)) continue;
                double* mv = data.data() + gx.offset(b, i, pos);
                const double* src = row + ((i * k + dy) * k + dx) * c;
                for (std::size_t q = 0; q < c; ++q) mv[blades[q]] += src[q];
              }
            }
          }
        }
      }
    }
  }

  /// Rows (b, pos), columns (channel, blade).
  static void load_rows(const MultivectorBatch& y, const std::vector<std::size_t>& blades, RowMat& out) {
    const std::size_t c = blades.size(), hw = y.spatial(), ch = y.channels();
    out.resize(static_cast<Eigen::Index>(y.batch() * hw), static_cast<Eigen::Index>(ch * c));
    const auto data = y.data();
    for (std::size_t b = 0; b < y.batch(); ++b) {
      for (std::size_t pos = 0; pos < hw; ++pos) {
        double* row = out.data() + (b * hw + pos) * ch * c;
        for (std::size_t o = 0; o < ch; ++o) {
          const double* mv = data.data() + y.offset(b, o, pos);
          for (std::size_t q = 0; q < c; ++q) row[o * c + q] = mv[blades[q]];
        }
      }
    }
  }

  static void store_rows(const RowMat& m, const std::vector<std::size_t>& blades, MultivectorBatch& y) {
    const std::size_t c = blades.size(), hw = y.spatial(), ch = y.channels();
    auto data = y.data();
    for (std::size_t b = 0; b < y.batch(); ++b) {
      for (std::size_t pos = 0; pos < hw; ++pos) {
        const double* row = m.data() + (b * hw + pos) * ch * c;
        for (std::size_t o = 0; o < ch; ++o) {
          double* mv = data.data() + y.offset(b, o, pos);
          for (std::size_t q = 0; q < c; ++q) mv[blades[q]] = row[o * c + q];
        }
      }
    }
  }

  AlgebraPtr alg_;
  GcaConv2dConfig cfg_;
  GroupActionKernel kernel_;
  Parameter* w_ = nullptr;
  Parameter* a_ = nullptr;
  GroupActionKernel::State state_;
};

}  // namespace gcan
