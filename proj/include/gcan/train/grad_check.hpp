#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gcan/train/params.hpp"

namespace gcan {

struct GradCheckEntry {
  std::string name;
  std::size_t checked = 0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 1e-5;
  double worst = 0.0;
  bool passed() const noexcept { return worst < tolerance; }
};

struct GradCheckOptions {
  double h = 1e-6;
  double tolerance = 1e-5;
  /// 0 checks every trainable entry; otherwise the first max_entries.
  std::size_t max_entries = 0;
};

/// Central differences against analytic gradients.  loss() evaluates the
/// scalar loss; gradients() must zero and refill every grad buffer.  Per
/// buffer the error is max|analytic - numeric| / max(max|analytic|,
/// max|numeric|), and 0 when both maxima are below 1e-12.
inline GradCheckReport grad_check(ParamStore& store, const std::function<double()>& loss,
                                  const std::function<void()>& gradients, GradCheckOptions opt = {}) {
  GradCheckReport rep;
  rep.tolerance = opt.tolerance;
  gradients();
  std::vector<std::vector<double>> analytic;
  for (const auto& p : store) analytic.push_back(p.grad);
  std::size_t k = 0;
  for (auto& p : store) {
    GradCheckEntry e;
    e.name = p.name;
    double diff = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p.mask.empty() && !p.mask[i]) continue;
      if (opt.max_entries && e.checked >= opt.max_entries) break;
      const double orig = p.value[i];
      p.value[i] = orig + opt.h;
      const double lp = loss();
      p.value[i] = orig - opt.h;
      const double lm = loss();
      p.value[i] = orig;
      const double num = (lp - lm) / (2.0 * opt.h);
      const double ana = analytic[k][i];
      diff = std::max(diff, std::abs(ana - num));
      e.max_abs_analytic = std::max(e.max_abs_analytic, std::abs(ana));
      e.max_abs_numeric = std::max(e.max_abs_numeric, std::abs(num));
      ++e.checked;
    }
    const double scale = std::max(e.max_abs_analytic, e.max_abs_numeric);
    e.rel_error = scale < 1e-12 ? 0.0 : diff / scale;
    rep.worst = std::max(rep.worst, e.rel_error);
    rep.entries.push_back(e);
    ++k;
  }
  return rep;
}

}  // namespace gcan
