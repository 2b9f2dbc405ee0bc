#pragma once

#include <span>
#include <vector>

#include "gcan/error.hpp"

namespace gcan {

struct LossResult {
  double value = 0.0;
  std::vector<double> grad;
};

/// Squared error summed over steps and coordinates, divided by the number of
/// locations per sample, averaged over the batch.
inline LossResult mse_loss(std::span<const double> pred, std::span<const double> target, std::size_t locations,
                           std::size_t batch = 1) {
  if (pred.size() != target.size()) throw Error(ErrorCode::shape_mismatch, "mse_loss: prediction and target sizes differ");
  if (locations == 0 || batch == 0) throw Error(ErrorCode::shape_mismatch, "mse_loss: empty normalizer");
  const double scale = 1.0 / (static_cast<double>(locations) * static_cast<double>(batch));
  LossResult r{0.0, std::vector<double>(pred.size())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.value += d * d;
    r.grad[i] = 2.0 * d * scale;
  }
  r.value *= scale;
  return r;
}

}  // namespace gcan
