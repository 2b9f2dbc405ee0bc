#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <vector>

#include "gcan/train/adam.hpp"

namespace gcan {

struct LogRecord {
  std::size_t step = 0;
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"step", step}, {"train_loss", train_loss}, {"wall_ms", wall_ms}};
    j["val_loss"] = std::isfinite(val_loss) ? nlohmann::json(val_loss) : nlohmann::json(nullptr);
    return j;
  }
};

struct LoopConfig {
  std::size_t steps = 0;
  /// Validate every val_every steps (and after the last); 0 disables.
  std::size_t val_every = 0;
};

/// Single-threaded loop: zero grads, step(t) fills gradients and returns the
/// training loss, Adam update, one log record per step.  A non-finite loss
/// throws non_finite.
inline std::vector<LogRecord> run_training(ParamStore& store, Adam& opt, const LoopConfig& cfg,
                                           const std::function<double(std::size_t)>& step,
                                           const std::function<double()>& validate = {}, std::ostream* log = nullptr) {
  std::vector<LogRecord> records;
  records.reserve(cfg.steps);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    store.zero_grad();
    const double loss = step(t);
    if (!std::isfinite(loss)) throw Error(ErrorCode::non_finite, "training loss at step " + std::to_string(t) + " is not finite");
    opt.step();
    LogRecord r;
    r.step = t + 1;
    r.train_loss = loss;
    const bool last = t + 1 == cfg.steps;
    if (validate && cfg.val_every && ((t + 1) % cfg.val_every == 0 || last)) r.val_loss = validate();
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (log) *log << r.to_json().dump() << '\n';
    records.push_back(r);
  }
  return records;
}

}  // namespace gcan
