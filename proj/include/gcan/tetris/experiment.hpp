#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "gcan/tetris/models.hpp"
#include "gcan/train/adam.hpp"
#include "gcan/train/loop.hpp"
#include "gcan/train/loss.hpp"

namespace gcan::tetris {

struct TrainConfig {
  std::size_t steps = 5000;
  std::size_t batch = 128;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t val_every = 0;
};

/// Test MSE: per trajectory the squared error summed over the predicted
/// steps and components, divided by the 32 locations; averaged over rows.
inline double evaluate(TetrisModel& model, const Dataset& data, std::size_t chunk = 256) {
  const bool vel = model.config().velocities;
  double total = 0.0;
  std::vector<std::size_t> rows;
  for (std::size_t first = 0; first < data.n_traj; first += chunk) {
    const std::size_t n = std::min(chunk, data.n_traj - first);
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), first);
    const auto pred = model.forward(inputs(data, rows, vel), n);
    const auto tgt = targets(data, rows, vel);
    total += mse_loss(pred, tgt, kLocations, 1).value;
  }
  return total / static_cast<double>(data.n_traj);
}

/// Minibatches drawn by reshuffling the training rows every epoch.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed)
      : n_(n), batch_(std::min(batch, n)), rng_(seed, "batches"), order_(n) {
    if (n == 0 || batch == 0) throw Error(ErrorCode::invalid_config, "empty training set or batch");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    pos_ = n_;
  }
  std::vector<std::size_t> next() {
    std::vector<std::size_t> rows(batch_);
    for (auto& r : rows) {
      if (pos_ == n_) {
        std::shuffle(order_.begin(), order_.end(), rng_.engine());
        pos_ = 0;
      }
      r = order_[pos_++];
    }
    return rows;
  }

 private:
  std::size_t n_, batch_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

inline std::vector<LogRecord> train_model(TetrisModel& model, const Dataset& train, const TrainConfig& cfg,
                                          const Dataset* val = nullptr, std::ostream* log = nullptr) {
  const bool vel = model.config().velocities;
  Adam opt(model.params(), {cfg.lr});
  BatchSampler sampler(train.n_traj, cfg.batch, cfg.seed);
  auto step = [&](std::size_t) {
    const auto rows = sampler.next();
    const auto pred = model.forward(inputs(train, rows, vel), rows.size());
    const auto r = mse_loss(pred, targets(train, rows, vel), kLocations, rows.size());
    model.backward(r.grad);
    return r.value;
  };
  std::function<double()> validate;
  if (val) validate = [&] { return evaluate(model, *val); };
  return run_training(model.params(), opt, {cfg.steps, cfg.val_every}, step, validate, log);
}

struct ExperimentConfig {
  std::size_t train_size = 256;
  std::size_t test_size = 1024;
  std::uint64_t data_seed = 2024;
  TrainConfig train{};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  ModelConfig gca{};
  bool velocities = false;
};

struct RunResult {
  ModelKind kind = ModelKind::gca_mlp;
  std::uint64_t seed = 0;
  std::size_t params = 0;
  std::size_t hidden = 0;
  double final_train_loss = std::numeric_limits<double>::quiet_NaN();
  double test_mse = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  double wall_ms = 0.0;

  nlohmann::json to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"model", to_string(kind)},       {"seed", seed},         {"params", params},
            {"hidden", hidden},               {"final_train_loss", num(final_train_loss)},
            {"test_mse", num(test_mse)},       {"diverged", diverged}, {"wall_ms", wall_ms}};
  }
};

/// Median over finite values; NaN when every run diverged.
inline double median_finite(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct ExperimentResult {
  std::vector<RunResult> runs;

  double median(ModelKind kind) const {
    std::vector<double> v;
    for (const auto& r : runs) {
      if (r.kind == kind) v.push_back(r.test_mse);
    }
    return median_finite(v);
  }
};

inline RunResult run_one(const ModelConfig& mc, const Dataset& train, const Dataset& test, TrainConfig tc,
                         std::uint64_t seed, std::ostream* log) {
  auto model = build_model(mc);
  model->reset_parameters(seed);
  tc.seed = seed;
  RunResult r;
  r.kind = mc.kind;
  r.seed = seed;
  r.params = model->parameter_count();
  r.hidden = mc.hidden;
  try {
    const auto recs = train_model(*model, train, tc);
    if (!recs.empty()) {
      r.final_train_loss = recs.back().train_loss;
      r.wall_ms = recs.back().wall_ms;
    }
    r.test_mse = evaluate(*model, test);
    r.diverged = !std::isfinite(r.test_mse);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::non_finite) throw;
    r.diverged = true;
  }
  if (log) *log << r.to_json().dump() << '\n';
  return r;
}

/// Trains the GCA-MLP and its parameter-matched baseline for every seed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  GeneratorConfig gen;
  gen.velocities = cfg.velocities;
  gen.n_traj = cfg.train_size;
  gen.seed = cfg.data_seed;
  const Dataset train = generate_dataset(gen);
  gen.n_traj = cfg.test_size;
  gen.seed = seed_for(cfg.data_seed, "test");
  const Dataset test = generate_dataset(gen);
  ModelConfig gca = cfg.gca;
  gca.kind = ModelKind::gca_mlp;
  gca.velocities = cfg.velocities;
  const ModelConfig mlp = matched_baseline(gca);
  ExperimentResult res;
  for (auto seed : cfg.seeds) {
    res.runs.push_back(run_one(gca, train, test, cfg.train, seed, log));
    res.runs.push_back(run_one(mlp, train, test, cfg.train, seed, log));
  }
  return res;
}

}  // namespace gcan::tetris
