// Acceptance criteria AC1-AC12.  One PASS/FAIL line each; exits 1 if any
// fails.  Pass criterion names (e.g. "AC3 AC9") to run a subset.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <string>

#include "gcan/gcan.hpp"
#include "gcan/verify.hpp"

namespace {

using namespace gcan;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<Signature>& law_algebras() {
  static const std::vector<Signature> s{Signature(2, 0, 0), Signature(3, 0, 0), Signature(3, 0, 1), Signature(1, 1, 0)};
  return s;
}

Outcome ac1() {
  constexpr double kSeconds = 10.0;
  const auto t0 = Clock::now();
  std::size_t sigs = 0, bad = 0;
  for (int n = 0; n <= 5; ++n) {
    for (int r = 0; r <= n; ++r) {
      for (int q = 0; q + r <= n; ++q) {
        bad += verify::cayley_mismatches(*Algebra::make(n - q - r, q, r));
        ++sigs;
      }
    }
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < kSeconds, fmt("%zu signatures with n <= 5, %zu mismatched entries, %.2f s (limit %.0f s)", sigs, bad, t, kSeconds)};
}

Outcome ac2() {
  constexpr double kTol = 1e-10;
  constexpr std::size_t kTriples = 1000;
  double worst = 0.0;
  for (const auto& sig : law_algebras()) {
    const auto alg = Algebra::make(sig);
    Rng rng(2, "laws/" + sig.describe());
    worst = std::max({worst, verify::associativity_error(alg, rng, kTriples), verify::distributivity_error(alg, rng, kTriples)});
  }
  return {worst < kTol, fmt("associativity and distributivity, %zu triples x 4 algebras, max |d| = %.2e (tol %.0e)", kTriples, worst, kTol)};
}

Outcome ac3() {
  constexpr double kTol = 1e-14;
  const auto g2 = Algebra::make(2, 0, 0);
  const double h = 1.0 / std::sqrt(2.0);
  Multivector u(g2), v(g2);
  u[0] = h, u[3] = h, v[0] = h, v[3] = -h;
  const double e1 = max_abs_diff(u * v, Multivector::scalar(g2, 1.0));
  const auto e12 = Multivector::parse(g2, "e12");
  const double e2 = max_abs_diff(e12 * e12, Multivector::scalar(g2, -1.0));
  return {e1 < kTol && e2 < kTol, fmt("(1+e12)(1-e12)/2 off by %.2e, e12^2 + 1 off by %.2e (tol %.0e)", e1, e2, kTol)};
}

Outcome ac4() {
  constexpr double kTol = 1e-10;
  constexpr std::size_t kActions = 1000;
  double action = 0.0, stack = 0.0;
  for (const Signature& sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    const auto alg = Algebra::make(sig);
    Rng rng(4, "grades/" + sig.describe());
    action = std::max(action, verify::grade_preservation_error(alg, rng, kActions));
    for (std::uint64_t s = 0; s < 10; ++s) stack = std::max(stack, verify::stack_grade_error(alg, s));
  }
  return {action < kTol && stack < kTol,
          fmt("off-grade mass: %zu even-versor actions %.2e, conv/MSiLU/norm/linear stacks %.2e (tol %.0e)", 2 * kActions, action, stack,
              kTol)};
}

Outcome ac5() {
  constexpr double kCoverTol = 1e-15, kIsoTol = 1e-10;
  double cover = 0.0;
  for (const Signature& sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    Rng rng(5, "cover/" + sig.describe());
    cover = std::max(cover, verify::double_cover_error(Algebra::make(sig), rng, 1000));
  }
  Rng rng(5, "isometry");
  const double iso = verify::isometry_error(Algebra::make(3, 0, 0), rng, 1000);
  return {cover < kCoverTol && iso < kIsoTol,
          fmt("|u.x - (-u).x| = %.2e (tol %.0e), relative norm change %.2e (tol %.0e)", cover, kCoverTol, iso, kIsoTol)};
}

Outcome ac6() {
  constexpr double kTol = 1e-12, kOrthoTol = 1e-9;
  Rng rng(6, "rotational");
  const auto [k, o] = verify::rotational_kernel_errors(rng, 1000);
  return {k < kTol && o < kOrthoTol,
          fmt("closed-form kernel vs sandwich %.2e (tol %.0e), |R^T R/s^2 - I| %.2e (tol %.0e), 1000 actions", k, kTol, o, kOrthoTol)};
}

Outcome ac7() {
  constexpr double kTol = 1e-10;
  Rng rng(7, "translation");
  const double e = verify::translation_error(rng, 100);
  return {e < kTol, fmt("reflections in planes d/2 apart, 100 offsets, max |d| = %.2e (tol %.0e)", e, kTol)};
}

Outcome ac8() {
  constexpr double kTol = 1e-5, kSeconds = 60.0;
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_layer;
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& r : verify::layer_gradient_errors(seed)) {
      ++checks;
      if (r.worst >= worst) worst = r.worst, worst_layer = r.layer;
    }
  }
  const double t = seconds_since(t0);
  return {worst < kTol && t < kSeconds, fmt("%zu layer checks over 100 seeds, worst rel. err %.2e in %s (tol %.0e), %.1f s (limit %.0f s)",
                                           checks, worst, worst_layer.c_str(), kTol, t, kSeconds)};
}

Outcome ac9() {
  constexpr double kMinutes = 15.0;
  const auto t0 = Clock::now();
  tetris::ExperimentConfig cfg;
  std::ofstream log("tetris_runs.ndjson");
  const auto res = tetris::run_experiment(cfg, &log);
  const double gca = res.median(tetris::ModelKind::gca_mlp), mlp = res.median(tetris::ModelKind::baseline_mlp);
  std::string runs;
  for (const auto& r : res.runs) runs += fmt(" %s/%llu=%.4f", tetris::to_string(r.kind), static_cast<unsigned long long>(r.seed), r.test_mse);
  const double m = seconds_since(t0) / 60.0;
  return {gca < mlp && m < kMinutes,
          fmt("median test MSE GCA-MLP %.4f (%zu params) vs MLP %.4f (%zu params), %.1f min (limit %.0f);", gca, res.runs[0].params, mlp,
              res.runs[1].params, m, kMinutes) +
              runs};
}

Outcome ac10() {
  tetris::ModelConfig pos, vel;
  vel.velocities = true;
  tetris::GcaMlp a(pos), b(vel);
  const auto mp = tetris::matched_baseline(pos), mv = tetris::matched_baseline(vel);
  const auto np = tetris::BaselineMlp::count_for(mp.hidden, false), nv = tetris::BaselineMlp::count_for(mv.hidden, true);
  const double gap = std::abs(static_cast<double>(nv) / static_cast<double>(b.parameter_count()) - 1.0);
  return {a.parameter_count() == b.parameter_count() && mv.hidden < mp.hidden && gap < 0.05,
          fmt("GCA-MLP %zu -> %zu params; baseline width %zu (%zu) -> %zu (%zu)", a.parameter_count(), b.parameter_count(), mp.hidden, np,
              mv.hidden, nv)};
}

Outcome ac11() {
  const auto alg = Algebra::make(0, 0, 0);
  ParamStore store;
  GcaLinear lin(alg, {24, 16, scalar_mask(*alg), {}, KernelPath::structured}, store, "aff");
  lin.reset_parameters(11);
  Rng rng(11, "aff");
  for (double& a : lin.actions().value) a = rng.uniform(0.5, 2.0) * (rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0);
  MultivectorBatch x(alg, {9, 24});
  for (double& v : x.data()) v = rng.normal();
  const auto y = lin.forward(x);
  ParamStore dstore;
  DenseLayer dense(24, 16, false, dstore, "dense");
  const RowMat& w = lin.effective_weights(0);
  std::copy(w.data(), w.data() + w.size(), dense.weights().value.begin());
  RowMat xm(9, 24);
  std::copy(x.data().begin(), x.data().end(), xm.data());
  const RowMat ref = dense.forward(xm);
  std::size_t differ = 0, folded = 0;
  for (std::size_t i = 0; i < y.data().size(); ++i) differ += y.data()[i] != ref.data()[i];
  for (std::size_t i = 0; i < lin.weights().value.size(); ++i) folded += w.data()[i] != lin.weights().value[i];
  return {differ == 0 && folded == 0,
          fmt("G(0,0,0) layer vs dense layer: %zu of %zu outputs differ bitwise; %zu folded weights differ from w", differ, y.data().size(),
              folded)};
}

Outcome ac12() {
  constexpr double kTol = 1e-6;
  constexpr std::size_t kMaxSteps = 2000;
  const auto alg = Algebra::make(3, 0, 0);
  Rng rng(12, "field");
  const Versor target = rotor(alg, 0.3, -0.8, 0.5, 1.1);
  MultivectorBatch x(alg, {1, 1, 16, 16}), y(alg, {1, 1, 16, 16});
  for (std::size_t p = 0; p < 256; ++p) {
    Multivector v(alg);
    for (int i = 0; i < 3; ++i) v[alg->index_of(BladeBits{1} << i)] = rng.normal();
    x.set(0, 0, p, v);
    y.set(0, 0, p, pin_action(target, v));
  }
  ParamStore store;
  GcaConv2d conv(alg, {1, 1, 1, Padding::zero, rotor_mask(*alg), {1}, KernelPath::structured}, store, "conv");
  conv.reset_parameters(12);
  Adam opt(store, {1e-2});
  auto mse = [&](const MultivectorBatch& pred, MultivectorBatch* grad) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
      const double d = pred.data()[i] - y.data()[i];
      s += d * d;
      if (grad) grad->data()[i] = 2.0 * d / 256.0;
    }
    return s / 256.0;
  };
  double loss = 0.0;
  std::size_t step = 0;
  while (step < kMaxSteps) {
    store.zero_grad();
    const auto pred = conv.forward(x);
    auto g = MultivectorBatch::zeros_like(pred);
    loss = mse(pred, &g);
    if (loss < kTol) break;
    (void)conv.backward(x, g);
    opt.step();
    ++step;
  }
  return {loss < kTol, fmt("1x1 conv fit of a fixed rotation on a 16x16 vector field: MSE %.2e after %zu Adam steps (tol %.0e, max %zu)",
                           loss, step, kTol, kMaxSteps)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12}};
  const std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << name << (o.pass ? " PASS " : " FAIL ") << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
