#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gcan/gcan.hpp"

namespace gcan::verify {

struct PropertyResult {
  std::string suite;
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return failed == 0; }
};

struct Options {
  std::uint64_t seed = 0;
  /// Flips table entry (j, k) of every algebra the suites build.
  std::optional<std::pair<std::size_t, std::size_t>> fault;
  std::size_t samples = 200;

  AlgebraPtr make(const Signature& sig) const {
    const std::size_t dim = std::size_t{1} << sig.n();
    if (fault && fault->first < dim && fault->second < dim) return Algebra::make_with_fault(sig, fault->first, fault->second);
    return Algebra::make(sig);
  }
};

// ---------------------------------------------------------------------------
// Measurements.  Each returns the worst deviation (or a mismatch count).

/// Entries that differ from a product computed by sorting index lists.
inline std::size_t cayley_mismatches(const Algebra& alg) {
  const auto& metric = alg.signature().metric();
  std::size_t bad = 0;
  for (std::size_t j = 0; j < alg.dim(); ++j) {
    for (std::size_t k = 0; k < alg.dim(); ++k) {
      std::vector<int> w;
      for (BladeBits b : {alg.bits(j), alg.bits(k)}) {
        for (int i = 0; i < alg.n(); ++i) {
          if (b & (BladeBits{1} << i)) w.push_back(i);
        }
      }
      int sign = 1;
      for (std::size_t pass = 0; pass < w.size(); ++pass) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
          if (w[i] > w[i + 1]) {
            std::swap(w[i], w[i + 1]);
            sign = -sign;
          }
        }
      }
      BladeBits out = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == w[i + 1]) {
          sign *= metric[static_cast<std::size_t>(w[i])];
          ++i;
        } else {
          out |= BladeBits{1} << w[i];
        }
      }
      const auto& e = alg.table().entry(j, k);
      if (sign == 0) {
        bad += e.sign != 0;
      } else {
        bad += e.sign != sign || e.index != alg.index_of(out);
      }
    }
  }
  return bad;
}

inline Multivector random_multivector(const AlgebraPtr& alg, Rng& rng) {
  Multivector m(alg);
  for (std::size_t i = 0; i < alg->dim(); ++i) m[i] = rng.normal();
  return m;
}

inline Multivector random_grade(const AlgebraPtr& alg, int k, Rng& rng) {
  Multivector m(alg);
  for (std::size_t i : alg->grade_blades(k)) m[i] = rng.normal();
  return m;
}

/// Product of `count` random vectors whose non-null part has norm >= 0.3.
inline Versor random_versor(const AlgebraPtr& alg, int count, Rng& rng) {
  Multivector v = Multivector::scalar(alg, 1.0);
  for (int f = 0; f < count; ++f) {
    for (;;) {
      Multivector u = random_grade(alg, 1, rng);
      double s = 0.0;
      for (std::size_t i : alg->grade_blades(1)) s += std::abs(alg->square_sign(i)) * u[i] * u[i];
      if (s > 0.09 && std::abs(scalar_part(u * u)) > 0.09) {
        v = v * u;
        break;
      }
    }
  }
  return Versor::from_multivector(v);
}

inline double associativity_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto a = random_multivector(alg, rng), b = random_multivector(alg, rng), c = random_multivector(alg, rng);
    worst = std::max(worst, max_abs_diff((a * b) * c, a * (b * c)));
  }
  return worst;
}

inline double distributivity_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto a = random_multivector(alg, rng), b = random_multivector(alg, rng), c = random_multivector(alg, rng);
    worst = std::max(worst, max_abs_diff(a * (b + c), a * b + a * c));
    worst = std::max(worst, max_abs_diff((b + c) * a, b * a + c * a));
  }
  return worst;
}

inline double reverse_antiautomorphism_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto a = random_multivector(alg, rng), b = random_multivector(alg, rng);
    worst = std::max(worst, max_abs_diff(reverse(a * b), reverse(b) * reverse(a)));
  }
  return worst;
}

/// Largest off-grade coefficient after even-versor actions on k-vectors.
inline double grade_preservation_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Versor u = random_versor(alg, 2 + 2 * static_cast<int>(t % 2), rng);
    const int k = static_cast<int>(t % static_cast<std::size_t>(alg->n() + 1));
    const auto y = pin_action(u, random_grade(alg, k, rng));
    for (std::size_t i = 0; i < alg->dim(); ++i) {
      if (alg->grade(i) != k) worst = std::max(worst, std::abs(y[i]));
    }
  }
  return worst;
}

inline double double_cover_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Versor u = random_versor(alg, 1 + static_cast<int>(t % 4), rng);
    const Versor neg = Versor::from_multivector(-1.0 * u.value());
    const auto x = random_multivector(alg, rng);
    worst = std::max(worst, max_abs_diff(pin_action(u, x), pin_action(neg, x)));
  }
  return worst;
}

/// Relative change of the coefficient norm under versor actions (Euclidean metric).
inline double isometry_error(const AlgebraPtr& alg, Rng& rng, std::size_t n) {
  auto norm = [](const Multivector& m) {
    double s = 0.0;
    for (double c : m.coeffs()) s += c * c;
    return std::sqrt(s);
  };
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Versor u = random_versor(alg, 1 + static_cast<int>(t % 4), rng);
    const auto x = random_multivector(alg, rng);
    const double before = norm(x), after = norm(pin_action(u, x));
    worst = std::max(worst, std::abs(after - before) / before);
  }
  return worst;
}

/// Reflections in parallel planes d/2 apart moving embedded points by d.
inline double translation_error(Rng& rng, std::size_t n) {
  const auto alg = Algebra::make(3, 0, 1);
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dx = rng.normal(), dy = rng.normal(), dz = rng.normal();
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double nx = dx / d, ny = dy / d, nz = dz / d;
    const Versor planes[] = {PlaneG301{nx, ny, nz, 0.0}.to_versor(alg), PlaneG301{nx, ny, nz, d / 2}.to_versor(alg)};
    const Versor tr = compose_reflections(alg, planes);
    const PointG301 p{rng.normal(), rng.normal(), rng.normal()};
    const auto q = extract_point(pin_action(tr, embed_point(alg, p)));
    worst = std::max({worst, std::abs(q.x - p.x - dx), std::abs(q.y - p.y - dy), std::abs(q.z - p.z - dz)});
  }
  return worst;
}

/// max |R/s - sandwich matrix| on vectors and max |R^T R / s^2 - I|.
inline std::pair<double, double> rotational_kernel_errors(Rng& rng, std::size_t n) {
  const auto alg = Algebra::make(3, 0, 0);
  double worst = 0.0, ortho = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    Multivector a(alg);
    a[0] = rng.normal();
    for (std::size_t i : alg->grade_blades(2)) a[i] = rng.normal();
    const auto r = rotational_kernel_g300(a);
    const double s = reverse_norm_squared(a);
    const Versor u = Versor::from_multivector(a);
    for (int j = 0; j < 3; ++j) {
      const auto img = pin_action(u, Multivector::basis_vector(alg, j));
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(r[i][j] / s - img[alg->index_of(BladeBits{1} << i)]));
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (int k = 0; k < 3; ++k) m += r[k][i] * r[k][j];
        ortho = std::max(ortho, std::abs(m / (s * s) - (i == j ? 1.0 : 0.0)));
      }
    }
  }
  return {worst, ortho};
}

/// Finite-difference check of a layer and its input, with loss <r, y>.
template <typename Layer>
GradCheckReport layer_grad_check(Layer& layer, ParamStore& store, const MultivectorBatch& x0, std::uint64_t seed) {
  std::vector<std::uint8_t> mask(x0.data().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = x0.data()[i] != 0.0;
  Parameter& xp = store.add("input", {x0.data().size()}, mask);
  std::copy(x0.data().begin(), x0.data().end(), xp.value.begin());
  MultivectorBatch x = x0;
  auto load = [&] { std::copy(xp.value.begin(), xp.value.end(), x.data().begin()); };
  const MultivectorBatch y0 = layer.forward(x);
  MultivectorBatch r = MultivectorBatch::zeros_like(y0);
  Rng rng(seed, "cotangent");
  for (double& v : r.data()) v = rng.normal();
  auto loss = [&] {
    load();
    return dot(r.data(), layer.forward(x).data());
  };
  auto grads = [&] {
    store.zero_grad();
    load();
    (void)layer.forward(x);
    const auto gx = layer.backward(x, r);
    std::copy(gx.data().begin(), gx.data().end(), xp.grad.begin());
    xp.apply_mask();
  };
  return grad_check(store, loss, grads);
}

namespace detail {

inline MultivectorBatch random_batch(const AlgebraPtr& alg, std::vector<std::size_t> dims, const std::vector<int>& grades,
                                     Rng& rng) {
  MultivectorBatch x(alg, std::move(dims));
  auto d = x.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int g = alg->grade(i % alg->dim());
    if (std::find(grades.begin(), grades.end(), g) != grades.end()) d[i] = rng.normal();
  }
  return x;
}

inline void spread_actions(Parameter& a, Rng& rng, double scale) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.mask.empty() || a.mask[i]) a.value[i] += scale * rng.normal();
  }
}

}  // namespace detail

struct LayerGradResult {
  std::string layer;
  double worst = 0.0;
};

/// Checks every layer type once for one seed.
inline std::vector<LayerGradResult> layer_gradient_errors(std::uint64_t seed) {
  std::vector<LayerGradResult> out;
  Rng rng(seed, "layer-gradients");
  const auto g301 = Algebra::make(3, 0, 1), g300 = Algebra::make(3, 0, 0), g210 = Algebra::make(2, 1, 0);
  {
    ParamStore s;
    GcaLinear l(g301, {3, 2, screw_mask(*g301), {}, KernelPath::structured}, s, "linear");
    l.reset_parameters(seed);
    detail::spread_actions(l.actions(), rng, 0.3);
    out.push_back({"gca_linear/G301/screw", layer_grad_check(l, s, detail::random_batch(g301, {2, 3}, all_grades(*g301), rng), seed).worst});
  }
  {
    ParamStore s;
    GcaLinear l(g300, {2, 2, grade_mask(*g300, {1, 3}), {}, KernelPath::clifford}, s, "linear");
    l.reset_parameters(seed);
    detail::spread_actions(l.actions(), rng, 0.3);
    out.push_back({"gca_linear/G300/odd", layer_grad_check(l, s, detail::random_batch(g300, {2, 2}, all_grades(*g300), rng), seed).worst});
  }
  {
    ParamStore s;
    GcaLinear l(g300, {2, 2, rotor_mask(*g300), {1}, KernelPath::rotational}, s, "linear");
    l.reset_parameters(seed);
    detail::spread_actions(l.actions(), rng, 0.3);
    out.push_back({"gca_linear/G300/rotational", layer_grad_check(l, s, detail::random_batch(g300, {2, 2}, {1}, rng), seed).worst});
  }
  {
    ParamStore s;
    GcaConv2d c(g300, {2, 2, 3, seed % 2 ? Padding::circular : Padding::zero, rotor_mask(*g300), {1, 2}, KernelPath::structured}, s,
                "conv");
    c.reset_parameters(seed);
    detail::spread_actions(c.actions(), rng, 0.3);
    out.push_back({"gca_conv2d/G300", layer_grad_check(c, s, detail::random_batch(g300, {1, 2, 3, 3}, {1, 2}, rng), seed).worst});
  }
  for (MsiluMode mode : {MsiluMode::linear, MsiluMode::sum, MsiluMode::mean}) {
    ParamStore s;
    Msilu m(g301, {mode, seed % 2 ? GateInput::own_grade : GateInput::all_blades, seed % 3 == 0}, &s, "msilu");
    m.reset_parameters(seed);
    out.push_back({std::string("msilu/") + to_string(mode),
                   layer_grad_check(m, s, detail::random_batch(g301, {2, 3}, all_grades(*g301), rng), seed).worst});
  }
  for (const AlgebraPtr& alg : {g301, g210}) {
    ParamStore s;
    GcaNorm n(alg, {4, 2, 1e-6, seed % 2 == 0, seed % 3 == 0 ? 1.0 : 0.0}, s, "norm");
    for (double& v : n.scale().value) v = 1.0 + 0.3 * rng.normal();
    out.push_back({"gca_norm/G(" + alg->signature().describe() + ")",
                   layer_grad_check(n, s, detail::random_batch(alg, {2, 4, 1, 2}, all_grades(*alg), rng), seed).worst});
  }
  return out;
}

/// Off-grade mass after a conv -> MSiLU -> norm -> linear stack on k-vectors.
inline double stack_grade_error(const AlgebraPtr& alg, std::uint64_t seed) {
  Rng rng(seed, "stack");
  ParamStore store;
  GcaConv2d conv(alg, {2, 3, 3, Padding::circular, even_mask(*alg), {}, KernelPath::structured}, store, "conv");
  Msilu act(alg, {}, &store, "act");
  GcaNorm nrm(alg, {3, 3, 1e-6, true, 0.0}, store, "norm");
  GcaLinear lin(alg, {3, 2, even_mask(*alg), {}, KernelPath::structured}, store, "lin");
  conv.reset_parameters(seed);
  act.reset_parameters(seed);
  lin.reset_parameters(seed);
  detail::spread_actions(conv.actions(), rng, 0.2);
  double worst = 0.0;
  for (int k = 0; k <= alg->n(); ++k) {
    const auto x = detail::random_batch(alg, {1, 2, 3, 3}, {k}, rng);
    worst = std::max(worst, lin.forward(nrm.forward(act.forward(conv.forward(x)))).off_grade_max({k}));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Suites.

namespace detail {

inline PropertyResult bounded(std::string suite, std::string name, std::size_t checked, double worst, double tol) {
  return {std::move(suite), std::move(name), checked, worst < tol ? 0u : 1u, worst, tol};
}

}  // namespace detail

inline std::vector<PropertyResult> suite_cayley(const Options& opt) {
  PropertyResult r{"cayley", "table matches brute-force products (n <= 5)", 0, 0, 0.0, 0.0};
  for (int n = 0; n <= 5; ++n) {
    for (int r0 = 0; r0 <= n; ++r0) {
      for (int q = 0; q + r0 <= n; ++q) {
        const auto alg = opt.make(Signature(n - q - r0, q, r0));
        const auto bad = cayley_mismatches(*alg);
        ++r.checked;
        r.failed += bad != 0;
        r.worst = std::max(r.worst, static_cast<double>(bad));
      }
    }
  }
  const auto g2 = opt.make(Signature(2, 0, 0));
  const auto e12 = Multivector::parse(g2, "e12");
  PropertyResult ex{"cayley", "e12 e12 = -1 in G(2,0,0)", 1, max_abs_diff(e12 * e12, Multivector::scalar(g2, -1.0)) == 0.0 ? 0u : 1u,
                    0.0, 0.0};
  return {r, ex};
}

inline std::vector<PropertyResult> suite_algebra(const Options& opt) {
  std::vector<PropertyResult> out;
  for (const Signature& sig : {Signature(2, 0, 0), Signature(3, 0, 0), Signature(3, 0, 1), Signature(1, 1, 0)}) {
    const auto alg = opt.make(sig);
    Rng rng(opt.seed, "algebra/" + sig.describe());
    const std::string tag = " G(" + sig.describe() + ")";
    out.push_back(detail::bounded("algebra", "associativity" + tag, opt.samples, associativity_error(alg, rng, opt.samples), 1e-10));
    out.push_back(detail::bounded("algebra", "distributivity" + tag, opt.samples, distributivity_error(alg, rng, opt.samples), 1e-10));
    out.push_back(detail::bounded("algebra", "reverse of product" + tag, opt.samples,
                                  reverse_antiautomorphism_error(alg, rng, opt.samples), 1e-10));
  }
  const auto g2 = opt.make(Signature(2, 0, 0));
  const double h = 1.0 / std::sqrt(2.0);
  Multivector u(g2), v(g2);
  u[0] = h, u[3] = h, v[0] = h, v[3] = -h;
  out.push_back(detail::bounded("algebra", "(1/sqrt2 + e12/sqrt2)(1/sqrt2 - e12/sqrt2) = 1", 1,
                                max_abs_diff(u * v, Multivector::scalar(g2, 1.0)), 1e-14));
  return out;
}

inline std::vector<PropertyResult> suite_pin(const Options& opt) {
  std::vector<PropertyResult> out;
  for (const Signature& sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    const auto alg = opt.make(sig);
    Rng rng(opt.seed, "pin/" + sig.describe());
    const std::string tag = " G(" + sig.describe() + ")";
    out.push_back(detail::bounded("pin", "grade preservation" + tag, opt.samples, grade_preservation_error(alg, rng, opt.samples), 1e-10));
    out.push_back(detail::bounded("pin", "double cover" + tag, opt.samples, double_cover_error(alg, rng, opt.samples), 1e-12));
  }
  {
    const auto alg = opt.make(Signature(3, 0, 0));
    Rng rng(opt.seed, "pin/isometry");
    out.push_back(detail::bounded("pin", "isometry G(3,0,0)", opt.samples, isometry_error(alg, rng, opt.samples), 1e-10));
    const auto e1 = Versor::plane(Multivector::basis_vector(alg, 0));
    out.push_back(detail::bounded("pin", "reflect(e1, e1) = -e1", 1,
                                  max_abs_diff(reflect(e1, Multivector::basis_vector(alg, 0)), Multivector::basis_vector(alg, 0, -1.0)),
                                  1e-15));
  }
  Rng rng(opt.seed, "pin/translation");
  out.push_back(detail::bounded("pin", "parallel planes translate points", 100, translation_error(rng, 100), 1e-10));
  return out;
}

inline std::vector<PropertyResult> suite_layers(const Options& opt) {
  std::vector<PropertyResult> out;
  Rng rng(opt.seed, "layers/rotational");
  const auto [kerr, oerr] = rotational_kernel_errors(rng, opt.samples);
  out.push_back(detail::bounded("layers", "rotational kernel equals sandwich", opt.samples, kerr, 1e-12));
  out.push_back(detail::bounded("layers", "R^T R = s^2 I", opt.samples, oerr, 1e-9));
  PropertyResult grad{"layers", "analytic gradients vs central differences", 0, 0, 0.0, 1e-5};
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (const auto& r : layer_gradient_errors(opt.seed + s)) {
      ++grad.checked;
      grad.failed += !(r.worst < grad.tolerance);
      grad.worst = std::max(grad.worst, r.worst);
    }
  }
  out.push_back(grad);
  double stack = 0.0;
  for (const Signature& sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) stack = std::max(stack, stack_grade_error(opt.make(sig), opt.seed));
  out.push_back(detail::bounded("layers", "layer stacks preserve grade", 2, stack, 1e-10));
  return out;
}

inline std::vector<PropertyResult> suite_train(const Options& opt) {
  std::vector<PropertyResult> out;
  {
    ParamStore store;
    auto& p = store.add("p", {1});
    Adam adam(store, {0.1});
    for (int t = 0; t < 200; ++t) {
      p.grad[0] = 2.0 * (p.value[0] - 3.0);
      adam.step();
    }
    out.push_back(detail::bounded("train", "Adam converges on (p-3)^2", 1, std::abs(p.value[0] - 3.0), 0.1));
  }
  {
    const std::vector<double> d{1.0, 0.0, 0.0}, z{0.0, 0.0, 0.0};
    out.push_back(detail::bounded("train", "mse of unit offset is 1", 1, std::abs(mse_loss(d, z, 1).value - 1.0), 1e-15));
  }
  {
    ParamStore store;
    auto& w = store.add("w", {3});
    w.value = {0.3, -1.2, 2.0};
    const std::vector<double> x{1.5, 0.25, -0.75};
    auto loss = [&] { return w.value[0] * x[0] + w.value[1] * x[1] + w.value[2] * x[2]; };
    const auto good = grad_check(store, loss, [&] { w.grad = x; });
    const auto bad = grad_check(store, loss, [&] {
      w.grad = x;
      w.grad[0] = -w.grad[0];
    });
    out.push_back(detail::bounded("train", "gradient checker exact on linear model", 1, good.worst, 1e-9));
    out.push_back({"train", "gradient checker flags a sign flip", 1, bad.passed() ? 1u : 0u, bad.worst, 0.0});
  }
  {
    ParamStore a, b;
    a.add("w", {4});
    b.add("w", {4});
    Rng rng(opt.seed, "checkpoint");
    for (double& v : a.at("w").value) v = rng.normal();
    const auto path = (std::filesystem::temp_directory_path() / ("gcan_verify_" + std::to_string(opt.seed) + ".ckpt")).string();
    save_checkpoint(a, path);
    load_checkpoint(b, path);
    std::filesystem::remove(path);
    out.push_back({"train", "checkpoint round trip is exact", 1, a.at("w").value == b.at("w").value ? 0u : 1u, 0.0, 0.0});
  }
  return out;
}

inline std::vector<PropertyResult> suite_tetris(const Options& opt) {
  using namespace tetris;
  std::vector<PropertyResult> out;
  GeneratorConfig cfg;
  cfg.n_traj = 32;
  cfg.noise = 0.0;
  cfg.seed = opt.seed;
  const auto d = generate_dataset(cfg);
  double worst = 0.0;
  for (std::size_t tr = 0; tr < d.n_traj; ++tr) {
    for (std::size_t o = 0; o < kObjects; ++o) {
      for (std::size_t i = 0; i < kPoints; ++i) {
        for (std::size_t j = i + 1; j < kPoints; ++j) {
          auto dist = [&](std::size_t t) {
            double s = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
              const double v = d.position(tr, o, i, t, c) - d.position(tr, o, j, t, c);
              s += v * v;
            }
            return std::sqrt(s);
          };
          for (std::size_t t = 1; t < kSteps; ++t) worst = std::max(worst, std::abs(dist(t) - dist(0)));
        }
      }
    }
  }
  out.push_back(detail::bounded("tetris", "noise-free frames are rigid motions", d.n_traj, worst, 1e-9));
  out.push_back({"tetris", "same seed gives identical data", 1, generate_dataset(cfg) == d ? 0u : 1u, 0.0, 0.0});
  GcaMlp pos({ModelKind::gca_mlp, 38, false}), vel({ModelKind::gca_mlp, 38, true});
  out.push_back({"tetris", "velocities leave the GCA-MLP parameter count unchanged", 1,
                 pos.parameter_count() == vel.parameter_count() ? 0u : 1u, 0.0, 0.0});
  const auto b = matched_baseline(pos.config());
  const double ratio = static_cast<double>(BaselineMlp::count_for(b.hidden, false)) / static_cast<double>(pos.parameter_count());
  out.push_back(detail::bounded("tetris", "baseline parameter count within 5%", 1, std::abs(ratio - 1.0), 0.05));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"cayley", "algebra", "pin", "layers", "train", "tetris", "all"};
  return names;
}

inline std::vector<PropertyResult> run_suite(const std::string& name, const Options& opt) {
  using Fn = std::vector<PropertyResult> (*)(const Options&);
  const std::pair<const char*, Fn> table[] = {{"cayley", suite_cayley}, {"algebra", suite_algebra}, {"pin", suite_pin},
                                              {"layers", suite_layers}, {"train", suite_train},     {"tetris", suite_tetris}};
  std::vector<PropertyResult> out;
  bool found = false;
  for (const auto& [n, fn] : table) {
    if (name == "all" || name == n) {
      found = true;
      auto r = fn(opt);
      out.insert(out.end(), r.begin(), r.end());
    }
  }
  if (!found) throw Error(ErrorCode::invalid_config, "unknown suite \"" + name + "\"");
  return out;
}

inline bool print_report(const std::vector<PropertyResult>& results, std::ostream& os) {
  std::size_t failed = 0;
  for (const auto& r : results) {
    char worst[32];
    std::snprintf(worst, sizeof worst, "%.3g", r.worst);
    os << (r.passed() ? "PASS " : "FAIL ") << r.suite << ": " << r.name << " (" << r.checked - std::min(r.checked, r.failed) << "/"
       << r.checked << " passed, worst " << worst << ")\n";
    failed += !r.passed();
  }
  os << (failed ? "FAILED" : "OK") << ": " << results.size() - failed << "/" << results.size() << " properties passed\n";
  return failed == 0;
}

}  // namespace gcan::verify
