#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace gcan;

namespace {

Multivector mv(const AlgebraPtr& alg, std::string_view text) { return Multivector::parse(alg, text); }

Multivector random_grade(const AlgebraPtr& alg, int k, std::mt19937_64& rng) {
  return grade_part(Multivector(alg, oracle::random_vector(rng, alg->dim())), k);
}

/// Product of `count` random Euclidean planes (optionally with e0 offsets).
Versor random_versor(const AlgebraPtr& alg, int count, std::mt19937_64& rng) {
  std::vector<Versor> planes;
  for (int i = 0; i < count; ++i) {
    Multivector u(alg);
    for (int b = 0; b < alg->n(); ++b) u[alg->index_of(1u << b)] = std::normal_distribution<double>()(rng);
    planes.push_back(Versor::plane(u).normalize());
  }
  return compose_reflections(alg, planes);
}

}  // namespace

TEST(Reflect, NegatesOwnPlaneAndFixesOrthogonal) {
  const auto alg = Algebra::make(3, 0, 0);
  const auto e1 = Versor::plane(mv(alg, "e1"));
  EXPECT_EQ(max_abs_diff(reflect(e1, mv(alg, "e1")), mv(alg, "-e1")), 0.0);
  EXPECT_EQ(max_abs_diff(reflect(e1, mv(alg, "e2")), mv(alg, "e2")), 0.0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto v = Multivector(alg, oracle::random_vector(rng, alg->dim()));
    EXPECT_LT(max_abs_diff(reflect(e1, reflect(e1, v)), v), 1e-14);
  }
  const auto pga = Algebra::make(3, 0, 1);
  EXPECT_THROW(reflect(Versor::plane(mv(pga, "e0")), mv(pga, "e1")), Error);
  EXPECT_THROW(reflect(Versor::identity(alg), mv(alg, "e1")), Error);
}

TEST(PinAction, RotorByPiAndOracle) {
  const auto alg = Algebra::make(3, 0, 0);
  const auto u = Versor::from_multivector(mv(alg, "e2") * mv(alg, "e1"));
  EXPECT_FALSE(u.is_odd());
  EXPECT_LT(max_abs_diff(pin_action(u, mv(alg, "e1")), mv(alg, "-e1")), 1e-15);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    for (int count : {1, 2, 3}) {
      const auto v = random_versor(alg, count, rng);
      const auto x = Multivector(alg, oracle::random_vector(rng, alg->dim()));
      const auto ref = oracle::sandwich(3, 0, 0, {v.value().coeffs().begin(), v.value().coeffs().end()},
                                        {x.coeffs().begin(), x.coeffs().end()}, v.is_odd());
      const auto got = pin_action(v, x);
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);
    }
  }
  EXPECT_EQ(max_abs_diff(pin_action(Versor::identity(alg), mv(alg, "1 + e1 - 3*e23")), mv(alg, "1 + e1 - 3*e23")), 0.0);
}

TEST(PinAction, DoubleCoverIsExact) {
  for (auto sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    const auto alg = Algebra::make(sig);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
      const auto u = random_versor(alg, 2 + t % 3, rng);
      const auto v = Multivector(alg, oracle::random_vector(rng, alg->dim()));
      EXPECT_LT(max_abs_diff(pin_action(u, v), pin_action(-u, v)), 1e-15);
    }
  }
}

TEST(PinAction, PreservesGrade) {
  for (auto sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    const auto alg = Algebra::make(sig);
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const auto u = random_versor(alg, 2 * (1 + t % 2), rng);
      const int k = t % (alg->n() + 1);
      const auto y = pin_action(u, random_grade(alg, k, rng));
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (alg->grade(i) != k) worst = std::max(worst, std::abs(y[i]));
      }
    }
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(PinAction, IsometryInG300) {
  const auto alg = Algebra::make(3, 0, 0);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const auto u = random_versor(alg, 1 + t % 3, rng);
    const auto v = random_grade(alg, 1, rng);
    EXPECT_NEAR(norm(pin_action(u, v)) / norm(v), 1.0, 1e-10);
  }
}

TEST(PinAction, OutermorphismMultiplicative) {
  for (auto sig : {Signature(3, 0, 0), Signature(3, 0, 1)}) {
    const auto alg = Algebra::make(sig);
    std::mt19937_64 rng(14);
    for (int t = 0; t < 100; ++t) {
      const auto u = random_versor(alg, 2, rng);
      const auto x = Multivector(alg, oracle::random_vector(rng, alg->dim()));
      const auto y = Multivector(alg, oracle::random_vector(rng, alg->dim()));
      EXPECT_LT(max_abs_diff(pin_action(u, x * y), pin_action(u, x) * pin_action(u, y)), 1e-9);
    }
  }
}

TEST(PinAction, CartanDieudonneOrthogonalWithDeterminantSign) {
  const auto alg = Algebra::make(3, 0, 0);
  std::mt19937_64 rng(15);
  for (int t = 0; t < 60; ++t) {
    const int count = 1 + t % 3;
    const auto u = random_versor(alg, count, rng);
    const auto m = induced_vector_map(u);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[k * 3 + i] * m[k * 3 + j];
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-9);
      }
    }
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    EXPECT_NEAR(det, count % 2 ? -1.0 : 1.0, 1e-9);
  }
}

TEST(ComposeReflections, BireflectionRotatesByTwiceTheAngle) {
  const auto alg = Algebra::make(2, 0, 0);
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    const double th = ang(rng);
    Multivector q(alg);
    q[1] = std::cos(th / 2), q[2] = std::sin(th / 2);
    // List order: later planes act first, so reflect in e1 then in q.
    const Versor planes[] = {Versor::plane(q), Versor::plane(mv(alg, "e1"))};
    const auto r = compose_reflections(alg, planes);
    EXPECT_FALSE(r.is_odd());
    const auto y = pin_action(r, mv(alg, "e1"));
    EXPECT_NEAR(y[1], std::cos(th), 1e-12);
    EXPECT_NEAR(y[2], std::sin(th), 1e-12);
    EXPECT_LT(max_abs_diff(y, reflect(planes[0], reflect(planes[1], mv(alg, "e1")))), 1e-14);
  }
  EXPECT_EQ(max_abs_diff(compose_reflections(alg, {}).value(), Multivector::scalar(alg, 1.0)), 0.0);
  const Versor null_plane[] = {Versor::plane(mv(Algebra::make(2, 0, 1), "e0"))};
  EXPECT_THROW(compose_reflections(Algebra::make(2, 0, 1), null_plane), Error);
}

TEST(Versor, ParityIsChecked) {
  const auto alg = Algebra::make(3, 0, 0);
  EXPECT_THROW(Versor::from_multivector(mv(alg, "1 + e1")), Error);
  EXPECT_TRUE(Versor::from_multivector(mv(alg, "e1 + e123")).is_odd());
  EXPECT_TRUE(Versor::from_multivector(mv(alg, "0.6 + 0.8*e12")).normalized());
  EXPECT_THROW(Versor::plane(mv(alg, "e12")), Error);
}

TEST(Points, EmbedExtractRoundTrip) {
  const auto alg = Algebra::make(3, 0, 1);
  const auto origin = embed_point(alg, {0, 0, 0});
  for (std::size_t i = 0; i < origin.size(); ++i) {
    EXPECT_EQ(origin[i], i == alg->index_of(PointLayout::w_blade) ? 1.0 : 0.0);
  }
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const auto c = oracle::random_vector(rng, 3);
    const auto p = extract_point(embed_point(alg, {c[0], c[1], c[2], 2.5}));
    EXPECT_NEAR(p.x, c[0], 1e-15);
    EXPECT_NEAR(p.y, c[1], 1e-15);
    EXPECT_NEAR(p.z, c[2], 1e-15);
  }
  Multivector bad(alg);
  bad[alg->index_of(PointLayout::x_blade)] = 1.0;
  EXPECT_THROW(extract_point(bad), Error);
  EXPECT_THROW(embed_point(Algebra::make(3, 0, 0), {}), Error);
}

TEST(Points, ParallelPlanesTranslate) {
  const auto alg = Algebra::make(3, 0, 1);
  const Versor planes[] = {PlaneG301{1, 0, 0, 0}.to_versor(alg), PlaneG301{1, 0, 0, 1.0}.to_versor(alg)};
  const auto m = compose_reflections(alg, planes);
  const auto p = extract_point(pin_action(m, embed_point(alg, {1, 0, 0})));
  EXPECT_NEAR(p.x, 3.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  EXPECT_NEAR(p.z, 0.0, 1e-12);
  std::mt19937_64 rng(18);
  for (int t = 0; t < 100; ++t) {
    const auto d = oracle::random_vector(rng, 3);
    const auto x = oracle::random_vector(rng, 3);
    const auto q = extract_point(pin_action(translator(alg, d[0], d[1], d[2]), embed_point(alg, {x[0], x[1], x[2]})));
    EXPECT_NEAR(q.x, x[0] + d[0], 1e-10);
    EXPECT_NEAR(q.y, x[1] + d[1], 1e-10);
    EXPECT_NEAR(q.z, x[2] + d[2], 1e-10);
  }
}

TEST(Points, RotorsMatchRotationMatrices) {
  const auto alg = Algebra::make(3, 0, 1);
  const auto q = extract_point(pin_action(rotor(alg, 0, 0, 1, std::numbers::pi / 2), embed_point(alg, {1, 0, 0})));
  EXPECT_NEAR(q.x, 0.0, 1e-12);
  EXPECT_NEAR(q.y, 1.0, 1e-12);
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    const auto axis = oracle::random_vector(rng, 3);
    const double angle = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto x = oracle::random_vector(rng, 3);
    const auto R = oracle::rotation_matrix({axis[0], axis[1], axis[2]}, angle);
    const auto p = extract_point(pin_action(rotor(alg, axis[0], axis[1], axis[2], angle), embed_point(alg, {x[0], x[1], x[2]})));
    const double got[3] = {p.x, p.y, p.z};
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], R[i][0] * x[0] + R[i][1] * x[1] + R[i][2] * x[2], 1e-10);
    // Same rotor in G_{3,0,0} on vectors.
    const auto g3 = Algebra::make(3, 0, 0);
    Multivector v(g3);
    v[1] = x[0], v[2] = x[1], v[3] = x[2];
    const auto w = pin_action(rotor(g3, axis[0], axis[1], axis[2], angle), v);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(w[1 + i], got[i], 1e-10);
  }
}

TEST(Points, ScrewMotionComposesRotationAndTranslation) {
  const auto alg = Algebra::make(3, 0, 1);
  const auto m = translator(alg, 0.5, -1.0, 2.0) * rotor(alg, 1, 1, 0, 0.8);
  const auto R = oracle::rotation_matrix({1, 1, 0}, 0.8);
  const double x[3] = {0.3, -0.2, 1.1};
  const auto p = extract_point(pin_action(m, embed_point(alg, {x[0], x[1], x[2]})));
  const double t[3] = {0.5, -1.0, 2.0};
  const double got[3] = {p.x, p.y, p.z};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], R[i][0] * x[0] + R[i][1] * x[1] + R[i][2] * x[2] + t[i], 1e-12);
}
