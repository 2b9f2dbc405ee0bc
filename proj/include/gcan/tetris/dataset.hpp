#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "gcan/error.hpp"
#include "gcan/train/rng.hpp"

namespace gcan::tetris {

inline constexpr std::size_t kObjects = 8;
inline constexpr std::size_t kPoints = 4;
inline constexpr std::size_t kSteps = 8;
inline constexpr std::size_t kInputSteps = 4;
inline constexpr std::size_t kCoords = 3;
inline constexpr std::size_t kLocations = kObjects * kPoints;
inline constexpr std::size_t kTrajectorySize = kObjects * kPoints * kSteps * kCoords;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Unit-grid cells of the eight shapes, before centring.
inline const std::array<std::array<Vec3, kPoints>, kObjects>& shape_cells() {
  static const std::array<std::array<Vec3, kPoints>, kObjects> cells = {{
      {{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 1, 0}}},   // chiral 1
      {{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, -1, 0}}},  // chiral 2
      {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}},   // square
      {{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}}},   // line
      {{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}}},   // corner
      {{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 0}}},   // L
      {{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 1}}},   // T
      {{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 1, 0}}},   // zigzag
  }};
  return cells;
}

/// Shape o with its centroid moved to the origin.
inline std::array<Vec3, kPoints> centered_shape(std::size_t o) {
  auto pts = shape_cells().at(o);
  Vec3 c{0, 0, 0};
  for (const auto& p : pts) {
    for (int k = 0; k < 3; ++k) c[k] += p[k] / kPoints;
  }
  for (auto& p : pts) {
    for (int k = 0; k < 3; ++k) p[k] -= c[k];
  }
  return pts;
}

/// Rodrigues rotation about a (not necessarily unit) axis.
inline Mat3 axis_angle(Vec3 axis, double angle) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (n == 0.0 || angle == 0.0) return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
           {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
           {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
}

struct Motion {
  Vec3 axis{0, 0, 1};
  double angle = 0.0;
  Vec3 translation{0, 0, 0};
};

/// Point at step t (t may be negative): R(axis, t * angle) x0 + t * translation.
inline Vec3 move_point(const Motion& m, const Vec3& x0, double t) {
  const Mat3 r = axis_angle(m.axis, t * m.angle);
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = r[i][0] * x0[0] + r[i][1] * x0[1] + r[i][2] * x0[2] + t * m.translation[i];
  return out;
}

struct GeneratorConfig {
  std::size_t n_traj = 256;
  std::uint64_t seed = 0;
  double noise = 0.01;
  double max_angle = 0.05 * 2.0 * std::numbers::pi;
  double max_offset = 0.5;
  /// Shared base motion plus per-object Gaussian perturbations; false draws
  /// every object independently.
  bool conditional = true;
  double perturbation = 0.2;
  bool velocities = false;
};

/// Trajectories stored as [traj][object][point][step][coord].
struct Dataset {
  std::uint64_t version = 1;
  std::size_t n_traj = 0;
  std::size_t objects = kObjects, points = kPoints, steps = kSteps, coords = kCoords;
  bool has_velocities = false;
  std::uint64_t seed = 0;
  std::vector<double> positions;
  std::vector<double> velocities;

  static std::size_t index(std::size_t traj, std::size_t obj, std::size_t pt, std::size_t step, std::size_t c) {
    return (((traj * kObjects + obj) * kPoints + pt) * kSteps + step) * kCoords + c;
  }
  double position(std::size_t traj, std::size_t obj, std::size_t pt, std::size_t step, std::size_t c) const {
    return positions[index(traj, obj, pt, step, c)];
  }
  double velocity(std::size_t traj, std::size_t obj, std::size_t pt, std::size_t step, std::size_t c) const {
    return velocities[index(traj, obj, pt, step, c)];
  }

  /// Rows [first, first + count) as a new dataset.
  Dataset slice(std::size_t first, std::size_t count) const {
    if (first + count > n_traj) throw Error(ErrorCode::shape_mismatch, "dataset slice out of range");
    Dataset d = *this;
    d.n_traj = count;
    d.positions.assign(positions.begin() + first * kTrajectorySize, positions.begin() + (first + count) * kTrajectorySize);
    if (has_velocities) {
      d.velocities.assign(velocities.begin() + first * kTrajectorySize, velocities.begin() + (first + count) * kTrajectorySize);
    }
    return d;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

inline Vec3 random_unit(Rng& rng) {
  for (;;) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-12) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

inline Motion random_motion(Rng& rng, const GeneratorConfig& cfg) {
  Motion m;
  m.axis = random_unit(rng);
  m.angle = rng.uniform(0.0, 1.0) * cfg.max_angle;
  const Vec3 dir = random_unit(rng);
  const double off = rng.uniform(0.0, 1.0) * cfg.max_offset;
  for (int k = 0; k < 3; ++k) m.translation[k] = off * dir[k];
  return m;
}

/// Base motion plus Gaussian noise of relative size cfg.perturbation, then
/// clamped to the angle and offset limits.
inline Motion perturbed(const Motion& base, Rng& rng, const GeneratorConfig& cfg) {
  Motion m = base;
  const double sigma = cfg.perturbation;
  for (int k = 0; k < 3; ++k) m.axis[k] += sigma * rng.normal();
  m.angle = std::clamp(base.angle + sigma * base.angle * rng.normal(), 0.0, cfg.max_angle);
  const double off = std::sqrt(base.translation[0] * base.translation[0] + base.translation[1] * base.translation[1] +
                               base.translation[2] * base.translation[2]);
  for (int k = 0; k < 3; ++k) m.translation[k] += sigma * off * rng.normal();
  const double n = std::sqrt(m.translation[0] * m.translation[0] + m.translation[1] * m.translation[1] +
                             m.translation[2] * m.translation[2]);
  if (n > cfg.max_offset) {
    for (double& v : m.translation) v *= cfg.max_offset / n;
  }
  return m;
}

}  // namespace detail

/// Writes one trajectory given the (noisy) initial shapes and per-object
/// motions.  Velocity at step 0 uses the motion evaluated at t = -1.
inline void write_trajectory(Dataset& d, std::size_t traj, const std::array<std::array<Vec3, kPoints>, kObjects>& shapes,
                             const std::array<Motion, kObjects>& motions) {
  for (std::size_t o = 0; o < kObjects; ++o) {
    for (std::size_t p = 0; p < kPoints; ++p) {
      Vec3 prev = move_point(motions[o], shapes[o][p], -1.0);
      for (std::size_t t = 0; t < kSteps; ++t) {
        const Vec3 x = move_point(motions[o], shapes[o][p], static_cast<double>(t));
        for (std::size_t c = 0; c < kCoords; ++c) {
          d.positions[Dataset::index(traj, o, p, t, c)] = x[c];
          if (d.has_velocities) d.velocities[Dataset::index(traj, o, p, t, c)] = x[c] - prev[c];
        }
        prev = x;
      }
    }
  }
}

/// Every trajectory draws from its own stream, so trajectory i does not
/// depend on how many others are generated.
inline Dataset generate_dataset(const GeneratorConfig& cfg) {
  if (cfg.n_traj == 0) throw Error(ErrorCode::invalid_config, "n_traj must be at least 1");
  if (cfg.noise < 0.0 || cfg.max_angle < 0.0 || cfg.max_offset < 0.0 || cfg.perturbation < 0.0) {
    throw Error(ErrorCode::invalid_config, "generator scales must be non-negative");
  }
  Dataset d;
  d.n_traj = cfg.n_traj;
  d.has_velocities = cfg.velocities;
  d.seed = cfg.seed;
  d.positions.assign(cfg.n_traj * kTrajectorySize, 0.0);
  if (cfg.velocities) d.velocities.assign(cfg.n_traj * kTrajectorySize, 0.0);
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    Rng rng(cfg.seed, "trajectory/" + std::to_string(i));
    std::array<std::array<Vec3, kPoints>, kObjects> shapes;
    for (std::size_t o = 0; o < kObjects; ++o) {
      shapes[o] = centered_shape(o);
      for (auto& p : shapes[o]) {
        for (double& v : p) v += cfg.noise * rng.normal();
      }
    }
    std::array<Motion, kObjects> motions;
    const Motion base = detail::random_motion(rng, cfg);
    for (std::size_t o = 0; o < kObjects; ++o) {
      motions[o] = cfg.conditional ? detail::perturbed(base, rng, cfg) : detail::random_motion(rng, cfg);
    }
    write_trajectory(d, i, shapes, motions);
  }
  return d;
}

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

inline constexpr char kDatasetMagic[8] = {'G', 'C', 'A', 'N', 'T', 'E', 'T', 'R'};

/// Little-endian: magic, eight u64 header fields, positions, velocities.
inline void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out.write(kDatasetMagic, sizeof kDatasetMagic);
  const std::uint64_t header[] = {d.version, d.n_traj, d.objects, d.points, d.steps, d.coords, d.has_velocities ? 1u : 0u, d.seed};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(d.positions.data()), static_cast<std::streamsize>(d.positions.size() * sizeof(double)));
  if (d.has_velocities) {
    out.write(reinterpret_cast<const char*>(d.velocities.data()),
              static_cast<std::streamsize>(d.velocities.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  char magic[8];
  std::uint64_t h[8];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(h), sizeof h);
  if (!in || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::io_error, path + " is not a tetris dataset");
  }
  if (h[0] != 1 || h[2] != kObjects || h[3] != kPoints || h[4] != kSteps || h[5] != kCoords || h[6] > 1) {
    throw Error(ErrorCode::io_error, path + ": unsupported dataset header");
  }
  Dataset d;
  d.n_traj = h[1];
  d.has_velocities = h[6] == 1;
  d.seed = h[7];
  d.positions.resize(d.n_traj * kTrajectorySize);
  in.read(reinterpret_cast<char*>(d.positions.data()), static_cast<std::streamsize>(d.positions.size() * sizeof(double)));
  if (d.has_velocities) {
    d.velocities.resize(d.positions.size());
    in.read(reinterpret_cast<char*>(d.velocities.data()), static_cast<std::streamsize>(d.velocities.size() * sizeof(double)));
  }
  if (!in) throw Error(ErrorCode::io_error, path + " is truncated");
  return d;
}

}  // namespace gcan::tetris
