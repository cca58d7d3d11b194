// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "mintime/sampling.hpp"

namespace mintime {
namespace {

double radical_inverse(std::uint64_t k, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

Vec unit2(double angle) {
  Vec v(2);
  v << std::cos(angle), std::sin(angle);
  return v;
}

std::vector<Vec> fibonacci_sphere(int count) {
  std::vector<Vec> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    double z = 1.0 - (2.0 * k + 1.0) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * k;
    Vec v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(v);
  }
  return out;
}

// Hopf-style lattice on S^3: (cos a e^{i b}, sin a e^{i c}).
std::vector<Vec> hopf_lattice(int count) {
  int rings = std::max(2, static_cast<int>(std::round(std::cbrt(count / 2.0))));
  std::vector<Vec> out;
  for (int i = 0; i < rings; ++i) {
    double a = (i + 0.5) * (std::numbers::pi / 2.0) / rings;
    int nb = std::max(1, static_cast<int>(std::round(2 * rings * std::cos(a))));
    int nc = std::max(1, static_cast<int>(std::round(2 * rings * std::sin(a))));
    for (int j = 0; j < nb; ++j) {
      double b = 2.0 * std::numbers::pi * j / nb;
      for (int k = 0; k < nc; ++k) {
        double c = 2.0 * std::numbers::pi * k / nc;
        Vec v(4);
        v << std::cos(a) * std::cos(b), std::cos(a) * std::sin(b),
            std::sin(a) * std::cos(c), std::sin(a) * std::sin(c);
        out.push_back(v);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Vec> icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]);
      int bc = mid(f[1], f[2]);
      int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<Vec> out;
  out.reserve(verts.size());
  for (const auto& v : verts) out.emplace_back(Vec(v));
  return out;
}

std::vector<Vec> uniform_directions(int dim, int count) {
  if (count < 1) throw ConfigError("direction count must be positive");
  std::vector<Vec> out;
  switch (dim) {
    case 1:
      out.push_back(Vec::Constant(1, 1.0));
      out.push_back(Vec::Constant(1, -1.0));
      return out;
    case 2:
      out.reserve(count);
      for (int k = 0; k < count; ++k) out.push_back(unit2(2.0 * std::numbers::pi * k / count));
      return out;
    case 3:
      for (int s = 0, size = 12; size <= count; ++s, size = 10 * (1 << (2 * s)) + 2) {
        if (size == count) return icosphere(s);
      }
      return fibonacci_sphere(count);
    case 4:
      return hopf_lattice(count);
    default:
      throw ConfigError("direction grids exist for dimensions 1 to 4");
  }
}

std::vector<Vec> nested_directions(int dim, int count) {
  if (count < 1) throw ConfigError("direction count must be positive");
  std::vector<Vec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    switch (dim) {
      case 1:
        out.push_back(Vec::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
        break;
      case 2:
        out.push_back(unit2(2.0 * std::numbers::pi * radical_inverse(k, 2)));
        break;
      case 3: {
        double z = 1.0 - 2.0 * radical_inverse(k, 2);
        double phi = 2.0 * std::numbers::pi * radical_inverse(k, 3);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        Vec v(3);
        v << r * std::cos(phi), r * std::sin(phi), z;
        out.push_back(v);
        break;
      }
      default:
        throw ConfigError("nested direction sequences exist for dimensions 1 to 3");
    }
  }
  return out;
}

std::vector<Vec> default_cone_directions(int dim) {
  switch (dim) {
    case 1:
      return uniform_directions(1, 2);
    case 2:
      return uniform_directions(2, 360);
    case 3:
      return icosphere(4);
    default:
      return uniform_directions(4, 20000);
  }
}

Vec Sampler::unit_vector(int dim) {
  // Box-Muller keeps the draw sequence implementation independent.
  Vec v(dim);
  do {
    for (int i = 0; i < dim; ++i) {
      double u1 = std::max(uniform(), 1e-300);
      double u2 = uniform();
      v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  } while (v.norm() < 1e-12);
  return v.normalized();
}

}  // namespace mintime
