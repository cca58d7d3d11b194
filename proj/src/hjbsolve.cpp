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

#include "mintime/hjbsolve.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <string>

#include "mintime/sampling.hpp"

namespace mintime {

GridSpec GridSpec::square(int n, double lo, double hi, int count) {
  require_dimension(n);
  GridSpec g;
  g.lower = Vec::Constant(n, lo);
  g.upper = Vec::Constant(n, hi);
  g.nodes.assign(n, count);
  g.validate();
  return g;
}

double GridSpec::min_spacing() const {
  double h = kInf;
  for (int i = 0; i < dim(); ++i) h = std::min(h, spacing(i));
  return h;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int c : nodes) s *= static_cast<std::size_t>(c);
  return s;
}

std::vector<int> GridSpec::unflatten(std::size_t flat) const {
  std::vector<int> idx(dim());
  for (int i = 0; i < dim(); ++i) {
    idx[i] = static_cast<int>(flat % nodes[i]);
    flat /= nodes[i];
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int i = dim() - 1; i >= 0; --i) flat = flat * nodes[i] + idx[i];
  return flat;
}

Vec GridSpec::node(std::size_t flat) const {
  Vec x(dim());
  for (int i = 0; i < dim(); ++i) {
    x[i] = lower[i] + spacing(i) * static_cast<double>(flat % nodes[i]);
    flat /= nodes[i];
  }
  return x;
}

bool GridSpec::inside(const Vec& x) const {
  for (int i = 0; i < dim(); ++i) {
    const double slack = 1e-12 * (upper[i] - lower[i]);
    if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
  }
  return true;
}

double GridSpec::max_radius() const {
  double r2 = 0.0;
  for (int i = 0; i < dim(); ++i) r2 += std::max(lower[i] * lower[i], upper[i] * upper[i]);
  return std::sqrt(r2);
}

void GridSpec::validate() const {
  require_dimension(dim());
  if (lower.size() != dim() || upper.size() != dim()) throw ConfigError("grid bounds have wrong dimension");
  for (int i = 0; i < dim(); ++i) {
    if (!(lower[i] < upper[i])) throw ConfigError("grid bounds must be strictly ordered");
    if (nodes[i] < 8) throw ConfigError("grid needs at least 8 nodes per axis");
  }
}

double TargetSet::distance(const Vec& x) const {
  double d = kInf;
  for (const auto& b : bodies) d = std::min(d, mintime::distance(b, x));
  return d;
}

SupportResult TargetSet::support(const Vec& p) const {
  SupportResult best = bodies.front().support(p);
  for (std::size_t i = 1; i < bodies.size(); ++i) {
    SupportResult s = bodies[i].support(p);
    if (s.value > best.value) best = s;
  }
  return best;
}

ValueField sample_field(const Expr& expr, const GridSpec& grid) {
  grid.validate();
  ValueField field;
  field.grid = grid;
  field.values.resize(grid.size());
  field.target_mask.assign(grid.size(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = expr.eval(grid.node(k));
    field.values[k] = std::max(0.0, v);
    field.target_mask[k] = v <= 0.0;
  }
  field.exact = expr;
  return field;
}

double cfl_bound(const Multifunction& f, const GridSpec& grid) {
  return grid.min_spacing() / (f.constants.growth * (1.0 + grid.max_radius()));
}

namespace {

constexpr int kMaxCorners = 8;
// Nodes with 1 - v below this gap (T above about 27.6) count as unreached.
constexpr double kUnreachedGap = 1e-12;

struct Stencil {
  int count = 0;
  std::array<std::size_t, kMaxCorners> idx{};
  std::array<double, kMaxCorners> weight{};
};

// Multilinear stencil at y; false when y is outside the box.
bool make_stencil(const GridSpec& g, const double* y, Stencil& st) {
  const int n = g.dim();
  std::array<std::size_t, 3> base{};
  std::array<double, 3> frac{};
  std::array<std::size_t, 3> stride{};
  std::size_t s = 1;
  for (int i = 0; i < n; ++i) {
    stride[i] = s;
    s *= static_cast<std::size_t>(g.nodes[i]);
    const double h = g.spacing(i);
    double u = (y[i] - g.lower[i]) / h;
    const double last = g.nodes[i] - 1;
    if (u < -1e-9 || u > last + 1e-9) return false;
    u = std::clamp(u, 0.0, last);
    int i0 = std::min(static_cast<int>(std::floor(u)), g.nodes[i] - 2);
    base[i] = static_cast<std::size_t>(i0);
    frac[i] = u - i0;
  }
  st.count = 1 << n;
  for (int c = 0; c < st.count; ++c) {
    std::size_t flat = 0;
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const bool hi = (c >> i) & 1;
      flat += (base[i] + (hi ? 1 : 0)) * stride[i];
      w *= hi ? frac[i] : 1.0 - frac[i];
    }
    st.idx[c] = flat;
    st.weight[c] = w;
  }
  return true;
}

// Deduplicated extreme velocities of F(x) along a direction fan.
void velocity_samples(const ConvexBody& fx, const std::vector<Vec>& dirs, std::vector<double>& out) {
  const int n = fx.dim();
  const std::size_t start = out.size();
  auto push_unique = [&](const Vec& v) {
    for (std::size_t k = start; k < out.size(); k += n) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d = std::max(d, std::abs(out[k + i] - v[i]));
      if (d <= 1e-14) return;
    }
    for (int i = 0; i < n; ++i) out.push_back(v[i]);
  };
  if (const auto* poly = std::get_if<Polytope>(&fx.shape())) {
    for (const auto& v : poly->vertices) push_unique(v);
  }
  for (const auto& u : dirs) push_unique(fx.support(u).point);
}

}  // namespace

ValueField solve_min_time(const Multifunction& f, const TargetSet& target, const GridSpec& grid,
                          const SolverParams& params) {
  grid.validate();
  if (grid.dim() != f.dim()) throw ConfigError("grid and dynamics differ in dimension");
  if (params.vel_samples < 4) throw ConfigError("vel_samples must be >= 4");
  const double bound = cfl_bound(f, grid);
  const double tau = params.tau == 0.0 ? bound : params.tau;
  if (!(tau > 0.0) || tau > bound * (1.0 + 1e-12)) {
    throw ConfigError("time step " + std::to_string(tau) + " violates the CFL bound " + std::to_string(bound));
  }

  const int n = grid.dim();
  const std::size_t size = grid.size();
  ValueField field;
  field.grid = grid;
  field.tau = tau;
  // Iterate on the Kruzkov transform v = 1 - exp(-T): the update contracts,
  // unvisited nodes sit at v = 1, and a stencil corner at v = 1 only pulls a
  // candidate up by its weight.
  std::vector<double> V(size, 1.0);
  field.target_mask.assign(size, 0);

  const double raster = 0.5 * grid.min_spacing();
  const auto dirs = n == 1 ? uniform_directions(1, 2) : uniform_directions(n, params.vel_samples);
  std::vector<double> vel;
  std::vector<std::size_t> vel_begin(size + 1, 0);
  std::vector<double> coords(size * n);
  for (std::size_t k = 0; k < size; ++k) {
    Vec x = grid.node(k);
    for (int i = 0; i < n; ++i) coords[k * n + i] = x[i];
    if (target.distance(x) <= raster) {
      field.target_mask[k] = 1;
      V[k] = 0.0;
    } else {
      velocity_samples(f.eval(x), dirs, vel);
    }
    vel_begin[k + 1] = vel.size();
  }

  // Sweep orderings: every combination of reversed axes.
  const int orderings = 1 << n;
  std::vector<std::vector<std::size_t>> order(orderings, std::vector<std::size_t>(size));
  for (int o = 0; o < orderings; ++o) {
    for (std::size_t k = 0; k < size; ++k) {
      std::vector<int> idx = grid.unflatten(k);
      for (int i = 0; i < n; ++i) {
        if ((o >> i) & 1) idx[i] = grid.nodes[i] - 1 - idx[i];
      }
      order[o][k] = grid.flatten(idx);
    }
  }

  const double decay = std::exp(-tau);
  std::array<double, 3> foot{};
  Stencil st;
  double residual = kInf;
  double drift = kInf;  // largest change among nodes still at the unreached level
  int sweep = 0;
  for (; sweep < params.max_sweeps && (residual > params.tol || drift > params.tol); ++sweep) {
    residual = 0.0;
    drift = 0.0;
    for (std::size_t node : order[sweep % orderings]) {
      if (field.target_mask[node]) continue;
      double best = V[node];
      for (std::size_t v = vel_begin[node]; v < vel_begin[node + 1]; v += n) {
        for (int i = 0; i < n; ++i) foot[i] = coords[node * n + i] + tau * vel[v + i];
        if (!make_stencil(grid, foot.data(), st)) continue;
        double sum = 0.0;
        double self = 0.0;
        for (int c = 0; c < st.count; ++c) {
          const double w = st.weight[c];
          if (st.idx[c] == node) {
            self += w;
          } else if (w > 0.0) {
            sum += w * V[st.idx[c]];
          }
        }
        best = std::min(best, (decay * sum + 1.0 - decay) / (1.0 - decay * self));
      }
      if (best < V[node]) {
        if (1.0 - best > kUnreachedGap) {
          const double change = 1.0 - V[node] > kUnreachedGap ? std::log((1.0 - best) / (1.0 - V[node])) : kInf;
          residual = std::max(residual, change);
        } else {
          drift = std::max(drift, V[node] - best);
        }
        V[node] = best;
      }
    }
  }
  field.values.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    field.values[k] = 1.0 - V[k] > kUnreachedGap ? -std::log1p(-V[k]) : kInf;
  }
  field.sweeps = sweep;
  field.residual = residual;
  if (residual > params.tol || drift > params.tol) {
    throw SolverBudgetError("solver did not converge in " + std::to_string(sweep) + " sweeps (residual " +
                                std::to_string(residual) + ")",
                            residual, sweep);
  }
  return field;
}

double eval_T(const ValueField& field, const Vec& x) {
  const GridSpec& g = field.grid;
  if (x.size() != g.dim() || !g.inside(x)) throw DomainError("eval_T: point outside the grid");
  if (field.exact) return std::max(0.0, field.exact->eval(x));
  Stencil st;
  if (!make_stencil(g, x.data(), st)) throw DomainError("eval_T: point outside the grid");
  double v = 0.0;
  for (int c = 0; c < st.count; ++c) {
    if (st.weight[c] <= 0.0) continue;
    const double t = field.values[st.idx[c]];
    if (t == kInf) return kInf;
    v += st.weight[c] * t;
  }
  return v;
}

namespace {

template <class Fn>
void for_each_neighbor(const GridSpec& g, std::size_t flat, Fn&& fn) {
  std::vector<int> idx = g.unflatten(flat);
  std::size_t stride = 1;
  for (int i = 0; i < g.dim(); ++i) {
    for (int dir : {-1, 1}) {
      const int j = idx[i] + dir;
      if (j < 0 || j >= g.nodes[i]) {
        fn(std::optional<std::size_t>{}, i, dir);
      } else {
        fn(std::optional<std::size_t>{dir < 0 ? flat - stride : flat + stride}, i, dir);
      }
    }
    stride *= static_cast<std::size_t>(g.nodes[i]);
  }
}

}  // namespace

std::vector<CloudPoint> sublevel_points(const ValueField& field, double t) {
  if (!(t >= 0.0)) throw ConfigError("sublevel threshold must be >= 0");
  std::vector<CloudPoint> out;
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    const double v = field.values[k];
    if (!(v <= t)) continue;
    bool boundary = false;
    for_each_neighbor(field.grid, k, [&](std::optional<std::size_t> nb, int, int) {
      if (!nb || !(field.values[*nb] <= t)) boundary = true;
    });
    out.push_back({field.grid.node(k), v, boundary});
  }
  return out;
}

std::vector<Vec> attainable_points(const Multifunction& f, const TargetSet& target, double t, int trajectories,
                                   double dt) {
  if (trajectories < 1) throw ConfigError("trajectories must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t >= 0.0)) throw ConfigError("time must be >= 0");
  const int n = f.dim();
  const auto dirs = n == 1 ? uniform_directions(1, 2) : uniform_directions(n, trajectories);
  std::vector<Vec> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) {
    Vec y = target.support(d).point;
    double elapsed = 0.0;
    while (elapsed < t - 1e-15) {
      const double h = std::min(dt, t - elapsed);
      // Extremal selection of -F(y) in direction d.
      y -= h * f.eval(y).support(-d).point;
      elapsed += h;
    }
    out.push_back(y);
  }
  return out;
}

double lipschitz_estimate(const ValueField& field, double t) {
  const GridSpec& g = field.grid;
  std::vector<double> slopes;
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    const double v = field.values[k];
    if (!(v <= t)) continue;
    double g2 = 0.0;
    bool ok = true;
    for_each_neighbor(g, k, [&](std::optional<std::size_t> nb, int axis, int dir) {
      if (dir < 0) return;
      if (!nb || field.values[*nb] == kInf) {
        ok = false;
        return;
      }
      const double d = (field.values[*nb] - v) / g.spacing(axis);
      g2 += d * d;
    });
    if (ok) slopes.push_back(std::sqrt(g2));
  }
  if (slopes.empty()) return 0.0;
  const std::size_t q = static_cast<std::size_t>(0.95 * (slopes.size() - 1));
  std::nth_element(slopes.begin(), slopes.begin() + q, slopes.end());
  return slopes[q];
}

RegularityCheck check_sublevel_convexity(const ValueField& field, double t, int pairs, std::uint64_t seed) {
  if (!(t >= 0.0)) throw ConfigError("sublevel threshold must be >= 0");
  std::vector<Vec> boundary;
  for (auto& p : sublevel_points(field, t)) {
    if (p.boundary) boundary.push_back(std::move(p.x));
  }
  RegularityCheck out;
  if (boundary.size() < 2) return out;
  const double slack = 2.0 * lipschitz_estimate(field, t) * field.grid.min_spacing();
  Sampler rng(seed);
  const std::size_t m = boundary.size();
  const bool exhaustive = m * (m - 1) / 2 <= static_cast<std::size_t>(pairs);
  auto test = [&](std::size_t i, std::size_t j) {
    const Vec mid = 0.5 * (boundary[i] + boundary[j]);
    const double excess = eval_T(field, mid) - (t + slack);
    out.worst_violation = std::max(out.worst_violation, excess);
  };
  if (exhaustive) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) test(i, j);
    }
  } else {
    for (int s = 0; s < pairs; ++s) {
      std::size_t i = rng.next() % m;
      std::size_t j = rng.next() % m;
      if (i != j) test(i, j);
    }
  }
  out.pass = out.worst_violation <= 0.0;
  return out;
}

}  // namespace mintime
