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

#include "mintime/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mintime/sampling.hpp"

namespace mintime {

Multifunction Multifunction::isotropic(int n, Expr radius) {
  require_dimension(n);
  Multifunction f;
  f.form_ = DynamicsForm::kIsotropic;
  f.n_ = n;
  f.radius_ = std::move(radius);
  return f;
}

Multifunction Multifunction::linear_drift(Mat a, ConvexBody u) {
  require_dimension(a.rows());
  if (a.cols() != a.rows() || u.dim() != a.rows()) {
    throw ConfigError("linear drift needs a square A matching the control set dimension");
  }
  Multifunction f;
  f.form_ = DynamicsForm::kLinearDrift;
  f.n_ = static_cast<int>(a.rows());
  f.a_ = std::move(a);
  f.u_ = std::move(u);
  f.constants.lipschitz = f.a_.operatorNorm();
  return f;
}

Multifunction Multifunction::affine_control(std::vector<Expr> drift, std::vector<std::vector<Expr>> gain,
                                            ConvexBody u) {
  const int n = static_cast<int>(drift.size());
  require_dimension(n);
  if (static_cast<int>(gain.size()) != n) throw ConfigError("gain field must have n rows");
  for (const auto& row : gain) {
    if (static_cast<int>(row.size()) != u.dim()) throw ConfigError("gain field must have m = dim(U) columns");
  }
  Multifunction f;
  f.form_ = DynamicsForm::kAffineControl;
  f.n_ = n;
  f.drift_ = std::move(drift);
  f.gain_ = std::move(gain);
  f.u_ = std::move(u);
  return f;
}

ConvexBody Multifunction::eval(const Vec& x) const {
  if (x.size() != n_) throw DomainError("state has wrong dimension");
  switch (form_) {
    case DynamicsForm::kIsotropic: {
      double r = radius_.eval(x);
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("isotropic radius must be finite and >= 0");
      return ConvexBody::ball(Vec::Zero(n_), r);
    }
    case DynamicsForm::kLinearDrift:
      return ConvexBody::translate(*u_, a_ * x);
    case DynamicsForm::kAffineControl: {
      Vec fx(n_);
      Mat gx(n_, u_->dim());
      for (int i = 0; i < n_; ++i) {
        fx[i] = drift_[i].eval(x);
        for (int j = 0; j < u_->dim(); ++j) gx(i, j) = gain_[i][j].eval(x);
      }
      return ConvexBody::translate(linear_image(gx, *u_), fx);
    }
  }
  throw ConfigError("unknown dynamics form");
}

HamiltonianEval min_hamiltonian(const Multifunction& f, const Vec& x, const Vec& zeta) {
  SupportResult s = f.eval(x).support(-zeta);
  return {-s.value, s.point};
}

HamiltonianEval max_hamiltonian(const Multifunction& f, const Vec& x, const Vec& p) {
  SupportResult s = f.eval(x).support(p);
  return {s.value, s.point};
}

Vec grad_x_H(const Multifunction& f, const Vec& x, const Vec& p, double step) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (p.isZero(0.0)) throw DegenerateCostateError("grad_x_H: costate p is zero");
  Vec g(x.size());
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (max_hamiltonian(f, xp, p).value - max_hamiltonian(f, xm, p).value) / (2.0 * step);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

namespace {

void require_box(const Multifunction& f, const Box& box) {
  if (box.dim() != f.dim() || box.upper.size() != box.lower.size()) {
    throw ConfigError("certification box has wrong dimension");
  }
  if ((box.upper - box.lower).minCoeff() <= 0.0) throw ConfigError("certification box must be nondegenerate");
}

// Deterministic probe points: center, corners, then seeded uniform draws.
std::vector<Vec> probe_points(const Box& box, int samples, Sampler& rng) {
  std::vector<Vec> pts{box.center()};
  const int n = box.dim();
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask & (1 << i)) ? box.upper[i] : box.lower[i];
    pts.push_back(v);
  }
  for (int s = 0; s < samples; ++s) pts.push_back(rng.in_box(box.lower, box.upper));
  return pts;
}

}  // namespace

double certify_lipschitz(const Multifunction& f, const Box& box, int pairs, std::uint64_t seed) {
  require_box(f, box);
  if (pairs < 1) throw ConfigError("pairs must be >= 1");
  Sampler rng(seed);
  double worst = 0.0;
  for (int s = 0; s < pairs; ++s) {
    Vec x = rng.in_box(box.lower, box.upper);
    Vec y = rng.in_box(box.lower, box.upper);
    double d = (x - y).norm();
    if (d < 1e-12) continue;
    worst = std::max(worst, hausdorff(f.eval(x), f.eval(y), kSetMetricDirections) / d);
  }
  return worst;
}

double certify_growth(const Multifunction& f, const Box& box, int samples, std::uint64_t seed) {
  require_box(f, box);
  if (samples < 1) throw ConfigError("samples must be >= 1");
  Sampler rng(seed);
  const auto dirs = nested_directions(f.dim(), f.dim() == 1 ? 2 : kSetMetricDirections);
  double worst = 0.0;
  for (const auto& x : probe_points(box, samples, rng)) {
    ConvexBody fx = f.eval(x);
    double speed = 0.0;  // max |v| over F(x) = max over unit u of sigma(u)
    for (const auto& u : dirs) speed = std::max(speed, fx.support_value(u));
    worst = std::max(worst, speed / (1.0 + x.norm()));
  }
  return worst;
}

double certify_class_L(const Multifunction& f, const Box& box, int pairs, int lambda_grid, std::uint64_t seed) {
  require_box(f, box);
  if (pairs < 1) throw ConfigError("pairs must be >= 1");
  if (lambda_grid < 3) throw ConfigError("lambda_grid must be >= 3");
  Sampler rng(seed);
  double worst = 0.0;
  for (int s = 0; s < pairs; ++s) {
    Vec x = rng.in_box(box.lower, box.upper);
    Vec y = rng.in_box(box.lower, box.upper);
    double d2 = (x - y).squaredNorm();
    if (d2 < 1e-20) continue;
    ConvexBody fx = f.eval(x);
    ConvexBody fy = f.eval(y);
    for (int k = 1; k <= lambda_grid; ++k) {
      double lambda = static_cast<double>(k) / (lambda_grid + 1);
      ConvexBody mixed = ConvexBody::scaled_sum({{lambda, fx}, {1.0 - lambda, fy}});
      ConvexBody at_mix = f.eval(lambda * x + (1.0 - lambda) * y);
      double gap = hausdorff(at_mix, mixed, kSetMetricDirections);
      worst = std::max(worst, gap / (lambda * (1.0 - lambda) * d2));
    }
  }
  return worst;
}

double certify_H_semiconvexity(const Multifunction& f, const Vec& p, const Box& box, int samples,
                               std::optional<double> step, std::uint64_t seed) {
  require_box(f, box);
  if (std::abs(p.norm() - 1.0) > 1e-9) throw ConfigError("semiconvexity certificate needs a unit p");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  const double h = step.value_or(0.05 * (box.upper - box.lower).minCoeff());
  if (!(h > 0.0) || 2.0 * h >= (box.upper - box.lower).minCoeff()) {
    throw ConfigError("semiconvexity step must fit inside the box");
  }
  Box inner{box.lower.array() + h, box.upper.array() - h};
  Sampler rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = rng.in_box(inner.lower, inner.upper);
    Vec dh = h * rng.unit_vector(f.dim());
    double second = max_hamiltonian(f, x + dh, p).value + max_hamiltonian(f, x - dh, p).value -
                    2.0 * max_hamiltonian(f, x, p).value;
    worst = std::max(worst, -second / (h * h));
  }
  return worst;
}

double certify_support_lipschitz(const Multifunction& f, const Box& box, int pairs, int directions,
                                 std::uint64_t seed) {
  require_box(f, box);
  if (pairs < 1) throw ConfigError("pairs must be >= 1");
  Sampler rng(seed);
  double worst = 0.0;
  for (int s = 0; s < pairs; ++s) {
    Vec x = rng.in_box(box.lower, box.upper);
    Vec y = rng.in_box(box.lower, box.upper);
    double d = (x - y).norm();
    if (d < 1e-12) continue;
    worst = std::max(worst, support_deviation(f.eval(x), f.eval(y), directions) / d);
  }
  return worst;
}

}  // namespace mintime
