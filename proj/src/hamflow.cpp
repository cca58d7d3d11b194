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


#include "mintime/hamflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mintime/sampling.hpp"

namespace mintime {

int HamiltonianArc::switch_count() const {
  return static_cast<int>(std::count(switched.begin(), switched.end(), 1));
}

namespace {

constexpr double kCollapse = 1e-12;

struct Deriv {
  Vec dx;
  Vec dp;
};

// Right-hand side with the extremal velocity taken along `select` (the
// current costate unless a selection is frozen).
Deriv rhs(const Multifunction& f, const Vec& x, const Vec& p, const Vec* select, double sign) {
  Deriv d;
  d.dx = sign * f.eval(x).support(select != nullptr ? *select : p).point;
  d.dp = -sign * grad_x_H(f, x, p);
  return d;
}

void rk4(const Multifunction& f, Vec& x, Vec& p, double h, const Vec* select, double sign) {
  const Deriv k1 = rhs(f, x, p, select, sign);
  const Deriv k2 = rhs(f, x + 0.5 * h * k1.dx, p + 0.5 * h * k1.dp, select, sign);
  const Deriv k3 = rhs(f, x + 0.5 * h * k2.dx, p + 0.5 * h * k2.dp, select, sign);
  const Deriv k4 = rhs(f, x + h * k3.dx, p + h * k3.dp, select, sign);
  x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  p += (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
}

// True when the extremal velocity at (x, p) differs from the one selected
// by the earlier costate `prev` by more than a smooth drift could explain.
bool jumped(const Multifunction& f, const Vec& x, const Vec& p, const Vec& prev, double tol) {
  const ConvexBody fx = f.eval(x);
  const Vec a = fx.support(p).point;
  const Vec b = fx.support(prev).point;
  return (a - b).norm() > tol * (1.0 + b.norm());
}

}  // namespace

HamiltonianArc integrate_mp(const Multifunction& f, const Vec& x0, const Vec& p0, double horizon, double dt,
                            FlowDirection direction) {
  if (x0.size() != f.dim() || p0.size() != f.dim()) throw ConfigError("integrate_mp: dimension mismatch");
  if (p0.norm() == 0.0) throw DegenerateCostateError("integrate_mp: p0 = 0");
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon / 10.0 * (1.0 + 1e-12)) {
    throw ConfigError("integrate_mp: need 0 < dt <= horizon / 10");
  }
  const double sign = direction == FlowDirection::kForward ? 1.0 : -1.0;
  const double jump_tol = 50.0 * dt;
  const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));

  HamiltonianArc arc;
  arc.dt = dt;
  arc.t.push_back(0.0);
  arc.x.push_back(x0);
  arc.p.push_back(p0);
  arc.switched.push_back(0);
  Vec x = x0;
  Vec p = p0;
  double elapsed = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double h = std::min(dt, horizon - elapsed);
    const Vec p_start = p;
    Vec xt = x;
    Vec pt = p;
    rk4(f, xt, pt, h, nullptr, sign);
    bool sw = false;
    if (jumped(f, xt, pt, p_start, jump_tol)) {
      // Locate the jump, keep the earlier selection up to it.
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        Vec xm = x;
        Vec pm = p;
        rk4(f, xm, pm, mid * h, &p_start, sign);
        (jumped(f, xm, pm, p_start, jump_tol) ? hi : lo) = mid;
      }
      xt = x;
      pt = p;
      rk4(f, xt, pt, hi * h, &p_start, sign);
      if (hi < 1.0) rk4(f, xt, pt, (1.0 - hi) * h, nullptr, sign);
      sw = true;
    }
    x = xt;
    p = pt;
    elapsed += h;
    if (!(p.norm() >= kCollapse)) {
      throw CostateCollapseError("costate collapsed at t = " + std::to_string(sign * elapsed), sign * elapsed);
    }
    arc.t.push_back(sign * elapsed);
    arc.x.push_back(x);
    arc.p.push_back(p);
    arc.switched.push_back(sw ? 1 : 0);
  }
  return arc;
}

Synthesis synthesize_from_target(const Multifunction& f, const TargetSet& target, const Vec& z, const Vec& nu,
                                 double horizon, double dt, const ValueField* field, double cert_tol,
                                 int cert_samples) {
  if (std::abs(nu.norm() - 1.0) > 1e-9) throw ConfigError("synthesize_from_target: nu must be a unit vector");
  bool normal = false;
  for (const ConvexBody& body : target.bodies) {
    if (distance(body, z) > target.tolerance) continue;
    const double step = 0.1;
    if ((project(body, z + step * nu) - z).norm() <= 1e-6) normal = true;
  }
  if (!normal) throw ConfigError("synthesize_from_target: nu is not a proximal normal of the target at z");

  const HamiltonianArc back = integrate_mp(f, z, -nu, horizon, dt, FlowDirection::kBackward);
  Synthesis out;
  HamiltonianArc& arc = out.arc;
  arc.dt = dt;
  const std::size_t m = back.size();
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = m - 1 - k;
    arc.t.push_back(horizon + back.t[i]);
    arc.x.push_back(back.x[i]);
    arc.p.push_back(back.p[i]);
    // A jump recorded at backward node i sits between forward nodes k-1 and k.
    arc.switched.push_back(k > 0 && back.switched[i + 1] ? 1 : 0);
  }
  arc.t.front() = 0.0;

  if (field == nullptr) return out;
  const double dx = field->grid.min_spacing();
  out.cert_tol = cert_tol > 0.0 ? cert_tol : 3.0 * dx + 10.0 * dt;
  out.worst_residual = 0.0;
  const int samples = std::max(2, cert_samples);
  for (int j = 0; j < samples; ++j) {
    const std::size_t k = static_cast<std::size_t>(std::llround(static_cast<double>(j) * (m - 1) / (samples - 1)));
    double residual = kInf;
    if (field->grid.inside(arc.x[k])) {
      residual = std::abs(eval_T(*field, arc.x[k]) - (horizon - arc.t[k]));
    }
    out.worst_residual = std::max(out.worst_residual, residual);
  }
  out.certified = out.worst_residual <= out.cert_tol;
  return out;
}

std::vector<Synthesis> synthesize_family(const Multifunction& f, const TargetSet& target, int candidates,
                                         double horizon, double dt, const ValueField* field, double cert_tol) {
  if (candidates < 1) throw ConfigError("synthesize_family: candidates must be >= 1");
  const int n = f.dim();
  std::vector<Synthesis> out;
  for (const Vec& nu : uniform_directions(n, n == 1 ? 2 : candidates)) {
    const Vec z = target.support(nu).point;
    try {
      out.push_back(synthesize_from_target(f, target, z, nu, horizon, dt, field, cert_tol));
    } catch (const CostateCollapseError&) {
    }
  }
  return out;
}

DualBoundReport check_dual_bounds(const HamiltonianArc& arc, double k0) {
  if (!(k0 >= 0.0) || !std::isfinite(k0)) throw ConfigError("check_dual_bounds: K0 must be finite and >= 0");
  DualBoundReport r;
  if (arc.size() == 0) return r;
  const double p0 = arc.p.front().norm();
  const double span = std::abs(arc.t.back() - arc.t.front());
  r.tolerance = 1e-6 * std::exp(k0 * span);
  r.worst_lower = r.worst_upper = r.worst_increment = -kInf;
  std::vector<double> norms(arc.size());
  for (std::size_t i = 0; i < arc.size(); ++i) {
    norms[i] = arc.p[i].norm();
    const double s = std::abs(arc.t[i] - arc.t.front());
    r.worst_lower = std::max(r.worst_lower, std::exp(-k0 * s) * p0 - norms[i]);
    r.worst_upper = std::max(r.worst_upper, norms[i] - std::exp(k0 * s) * p0);
  }
  for (std::size_t i = 0; i < arc.size(); ++i) {
    for (std::size_t j = i + 1; j < arc.size(); ++j) {
      const double s = std::abs(arc.t[j] - arc.t[i]);
      const double bound = k0 * std::exp(k0 * s) * s * norms[j];
      r.worst_increment = std::max(r.worst_increment, (arc.p[j] - arc.p[i]).norm() - bound);
    }
  }
  if (arc.size() == 1) r.worst_increment = 0.0;
  const double scale = p0 > 0.0 ? p0 : 1.0;
  r.worst_relative = std::max({r.worst_lower, r.worst_upper, r.worst_increment}) / scale;
  r.pass = r.worst_relative <= r.tolerance;
  return r;
}

double hamiltonian_constancy(const HamiltonianArc& arc, const Multifunction& f) {
  if (arc.size() == 0) return 0.0;
  const double h0 = min_hamiltonian(f, arc.x.front(), -arc.p.front()).value;
  double worst = 0.0;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    worst = std::max(worst, std::abs(min_hamiltonian(f, arc.x[i], -arc.p[i]).value - h0));
  }
  return worst;
}

double extremal_identity_defect(const HamiltonianArc& arc, const Multifunction& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    const HamiltonianEval e = max_hamiltonian(f, arc.x[i], arc.p[i]);
    worst = std::max(worst, std::abs(e.extremal_point.dot(arc.p[i]) - e.value));
  }
  return worst;
}

void write_arc_csv(std::ostream& os, const HamiltonianArc& arc) {
  const Eigen::Index n = arc.size() > 0 ? arc.x.front().size() : 0;
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) os << ",p" << i + 1;
  os << ",switch\n";
  char buf[64];
  for (std::size_t k = 0; k < arc.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", arc.t[k]);
    os << buf;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", arc.x[k][i]);
      os << buf;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", arc.p[k][i]);
      os << buf;
    }
    os << ',' << static_cast<int>(arc.switched[k]) << '\n';
  }
}

}  // namespace mintime
