// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mintime/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <thread>

#include "mintime/sampling.hpp"

namespace mintime {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index so the merge order never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::clamp(threads, 1, std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double h_of(const Multifunction& f, const Vec& x, const Vec& zeta) { return min_hamiltonian(f, x, zeta).value; }

// Accumulates one check over the items of a single subject.
struct Tally {
  double worst = 0.0;
  int samples = 0;
  void add(double v) {
    worst = std::max(worst, v);
    ++samples;
  }
};

VerificationReport make_report(const std::string& check, const std::string& scenario, const std::string& subject,
                               const Tally& t, double tol) {
  VerificationReport r;
  r.check = check;
  r.scenario = scenario;
  r.subject = subject;
  r.tested = 1;
  r.samples = t.samples;
  r.worst = t.worst;
  r.tolerance = tol;
  r.judge();
  return r;
}

VerificationReport excluded_report(const std::string& check, const std::string& scenario,
                                   const std::string& subject, const std::string& reason) {
  VerificationReport r;
  r.check = check;
  r.scenario = scenario;
  r.subject = subject;
  r.tested = 0;
  r.excluded = 1;
  r.detail["excluded"] = reason;
  r.judge();
  return r;
}

// Subgradient defect c of zeta expressed as the sigma of the epigraph pair
// (zeta, -1): c / (1 + |zeta|^2).
double scaled_defect(const ValueField& field, const Vec& x, const VerifyConfig& cfg, const Vec& zeta) {
  return subgradient_defect(field, x, cfg.eta, zeta, cfg.refine) / (1.0 + zeta.squaredNorm());
}

bool finite_at(const ValueField& field, const Vec& x) { return field.grid.inside(x) && eval_T(field, x) < kInf; }

std::string point_subject(int i) { return "point:" + std::to_string(i); }

// Per-point reports are produced in point order, check order fixed within a
// point.
std::vector<VerificationReport> flatten(std::vector<std::vector<VerificationReport>>& per) {
  std::vector<VerificationReport> out;
  for (auto& v : per)
    for (auto& r : v) out.push_back(std::move(r));
  return out;
}

std::vector<Vec> unit(const std::vector<Vec>& vs) {
  std::vector<Vec> out;
  for (const Vec& v : vs)
    if (v.norm() > 0.0) out.push_back(v.normalized());
  return out;
}

}  // namespace

VerifyConfig resolve_config(VerifyConfig cfg, const GridSpec& grid) {
  const double dx = grid.min_spacing();
  if (cfg.tol_h <= 0.0) throw ConfigError("tol_h must be positive");
  if (cfg.slack < 1.0) throw ConfigError("slack must be >= 1");
  if (cfg.refine < 1) throw ConfigError("refine must be >= 1");
  if (cfg.eta <= 0.0) cfg.eta = 3.0 * dx;
  if (cfg.sigma_max <= 0.0) cfg.sigma_max = default_sigma_max(dx);
  const double h = dx / cfg.refine;
  if (cfg.c_max <= 0.0) cfg.c_max = cfg.tol_h / (2.0 * h);
  if (cfg.epi_sigma_max <= 0.0) cfg.epi_sigma_max = 0.4 * cfg.tol_h / h;
  if (cfg.angle_tol <= 0.0) {
    cfg.angle_tol = 2.0 * std::asin(std::min(1.0, cfg.sigma_max * h)) + 2.0 * kPi / cfg.directions;
  }
  return cfg;
}

nlohmann::json config_to_json(const VerifyConfig& cfg) {
  return {{"tol_h", cfg.tol_h},
          {"eta", cfg.eta},
          {"sigma_max", cfg.sigma_max},
          {"epi_sigma_max", cfg.epi_sigma_max},
          {"c_max", cfg.c_max},
          {"slack", cfg.slack},
          {"angle_tol", cfg.angle_tol},
          {"dim_tol", cfg.dim_tol},
          {"directions", cfg.directions},
          {"epi_directions", cfg.epi_directions},
          {"magnitudes", cfg.magnitudes},
          {"refine", cfg.refine},
          {"constancy_tol", cfg.constancy_tol},
          {"arc_samples", cfg.arc_samples}};
}

nlohmann::json to_json(const VerificationReport& r) {
  return {{"check", r.check},       {"scenario", r.scenario}, {"subject", r.subject},
          {"requested", r.requested}, {"tested", r.tested},   {"excluded", r.excluded},
          {"samples", r.samples},   {"pass", r.pass},         {"worst", r.worst},
          {"tolerance", r.tolerance}, {"detail", r.detail}};
}

std::vector<VerificationReport> verify_pointwise(const ValueField& field, const Multifunction& f,
                                                 const TargetSet& target, const std::vector<Vec>& points,
                                                 const VerifyConfig& cfg, const std::string& scenario) {
  (void)target;
  const double membership = cfg.slack * cfg.sigma_max;
  std::vector<std::vector<VerificationReport>> per(points.size());
  parallel_for(static_cast<int>(points.size()), cfg.threads, [&](int i) {
    const Vec& x = points[i];
    const std::string subj = point_subject(i);
    auto& out = per[i];
    if (!finite_at(field, x)) {
      out.push_back(excluded_report("pointwise", scenario, subj, "infinite value"));
      return;
    }
    const ProximalCone cone = sublevel_normals(field, x, cfg.eta, cfg.directions, cfg.sigma_max, cfg.refine);
    const EpiNormalSample epi = epi_normals(field, x, cfg.eta, cfg.epi_directions, cfg.epi_sigma_max, cfg.refine);
    const std::vector<Vec> sub =
        prox_subdiff(field, x, cfg.eta, cfg.c_max, &epi, cfg.directions, cfg.magnitudes, cfg.refine);
    const std::vector<Vec> hor = horiz_subdiff(field, x, cfg.eta, cfg.sigma_max, cfg.directions, cfg.refine);
    const bool on_target = eval_T(field, x) <= 1e-9;

    if (on_target) {
      Tally fh, fn, bk, hs, hn, hb;
      for (const Vec& z : sub) {
        fh.add(std::max(0.0, -1.0 - h_of(f, x, z)));
        fn.add(sublevel_sigma(field, x, cfg.eta, z, cfg.refine) * z.norm());
      }
      for (const Vec& u : cone.generators) {
        const double hu = h_of(f, x, u);
        const double lmax = hu < 0.0 ? std::min(2.0, -1.0 / hu) : 2.0;
        for (double s : {0.25, 0.5, 0.75, 1.0}) {
          bk.add(scaled_defect(field, x, cfg, s * lmax * u));
        }
        if (hu >= cfg.tol_h) hb.add(epi_sigma(field, x, cfg.eta, u, 0.0, cfg.refine));
      }
      for (const Vec& u : hor) {
        hs.add(std::max(0.0, -h_of(f, x, u)));
        hn.add(sublevel_sigma(field, x, cfg.eta, u, cfg.refine));
      }
      out.push_back(make_report("target-subgradient/forward-h", scenario, subj, fh, cfg.tol_h));
      out.push_back(make_report("target-subgradient/forward-normal", scenario, subj, fn, membership));
      out.push_back(make_report("target-subgradient/backward", scenario, subj, bk, membership));
      out.push_back(make_report("target-horizontal/forward-sign", scenario, subj, hs, cfg.tol_h));
      out.push_back(make_report("target-horizontal/forward-normal", scenario, subj, hn, membership));
      out.push_back(make_report("target-horizontal/backward", scenario, subj, hb, membership));
      out.back().detail = {{"generators", cone.generators.size()},
                           {"subgradients", sub.size()},
                           {"horizontal", hor.size()}};
      return;
    }

    Tally fh, fn, bk, sg, hf, hb, hbn, dec;
    for (const Vec& z : sub) {
      fh.add(std::abs(h_of(f, x, z) + 1.0));
      fn.add(sublevel_sigma(field, x, cfg.eta, z, cfg.refine) * z.norm());
    }
    for (const Vec& u : cone.generators) {
      const double hu = h_of(f, x, u);
      sg.add(hu);
      if (hu < -cfg.tol_h) bk.add(scaled_defect(field, x, cfg, -u / hu));
      if (std::abs(hu) <= cfg.tol_h) hf.add(epi_sigma(field, x, cfg.eta, u, 0.0, cfg.refine));
    }
    for (const Vec& u : hor) {
      hb.add(std::abs(h_of(f, x, u)));
      hbn.add(sublevel_sigma(field, x, cfg.eta, u, cfg.refine));
    }
    std::vector<Vec> family = unit(sub);
    for (const Vec& u : hor) family.push_back(u);
    for (const Vec& u : cone.generators) dec.add(angle_to_cone(u, family));
    for (const Vec& v : family) dec.add(angle_to_cone(v, cone.generators));
    out.push_back(make_report("level-subgradient/forward-h", scenario, subj, fh, cfg.tol_h));
    out.push_back(make_report("level-subgradient/forward-normal", scenario, subj, fn, membership));
    out.push_back(make_report("level-subgradient/backward", scenario, subj, bk, membership));
    out.push_back(make_report("sublevel-normal/sign", scenario, subj, sg, cfg.tol_h));
    out.push_back(make_report("horizontal/forward", scenario, subj, hf, membership));
    out.push_back(make_report("horizontal/backward-h", scenario, subj, hb, cfg.tol_h));
    out.push_back(make_report("horizontal/backward-normal", scenario, subj, hbn, membership));
    out.push_back(make_report("normal-decomposition", scenario, subj, dec, cfg.angle_tol));
    out.back().detail = {{"generators", cone.generators.size()},
                         {"subgradients", sub.size()},
                         {"horizontal", hor.size()}};
  });
  return flatten(per);
}

std::vector<VerificationReport> verify_epi_correspondence(const ValueField& field, const Multifunction& f,
                                                          const std::vector<Vec>& points,
                                                          const std::vector<std::vector<Vec>>& probes,
                                                          const VerifyConfig& cfg, const std::string& scenario) {
  const double membership = cfg.slack * cfg.sigma_max;
  std::vector<std::vector<VerificationReport>> per(points.size());
  parallel_for(static_cast<int>(points.size()), cfg.threads, [&](int i) {
    const Vec& x = points[i];
    const std::string subj = point_subject(i);
    auto& out = per[i];
    if (!finite_at(field, x)) {
      out.push_back(excluded_report("epigraph", scenario, subj, "infinite value"));
      return;
    }
    const ProximalCone cone = sublevel_normals(field, x, cfg.eta, cfg.directions, cfg.sigma_max, cfg.refine);
    const EpiNormalSample epi = epi_normals(field, x, cfg.eta, cfg.epi_directions, cfg.epi_sigma_max, cfg.refine);
    Tally fw, pn, bs, bn, bh, triv;
    auto forward = [&](const Vec& u) {
      Vec z = u.normalized();
      const double a = h_of(f, x, z);
      const double s = std::hypot(1.0, a);
      fw.add(epi_sigma(field, x, cfg.eta, z / s, a / s, cfg.refine));
    };
    for (const Vec& u : cone.generators) forward(u);
    const bool has_probes = i < static_cast<int>(probes.size()) && !probes[i].empty();
    if (has_probes) {
      for (const Vec& u : probes[i]) {
        pn.add(sublevel_sigma(field, x, cfg.eta, u, cfg.refine));
        forward(u);
      }
    }
    for (const EpiPair& pr : epi.pairs) {
      bs.add(pr.alpha);
      const double zn = pr.zeta.norm();
      if (zn > 0.0) bn.add(sublevel_sigma(field, x, cfg.eta, pr.zeta / zn, cfg.refine) * zn);
      bh.add(std::abs(h_of(f, x, pr.zeta) - pr.alpha));
    }
    triv.add(cone.empty() != epi.empty() ? 1.0 : 0.0);
    out.push_back(make_report("epigraph/forward", scenario, subj, fw, membership));
    if (has_probes) out.push_back(make_report("epigraph/probe-normal", scenario, subj, pn, membership));
    out.push_back(make_report("epigraph/backward-sign", scenario, subj, bs, cfg.tol_h));
    out.push_back(make_report("epigraph/backward-normal", scenario, subj, bn, membership));
    out.push_back(make_report("epigraph/backward-h", scenario, subj, bh, cfg.tol_h));
    out.push_back(make_report("epigraph/triviality", scenario, subj, triv, 0.0));
    out.back().detail = {{"generators", cone.generators.size()}, {"pairs", epi.pairs.size()}};
  });
  return flatten(per);
}

std::vector<VerificationReport> verify_dimension(const ValueField& field, const Multifunction& f,
                                                 const std::vector<Vec>& points, const VerifyConfig& cfg,
                                                 const std::string& scenario) {
  (void)f;
  std::vector<std::vector<VerificationReport>> per(points.size());
  parallel_for(static_cast<int>(points.size()), cfg.threads, [&](int i) {
    const Vec& x = points[i];
    const std::string subj = point_subject(i);
    if (!finite_at(field, x)) {
      per[i].push_back(excluded_report("dimension", scenario, subj, "infinite value"));
      return;
    }
    const ProximalCone cone = sublevel_normals(field, x, cfg.eta, cfg.directions, cfg.sigma_max, cfg.refine);
    const EpiNormalSample epi = epi_normals(field, x, cfg.eta, cfg.epi_directions, cfg.epi_sigma_max, cfg.refine);
    const int ds = cone_dimension(cone, cfg.dim_tol);
    const int de = cone_dimension(epi, cfg.dim_tol);
    Tally t;
    t.add(std::abs(ds - de));
    VerificationReport r = make_report("dimension", scenario, subj, t, 0.0);
    r.detail = {{"sublevel", ds}, {"epigraph", de}, {"pointed", cone_is_pointed(cone.generators)}};
    per[i].push_back(std::move(r));
  });
  return flatten(per);
}

std::vector<VerificationReport> verify_propagation(const ValueField& field, const Multifunction& f,
                                                   const std::vector<Synthesis>& arcs, const VerifyConfig& cfg,
                                                   const std::string& scenario) {
  const double membership = cfg.slack * cfg.sigma_max;
  const GridSpec& g = field.grid;
  std::vector<std::vector<VerificationReport>> per(arcs.size());
  parallel_for(static_cast<int>(arcs.size()), cfg.threads, [&](int i) {
    const Synthesis& s = arcs[i];
    const std::string subj = "arc:" + std::to_string(i);
    auto& out = per[i];
    if (!s.certified) {
      out.push_back(excluded_report("propagation", scenario, subj, "not certified"));
      return;
    }
    const HamiltonianArc& arc = s.arc;
    Tally con;
    con.add(hamiltonian_constancy(arc, f));
    out.push_back(make_report("propagation/constancy", scenario, subj, con, cfg.constancy_tol));

    const Vec p0 = arc.p.front();
    const double h0 = h_of(f, arc.x.front(), -p0) / p0.norm();
    const bool level = h0 < -cfg.tol_h;
    const bool flat = std::abs(h0) <= cfg.tol_h;
    Tally sn, ep, mem;
    int skipped = 0;
    const int n = static_cast<int>(arc.size());
    for (int k = 1; k <= cfg.arc_samples; ++k) {
      const int idx = static_cast<int>(std::llround(static_cast<double>(k) * (n - 1) / (cfg.arc_samples + 1)));
      const Vec& x = arc.x[idx];
      const Vec q = -arc.p[idx];
      bool inside = true;
      for (int a = 0; a < g.dim(); ++a) {
        inside = inside && x[a] - cfg.eta - g.spacing(a) >= g.lower[a] && x[a] + cfg.eta + g.spacing(a) <= g.upper[a];
      }
      if (!inside || jump_suspect(field, x) || eval_T(field, x) <= cfg.eta) {
        ++skipped;
        continue;
      }
      const Vec u = q.normalized();
      sn.add(sublevel_sigma(field, x, cfg.eta, u, cfg.refine));
      const double a = h_of(f, x, u);
      const double sc = std::hypot(1.0, a);
      ep.add(epi_sigma(field, x, cfg.eta, u / sc, a / sc, cfg.refine));
      if (level) {
        const double hx = h_of(f, x, q);
        mem.add(scaled_defect(field, x, cfg, q / std::abs(hx)));
      } else if (flat) {
        mem.add(epi_sigma(field, x, cfg.eta, u, 0.0, cfg.refine));
      }
    }
    out.push_back(make_report("propagation/sublevel-normal", scenario, subj, sn, membership));
    out.back().detail = {{"skipped_times", skipped}};
    out.push_back(make_report("propagation/epigraph", scenario, subj, ep, membership));
    if (level) {
      out.push_back(make_report("propagation/subgradient", scenario, subj, mem, membership));
    } else if (flat) {
      out.push_back(make_report("propagation/horizontal", scenario, subj, mem, membership));
    }
    out.back().detail["h0"] = h0;
  });
  return flatten(per);
}

std::vector<Vec> level_crossings(const ValueField& field, double t) {
  const GridSpec& g = field.grid;
  std::vector<Vec> out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = field.values[k];
    if (a > t) continue;
    const std::vector<int> idx = g.unflatten(k);
    for (int i = 0; i < g.dim(); ++i) {
      for (int step : {-1, 1}) {
        std::vector<int> nb = idx;
        nb[i] += step;
        if (nb[i] < 0 || nb[i] >= g.nodes[i]) continue;
        const double b = field.values[g.flatten(nb)];
        if (b <= t || b == kInf) continue;
        const double s = (t - a) / (b - a);
        out.push_back(g.node(k) + s * (g.node(g.flatten(nb)) - g.node(k)));
      }
    }
  }
  return out;
}

std::vector<Vec> sample_points(const ValueField& field, const Box& box, double t_lo, double t_hi, int count,
                               double margin, std::uint64_t seed, int* excluded) {
  const GridSpec& g = field.grid;
  Sampler rng(seed);
  std::vector<Vec> out;
  int rejected = 0;
  const long max_draws = 100000L * std::max(1, count);
  for (long d = 0; d < max_draws && static_cast<int>(out.size()) < count; ++d) {
    const Vec x = rng.in_box(box.lower, box.upper);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) inside = inside && x[a] - margin >= g.lower[a] && x[a] + margin <= g.upper[a];
    if (!inside) continue;
    const double v = eval_T(field, x);
    if (!(v >= t_lo && v <= t_hi)) continue;
    if (jump_suspect(field, x)) {
      ++rejected;
      continue;
    }
    out.push_back(x);
  }
  if (excluded) *excluded = rejected;
  return out;
}

std::vector<VerificationReport> verify_regularity(const ValueField& field, const Multifunction& f,
                                                  const RegularityRegion& region, const VerifyConfig& cfg,
                                                  const std::string& scenario) {
  (void)f;
  std::vector<VerificationReport> out;
  auto in_box = [&](const Vec& y) {
    return ((y - region.box.lower).array() >= 0.0).all() && ((region.box.upper - y).array() >= 0.0).all();
  };

  if (region.sublevel_phi) {
    std::vector<VerificationReport> rows(region.t_grid.size());
    parallel_for(static_cast<int>(region.t_grid.size()), cfg.threads, [&](int ti) {
      const double t = region.t_grid[ti];
      std::vector<Vec> bases;
      for (const Vec& y : level_crossings(field, t))
        if (in_box(y)) bases.push_back(y);
      std::vector<Vec> cloud;
      for (const CloudPoint& c : sublevel_points(field, t)) cloud.push_back(c.x);
      std::vector<ProximalCone> cones;
      int excluded = 0;
      const std::size_t stride = std::max<std::size_t>(1, bases.size() / std::max(1, region.bases));
      for (std::size_t b = 0; b < bases.size(); b += stride) {
        if (jump_suspect(field, bases[b])) {
          ++excluded;
          continue;
        }
        ProximalCone c = sublevel_normals(field, bases[b], cfg.eta, cfg.directions, cfg.sigma_max, cfg.refine);
        if (c.empty()) continue;
        // principal normal only
        const auto best = std::min_element(c.sigma.begin(), c.sigma.end()) - c.sigma.begin();
        c.generators = {c.generators[best]};
        c.sigma = {c.sigma[best]};
        cones.push_back(std::move(c));
      }
      Tally tl;
      tl.add(phi_convexity_constant(cloud, cones, region.r_min));
      char buf[32];
      std::snprintf(buf, sizeof buf, "t:%g", t);
      VerificationReport r = make_report("regularity/sublevel-phi", scenario, buf, tl, region.phi_tol);
      r.samples = static_cast<int>(cones.size());
      r.excluded = excluded;
      r.detail = {{"t", t}, {"r_min", region.r_min}};
      rows[ti] = std::move(r);
    });
    for (auto& r : rows) out.push_back(std::move(r));
  }

  if (region.epigraph_c) {
    EpiPhiOptions o;
    o.eta = cfg.eta;
    o.sigma_max = cfg.epi_sigma_max;
    o.directions = cfg.epi_directions;
    o.r_min = region.r_min;
    o.refine = cfg.refine;
    o.t_min = region.t_min;
    o.t_max = region.t_max;
    o.principal_only = true;
    o.seed = region.seed;
    const EpiPhiResult res = epi_phi_convexity(field, region.box, region.bases, o);
    Tally tl;
    tl.add(res.constant);
    VerificationReport r = make_report("regularity/epigraph-c", scenario, "region", tl, region.c_tol);
    r.requested = region.bases;
    r.tested = res.tested;
    r.excluded = res.excluded;
    r.samples = res.tested;
    r.detail = {{"t_min", region.t_min}, {"t_max", region.t_max}, {"r_min", region.r_min}};
    out.push_back(std::move(r));
  }

  if (region.convexity) {
    double tau = 0.0;
    bool prefix = true;
    for (double t : region.t_grid) {
      const RegularityCheck c = check_sublevel_convexity(field, t, 4000, region.seed);
      Tally tl;
      tl.add(c.worst_violation);
      char buf[32];
      std::snprintf(buf, sizeof buf, "t:%g", t);
      VerificationReport r = make_report("regularity/sublevel-convexity", scenario, buf, tl, 0.0);
      r.detail = {{"t", t}};
      prefix = prefix && c.pass;
      if (prefix) tau = t;
      out.push_back(std::move(r));
    }
    Tally tl;
    tl.add(std::max(0.0, region.tau_min - tau));
    VerificationReport r = make_report("regularity/convex-horizon", scenario, "region", tl, 0.0);
    r.detail = {{"tau_estimate", tau}, {"tau_min", region.tau_min}};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mintime
