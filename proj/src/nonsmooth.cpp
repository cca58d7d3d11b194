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


#include "mintime/nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mintime/convexset.hpp"
#include "mintime/sampling.hpp"

namespace mintime {

namespace {

std::vector<Vec> direction_grid(int dim, int count) {
  if (dim == 1) return uniform_directions(1, 2);
  return uniform_directions(dim, count);
}

Mat as_rows(const std::vector<Vec>& vs, Eigen::Index dim) {
  Mat m(static_cast<Eigen::Index>(vs.size()), dim);
  for (std::size_t i = 0; i < vs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
  return m;
}

Vec stack(const Vec& zeta, double alpha) {
  Vec z(zeta.size() + 1);
  z.head(zeta.size()) = zeta;
  z[zeta.size()] = alpha;
  return z;
}

// For each row d of `dirs`: max(0, max over columns z of <d, z> * weight_z).
Vec max_ratio(const Mat& dirs, const Mat& offsets, const Vec& weight) {
  Vec out = Vec::Zero(dirs.rows());
  if (offsets.cols() == 0) return out;
  constexpr Eigen::Index kChunk = 64;
  for (Eigen::Index r = 0; r < dirs.rows(); r += kChunk) {
    const Eigen::Index m = std::min(kChunk, dirs.rows() - r);
    Mat prod = dirs.middleRows(r, m) * offsets;
    prod.array().rowwise() *= weight.transpose().array();
    out.segment(r, m) = prod.rowwise().maxCoeff().cwiseMax(0.0);
  }
  return out;
}

Vec inverse_square_norms(const Mat& offsets) {
  return offsets.colwise().squaredNorm().transpose().cwiseInverse();
}

// Interpolated sample points on rings around x inside B(x, eta).
template <class Fn>
void for_rings_in_ball(const GridSpec& g, const Vec& x, double eta, int refine, Fn&& fn) {
  const int n = g.dim();
  const double h = g.min_spacing() / refine;
  static const std::vector<Vec> fan1 = uniform_directions(1, 2);
  static const std::vector<Vec> fan2 = uniform_directions(2, 360);
  static const std::vector<Vec> fan3 = icosphere(3);
  const std::vector<Vec>& fan = n == 1 ? fan1 : (n == 2 ? fan2 : fan3);
  for (int j = 1; j * h < eta; ++j) {
    for (const Vec& u : fan) {
      const Vec y = x + (j * h) * u;
      if (g.inside(y)) fn(y);
    }
  }
}

// Displacements y - x (columns) and T(y) - T(x) of finite ring samples.
struct LocalSamples {
  Mat dy;
  Vec dt;
};

LocalSamples local_samples(const ValueField& field, const Vec& x, double tx, double eta, int refine) {
  const int n = field.grid.dim();
  std::vector<double> buf;
  std::vector<double> dts;
  for_rings_in_ball(field.grid, x, eta, refine, [&](const Vec& y) {
    const double v = eval_T(field, y);
    if (v == kInf) return;
    for (int i = 0; i < n; ++i) buf.push_back(y[i] - x[i]);
    dts.push_back(v - tx);
  });
  LocalSamples out;
  out.dy = Eigen::Map<Mat>(buf.data(), n, static_cast<Eigen::Index>(dts.size()));
  out.dt = Eigen::Map<Vec>(dts.data(), static_cast<Eigen::Index>(dts.size()));
  return out;
}

double finite_T(const ValueField& field, const Vec& x, const char* what) {
  const double t = eval_T(field, x);
  if (t == kInf) throw DomainError(std::string(what) + ": T is infinite at the base point");
  return t;
}

Mat epigraph_offsets(const ValueField& field, const Vec& x, double eta, int refine) {
  const int n = field.grid.dim();
  const double tx = finite_T(field, x, "epigraph_cloud");
  const double dx = field.grid.min_spacing();
  const double h = dx / refine;
  const LocalSamples loc = local_samples(field, x, tx, eta, refine);
  const int levels = static_cast<int>(std::floor(eta / dx + 1e-9));
  const int column = static_cast<int>(std::floor(eta / h + 1e-9));
  Mat out(n + 1, loc.dy.cols() * (levels + 1) + column);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < loc.dy.cols(); ++i) {
    for (int k = 0; k <= levels; ++k, ++c) {
      out.col(c).head(n) = loc.dy.col(i);
      out(n, c) = loc.dt[i] + k * dx;
    }
  }
  for (int k = 1; k <= column; ++k, ++c) {
    out.col(c).setZero();
    out(n, c) = k * h;
  }
  return out;
}

// Smallest c with T(y) - T(x) - <zeta, y - x> >= -c |y - x|^2, per row zeta.
Vec defects(const Mat& zetas, const LocalSamples& loc) {
  const Eigen::Index n = loc.dy.rows();
  Mat aug(n + 1, loc.dy.cols());
  aug.topRows(n) = loc.dy;
  aug.row(n) = -loc.dt.transpose();
  Mat z(zetas.rows(), n + 1);
  z.leftCols(n) = zetas;
  z.col(n).setOnes();
  return max_ratio(z, aug, inverse_square_norms(loc.dy));
}

}  // namespace

double proximal_sigma(const std::vector<Vec>& points, const Vec& x, const Vec& u) {
  double sigma = 0.0;
  for (const Vec& y : points) {
    const Vec d = y - x;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0) continue;
    sigma = std::max(sigma, u.dot(d) / r2);
  }
  return sigma;
}

std::vector<Vec> local_points(const std::vector<Vec>& cloud, const Vec& x, double eta) {
  std::vector<Vec> out;
  for (const Vec& y : cloud) {
    const double r = (y - x).norm();
    if (r > 0.0 && r < eta) out.push_back(y);
  }
  return out;
}

ProximalCone proximal_normals(const std::vector<Vec>& cloud, const Vec& x, double eta, int directions,
                              double sigma_max) {
  if (!(eta > 0.0)) throw ConfigError("proximal_normals: eta must be positive");
  const std::vector<Vec> near = local_points(cloud, x, eta);
  if (near.size() < 8) {
    throw InsufficientSamplingError("proximal_normals: " + std::to_string(near.size()) +
                                    " cloud points within eta (need 8)");
  }
  const Eigen::Index n = x.size();
  Mat offsets(n, static_cast<Eigen::Index>(near.size()));
  for (std::size_t i = 0; i < near.size(); ++i) offsets.col(static_cast<Eigen::Index>(i)) = near[i] - x;
  const std::vector<Vec> dirs = direction_grid(static_cast<int>(n), directions);
  const Vec sig = max_ratio(as_rows(dirs, n), offsets, inverse_square_norms(offsets));
  ProximalCone cone;
  cone.base = x;
  cone.eta = eta;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (sig[static_cast<Eigen::Index>(i)] <= sigma_max) {
      cone.generators.push_back(dirs[i]);
      cone.sigma.push_back(sig[static_cast<Eigen::Index>(i)]);
    }
  }
  return cone;
}

std::vector<Vec> sublevel_cloud(const ValueField& field, const Vec& x, double eta, int refine) {
  const double t = finite_T(field, x, "sublevel_cloud");
  std::vector<Vec> out{x};
  for_rings_in_ball(field.grid, x, eta, refine, [&](const Vec& y) {
    if (eval_T(field, y) <= t) out.push_back(y);
  });
  return out;
}

ProximalCone sublevel_normals(const ValueField& field, const Vec& x, double eta, int directions,
                              double sigma_max, int refine) {
  return proximal_normals(sublevel_cloud(field, x, eta, refine), x, eta, directions, sigma_max);
}

double sublevel_sigma(const ValueField& field, const Vec& x, double eta, const Vec& u, int refine) {
  const double n = u.norm();
  if (n == 0.0) return 0.0;
  return proximal_sigma(sublevel_cloud(field, x, eta, refine), x, u / n);
}

double angle_to_cone(const Vec& u, const std::vector<Vec>& family) {
  const double un = u.norm();
  if (un == 0.0) return 0.0;
  std::vector<Vec> verts{Vec::Zero(u.size())};
  for (const Vec& f : family) {
    const double fn = f.norm();
    if (fn > 0.0) verts.push_back((10.0 / fn) * f);
  }
  if (verts.size() == 1) return std::acos(-1.0);
  const Vec q = project(ConvexBody::polytope(verts), u / un);
  const double qn = q.norm();
  if (qn < 1e-12) return 0.5 * std::acos(-1.0) + 1e-12;
  return std::acos(std::clamp(q.dot(u) / (qn * un), -1.0, 1.0));
}

std::vector<Vec> epigraph_cloud(const ValueField& field, const Vec& x, double eta, int refine) {
  const Mat m = epigraph_offsets(field, x, eta, refine);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) out.push_back(m.col(i));
  return out;
}

double epi_sigma(const ValueField& field, const Vec& x, double eta, const Vec& zeta, double alpha, int refine) {
  const Vec pair = stack(zeta, alpha);
  const double norm = pair.norm();
  if (norm == 0.0) return 0.0;
  const Mat off = epigraph_offsets(field, x, eta, refine);
  return max_ratio((pair / norm).transpose(), off, inverse_square_norms(off))[0];
}

EpiNormalSample epi_normals(const ValueField& field, const Vec& x, double eta, int directions,
                            double sigma_max, int refine) {
  if (!(eta > 0.0)) throw ConfigError("epi_normals: eta must be positive");
  const int n = field.grid.dim();
  EpiNormalSample out;
  out.base = x;
  out.value = finite_T(field, x, "epi_normals");
  out.eta = eta;
  const Mat off = epigraph_offsets(field, x, eta, refine);
  if (off.cols() < 8) {
    throw InsufficientSamplingError("epi_normals: " + std::to_string(off.cols()) +
                                    " epigraph samples within eta (need 8)");
  }
  std::vector<Vec> dirs;
  for (const Vec& d : direction_grid(n + 1, directions)) {
    if (std::abs(d[n]) >= 1e-12) dirs.push_back(d);  // horizontal pairs come from the slice below
  }
  for (const Vec& u : direction_grid(n, 360)) dirs.push_back(stack(u, 0.0));
  const Vec w = inverse_square_norms(off);
  const Vec sig = max_ratio(as_rows(dirs, n + 1), off, w);
  // Second stage: a finer local lattice around every coarse direction that
  // came within 4 sigma_max, spanning one coarse spacing each way.
  const double spacing = std::pow(4.0 * std::acos(-1.0) / directions, 1.0 / n);
  constexpr int kSteps = 4;
  std::vector<Vec> fine;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec& d = dirs[i];
    if (sig[static_cast<Eigen::Index>(i)] > 4.0 * sigma_max || std::abs(d[n]) < 1e-12) continue;
    const Mat q = Eigen::HouseholderQR<Mat>(Mat(d)).householderQ();
    std::vector<int> k(n, -kSteps);
    while (true) {
      Vec e = d;
      bool centre = true;
      for (int a = 0; a < n; ++a) {
        e += (spacing * k[a] / kSteps) * q.col(a + 1);
        centre = centre && k[a] == 0;
      }
      if (!centre) fine.push_back(e.normalized());
      int a = 0;
      for (; a < n; ++a) {
        if (++k[a] <= kSteps) break;
        k[a] = -kSteps;
      }
      if (a == n) break;
    }
  }
  const Vec fsig = fine.empty() ? Vec() : max_ratio(as_rows(fine, n + 1), off, w);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double s = sig[static_cast<Eigen::Index>(i)];
    if (s <= sigma_max) out.pairs.push_back({dirs[i].head(n), dirs[i][n], s});
  }
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double s = fsig[static_cast<Eigen::Index>(i)];
    if (s <= sigma_max) out.pairs.push_back({fine[i].head(n), fine[i][n], s});
  }
  return out;
}

double subgradient_defect(const ValueField& field, const Vec& x, double eta, const Vec& zeta, int refine) {
  const double tx = finite_T(field, x, "subgradient_defect");
  const LocalSamples loc = local_samples(field, x, tx, eta, refine);
  return defects(zeta.transpose(), loc)[0];
}

std::vector<Vec> prox_subdiff(const ValueField& field, const Vec& x, double eta, double c_max,
                              const EpiNormalSample* epi, int directions, int magnitudes, int refine) {
  const int n = field.grid.dim();
  const double tx = eval_T(field, x);
  if (tx == kInf) return {};
  const LocalSamples loc = local_samples(field, x, tx, eta, refine);
  if (loc.dy.cols() == 0) return {};
  const double slope = (loc.dt.array().abs() / loc.dy.colwise().norm().transpose().array()).maxCoeff();
  std::vector<Vec> cand;
  if (slope > 0.0 && magnitudes > 0) {
    const double top = 2.0 * slope;
    for (const Vec& u : direction_grid(n, directions)) {
      for (int k = 1; k <= magnitudes; ++k) cand.push_back((top * k / magnitudes) * u);
    }
  }
  if (epi != nullptr) {
    for (const EpiPair& pr : epi->pairs) {
      if (pr.alpha < 0.0) cand.push_back(pr.zeta / -pr.alpha);
    }
  }
  if (cand.empty()) return {};
  const Vec c = defects(as_rows(cand, n), loc);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (c[static_cast<Eigen::Index>(i)] <= c_max) out.push_back(cand[i]);
  }
  return out;
}

std::vector<Vec> horiz_subdiff(const ValueField& field, const Vec& x, double eta, double sigma_max,
                               int directions, int refine) {
  const int n = field.grid.dim();
  const Mat off = epigraph_offsets(field, x, eta, refine);
  std::vector<Vec> out;
  if (off.cols() < 8) return out;
  std::vector<Vec> dirs;
  for (const Vec& u : direction_grid(n, directions)) dirs.push_back(stack(u, 0.0));
  const Vec sig = max_ratio(as_rows(dirs, n + 1), off, inverse_square_norms(off));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (sig[static_cast<Eigen::Index>(i)] <= sigma_max) out.push_back(dirs[i].head(n));
  }
  return out;
}

int cone_dimension(const std::vector<Vec>& generators, double rel_tol) {
  if (generators.empty()) return 0;
  Eigen::JacobiSVD<Mat> svd(as_rows(generators, generators.front().size()));
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++rank;
  }
  return rank;
}

int cone_dimension(const EpiNormalSample& sample, double rel_tol) {
  std::vector<Vec> rows;
  rows.reserve(sample.pairs.size());
  for (const EpiPair& p : sample.pairs) rows.push_back(stack(p.zeta, p.alpha));
  return cone_dimension(rows, rel_tol);
}

bool cone_is_pointed(const std::vector<Vec>& generators) {
  if (generators.empty()) return true;
  Vec m = Vec::Zero(generators.front().size());
  for (const Vec& g : generators) m += g.normalized();
  if (m.norm() < 1e-12) return false;
  m.normalize();
  return std::all_of(generators.begin(), generators.end(), [&](const Vec& g) { return m.dot(g) > 1e-9; });
}

double phi_convexity_constant(const std::vector<Vec>& cloud, const std::vector<ProximalCone>& cones,
                              double r_min) {
  double phi = 0.0;
  for (const ProximalCone& cone : cones) {
    // Points equal to the base up to rounding carry no curvature information.
    const double floor2 = std::max(r_min * r_min, 1e-24 * (1.0 + cone.base.squaredNorm()));
    for (const Vec& v : cone.generators) {
      const double vn = v.norm();
      if (vn == 0.0) continue;
      for (const Vec& y : cloud) {
        const Vec d = y - cone.base;
        const double r2 = d.squaredNorm();
        if (r2 <= floor2) continue;
        phi = std::max(phi, v.dot(d) / (vn * r2));
      }
    }
  }
  return phi;
}

EpiPhiResult epi_phi_convexity(const ValueField& field, const Box& region, int samples,
                               const EpiPhiOptions& opts) {
  if (samples < 1) throw ConfigError("epi_phi_convexity: samples must be >= 1");
  const GridSpec& g = field.grid;
  const double dx = g.min_spacing();
  const double eta = opts.eta > 0.0 ? opts.eta : 3.0 * dx;
  const double sigma_max = opts.sigma_max > 0.0 ? opts.sigma_max : default_sigma_max(dx);
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = field.values[k];
    if (v == kInf || v < opts.t_min || v > opts.t_max) continue;
    const Vec y = g.node(k);
    if (((y - region.lower).array() < 0.0).any() || ((region.upper - y).array() < 0.0).any()) continue;
    eligible.push_back(k);
  }
  EpiPhiResult res;
  if (eligible.empty()) return res;
  Sampler rng(opts.seed);
  for (int s = 0; s < samples; ++s) {
    const std::size_t k = eligible[static_cast<std::size_t>(rng.uniform() * eligible.size()) % eligible.size()];
    const Vec x = g.node(k);
    if (jump_suspect(field, x)) {
      ++res.excluded;
      continue;
    }
    EpiNormalSample epi;
    try {
      epi = epi_normals(field, x, eta, opts.directions, sigma_max, opts.refine);
    } catch (const InsufficientSamplingError&) {
      ++res.excluded;
      continue;
    }
    ++res.tested;
    std::vector<EpiPair> pairs = epi.pairs;
    if (opts.principal_only && !pairs.empty()) {
      auto best = std::min_element(pairs.begin(), pairs.end(),
                                   [](const EpiPair& a, const EpiPair& b) { return a.sigma < b.sigma; });
      pairs = {*best};
    }
    const double tx = field.values[k];
    for (const EpiPair& pr : pairs) {
      const double scale = pr.zeta.norm() + std::abs(pr.alpha);
      for (std::size_t j : eligible) {
        if (j == k) continue;
        const Vec d = g.node(j) - x;
        const double r2 = d.squaredNorm();
        if (r2 < opts.r_min * opts.r_min) continue;
        const double dt = field.values[j] - tx;
        const double ratio = (pr.zeta.dot(d) + pr.alpha * dt) / (scale * (r2 + dt * dt));
        res.constant = std::max(res.constant, ratio);
      }
    }
  }
  return res;
}

bool jump_suspect(const ValueField& field, const Vec& x) {
  const GridSpec& g = field.grid;
  const int n = g.dim();
  const double floor = g.min_spacing();
  std::vector<int> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const double u = (x[i] - g.lower[i]) / g.spacing(i);
    const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, g.nodes[i] - 2);
    lo[i] = std::max(0, i0 - 1);
    hi[i] = std::min(g.nodes[i] - 1, i0 + 2);
  }
  std::vector<int> idx = lo;
  while (true) {
    const double a = field.values[g.flatten(idx)];
    if (a == kInf) return true;
    for (int i = 0; i < n; ++i) {
      if (idx[i] + 1 > hi[i]) continue;
      std::vector<int> nb = idx;
      ++nb[i];
      const double b = field.values[g.flatten(nb)];
      if (b == kInf) return true;
      if (std::max(a, b) > 10.0 * std::max(std::min(a, b), floor)) return true;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] <= hi[i]) break;
      idx[i] = lo[i];
    }
    if (i == n) break;
  }
  return false;
}

nlohmann::json cone_to_json(const ProximalCone& cone, double rel_tol) {
  nlohmann::json gens = nlohmann::json::array();
  for (std::size_t i = 0; i < cone.generators.size(); ++i) {
    gens.push_back({{"dir", std::vector<double>(cone.generators[i].data(),
                                                cone.generators[i].data() + cone.generators[i].size())},
                    {"sigma", cone.sigma[i]}});
  }
  return {{"point", std::vector<double>(cone.base.data(), cone.base.data() + cone.base.size())},
          {"generators", gens},
          {"dimension", cone_dimension(cone, rel_tol)}};
}

}  // namespace mintime
