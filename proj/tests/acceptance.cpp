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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance <path-to-mintime-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mintime/convexset.hpp"
#include "mintime/dynamics.hpp"
#include "mintime/scenario.hpp"

using namespace mintime;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Reports = std::vector<VerificationReport>;

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

Reports select(const Reports& all, const std::string& prefix) {
  Reports out;
  for (const auto& r : all)
    if (starts_with(r.check, prefix)) out.push_back(r);
  return out;
}

double worst_of(const Reports& rs) {
  double w = 0.0;
  for (const auto& r : rs) w = std::max(w, r.worst);
  return w;
}

// Every report under `prefix` passes, and there is at least `min_count`.
void require_family(Outcome& o, const Reports& all, const std::string& prefix, std::size_t min_count,
                    const std::string& label) {
  const Reports rs = select(all, prefix);
  std::size_t failed = 0;
  for (const auto& r : rs) failed += r.pass ? 0 : 1;
  o.require(rs.size() >= min_count, label + " " + prefix + ": " + std::to_string(rs.size()) + " reports, want " +
                                        std::to_string(min_count));
  o.require(failed == 0, label + " " + prefix + ": " + std::to_string(failed) + " failed, worst " +
                             fmt(worst_of(rs)));
}

// Subjects "point:i" with i < n that appear in `rs`.
std::size_t points_covered(const Reports& rs, int n) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& r : rs) {
    if (!starts_with(r.subject, "point:")) continue;
    const int i = std::stoi(r.subject.substr(6));
    if (i < n && r.tested > 0) seen[static_cast<std::size_t>(i)] = 1;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  Scenario scenario;
  ValueField field;
  double solve_seconds = 0.0;
  Reports reports;
};

Run solve(const Scenario& s) {
  Run run{s, {}, 0.0, {}};
  const auto t0 = std::chrono::steady_clock::now();
  run.field = solve_min_time(s.dynamics, s.target, s.grid, s.solver);
  run.solve_seconds = seconds_since(t0);
  return run;
}

Run solve_and_verify(const Scenario& s) {
  Run run = solve(s);
  run.reports = run_verification(s, run.field, 1).reports;
  return run;
}

// Time for the double integrator to reach the origin: one switch on the
// parabola x1 = -x2 |x2| / 2.
double double_integrator_time(double x1, double x2) {
  const double s = x1 + 0.5 * x2 * std::abs(x2);
  if (s > 0.0) return x2 + 2.0 * std::sqrt(0.5 * x2 * x2 + x1);
  if (s < 0.0) return -x2 + 2.0 * std::sqrt(0.5 * x2 * x2 - x1);
  return std::abs(x2);
}

// Sup of |r(lx + (1-l)y) - (l r(x) + (1-l) r(y))| / (l (1-l) |x-y|^2) over a
// fine lattice of the square [-w, w]^2, r(x) = 1 + min(|x|^2, 1).
double quadratic_radius_class_l(double w) {
  const int m = 15;
  std::vector<Vec> nodes;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      nodes.push_back((Vec(2) << -w + 2 * w * i / (m - 1), -w + 2 * w * j / (m - 1)).finished());
  auto r = [](const Vec& x) { return 1.0 + std::min(x.squaredNorm(), 1.0); };
  double c = 0.0;
  for (const Vec& x : nodes) {
    for (const Vec& y : nodes) {
      const double d2 = (x - y).squaredNorm();
      if (d2 < 1e-12) continue;
      for (int k = 1; k < 40; ++k) {
        const double l = k / 40.0;
        c = std::max(c, std::abs(r(l * x + (1 - l) * y) - (l * r(x) + (1 - l) * r(y))) / (l * (1 - l) * d2));
      }
    }
  }
  return c;
}

json lattice_document() {
  json balls = json::array();
  for (double x : {-1.2, -0.4, 0.4, 1.2})
    for (double y : {-0.8, 0.0, 0.8}) balls.push_back({{"type", "ball"}, {"center", {x, y}}, {"radius", 0.15}});
  // Centres of the squares formed by four neighbouring discs are strict local maxima of T.
  const json peaks = {{-0.8, -0.4}, {0.0, -0.4}, {0.8, -0.4}, {-0.8, 0.4}, {0.0, 0.4}};
  return {{"id", "disc-lattice"},
          {"description", "twelve discs, unit speed"},
          {"dynamics", {{"form", "isotropic"}, {"dim", 2}, {"radius", 1}}},
          {"target", balls},
          {"grid", {{"lower", {-2, -2}}, {"upper", {2, 2}}, {"nodes", {201, 201}}}},
          {"seed", 3},
          {"verify", {{"points", {{"count", 0}}}, {"checks", {{"dimension", {{"extra", peaks}}}}}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void report(int id, const std::string& title, const Outcome& o, bool& all) {
  std::printf("criterion %2d  %-4s  %s%s%s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.note.empty() ? "" : "  :: ",
              o.note.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <mintime-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  bool all = true;

  const Run eik = solve_and_verify(load_scenario("eikonal", "", {}));
  const double dx = eik.scenario.grid.min_spacing();

  {
    Outcome o;
    double err = 0.0;
    const GridSpec& g = eik.field.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = eik.field.values[k];
      if (t > 1.5) continue;
      err = std::max(err, std::abs(t - std::max(0.0, g.node(k).norm() - 0.25)));
    }
    o.require(std::abs(dx - 0.02) < 1e-12, "grid spacing " + fmt(dx));
    o.require(err <= 2 * dx, "max error " + fmt(err));
    o.require(eik.solve_seconds <= 30.0, "solve took " + fmt(eik.solve_seconds) + " s");
    o.note += (o.note.empty() ? "" : "; ") + std::string("max error ") + fmt(err) + ", " + fmt(eik.solve_seconds) + " s";
    report(1, "eikonal solve error <= 2dx within 30 s", o, all);
  }

  const Run di = solve_and_verify(load_scenario("double-integrator", "", {}));
  {
    Outcome o;
    const double t = eval_T(di.field, (Vec(2) << 0.0, -1.0).finished());
    const double exact = double_integrator_time(0.0, -1.0);
    o.require(std::abs(exact - (1 + std::numbers::sqrt2)) < 1e-12, "oracle disagrees with 1+sqrt2");
    o.require(di.scenario.grid.nodes[0] == 161, "grid is not 161^2");
    o.require(std::abs(t - exact) <= 0.1, "T(0,-1) = " + fmt(t));
    o.require(di.solve_seconds <= 60.0, "solve took " + fmt(di.solve_seconds) + " s");
    o.note += (o.note.empty() ? "" : "; ") + std::string("T(0,-1) = ") + fmt(t) + ", " + fmt(di.solve_seconds) + " s";
    report(2, "double integrator T(0,-1) within 0.1 of 1+sqrt2", o, all);
  }

  {
    Outcome o;
    const VerifyConfig cfg = scenario_config(eik.scenario);
    o.require(cfg.tol_h == 0.05, "tol_h " + fmt(cfg.tol_h));
    for (const char* fam : {"level-subgradient/", "sublevel-normal/", "horizontal/", "normal-decomposition"}) {
      const Reports rs = select(eik.reports, fam);
      o.require(points_covered(rs, 20) == 20, std::string(fam) + " covers " + std::to_string(points_covered(rs, 20)));
      require_family(o, eik.reports, fam, 20, "eikonal");
    }
    const double hw = worst_of(select(eik.reports, "level-subgradient/forward-h"));
    o.require(hw <= 0.05, "|h+1| reached " + fmt(hw));
    report(3, "eikonal subgradient bundle at 20 points, tol_h 0.05", o, all);
  }

  const Run sq = solve_and_verify(load_scenario("square", "", {}));
  {
    Outcome o;
    const Reports e = select(eik.reports, "epigraph/");
    o.require(points_covered(e, 20) == 20, "eikonal epigraph points " + std::to_string(points_covered(e, 20)));
    require_family(o, eik.reports, "epigraph/", 20, "eikonal");
    const Reports c = select(sq.reports, "epigraph/");
    o.require(points_covered(c, 5) == 5, "square corners " + std::to_string(points_covered(c, 5)));
    const auto seg = sq.scenario.doc.at("verify").at("checks").at("epigraph");
    o.require(seg.value("segment_points", 0) == 11, "segment sampled at " + std::to_string(seg.value("segment_points", 0)));
    require_family(o, sq.reports, "epigraph/", 5, "square");
    report(4, "epigraph correspondence at 20 points and 5 corners", o, all);
  }

  {
    Outcome o;
    auto dims = [&](const Reports& rs, int want_dim, std::size_t count, const std::string& label) {
      const Reports d = select(rs, "dimension");
      o.require(d.size() == count, label + ": " + std::to_string(d.size()) + " points");
      for (const auto& r : d) {
        const int sub = r.detail.value("sublevel", -1);
        const int epi = r.detail.value("epigraph", -1);
        o.require(r.pass && sub == want_dim && epi == want_dim,
                  label + " " + r.subject + ": " + std::to_string(sub) + " vs " + std::to_string(epi));
      }
    };
    dims(eik.reports, 1, 20, "eikonal");
    dims(sq.reports, 2, 5, "square");
    const Scenario lattice = scenario_from_json(lattice_document());
    const Run lat = solve_and_verify(lattice);
    dims(lat.reports, 0, 5, "lattice");
    report(5, "dimension agreement: 20 smooth, 5 corners, 5 interior maxima", o, all);
  }

  const Run rot = solve_and_verify(load_scenario("linear-rotation", "", {}));
  {
    Outcome o;
    const std::vector<std::pair<const Run*, double>> runs = {{&eik, 1e-12}, {&di, 1e-3}, {&rot, 1e-6}};
    for (const auto& [run, tol] : runs) {
      const std::string id = run->scenario.id;
      const Reports cov = select(run->reports, "propagation/coverage");
      o.require(cov.size() == 1 && cov[0].pass, id + ": fewer than 10 certified arcs");
      const Reports con = select(run->reports, "propagation/constancy");
      o.require(con.size() == 10, id + ": " + std::to_string(con.size()) + " arcs");
      o.require(worst_of(con) <= tol, id + ": constancy " + fmt(worst_of(con)));
      require_family(o, run->reports, "propagation/", 1 + 4 * 10, id);
    }
    report(6, "propagation along 10 certified arcs per scenario", o, all);
  }

  {
    Outcome o;
    for (const Run* run : {&eik, &di, &rot}) {
      const Scenario& s = run->scenario;
      const double k0 = s.dynamics.constants.lipschitz;
      const double est = certify_lipschitz(s.dynamics, Box{s.grid.lower, s.grid.upper}, 100, s.seed);
      o.require(est <= k0 * (1 + 1e-3) + 1e-9, s.id + ": K0 " + fmt(k0) + " below estimate " + fmt(est));
      require_family(o, run->reports, "dual-bounds", 10, s.id);
    }
    // Halving the rotation's constant must show up as a failed report.
    json doc = builtin_document("linear-rotation");
    const double k0 = doc.at("dynamics").at("constants").at("lipschitz").get<double>();
    doc["verify"]["checks"] = {{"propagation", doc.at("verify").at("checks").at("propagation")},
                               {"dual_bounds", {{"k0", k0 / 2}}}};
    const Scenario half = scenario_from_json(doc);
    const Reports hr = select(run_verification(half, rot.field, 1).reports, "dual-bounds");
    const auto fails = std::count_if(hr.begin(), hr.end(), [](const auto& r) { return !r.pass; });
    o.require(!hr.empty() && fails > 0, "halved K0 passed on every arc");
    report(7, "dual arc bounds with certified K0; halved K0 fails", o, all);
  }

  const Run quad = solve_and_verify(load_scenario("quadratic-radius", "", {}));
  {
    Outcome o;
    const Reports lin = select(rot.reports, "class-l");
    o.require(lin.size() == 1 && lin[0].worst <= 1e-9, "linear drift C " + fmt(worst_of(lin)));
    const Reports qr = select(quad.reports, "class-l");
    const auto box = quad.scenario.doc.at("verify").at("checks").at("class_l").at("box");
    const double w = box.at("upper").at(0).get<double>();
    const double oracle = quadratic_radius_class_l(w);
    o.require(qr.size() == 1 && std::abs(qr[0].worst - oracle) <= 0.1 * oracle,
              "quadratic radius C " + fmt(worst_of(qr)) + " vs oracle " + fmt(oracle));
    const ConvexBody point = ConvexBody::point((Vec(2) << 0.3, -0.2).finished());
    const ConvexBody square = ConvexBody::box((Vec(2) << -1, -1).finished(), (Vec(2) << 1, 1).finished());
    for (double a : {0.1, 1.0, 10.0}) {
      o.require(check_a_regular(point, a, 200).pass, "singleton fails at a = " + fmt(a));
      o.require(!check_a_regular(square, a, 200).pass, "square passes at a = " + fmt(a));
    }
    report(8, "class-L certificates and a-regularity", o, all);
  }

  {
    Outcome o;
    const Reports conv = select(rot.reports, "regularity/sublevel-convexity");
    o.require(conv.size() == 10, "rotation convexity levels " + std::to_string(conv.size()));
    for (const auto& r : conv) o.require(r.pass, "rotation not convex at " + r.subject);
    for (const char* fam : {"regularity/sublevel-phi", "regularity/epigraph-c"}) {
      const Reports rs = select(eik.reports, fam);
      o.require(!rs.empty(), std::string("eikonal ") + fam + " missing");
      for (const auto& r : rs) o.require(r.pass, std::string("eikonal ") + fam + " " + fmt(r.worst));
    }
    auto regularity_c = [](int nodes) {
      json doc = builtin_document("double-integrator");
      doc["grid"]["nodes"] = {nodes, nodes};
      doc["verify"]["checks"] = {{"regularity", doc.at("verify").at("checks").at("regularity")}};
      const Scenario s = scenario_from_json(doc);
      const ValueField f = solve_min_time(s.dynamics, s.target, s.grid, s.solver);
      const Reports rs = select(run_verification(s, f, 1).reports, "regularity/epigraph-c");
      return rs.empty() ? kInf : rs.front().worst;
    };
    const double c161 = regularity_c(161);
    const double c241 = regularity_c(241);
    o.require(std::isfinite(c161) && std::isfinite(c241) && c161 > 0.0, "C not finite/positive");
    o.require(std::abs(c241 - c161) <= 0.2 * c161, "C drifts " + fmt(c161) + " -> " + fmt(c241));
    o.note += (o.note.empty() ? "" : "; ") + std::string("double integrator C ") + fmt(c161) + " -> " + fmt(c241);
    report(9, "regularity: rotation convexity, eikonal phi and C, refinement-stable C", o, all);
  }

  {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / ("mintime_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    std::vector<std::string> blobs;
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / run;
      const std::string cmd = "\"" + cli + "\" verify --scenario linear-rotation --seed 7 --out-dir \"" +
                              dir.string() + "\" > \"" + (root.string() + "." + run + ".log") + "\" 2>&1";
      fs::create_directories(root);
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, std::string("run ") + run + " exited " + std::to_string(rc));
      blobs.push_back(slurp(dir / "linear-rotation.verify.jsonl"));
    }
    o.require(!blobs[0].empty(), "empty artifact");
    o.require(blobs[0] == blobs[1], "artifacts differ");
    fs::remove_all(root);
    fs::remove(root.string() + ".a.log");
    fs::remove(root.string() + ".b.log");
    report(10, "verify artifacts byte-identical across runs", o, all);
  }

  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
