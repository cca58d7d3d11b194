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


// Command-line front end: solve, flow, verify, report and list.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mintime/hamflow.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/io.hpp"
#include "mintime/scenario.hpp"
#include "mintime/theorems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mintime;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitVerify = 4;

struct Options {
  std::string scenario;
  std::string out_dir;
  std::string registry;
  std::string field_path;
  std::string arc_path;
  std::string cones_path;
  int threads = 1;
  std::int64_t seed = -1;
  std::vector<std::string> overrides;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : fallback;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

Scenario load(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("--scenario is required");
  std::vector<std::string> overrides = o.overrides;
  if (o.seed >= 0) overrides.push_back("seed=" + std::to_string(o.seed));
  return load_scenario(o.scenario, o.registry, overrides);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ValueField solve(const Scenario& s) {
  auto t0 = std::chrono::steady_clock::now();
  ValueField field = solve_min_time(s.dynamics, s.target, s.grid, s.solver);
  std::fprintf(stderr, "solved %s: %d sweeps, residual %.3g, %.1f s\n", s.id.c_str(), field.sweeps, field.residual,
               elapsed(t0));
  return field;
}

int cmd_solve(const Options& o) {
  const Scenario s = load(o);
  const ValueField field = solve(s);
  const fs::path csv = o.field_path.empty() ? fs::path(o.out_dir) / (s.id + ".field.csv") : fs::path(o.field_path);
  {
    auto os = open_out(csv);
    write_field_csv(os, field);
  }
  json header = field_header(field);
  header["scenario"] = s.id;
  header["seed"] = s.seed;
  header["csv"] = csv.filename().string();
  if (s.reference) {
    const double window = s.doc.value("reference_window", kInf);
    double err = 0.0;
    for (std::size_t k = 0; k < field.grid.size(); ++k) {
      if (!(field.values[k] <= window)) continue;
      err = std::max(err, std::abs(field.values[k] - std::max(0.0, s.reference->eval(field.grid.node(k)))));
    }
    header["reference_error"] = err;
    header["reference_window"] = window;
  }
  fs::path hdr = csv;
  hdr.replace_extension(".json");
  {
    auto os = open_out(hdr);
    os << stamp(header).dump(2) << '\n';
  }
  std::printf("%s: field written to %s (%d sweeps, residual %s)\n", s.id.c_str(), csv.string().c_str(), field.sweeps,
              format_number(field.residual).c_str());
  if (header.contains("reference_error")) {
    std::printf("%s: max |T - reference| on T <= %s is %s\n", s.id.c_str(),
                format_number(header["reference_window"].get<double>()).c_str(),
                format_number(header["reference_error"].get<double>()).c_str());
  }
  return kExitOk;
}

int cmd_flow(const Options& o) {
  const Scenario s = load(o);
  const ValueField field = verification_field(s, solve(s));
  const auto arcs = select_arcs(s, field);
  const fs::path dir(o.out_dir);
  auto summary = open_out(dir / (s.id + ".arcs.jsonl"));
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const fs::path path = dir / (s.id + ".arc" + std::to_string(i) + ".csv");
    {
      auto os = open_out(path);
      write_arc_csv(os, arcs[i].arc);
    }
    if (i == 0 && !o.arc_path.empty()) {
      auto os = open_out(o.arc_path);
      write_arc_csv(os, arcs[i].arc);
    }
    const auto& a = arcs[i].arc;
    write_jsonl(summary, {{"kind", "arc"},
                          {"scenario", s.id},
                          {"index", i},
                          {"csv", path.filename().string()},
                          {"nodes", a.size()},
                          {"switches", a.switch_count()},
                          {"certified", arcs[i].certified},
                          {"worst_residual", arcs[i].worst_residual},
                          {"cert_tol", arcs[i].cert_tol},
                          {"constancy", hamiltonian_constancy(a, s.dynamics)},
                          {"x0", vec_to_json(a.x.front())},
                          {"p0", vec_to_json(a.p.front())}});
  }
  std::printf("%s: %zu certified arcs written to %s\n", s.id.c_str(), arcs.size(), dir.string().c_str());
  if (arcs.empty()) {
    std::fprintf(stderr, "mintime: no certified arcs\n");
    return kExitVerify;
  }
  return kExitOk;
}

// One row per check name: the subject with the smallest margin represents it.
void print_summary(std::ostream& os, const std::vector<VerificationReport>& reports) {
  struct Row {
    int subjects = 0, passed = 0, excluded = 0;
    const VerificationReport* rep = nullptr;
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& r : reports) {
    if (!rows.count(r.check)) order.push_back(r.check);
    Row& row = rows[r.check];
    ++row.subjects;
    row.passed += r.pass ? 1 : 0;
    row.excluded += r.excluded;
    if (!row.rep || r.worst - r.tolerance > row.rep->worst - row.rep->tolerance) row.rep = &r;
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %8s %8s %12s %12s  %s\n", "check", "passed", "excluded", "worst",
                "tolerance", "status");
  os << line;
  for (const auto& name : order) {
    const Row& row = rows[name];
    std::snprintf(line, sizeof line, "%-34s %4d/%-3d %8d %12.4g %12.4g  %s\n", name.c_str(), row.passed,
                  row.subjects, row.excluded, row.rep->worst, row.rep->tolerance,
                  row.passed == row.subjects ? "pass" : "FAIL");
    os << line;
  }
}

int cmd_verify(const Options& o) {
  const Scenario s = load(o);
  const ValueField solved = solve(s);
  auto t0 = std::chrono::steady_clock::now();
  const VerifyRun run = run_verification(s, solved, o.threads);
  std::fprintf(stderr, "verified %s in %.1f s\n", s.id.c_str(), elapsed(t0));

  const fs::path path = fs::path(o.out_dir) / (s.id + ".verify.jsonl");
  {
    auto os = open_out(path);
    write_jsonl(os, run.header);
    for (const auto& r : run.reports) {
      json j = to_json(r);
      j["kind"] = "report";
      write_jsonl(os, j);
    }
  }
  if (!o.cones_path.empty()) {
    auto os = open_out(o.cones_path);
    os << stamp({{"kind", "cones"}, {"scenario", s.id}, {"cones", cone_dump(s, solved)}}).dump(2) << '\n';
  }
  std::cout << "scenario " << s.id << " (seed " << s.seed << ")\n";
  print_summary(std::cout, run.reports);
  const bool ok = run.pass();
  std::cout << (ok ? "all checks passed" : "verification FAILED") << "; reports in " << path.string() << '\n';
  return ok ? kExitOk : kExitVerify;
}

int cmd_report(const Options& o) {
  const fs::path dir(o.out_dir);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError("no output directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 13 && name.ends_with(".verify.jsonl")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no verification runs in " + dir.string());

  std::cout << "mintime verification summary (" << files.size() << " run" << (files.size() == 1 ? "" : "s")
            << ")\n";
  bool all_ok = true;
  for (const auto& f : files) {
    std::ifstream in(f);
    const auto lines = read_jsonl(in);
    std::vector<VerificationReport> reports;
    std::string scenario = f.filename().string();
    std::string seed = "?";
    for (const auto& j : lines) {
      if (j.value("kind", "") == "config") {
        scenario = j.value("scenario", scenario);
        if (j.contains("seed")) seed = j.at("seed").dump();
        continue;
      }
      if (j.value("kind", "") != "report") continue;
      VerificationReport r;
      r.check = j.value("check", "");
      r.scenario = j.value("scenario", "");
      r.subject = j.value("subject", "");
      r.excluded = j.value("excluded", 0);
      r.pass = j.value("pass", false);
      auto num = [](const json& v) {
        if (v.is_string()) return v.get<std::string>() == "-inf" ? -kInf : kInf;
        return v.get<double>();
      };
      r.worst = j.contains("worst") ? num(j.at("worst")) : 0.0;
      r.tolerance = j.contains("tolerance") ? num(j.at("tolerance")) : 0.0;
      reports.push_back(r);
    }
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
    all_ok = all_ok && ok;
    std::cout << "\n== " << scenario << " (seed " << seed << ", " << reports.size() << " reports): "
              << (ok ? "pass" : "FAIL") << '\n';
    print_summary(std::cout, reports);
  }
  std::cout << '\n' << (all_ok ? "all runs passed" : "some runs FAILED") << '\n';
  return kExitOk;
}

int cmd_list(const Options& o) {
  for (const auto& e : list_scenarios(o.registry)) {
    std::printf("%-20s %s%s\n", e.id.c_str(), e.description.c_str(),
                e.source == "built-in" ? "" : ("  [" + e.source + "]").c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mintime: minimum time functions, normal cones and verification"};
  app.require_subcommand(1);
  Options o;
  o.out_dir = env_or("MINTIME_OUT_DIR", "mintime-out");
  o.registry = env_or("MINTIME_SCENARIO_DIR", "");

  auto common = [&](CLI::App* sub, bool scenario) {
    if (scenario) {
      sub->add_option("--scenario,scenario", o.scenario, "scenario id or JSON file")->required();
      sub->add_option("--set", o.overrides, "dotted-path override key=value (repeatable)");
      sub->add_option("--seed", o.seed, "override the scenario seed")->check(CLI::NonNegativeNumber);
      sub->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out-dir", o.out_dir, "artifact directory (default $MINTIME_OUT_DIR or mintime-out)");
    sub->add_option("--registry", o.registry, "directory of scenario files (default $MINTIME_SCENARIO_DIR)");
  };
  auto* solve_cmd = app.add_subcommand("solve", "solve the HJB equation and write the field");
  common(solve_cmd, true);
  solve_cmd->add_option("--field", o.field_path, "field CSV path");
  auto* flow_cmd = app.add_subcommand("flow", "synthesize certified optimal arcs");
  common(flow_cmd, true);
  flow_cmd->add_option("--arc", o.arc_path, "CSV path for the first arc");
  auto* verify_cmd = app.add_subcommand("verify", "run the scenario's verification checks");
  common(verify_cmd, true);
  verify_cmd->add_option("--cones", o.cones_path, "JSON path for the sublevel cones at the check points");
  auto* report_cmd = app.add_subcommand("report", "summarize the verification runs in the output directory");
  common(report_cmd, false);
  auto* list_cmd = app.add_subcommand("list", "list available scenarios");
  common(list_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve_cmd) return cmd_solve(o);
    if (*flow_cmd) return cmd_flow(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*report_cmd) return cmd_report(o);
    if (*list_cmd) return cmd_list(o);
  } catch (const SolverBudgetError& e) {
    std::fprintf(stderr, "mintime: solver budget exhausted: %s\n", e.what());
    return kExitBudget;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "mintime: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "mintime: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InsufficientSamplingError& e) {
    std::fprintf(stderr, "mintime: verification failure: %s\n", e.what());
    return kExitVerify;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mintime: internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
