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


#include "mintime/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mintime/convexset.hpp"
#include "mintime/dynamics.hpp"

namespace mintime {

using nlohmann::json;

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json sanitize(const json& j) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return j;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = sanitize(it.value());
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(sanitize(e));
    return out;
  }
  return j;
}

double number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError("expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Vec vec_from_json(const json& j) {
  return guarded("vector", [&] {
    if (!j.is_array()) throw ConfigError("expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_or_inf(j[i]);
    return v;
  });
}

json vec_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty array of rows");
  const auto cols = vec_from_json(j[0]).size();
  Mat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    Vec row = vec_from_json(j[i]);
    if (row.size() != cols) throw ConfigError("matrix rows differ in length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i).transpose()));
  return rows;
}

// Bodies.

json ConvexBody::to_json() const {
  return std::visit(
      Overloaded{
          [](const Ball& b) -> json { return {{"type", "ball"}, {"center", vec_to_json(b.center)}, {"radius", b.radius}}; },
          [](const Polytope& p) -> json {
            json verts = json::array();
            for (const auto& v : p.vertices) verts.push_back(vec_to_json(v));
            return {{"type", "polytope"}, {"vertices", verts}};
          },
          [](const Ellipsoid& e) -> json {
            return {{"type", "ellipsoid"}, {"center", vec_to_json(e.center)}, {"shape", mat_to_json(e.shape)}};
          },
          [](const Translate& t) -> json {
            return {{"type", "translate"}, {"body", t.body->to_json()}, {"offset", vec_to_json(t.offset)}};
          },
          [](const ScaledSum& s) -> json {
            json terms = json::array();
            for (const auto& [c, b] : s.terms) terms.push_back({{"coef", c}, {"body", b->to_json()}});
            return {{"type", "sum"}, {"terms", terms}};
          },
      },
      shape_);
}

ConvexBody ConvexBody::from_json(const json& j) {
  return guarded("body", [&]() -> ConvexBody {
    if (!j.is_object()) throw ConfigError("body must be an object");
    const std::string type = j.at("type").get<std::string>();
    if (type == "ball") return ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
    if (type == "point") return point(vec_from_json(j.at("center")));
    if (type == "polytope") {
      std::vector<Vec> verts;
      for (const auto& v : j.at("vertices")) verts.push_back(vec_from_json(v));
      return polytope(std::move(verts));
    }
    if (type == "box") return box(vec_from_json(j.at("lower")), vec_from_json(j.at("upper")));
    if (type == "ellipsoid") return ellipsoid(vec_from_json(j.at("center")), mat_from_json(j.at("shape")));
    if (type == "translate") return translate(from_json(j.at("body")), vec_from_json(j.at("offset")));
    if (type == "sum") {
      std::vector<std::pair<double, ConvexBody>> terms;
      for (const auto& t : j.at("terms")) terms.emplace_back(t.at("coef").get<double>(), from_json(t.at("body")));
      return scaled_sum(terms);
    }
    throw ConfigError("unknown body type \"" + type + "\"");
  });
}

// Dynamics.

json Multifunction::to_json() const {
  json j;
  switch (form_) {
    case DynamicsForm::kIsotropic:
      j = {{"form", "isotropic"}, {"dim", n_}, {"radius", radius_.text()}};
      break;
    case DynamicsForm::kLinearDrift:
      j = {{"form", "linear_drift"}, {"A", mat_to_json(a_)}, {"U", u_->to_json()}};
      break;
    case DynamicsForm::kAffineControl: {
      json drift = json::array();
      for (const auto& e : drift_) drift.push_back(e.text());
      json gain = json::array();
      for (const auto& row : gain_) {
        json r = json::array();
        for (const auto& e : row) r.push_back(e.text());
        gain.push_back(r);
      }
      j = {{"form", "affine_control"}, {"drift", drift}, {"gain", gain}, {"U", u_->to_json()}};
      break;
    }
  }
  json c = {{"lipschitz", constants.lipschitz}, {"growth", constants.growth}};
  if (constants.semiconvexity) c["semiconvexity"] = *constants.semiconvexity;
  if (constants.support_lipschitz) c["support_lipschitz"] = *constants.support_lipschitz;
  j["constants"] = c;
  return j;
}

Multifunction Multifunction::from_json(const json& j) {
  return guarded("dynamics", [&]() -> Multifunction {
    if (!j.is_object()) throw ConfigError("dynamics must be an object");
    const std::string form = j.at("form").get<std::string>();
    auto expr_list = [](const json& a) {
      std::vector<Expr> out;
      for (const auto& e : a) out.push_back(Expr::parse(e.get<std::string>()));
      return out;
    };
    Multifunction f;
    if (form == "isotropic") {
      const json& r = j.at("radius");
      f = isotropic(j.at("dim").get<int>(), r.is_string() ? Expr::parse(r.get<std::string>())
                                                          : Expr::constant(r.get<double>()));
    } else if (form == "linear_drift") {
      f = linear_drift(mat_from_json(j.at("A")), ConvexBody::from_json(j.at("U")));
    } else if (form == "affine_control") {
      std::vector<std::vector<Expr>> gain;
      for (const auto& row : j.at("gain")) gain.push_back(expr_list(row));
      f = affine_control(expr_list(j.at("drift")), std::move(gain), ConvexBody::from_json(j.at("U")));
    } else {
      throw ConfigError("unknown dynamics form \"" + form + "\"");
    }
    if (j.contains("constants")) {
      const json& c = j.at("constants");
      if (c.contains("lipschitz")) f.constants.lipschitz = c.at("lipschitz").get<double>();
      if (c.contains("growth")) f.constants.growth = c.at("growth").get<double>();
      if (c.contains("semiconvexity")) f.constants.semiconvexity = c.at("semiconvexity").get<double>();
      if (c.contains("support_lipschitz")) f.constants.support_lipschitz = c.at("support_lipschitz").get<double>();
    }
    if (!(f.constants.lipschitz >= 0.0) || !(f.constants.growth > 0.0)) {
      throw ConfigError("declared constants must have lipschitz >= 0 and growth > 0");
    }
    return f;
  });
}

// Grids, targets, boxes.

json grid_to_json(const GridSpec& grid) {
  return {{"lower", vec_to_json(grid.lower)}, {"upper", vec_to_json(grid.upper)}, {"nodes", grid.nodes}};
}

GridSpec grid_from_json(const json& j) {
  return guarded("grid", [&] {
    GridSpec g{vec_from_json(j.at("lower")), vec_from_json(j.at("upper")), j.at("nodes").get<std::vector<int>>()};
    g.validate();
    return g;
  });
}

json target_to_json(const TargetSet& target) {
  if (target.bodies.size() == 1) return target.bodies.front().to_json();
  json arr = json::array();
  for (const auto& b : target.bodies) arr.push_back(b.to_json());
  return arr;
}

TargetSet target_from_json(const json& j) {
  if (j.is_array()) {
    if (j.empty()) throw ConfigError("target needs at least one body");
    std::vector<ConvexBody> bodies;
    for (const auto& b : j) bodies.push_back(ConvexBody::from_json(b));
    for (const auto& b : bodies) {
      if (b.dim() != bodies.front().dim()) throw ConfigError("target bodies differ in dimension");
    }
    return TargetSet(std::move(bodies));
  }
  return TargetSet(ConvexBody::from_json(j));
}

json box_to_json(const Box& box) { return {{"lower", vec_to_json(box.lower)}, {"upper", vec_to_json(box.upper)}}; }

Box box_from_json(const json& j) {
  return guarded("box", [&] {
    Box b{vec_from_json(j.at("lower")), vec_from_json(j.at("upper"))};
    if (b.lower.size() != b.upper.size()) throw ConfigError("box bounds differ in dimension");
    for (int i = 0; i < b.dim(); ++i) {
      if (!(b.lower[i] <= b.upper[i])) throw ConfigError("box lower bound exceeds upper bound");
    }
    return b;
  });
}

// Fields and reports.

void write_field_csv(std::ostream& os, const ValueField& field) {
  const int n = field.grid.dim();
  for (int i = 0; i < n; ++i) os << 'x' << (i + 1) << ',';
  os << "T\n";
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    Vec x = field.grid.node(k);
    for (int i = 0; i < n; ++i) os << format_number(x[i]) << ',';
    os << format_number(field.values[k]) << '\n';
  }
}

json field_header(const ValueField& field) {
  json j = {{"kind", "field"},
            {"grid", grid_to_json(field.grid)},
            {"residual", field.residual},
            {"sweeps", field.sweeps},
            {"tau", field.tau}};
  if (field.exact) j["exact"] = field.exact->text();
  return stamp(j);
}

json stamp(const json& j) {
  json out = sanitize(j);
  if (out.is_object()) out["schema"] = kSchemaVersion;
  return out;
}

void write_jsonl(std::ostream& os, const json& j) { os << stamp(j).dump() << '\n'; }

std::vector<json> read_jsonl(std::istream& is) {
  std::vector<json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ConfigError("malformed JSON line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace mintime
