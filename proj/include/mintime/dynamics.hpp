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

#ifndef MINTIME_DYNAMICS_HPP_
#define MINTIME_DYNAMICS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mintime/convexset.hpp"
#include "mintime/expr.hpp"
#include "mintime/types.hpp"

namespace mintime {

enum class DynamicsForm { kIsotropic, kLinearDrift, kAffineControl };

/// Regularity constants a scenario declares for its dynamics. Certification
/// estimates are compared against these by the verification harness.
struct DeclaredConstants {
  double lipschitz = 0.0;
  double growth = 1.0;
  std::optional<double> semiconvexity;
  std::optional<double> support_lipschitz;
};

/// The velocity multifunction x -> F(x).
///
///   isotropic       F(x) = B(0, r(x))
///   linear drift    F(x) = A x + U
///   affine control  F(x) = f(x) + g(x) U,  g(x) an n×m matrix field
class Multifunction {
 public:
  static Multifunction isotropic(int n, Expr radius);
  static Multifunction linear_drift(Mat a, ConvexBody u);
  static Multifunction affine_control(std::vector<Expr> drift, std::vector<std::vector<Expr>> gain,
                                      ConvexBody u);

  ConvexBody operator()(const Vec& x) const { return eval(x); }
  ConvexBody eval(const Vec& x) const;

  int dim() const { return n_; }
  DynamicsForm form() const { return form_; }
  const Mat& drift_matrix() const { return a_; }
  const ConvexBody& control_set() const { return *u_; }

  DeclaredConstants constants;

  nlohmann::json to_json() const;
  static Multifunction from_json(const nlohmann::json& j);

 private:
  Multifunction() = default;

  DynamicsForm form_ = DynamicsForm::kIsotropic;
  int n_ = 0;
  Expr radius_;
  Mat a_;
  std::optional<ConvexBody> u_;
  std::vector<Expr> drift_;
  std::vector<std::vector<Expr>> gain_;
};

/// Value and extremal velocity of a Hamiltonian at (x, p).
struct HamiltonianEval {
  double value = 0.0;
  Vec extremal_point;
};

/// h(x, zeta) = min over F(x) of <v, zeta>; computed as -H(x, -zeta).
HamiltonianEval min_hamiltonian(const Multifunction& f, const Vec& x, const Vec& zeta);

/// H(x, p) = max over F(x) of <v, p>; the extremal point is grad_p H when
/// the maximizer is unique.
HamiltonianEval max_hamiltonian(const Multifunction& f, const Vec& x, const Vec& p);

inline constexpr double kGradientStep = 1e-5;

/// Central-difference gradient of H(., p). Throws DegenerateCostateError
/// for p = 0.
Vec grad_x_H(const Multifunction& f, const Vec& x, const Vec& p, double step = kGradientStep);

struct Box {
  Vec lower;
  Vec upper;
  int dim() const { return static_cast<int>(lower.size()); }
  Vec center() const { return 0.5 * (lower + upper); }
};

/// Direction count used for set metrics inside the certifications.
inline constexpr int kSetMetricDirections = 720;

// Certifications report estimates only; pass/fail belongs to the caller.
double certify_lipschitz(const Multifunction& f, const Box& box, int pairs, std::uint64_t seed = 1);
double certify_growth(const Multifunction& f, const Box& box, int samples, std::uint64_t seed = 1);
double certify_class_L(const Multifunction& f, const Box& box, int pairs, int lambda_grid,
                       std::uint64_t seed = 1);
/// Smallest c >= 0 with H(x+h,p) + H(x-h,p) - 2H(x,p) >= -c|h|^2 on samples
/// with |h| = step (default: 5% of the narrowest box side).
double certify_H_semiconvexity(const Multifunction& f, const Vec& p, const Box& box, int samples,
                               std::optional<double> step = std::nullopt, std::uint64_t seed = 1);
double certify_support_lipschitz(const Multifunction& f, const Box& box, int pairs, int directions,
                                 std::uint64_t seed = 1);

}  // namespace mintime

#endif  // MINTIME_DYNAMICS_HPP_
