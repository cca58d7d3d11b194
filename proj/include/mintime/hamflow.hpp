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


#ifndef MINTIME_HAMFLOW_HPP_
#define MINTIME_HAMFLOW_HPP_

#include <ostream>
#include <vector>

#include "mintime/dynamics.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/types.hpp"

namespace mintime {

/// State/costate pairs of the Hamiltonian system
///   x' = grad_p H(x, p),   -p' = grad_x H(x, p)
/// sampled at uniform time nodes. `switched[i]` marks nodes where the
/// extremal velocity jumped since node i-1.
struct HamiltonianArc {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> p;
  std::vector<char> switched;
  double dt = 0.0;

  std::size_t size() const { return t.size(); }
  int switch_count() const;
};

enum class FlowDirection { kForward, kBackward };

/// Classical RK4. A backward run integrates the time-reversed field and
/// stores times 0, -dt, -2dt, ... in integration order. When the extremal
/// velocity jumps inside a step, the step is split at the jump (located by
/// bisection) and the earlier extremal point is kept up to it.
/// Throws DegenerateCostateError for p0 = 0 and CostateCollapseError when
/// |p| drops below 1e-12.
HamiltonianArc integrate_mp(const Multifunction& f, const Vec& x0, const Vec& p0, double horizon, double dt,
                            FlowDirection direction = FlowDirection::kForward);

struct Synthesis {
  HamiltonianArc arc;
  bool certified = false;
  double worst_residual = 0.0;
  double cert_tol = 0.0;
};

/// Backward extremal from the target point z with outward unit normal nu.
/// The costate ends at -nu, the inward normal, so that -p(t) is the outward
/// normal to the sublevel set through x(t). The arc is re-indexed forward
/// (x(horizon) = z) and, when a field is given, certified by
/// |T(x(t)) - (horizon - t)| <= cert_tol at `cert_samples` times.
/// cert_tol <= 0 selects 3 dx + 10 dt.
Synthesis synthesize_from_target(const Multifunction& f, const TargetSet& target, const Vec& z, const Vec& nu,
                                 double horizon, double dt, const ValueField* field = nullptr,
                                 double cert_tol = 0.0, int cert_samples = 20);

/// Backward extremals from the target support points z(nu) for `candidates`
/// outward directions nu taken from the uniform direction grid, in grid
/// order. Non-certifying arcs are kept with certified = false; candidates
/// whose costate collapses are skipped.
std::vector<Synthesis> synthesize_family(const Multifunction& f, const TargetSet& target, int candidates,
                                         double horizon, double dt, const ValueField* field = nullptr,
                                         double cert_tol = 0.0);

struct DualBoundReport {
  bool pass = true;
  double worst_lower = 0.0;      // max of e^{-K0 t}|p(0)| - |p(t)|
  double worst_upper = 0.0;      // max of |p(t)| - e^{K0 t}|p(0)|
  double worst_increment = 0.0;  // max of |p(t2)-p(t1)| - K0 e^{K0(t2-t1)}(t2-t1)|p(t2)|
  double worst_relative = 0.0;   // largest of the three over |p(0)|
  double tolerance = 0.0;        // 1e-6 e^{K0 T}
};

/// Costate growth bounds over all node pairs of the arc.
DualBoundReport check_dual_bounds(const HamiltonianArc& arc, double k0);

/// max over nodes of |h(x(t), -p(t)) - h(x(0), -p(0))|.
double hamiltonian_constancy(const HamiltonianArc& arc, const Multifunction& f);

/// max over nodes of |<grad_p H(x,p), p> - H(x,p)|.
double extremal_identity_defect(const HamiltonianArc& arc, const Multifunction& f);

/// CSV with header t,x1..xn,p1..pn,switch.
void write_arc_csv(std::ostream& os, const HamiltonianArc& arc);

}  // namespace mintime

#endif  // MINTIME_HAMFLOW_HPP_
