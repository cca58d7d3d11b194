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

#ifndef MINTIME_SAMPLING_HPP_
#define MINTIME_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "mintime/types.hpp"

namespace mintime {

/// Deterministic direction lattices on the unit sphere S^{dim-1}.
///
/// `uniform_directions` gives evenly spread grids: equal angles for dim 2, an
/// icosphere when `count` is an icosphere size (12, 42, 162, 642, 2562, ...)
/// and a Fibonacci lattice otherwise for dim 3, a Hopf-coordinate lattice for
/// dim 4. `nested_directions` gives a low-discrepancy sequence whose first k
/// entries are the same for every count >= k, so maxima taken over it are
/// monotone in the count.
std::vector<Vec> uniform_directions(int dim, int count);
std::vector<Vec> nested_directions(int dim, int count);
std::vector<Vec> icosphere(int subdivisions);

/// Default proximal-test grid: 360 for the plane, 2562-node icosphere in 3-d.
std::vector<Vec> default_cone_directions(int dim);

/// Seeded uniform sampler. Uses the raw 64-bit Mersenne output so draws are
/// identical across standard library implementations.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec in_box(const Vec& lo, const Vec& hi) {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
    return x;
  }
  Vec unit_vector(int dim);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mintime

#endif  // MINTIME_SAMPLING_HPP_
