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

#ifndef MINTIME_EXPR_HPP_
#define MINTIME_EXPR_HPP_

#include <memory>
#include <string>

#include "mintime/types.hpp"

namespace mintime {

/// Compiled scalar expression over coordinates x1..x3.
///
/// Grammar: numbers, x1 x2 x3, + - * / ^, unary minus, parentheses and the
/// functions min(a,b) max(a,b) abs(a) pow(a,b) sqrt(a). Parse errors throw
/// ConfigError with the offending position.
class Expr {
 public:
  struct Node;

  static Expr parse(const std::string& text);
  static Expr constant(double value);

  double eval(const Vec& x) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace mintime

#endif  // MINTIME_EXPR_HPP_
