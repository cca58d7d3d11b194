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

#include "mintime/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace mintime {

struct Expr::Node {
  enum class Kind { kNumber, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kMin, kMax, kAbs, kSqrt };
  Kind kind;
  double value = 0.0;
  int var = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, int var = 0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->value = value;
  n->var = var;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::kAdd, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Kind::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::kMul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Kind::kDiv, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::kNeg, {unary()});
    if (accept('+')) return unary();
    NodePtr base = primary();
    if (accept('^')) return make(Kind::kPow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expression();
      expect(')');
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::kNumber, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x1" || name == "x2" || name == "x3") return make(Kind::kVar, {}, 0.0, name[1] - '1');
      if (name == "pi") return make(Kind::kNumber, {}, std::numbers::pi);
      Kind kind;
      int arity;
      if (name == "min") {
        kind = Kind::kMin, arity = 2;
      } else if (name == "max") {
        kind = Kind::kMax, arity = 2;
      } else if (name == "pow") {
        kind = Kind::kPow, arity = 2;
      } else if (name == "abs") {
        kind = Kind::kAbs, arity = 1;
      } else if (name == "sqrt") {
        kind = Kind::kSqrt, arity = 1;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      expect('(');
      std::vector<NodePtr> args{expression()};
      while (static_cast<int>(args.size()) < arity) {
        expect(',');
        args.push_back(expression());
      }
      expect(')');
      return make(kind, std::move(args));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, const Vec& x) {
  auto arg = [&](int i) { return eval_node(*n.args[i], x); };
  switch (n.kind) {
    case Kind::kNumber:
      return n.value;
    case Kind::kVar:
      if (n.var >= x.size()) throw DomainError("expression references x" + std::to_string(n.var + 1) +
                                               " in dimension " + std::to_string(x.size()));
      return x[n.var];
    case Kind::kNeg:
      return -arg(0);
    case Kind::kAdd:
      return arg(0) + arg(1);
    case Kind::kSub:
      return arg(0) - arg(1);
    case Kind::kMul:
      return arg(0) * arg(1);
    case Kind::kDiv:
      return arg(0) / arg(1);
    case Kind::kPow:
      return std::pow(arg(0), arg(1));
    case Kind::kMin:
      return std::min(arg(0), arg(1));
    case Kind::kMax:
      return std::max(arg(0), arg(1));
    case Kind::kAbs:
      return std::abs(arg(0));
    case Kind::kSqrt:
      return std::sqrt(arg(0));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expr Expr::constant(double value) {
  Expr e;
  e.root_ = make(Kind::kNumber, {}, value);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  e.text_ = buf;
  return e;
}

double Expr::eval(const Vec& x) const { return eval_node(*root_, x); }

}  // namespace mintime
