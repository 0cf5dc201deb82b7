#include "algebroid/scalar_field.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

namespace algebroid {

ChartDomain::ChartDomain(std::vector<std::string> vars,
                         std::vector<std::pair<double, double>> box)
    : vars_(std::move(vars)), box_(std::move(box)) {
  if (vars_.empty()) throw ShapeError("chart must have positive dimension");
  if (box_.size() != vars_.size())
    throw ShapeError("chart box size must match dimension");
  std::set<std::string> seen(vars_.begin(), vars_.end());
  if (seen.size() != vars_.size())
    throw ShapeError("chart variable names must be distinct");
  for (const auto& [lo, hi] : box_)
    if (!(lo < hi)) throw ShapeError("chart box requires lo < hi");
}

int ChartDomain::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return static_cast<int>(i);
  return -1;
}

Point ChartDomain::center() const {
  Point p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = 0.5 * (box_[i].first + box_[i].second);
  return p;
}

ChartPtr make_chart(std::vector<std::string> vars,
                    std::vector<std::pair<double, double>> box) {
  return std::make_shared<const ChartDomain>(std::move(vars), std::move(box));
}

struct ScalarField::Node {
  enum class Kind {
    Constant,
    Variable,
    Sum,
    Product,
    Quotient,
    IntPower,
    Negation,
    Sin,
    Cos,
    Exp
  };
  Kind kind;
  double value = 0.0;  // Constant
  int index = 0;       // Variable index or IntPower exponent
  NodePtr a, b;
};

namespace {

using Node = ScalarField::Node;
using Kind = Node::Kind;
using NodePtr = ScalarField::NodePtr;

NodePtr node(Kind k, double value, int index, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = value;
  n->index = index;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mk_const(double v) { return node(Kind::Constant, v, 0, nullptr, nullptr); }
NodePtr mk_var(int i) { return node(Kind::Variable, 0, i, nullptr, nullptr); }

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}

bool equal_nodes(const NodePtr& x, const NodePtr& y) {
  if (x.get() == y.get()) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::Constant:
      return x->value == y->value;
    case Kind::Variable:
      return x->index == y->index;
    case Kind::IntPower:
      return x->index == y->index && equal_nodes(x->a, y->a);
    default:
      break;
  }
  if (x->a && !equal_nodes(x->a, y->a)) return false;
  if (x->b && !equal_nodes(x->b, y->b)) return false;
  return true;
}

NodePtr mk_neg(const NodePtr& a) {
  if (a->kind == Kind::Constant) return mk_const(-a->value);
  if (a->kind == Kind::Negation) return a->a;
  return node(Kind::Negation, 0, 0, a, nullptr);
}

NodePtr mk_sum(const NodePtr& a, const NodePtr& b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant)
    return mk_const(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (b->kind == Kind::Negation && equal_nodes(a, b->a)) return mk_const(0);
  if (a->kind == Kind::Negation && equal_nodes(a->a, b)) return mk_const(0);
  return node(Kind::Sum, 0, 0, a, b);
}

NodePtr mk_prod(const NodePtr& a, const NodePtr& b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant)
    return mk_const(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return mk_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_const(a, -1)) return mk_neg(b);
  if (is_const(b, -1)) return mk_neg(a);
  return node(Kind::Product, 0, 0, a, b);
}

NodePtr mk_quot(const NodePtr& a, const NodePtr& b) {
  if (b->kind == Kind::Constant && std::abs(b->value) >= 1e-12)
    return mk_prod(mk_const(1.0 / b->value), a);
  if (is_const(a, 0) && !(b->kind == Kind::Constant)) return mk_const(0);
  return node(Kind::Quotient, 0, 0, a, b);
}

NodePtr mk_pow(const NodePtr& a, int k) {
  if (k == 0) return mk_const(1);
  if (k == 1) return a;
  if (a->kind == Kind::Constant) return mk_const(std::pow(a->value, k));
  if (a->kind == Kind::IntPower) return node(Kind::IntPower, 0, k * a->index, a->a, nullptr);
  return node(Kind::IntPower, 0, k, a, nullptr);
}

NodePtr mk_fun(Kind k, const NodePtr& a) {
  if (a->kind == Kind::Constant) {
    switch (k) {
      case Kind::Sin: return mk_const(std::sin(a->value));
      case Kind::Cos: return mk_const(std::cos(a->value));
      case Kind::Exp: return mk_const(std::exp(a->value));
      default: break;
    }
  }
  return node(k, 0, 0, a, nullptr);
}

double eval_node(const Node* n, const Point& p) {
  switch (n->kind) {
    case Kind::Constant: return n->value;
    case Kind::Variable: return p[n->index];
    case Kind::Sum: return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
    case Kind::Product: return eval_node(n->a.get(), p) * eval_node(n->b.get(), p);
    case Kind::Quotient: {
      double den = eval_node(n->b.get(), p);
      if (std::abs(den) < 1e-12)
        throw DivisionByNearZero("denominator below 1e-12 in magnitude");
      return eval_node(n->a.get(), p) / den;
    }
    case Kind::IntPower: return std::pow(eval_node(n->a.get(), p), n->index);
    case Kind::Negation: return -eval_node(n->a.get(), p);
    case Kind::Sin: return std::sin(eval_node(n->a.get(), p));
    case Kind::Cos: return std::cos(eval_node(n->a.get(), p));
    case Kind::Exp: return std::exp(eval_node(n->a.get(), p));
  }
  return 0;
}

NodePtr diff_node(const NodePtr& n, int var,
                  std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  switch (n->kind) {
    case Kind::Constant: r = mk_const(0); break;
    case Kind::Variable: r = mk_const(n->index == var ? 1 : 0); break;
    case Kind::Sum:
      r = mk_sum(diff_node(n->a, var, memo), diff_node(n->b, var, memo));
      break;
    case Kind::Product:
      r = mk_sum(mk_prod(diff_node(n->a, var, memo), n->b),
                 mk_prod(n->a, diff_node(n->b, var, memo)));
      break;
    case Kind::Quotient:
      // (a/b)' = a'/b - a b' / b^2
      r = mk_sum(mk_quot(diff_node(n->a, var, memo), n->b),
                 mk_neg(mk_quot(mk_prod(n->a, diff_node(n->b, var, memo)),
                                mk_pow(n->b, 2))));
      break;
    case Kind::IntPower:
      r = mk_prod(mk_const(n->index),
                  mk_prod(mk_pow(n->a, n->index - 1), diff_node(n->a, var, memo)));
      break;
    case Kind::Negation: r = mk_neg(diff_node(n->a, var, memo)); break;
    case Kind::Sin:
      r = mk_prod(mk_fun(Kind::Cos, n->a), diff_node(n->a, var, memo));
      break;
    case Kind::Cos:
      r = mk_neg(mk_prod(mk_fun(Kind::Sin, n->a), diff_node(n->a, var, memo)));
      break;
    case Kind::Exp:
      r = mk_prod(mk_fun(Kind::Exp, n->a), diff_node(n->a, var, memo));
      break;
  }
  memo.emplace(n.get(), r);
  return r;
}

NodePtr compose_node(const NodePtr& n, const std::vector<NodePtr>& args,
                     std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  switch (n->kind) {
    case Kind::Constant: r = mk_const(n->value); break;
    case Kind::Variable: r = args.at(n->index); break;
    case Kind::Sum:
      r = mk_sum(compose_node(n->a, args, memo), compose_node(n->b, args, memo));
      break;
    case Kind::Product:
      r = mk_prod(compose_node(n->a, args, memo), compose_node(n->b, args, memo));
      break;
    case Kind::Quotient:
      r = mk_quot(compose_node(n->a, args, memo), compose_node(n->b, args, memo));
      break;
    case Kind::IntPower:
      r = mk_pow(compose_node(n->a, args, memo), n->index);
      break;
    case Kind::Negation: r = mk_neg(compose_node(n->a, args, memo)); break;
    case Kind::Sin: r = mk_fun(Kind::Sin, compose_node(n->a, args, memo)); break;
    case Kind::Cos: r = mk_fun(Kind::Cos, compose_node(n->a, args, memo)); break;
    case Kind::Exp: r = mk_fun(Kind::Exp, compose_node(n->a, args, memo)); break;
  }
  memo.emplace(n.get(), r);
  return r;
}

std::size_t count_nodes(const Node* n) {
  std::size_t c = 1;
  if (n->a) c += count_nodes(n->a.get());
  if (n->b) c += count_nodes(n->b.get());
  return c;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence levels used by the printer: 0 sum, 1 term, 2 factor, 3 power base.
void print_node(const Node* n, const ChartDomain& chart, int level,
                std::string& out);

void print_child(const NodePtr& n, const ChartDomain& chart, int level,
                 std::string& out) {
  print_node(n.get(), chart, level, out);
}

int node_level(const Node* n) {
  switch (n->kind) {
    case Kind::Sum: return 0;
    case Kind::Product:
    case Kind::Quotient: return 1;
    case Kind::Negation: return 2;
    case Kind::IntPower: return 2;
    default: return 4;
  }
}

void print_node(const Node* n, const ChartDomain& chart, int level,
                std::string& out) {
  const bool parens = node_level(n) < level;
  if (parens) out += '(';
  switch (n->kind) {
    case Kind::Constant:
      if (n->value < 0 && level > 0) {
        out += '(';
        out += format_number(n->value);
        out += ')';
      } else {
        out += format_number(n->value);
      }
      break;
    case Kind::Variable:
      out += chart.vars().at(n->index);
      break;
    case Kind::Sum:
      print_child(n->a, chart, 0, out);
      if (n->b->kind == Kind::Negation) {
        out += " - ";
        print_child(n->b->a, chart, 1, out);
      } else if (n->b->kind == Kind::Constant && n->b->value < 0) {
        out += " - ";
        out += format_number(-n->b->value);
      } else {
        out += " + ";
        // Right operand of a left-associative chain needs its own parens
        // when it is itself a sum.
        print_child(n->b, chart, n->b->kind == Kind::Sum ? 1 : 0, out);
      }
      break;
    case Kind::Product:
      print_child(n->a, chart, 1, out);
      out += "*";
      print_child(n->b, chart,
                  (n->b->kind == Kind::Product || n->b->kind == Kind::Quotient) ? 2 : 1,
                  out);
      break;
    case Kind::Quotient:
      print_child(n->a, chart, 1, out);
      out += "/";
      print_child(n->b, chart, 2, out);
      break;
    case Kind::Negation:
      out += "-";
      print_child(n->a, chart, 2, out);
      break;
    case Kind::IntPower:
      print_child(n->a, chart, 4, out);
      out += "^";
      out += std::to_string(n->index);
      break;
    case Kind::Sin:
      out += "sin(";
      print_child(n->a, chart, 0, out);
      out += ')';
      break;
    case Kind::Cos:
      out += "cos(";
      print_child(n->a, chart, 0, out);
      out += ')';
      break;
    case Kind::Exp:
      out += "exp(";
      print_child(n->a, chart, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

class Parser {
public:
  Parser(const std::string& text, ChartPtr chart)
      : text_(text), chart_(std::move(chart)) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

private:
  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        lhs = mk_sum(lhs, term());
      } else if (accept('-')) {
        lhs = mk_sum(lhs, mk_neg(term()));
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        lhs = mk_prod(lhs, factor());
      } else if (accept('/')) {
        lhs = mk_quot(lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    skip_ws();
    if (accept('-')) return mk_neg(factor());
    NodePtr a = atom();
    skip_ws();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == start) throw ParseError("expected integer exponent", pos_);
      int k = std::stoi(text_.substr(start, pos_ - start));
      return mk_pow(a, k);
    }
    return a;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent
      }
    }
    if (pos_ == start) throw ParseError("expected number", pos_);
    return mk_const(std::stod(text_.substr(start, pos_ - start)));
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp") {
      skip_ws();
      expect('(');
      NodePtr e = expr();
      expect(')');
      if (name == "sin") return mk_fun(Kind::Sin, e);
      if (name == "cos") return mk_fun(Kind::Cos, e);
      return mk_fun(Kind::Exp, e);
    }
    int idx = chart_->var_index(name);
    if (idx < 0) throw ParseError("unknown identifier '" + name + "'", start);
    return mk_var(idx);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  const std::string& text_;
  ChartPtr chart_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarField ScalarField::constant(ChartPtr chart, double value) {
  return ScalarField(std::move(chart), mk_const(value));
}

ScalarField ScalarField::variable(ChartPtr chart, int index) {
  if (index < 0 || index >= chart->dim())
    throw ShapeError("variable index out of range");
  return ScalarField(std::move(chart), mk_var(index));
}

ScalarField ScalarField::parse(const std::string& text, ChartPtr chart) {
  Parser p(text, chart);
  return ScalarField(std::move(chart), p.run());
}

double ScalarField::operator()(const Point& p) const {
  if (p.size() < chart_->dim()) throw ShapeError("point dimension mismatch");
  return eval_node(root_.get(), p);
}

ScalarField ScalarField::derivative(int var_index) const {
  if (var_index < 0 || var_index >= chart_->dim())
    throw ShapeError("derivative index out of range");
  std::unordered_map<const Node*, NodePtr> memo;
  return ScalarField(chart_, diff_node(root_, var_index, memo));
}

Eigen::VectorXd ScalarField::gradient(const Point& p) const {
  Eigen::VectorXd g(chart_->dim());
  for (int i = 0; i < chart_->dim(); ++i) g[i] = derivative(i)(p);
  return g;
}

ScalarField ScalarField::compose(const std::vector<ScalarField>& args) const {
  if (static_cast<int>(args.size()) != chart_->dim())
    throw ShapeError("compose: argument count must match chart dimension");
  ChartPtr target = args.front().chart();
  std::vector<NodePtr> roots;
  roots.reserve(args.size());
  for (const auto& a : args) {
    if (a.chart() != target) throw ShapeError("compose: mixed charts");
    roots.push_back(a.root());
  }
  std::unordered_map<const Node*, NodePtr> memo;
  return ScalarField(target, compose_node(root_, roots, memo));
}

std::string ScalarField::str() const {
  std::string out;
  print_node(root_.get(), *chart_, 0, out);
  return out;
}

bool ScalarField::same_tree(const ScalarField& other) const {
  return equal_nodes(root_, other.root_);
}

bool ScalarField::is_zero() const { return is_const(root_, 0); }

bool ScalarField::is_constant() const {
  return root_->kind == Node::Kind::Constant;
}

std::size_t ScalarField::node_count() const { return count_nodes(root_.get()); }

ChartPtr common_chart(const ScalarField& a, const ScalarField& b) {
  if (a.chart() != b.chart())
    throw ShapeError("scalar fields live on different charts");
  return a.chart();
}

ScalarField ScalarField::operator-() const {
  return ScalarField(chart_, mk_neg(root_));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField(common_chart(a, b), mk_sum(a.root(), b.root()));
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return ScalarField(common_chart(a, b), mk_sum(a.root(), mk_neg(b.root())));
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return ScalarField(common_chart(a, b), mk_prod(a.root(), b.root()));
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return ScalarField(common_chart(a, b), mk_quot(a.root(), b.root()));
}
ScalarField operator*(double c, const ScalarField& a) {
  return ScalarField(a.chart(), mk_prod(mk_const(c), a.root()));
}
ScalarField operator+(const ScalarField& a, double c) {
  return ScalarField(a.chart(), mk_sum(a.root(), mk_const(c)));
}

ScalarField pow(const ScalarField& a, int exponent) {
  return ScalarField(a.chart(), mk_pow(a.root(), exponent));
}
ScalarField sin(const ScalarField& a) {
  return ScalarField(a.chart(), mk_fun(Kind::Sin, a.root()));
}
ScalarField cos(const ScalarField& a) {
  return ScalarField(a.chart(), mk_fun(Kind::Cos, a.root()));
}
ScalarField exp(const ScalarField& a) {
  return ScalarField(a.chart(), mk_fun(Kind::Exp, a.root()));
}

}  // namespace algebroid
