#ifndef ALGEBROID_SCALAR_FIELD_HPP
#define ALGEBROID_SCALAR_FIELD_HPP

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace algebroid {

using Point = Eigen::VectorXd;

/// A single coordinate chart: variable names plus a sampling box.
class ChartDomain {
public:
  ChartDomain(std::vector<std::string> vars,
              std::vector<std::pair<double, double>> box);

  int dim() const { return static_cast<int>(vars_.size()); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<std::pair<double, double>>& box() const { return box_; }

  /// Index of a variable name, or -1 if unknown.
  int var_index(const std::string& name) const;

  Point center() const;

private:
  std::vector<std::string> vars_;
  std::vector<std::pair<double, double>> box_;
};

using ChartPtr = std::shared_ptr<const ChartDomain>;

ChartPtr make_chart(std::vector<std::string> vars,
                    std::vector<std::pair<double, double>> box);

/// Thrown when a quotient's denominator falls below 1e-12 in magnitude.
class DivisionByNearZero : public std::runtime_error {
public:
  explicit DivisionByNearZero(const std::string& what)
      : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Immutable expression tree over a chart: rational operations, integer
/// powers, sin, cos, exp. Supports exact symbolic differentiation, so
/// second derivatives (needed by closedness checks) stay exact.
class ScalarField {
public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  ScalarField() = default;

  static ScalarField constant(ChartPtr chart, double value);
  static ScalarField variable(ChartPtr chart, int index);

  /// Grammar:
  ///   expr   := term (('+'|'-') term)*
  ///   term   := factor (('*'|'/') factor)*
  ///   factor := '-' factor | atom ('^' integer)?
  ///   atom   := number | identifier | func '(' expr ')' | '(' expr ')'
  ///   func   := sin | cos | exp
  static ScalarField parse(const std::string& text, ChartPtr chart);

  double operator()(const Point& p) const;
  ScalarField derivative(int var_index) const;
  Eigen::VectorXd gradient(const Point& p) const;

  /// Substitute args[i] for variable i. All args must share one chart,
  /// which becomes the chart of the result.
  ScalarField compose(const std::vector<ScalarField>& args) const;

  std::string str() const;
  bool same_tree(const ScalarField& other) const;
  bool is_zero() const;
  bool is_constant() const;
  std::size_t node_count() const;

  ChartPtr chart() const { return chart_; }
  const NodePtr& root() const { return root_; }

  ScalarField operator-() const;
  friend ScalarField operator+(const ScalarField&, const ScalarField&);
  friend ScalarField operator-(const ScalarField&, const ScalarField&);
  friend ScalarField operator*(const ScalarField&, const ScalarField&);
  friend ScalarField operator/(const ScalarField&, const ScalarField&);
  friend ScalarField operator*(double, const ScalarField&);
  friend ScalarField operator+(const ScalarField&, double);

  friend ScalarField pow(const ScalarField&, int exponent);
  friend ScalarField sin(const ScalarField&);
  friend ScalarField cos(const ScalarField&);
  friend ScalarField exp(const ScalarField&);

  ScalarField(ChartPtr chart, NodePtr root)
      : chart_(std::move(chart)), root_(std::move(root)) {}

private:
  ChartPtr chart_;
  NodePtr root_;
};

/// Chart of a nonempty collection of fields; throws ShapeError on mismatch.
ChartPtr common_chart(const ScalarField& a, const ScalarField& b);

}  // namespace algebroid

#endif
