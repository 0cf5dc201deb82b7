#ifndef ALGEBROID_REPORT_HPP
#define ALGEBROID_REPORT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "algebroid/scalar_field.hpp"

namespace algebroid {

inline constexpr std::uint64_t kDefaultSeed = 0x414c4742ull;
inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr double kDefaultRankTolerance = 1e-9;

class PreconditionError : public std::runtime_error {
public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

struct SamplePlan {
  enum class Strategy { UniformRandom, Grid };
  int count = 64;
  std::uint64_t seed = kDefaultSeed;
  Strategy strategy = Strategy::UniformRandom;
};

/// Interior sample points of the chart box: the box center first, then
/// `count` points per the plan's strategy. Points rejected by `accept`
/// (e.g. near poles) are redrawn.
std::vector<Point> sample_points(
    const ChartDomain& chart, const SamplePlan& plan,
    const std::function<bool(const Point&)>& accept = {});

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  Point worst_point;
  bool pass = true;
};

/// Tracks a running max residual together with the point attaining it.
struct ResidualMax {
  double value = 0.0;
  Point at;
  void update(double r, const Point& p) {
    if (at.size() == 0 || r > value) {
      value = r;
      at = p;
    }
  }
};

class ValidationReport {
public:
  explicit ValidationReport(double tolerance) : tolerance_(tolerance) {}

  void add_check(const std::string& name, double max_residual,
                 const Point& worst_point);
  void add_check(const std::string& name, const ResidualMax& r) {
    add_check(name, r.value, r.at);
  }
  /// A check that passed/failed for a structural reason (no residual scale).
  void add_bool_check(const std::string& name, bool pass);
  /// Hypothesis failures: recorded, reported, but not counted as failures.
  void add_flag(const std::string& flag);
  /// Residuals recorded for information only (never asserted).
  void add_info(const std::string& name, double residual, const Point& at);

  void merge(const ValidationReport& other, const std::string& prefix = "");

  bool pass() const;
  double tolerance() const { return tolerance_; }
  const std::vector<CheckResult>& checks() const { return checks_; }
  const std::vector<CheckResult>& info() const { return info_; }
  const std::vector<std::string>& flags() const { return flags_; }
  double max_residual(const std::string& name) const;
  bool has_flag_containing(const std::string& fragment) const;

  std::string to_text() const;

private:
  double tolerance_;
  std::vector<CheckResult> checks_;
  std::vector<CheckResult> info_;
  std::vector<std::string> flags_;
};

}  // namespace algebroid

#endif
