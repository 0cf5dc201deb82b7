#include "algebroid/report.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace algebroid {

std::vector<Point> sample_points(
    const ChartDomain& chart, const SamplePlan& plan,
    const std::function<bool(const Point&)>& accept) {
  if (plan.count < 1) throw ShapeError("sample plan count must be >= 1");
  const int m = chart.dim();
  std::vector<Point> pts;
  pts.reserve(plan.count + 1);

  const Point c = chart.center();
  if (!accept || accept(c)) pts.push_back(c);

  if (plan.strategy == SamplePlan::Strategy::Grid) {
    int per_axis = std::max(
        2, static_cast<int>(std::ceil(std::pow(plan.count, 1.0 / m))));
    std::vector<int> idx(m, 0);
    while (static_cast<int>(pts.size()) < plan.count + 1) {
      Point p(m);
      for (int i = 0; i < m; ++i) {
        auto [lo, hi] = chart.box()[i];
        // keep strictly interior
        p[i] = lo + (hi - lo) * (idx[i] + 1.0) / (per_axis + 1.0);
      }
      if (!accept || accept(p)) pts.push_back(p);
      int i = 0;
      while (i < m && ++idx[i] == per_axis) idx[i++] = 0;
      if (i == m) break;  // grid exhausted
    }
    return pts;
  }

  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int rejected = 0;
  while (static_cast<int>(pts.size()) < plan.count + 1) {
    Point p(m);
    for (int i = 0; i < m; ++i) {
      auto [lo, hi] = chart.box()[i];
      p[i] = lo + (hi - lo) * (0.02 + 0.96 * unit(rng));
    }
    if (!accept || accept(p)) {
      pts.push_back(p);
    } else if (++rejected > 1000 * plan.count) {
      throw PreconditionError("sampling rejected too many points");
    }
  }
  return pts;
}

void ValidationReport::add_check(const std::string& name, double max_residual,
                                 const Point& worst_point) {
  checks_.push_back(
      {name, max_residual, worst_point, max_residual <= tolerance_});
}

void ValidationReport::add_bool_check(const std::string& name, bool pass) {
  checks_.push_back({name, pass ? 0.0 : 1.0, Point(), pass});
}

void ValidationReport::add_flag(const std::string& flag) {
  flags_.push_back(flag);
}

void ValidationReport::add_info(const std::string& name, double residual,
                                const Point& at) {
  info_.push_back({name, residual, at, true});
}

void ValidationReport::merge(const ValidationReport& other,
                             const std::string& prefix) {
  for (const auto& c : other.checks_)
    checks_.push_back({prefix + c.name, c.max_residual, c.worst_point, c.pass});
  for (const auto& c : other.info_)
    info_.push_back({prefix + c.name, c.max_residual, c.worst_point, c.pass});
  for (const auto& f : other.flags_) flags_.push_back(prefix + f);
}

bool ValidationReport::pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

double ValidationReport::max_residual(const std::string& name) const {
  for (const auto& c : checks_)
    if (c.name == name) return c.max_residual;
  for (const auto& c : info_)
    if (c.name == name) return c.max_residual;
  throw std::out_of_range("no check named '" + name + "'");
}

bool ValidationReport::has_flag_containing(const std::string& fragment) const {
  for (const auto& f : flags_)
    if (f.find(fragment) != std::string::npos) return true;
  return false;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks_) {
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name
       << "  max_residual=" << c.max_residual;
    if (c.worst_point.size() > 0) {
      os << "  worst_point=(";
      for (int i = 0; i < c.worst_point.size(); ++i)
        os << (i ? "," : "") << c.worst_point[i];
      os << ")";
    }
    os << "\n";
  }
  for (const auto& c : info_)
    os << "INFO  " << c.name << "  residual=" << c.max_residual << "\n";
  for (const auto& f : flags_) os << "FLAG  " << f << "\n";
  os << (pass() ? "PASS" : "FAIL") << "  overall (tolerance=" << tolerance_
     << ")\n";
  return os.str();
}

}  // namespace algebroid
