#ifndef ALGEBROID_DOCUMENT_HPP
#define ALGEBROID_DOCUMENT_HPP

#include <cstdint>
#include <map>
#include <string>

#include "algebroid/contact.hpp"

namespace algebroid {

class SchemaError : public std::runtime_error {
public:
  SchemaError(const std::string& what, const std::string& path)
      : std::runtime_error(what + " (at " + path + ")"), path_(path) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

/// Parsed contents of an algebroid description file (schema 1).
struct AlgebroidDocument {
  AlgebroidPtr algebroid;
  std::map<std::string, AlgebroidForm> forms;
  std::map<std::string, BundleMetric> metrics;
  std::map<std::string, SymMatrix> endos;
  std::map<std::string, Section> sections;
  std::map<std::string, ScalarField> functions;
};

AlgebroidDocument load_document(const std::string& path);
AlgebroidDocument parse_document(const std::string& json_text);

struct RunConfig {
  int samples = 64;
  std::uint64_t seed = kDefaultSeed;
  double tol = kDefaultTolerance;
  double rank_tol = kDefaultRankTolerance;
  bool json = false;

  SamplePlan plan() const {
    SamplePlan p;
    p.count = samples;
    p.seed = seed;
    return p;
  }
};

/// Report JSON: {tool_version, seed, tolerance, checks:[...], pass}.
std::string report_to_json(const ValidationReport& report, std::uint64_t seed);

extern const char* kToolVersion;

}  // namespace algebroid

#endif
