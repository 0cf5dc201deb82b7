#include "algebroid/document.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace algebroid {

const char* kToolVersion = "algebroid 0.1.0";

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw SchemaError("missing key '" + key + "'", path);
  return obj.at(key);
}

int require_int(const json& obj, const std::string& key,
                const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer())
    throw SchemaError("expected an integer", path + "." + key);
  return v.get<int>();
}

ScalarField parse_field(const json& v, const ChartPtr& chart,
                        const std::string& path) {
  if (v.is_number()) {
    // bare numbers are accepted as constants
    return ScalarField::constant(chart, v.get<double>());
  }
  if (!v.is_string()) throw SchemaError("expected an expression string", path);
  try {
    return ScalarField::parse(v.get<std::string>(), chart);
  } catch (const ParseError& e) {
    throw SchemaError(std::string("expression error: ") + e.what(), path);
  }
}

// "[ea,eb]" -> frame index pair
std::pair<int, int> parse_bracket_key(const std::string& key,
                                      const std::vector<std::string>& frame,
                                      const std::string& path) {
  if (key.size() < 5 || key.front() != '[' || key.back() != ']')
    throw SchemaError("structure keys look like \"[ea,eb]\"", path);
  std::string body = key.substr(1, key.size() - 2);
  auto comma = body.find(',');
  if (comma == std::string::npos)
    throw SchemaError("structure keys look like \"[ea,eb]\"", path);
  std::string na = body.substr(0, comma);
  std::string nb = body.substr(comma + 1);
  auto index_of = [&](const std::string& nm) {
    for (std::size_t i = 0; i < frame.size(); ++i)
      if (frame[i] == nm) return static_cast<int>(i);
    throw SchemaError("unknown frame name '" + nm + "'", path);
  };
  int a = index_of(na);
  int b = index_of(nb);
  if (!(a < b))
    throw SchemaError("structure keys must list frames in declaration order",
                      path);
  return {a, b};
}

// comma-joined frame names -> sorted index tuple
std::vector<int> parse_multiindex(const std::string& key,
                                  const std::vector<std::string>& frame,
                                  const std::string& path) {
  std::vector<int> idx;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int found = -1;
    for (std::size_t i = 0; i < frame.size(); ++i)
      if (frame[i] == part) found = static_cast<int>(i);
    if (found < 0)
      throw SchemaError("unknown frame name '" + part + "'", path);
    idx.push_back(found);
  }
  return idx;
}

SymMatrix parse_matrix(const json& v, const ChartPtr& chart, int rows,
                       int cols, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    throw SchemaError("expected " + std::to_string(rows) + " rows", path);
  SymMatrix out;
  for (int r = 0; r < rows; ++r) {
    const json& row = v.at(r);
    std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw SchemaError("expected " + std::to_string(cols) + " entries", rp);
    std::vector<ScalarField> fields;
    for (int c = 0; c < cols; ++c)
      fields.push_back(parse_field(row.at(c), chart,
                                   rp + "[" + std::to_string(c) + "]"));
    out.push_back(std::move(fields));
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

AlgebroidDocument parse_document(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "$");
  }
  if (require_int(doc, "schema", "$") != 1)
    throw SchemaError("unsupported schema version", "$.schema");

  const json& jchart = require(doc, "chart", "$");
  int dim = require_int(jchart, "dim", "$.chart");
  if (dim < 1) throw SchemaError("dim must be positive", "$.chart.dim");
  const json& jvars = require(jchart, "vars", "$.chart");
  if (!jvars.is_array() || static_cast<int>(jvars.size()) != dim)
    throw SchemaError("vars must list dim names", "$.chart.vars");
  std::vector<std::string> vars;
  for (const auto& v : jvars) vars.push_back(v.get<std::string>());
  const json& jbox = require(jchart, "box", "$.chart");
  if (!jbox.is_array() || static_cast<int>(jbox.size()) != dim)
    throw SchemaError("box must list dim intervals", "$.chart.box");
  std::vector<std::pair<double, double>> box;
  for (int i = 0; i < dim; ++i) {
    const json& iv = jbox.at(i);
    if (!iv.is_array() || iv.size() != 2)
      throw SchemaError("intervals are [lo, hi]",
                        "$.chart.box[" + std::to_string(i) + "]");
    box.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  }
  ChartPtr chart = make_chart(vars, box);

  int rank = require_int(doc, "rank", "$");
  if (rank < 1) throw SchemaError("rank must be positive", "$.rank");
  const json& jframe = require(doc, "frame", "$");
  if (!jframe.is_array() || static_cast<int>(jframe.size()) != rank)
    throw SchemaError("frame must list rank names", "$.frame");
  std::vector<std::string> frame;
  for (const auto& v : jframe) frame.push_back(v.get<std::string>());

  const json& janchor = require(doc, "anchor", "$");
  std::vector<std::vector<ScalarField>> anchor;
  {
    SymMatrix rows = parse_matrix(janchor, chart, rank, dim, "$.anchor");
    anchor.assign(rows.begin(), rows.end());
  }

  LieAlgebroid::StructureMap st;
  if (doc.contains("structure")) {
    const json& jst = doc.at("structure");
    if (!jst.is_object())
      throw SchemaError("structure must be an object", "$.structure");
    for (const auto& [key, val] : jst.items()) {
      std::string path = "$.structure." + key;
      auto ab = parse_bracket_key(key, frame, path);
      std::vector<ScalarField> coeffs(
          rank, ScalarField::constant(chart, 0.0));
      if (!val.is_object())
        throw SchemaError("bracket entries map frame names to expressions",
                          path);
      for (const auto& [fname, expr] : val.items()) {
        int c = -1;
        for (int i = 0; i < rank; ++i)
          if (frame[i] == fname) c = i;
        if (c < 0)
          throw SchemaError("unknown frame name '" + fname + "'", path);
        coeffs[c] = parse_field(expr, chart, path + "." + fname);
      }
      st[ab] = std::move(coeffs);
    }
  }

  AlgebroidDocument out;
  out.algebroid = std::make_shared<const LieAlgebroid>(chart, frame, anchor,
                                                       std::move(st));

  if (doc.contains("forms")) {
    for (const auto& [name, jf] : doc.at("forms").items()) {
      std::string path = "$.forms." + name;
      int degree = require_int(jf, "degree", path);
      if (degree < 1 || degree > rank)
        throw SchemaError("degree out of range", path + ".degree");
      AlgebroidForm form(chart, rank, degree);
      const json& jc = require(jf, "coeffs", path);
      for (const auto& [key, expr] : jc.items()) {
        auto idx = parse_multiindex(key, frame, path + ".coeffs." + key);
        if (static_cast<int>(idx.size()) != degree)
          throw SchemaError("multi-index length must equal the degree",
                            path + ".coeffs." + key);
        form.add(idx, parse_field(expr, chart, path + ".coeffs." + key));
      }
      out.forms.emplace(name, std::move(form));
    }
  }
  if (doc.contains("metrics")) {
    for (const auto& [name, jm] : doc.at("metrics").items())
      out.metrics.emplace(
          name,
          BundleMetric{parse_matrix(jm, chart, rank, rank,
                                    "$.metrics." + name)});
  }
  if (doc.contains("endos")) {
    for (const auto& [name, je] : doc.at("endos").items())
      out.endos.emplace(name, parse_matrix(je, chart, rank, rank,
                                           "$.endos." + name));
  }
  if (doc.contains("sections")) {
    for (const auto& [name, js] : doc.at("sections").items()) {
      std::string path = "$.sections." + name;
      if (!js.is_array() || static_cast<int>(js.size()) != rank)
        throw SchemaError("sections list rank components", path);
      std::vector<ScalarField> comps;
      for (int a = 0; a < rank; ++a)
        comps.push_back(parse_field(js.at(a), chart,
                                    path + "[" + std::to_string(a) + "]"));
      out.sections.emplace(name, Section(std::move(comps)));
    }
  }
  if (doc.contains("functions")) {
    for (const auto& [name, jf] : doc.at("functions").items())
      out.functions.emplace(
          name, parse_field(jf, chart, "$.functions." + name));
  }
  return out;
}

AlgebroidDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file '" + path + "'", "$");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

std::string report_to_json(const ValidationReport& report,
                           std::uint64_t seed) {
  nlohmann::ordered_json out;
  out["tool_version"] = kToolVersion;
  out["seed"] = seed;
  out["tolerance"] = report.tolerance();
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks()) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["max_residual"] = format_double(c.max_residual);
    nlohmann::ordered_json wp = nlohmann::ordered_json::array();
    for (int i = 0; i < c.worst_point.size(); ++i)
      wp.push_back(format_double(c.worst_point[i]));
    jc["worst_point"] = wp;
    jc["pass"] = c.pass;
    checks.push_back(jc);
  }
  out["checks"] = checks;
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (const auto& f : report.flags()) flags.push_back(f);
  out["flags"] = flags;
  out["pass"] = report.pass();
  return out.dump(2) + "\n";
}

}  // namespace algebroid
