#include "algebroid/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "algebroid/document.hpp"

namespace algebroid {

namespace {

Point parse_point(const std::string& text, const ChartPtr& chart) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) vals.push_back(std::stod(part));
  if (static_cast<int>(vals.size()) != chart->dim())
    throw PreconditionError("point has " + std::to_string(vals.size()) +
                            " coordinates, chart has " +
                            std::to_string(chart->dim()));
  Point p(chart->dim());
  for (int i = 0; i < chart->dim(); ++i) p[i] = vals[i];
  return p;
}

template <typename Map>
const typename Map::mapped_type& named(const Map& m, const std::string& name,
                                       const std::string& kind) {
  auto it = m.find(name);
  if (it == m.end())
    throw PreconditionError("no " + kind + " named '" + name + "'");
  return it->second;
}

void emit(const ValidationReport& report, const RunConfig& cfg,
          std::ostream& out) {
  if (cfg.json)
    out << report_to_json(report, cfg.seed);
  else
    out << report.to_text();
}

int cmd_validate(const AlgebroidDocument& doc, const RunConfig& cfg,
                 std::ostream& out) {
  auto report = validate_algebroid(*doc.algebroid, cfg.plan(), cfg.tol);
  emit(report, cfg, out);
  return report.pass() ? 0 : 1;
}

int cmd_check_symplectic(const AlgebroidDocument& doc, const RunConfig& cfg,
                         const std::string& form, std::ostream& out) {
  const auto& omega = named(doc.forms, form, "form");
  auto report = check_symplectic(*doc.algebroid, omega, cfg.plan(), cfg.tol);
  emit(report, cfg, out);
  return report.pass() ? 0 : 1;
}

int cmd_check_triple(const AlgebroidDocument& doc, const RunConfig& cfg,
                     const std::string& form, const std::string& cx,
                     const std::string& metric, std::ostream& out) {
  CompatibleTriple triple{named(doc.forms, form, "form"),
                          AlmostComplexStructure{named(doc.endos, cx, "endo")},
                          named(doc.metrics, metric, "metric")};
  auto report =
      check_compatible_triple(*doc.algebroid, triple, cfg.plan(), cfg.tol);
  emit(report, cfg, out);
  return report.pass() ? 0 : 1;
}

int cmd_check_contact(const AlgebroidDocument& doc, const RunConfig& cfg,
                      const std::string& form, std::ostream& out) {
  const auto& eta = named(doc.forms, form, "form");
  auto report = check_contact(*doc.algebroid, eta, cfg.plan(), cfg.tol);
  emit(report, cfg, out);
  return report.pass() ? 0 : 1;
}

int cmd_decompose(const AlgebroidDocument& doc, const RunConfig& cfg,
                  const std::string& form, const std::string& cx,
                  const std::string& metric, const std::string& at,
                  std::ostream& out) {
  CompatibleTriple triple{named(doc.forms, form, "form"),
                          AlmostComplexStructure{named(doc.endos, cx, "endo")},
                          named(doc.metrics, metric, "metric")};
  Point p = parse_point(at, doc.algebroid->chart());
  auto dec = decompose_fiber(*doc.algebroid, triple, p, cfg.rank_tol);
  out << "dim E1 = " << dec.dim_E1() << "\n";
  out << "dim E2 = " << dec.dim_E2() << "\n";
  out << "dim L1 = " << dec.dim_L1() << "\n";
  out << "dim L2 = " << dec.dim_L2() << "\n";
  return 0;
}

int cmd_poisson(const AlgebroidDocument& doc, const RunConfig& cfg,
                const std::string& form, const std::string& fexpr,
                const std::string& gexpr, const std::string& at,
                std::ostream& out) {
  auto chart = doc.algebroid->chart();
  const auto& omega = named(doc.forms, form, "form");
  PointFn f = point_fn(ScalarField::parse(fexpr, chart));
  PointFn g = point_fn(ScalarField::parse(gexpr, chart));
  Point p = parse_point(at, chart);
  auto br = poisson_bracket(doc.algebroid, omega, f, g);
  out << std::setprecision(12) << br.value(p) << "\n";
  (void)cfg;
  return 0;
}

int cmd_contact_poisson(const AlgebroidDocument& doc, const RunConfig& cfg,
                        const std::string& form, const std::string& fexpr,
                        const std::string& gexpr, const std::string& at,
                        std::ostream& out) {
  auto chart = doc.algebroid->chart();
  const auto& eta = named(doc.forms, form, "form");
  PointFn f = point_fn(ScalarField::parse(fexpr, chart));
  PointFn g = point_fn(ScalarField::parse(gexpr, chart));
  Point p = parse_point(at, chart);
  auto br = contact_poisson_bracket(doc.algebroid, eta, f, g);
  out << std::setprecision(12) << br.value(p) << "\n";
  (void)cfg;
  return 0;
}

int cmd_reeb(const AlgebroidDocument& doc, const RunConfig& cfg,
             const std::string& form, const std::string& at,
             std::ostream& out) {
  const auto& eta = named(doc.forms, form, "form");
  Point p = parse_point(at, doc.algebroid->chart());
  Eigen::VectorXd xi = reeb_section_at(*doc.algebroid, eta, p);
  out << std::setprecision(12);
  for (int a = 0; a < xi.size(); ++a)
    out << xi[a] << (a + 1 < xi.size() ? " " : "\n");
  (void)cfg;
  return 0;
}

int cmd_check_theorems(const AlgebroidDocument& doc, const RunConfig& cfg,
                       std::ostream& out) {
  bool all_pass = true;
  auto row = [&](const std::string& name, const ValidationReport& report,
                 const std::string& note = "") {
    all_pass = all_pass && report.pass();
    out << name << ": " << (report.pass() ? "PASS" : "FAIL");
    if (!note.empty()) out << " (" << note << ")";
    out << "\n";
  };

  const auto& A = doc.algebroid;
  row("algebroid", validate_algebroid(*A, cfg.plan(), cfg.tol));

  for (const auto& [name, form] : doc.forms) {
    if (form.degree() == 2)
      row("symplectic(" + name + ")",
          check_symplectic(*A, form, cfg.plan(), cfg.tol));
  }

  // first named 2-form / endo / metric make a candidate triple
  const AlgebroidForm* omega = nullptr;
  std::string omega_name;
  for (const auto& [name, form] : doc.forms)
    if (form.degree() == 2 && !omega) {
      omega = &form;
      omega_name = name;
    }
  if (omega && !doc.endos.empty() && !doc.metrics.empty()) {
    CompatibleTriple triple{*omega,
                            AlmostComplexStructure{doc.endos.begin()->second},
                            doc.metrics.begin()->second};
    row("triple(" + omega_name + ")",
        check_compatible_triple(*A, triple, cfg.plan(), cfg.tol));
    row("kernel-bracket(" + omega_name + ")",
        check_kernel_bracket_theorems(A, triple, cfg.plan(), cfg.tol));
  }

  if (A->rank() % 2 == 1) {
    for (const auto& [name, form] : doc.forms) {
      if (form.degree() != 1) continue;
      auto contact = check_contact(*A, form, cfg.plan(), cfg.tol);
      row("contact(" + name + ")", contact);
      if (!contact.pass()) continue;
      auto poisson =
          check_contact_poisson_theorem(A, form, cfg.plan(), cfg.tol);
      row("contact-poisson(" + name + ")", poisson,
          poisson.flags().empty() ? "rho(xi)=0" : "rho(xi)!=0, laws recorded");
    }
  }

  return all_pass ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Lie algebroid verification toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--samples", cfg.samples, "sample count per check");
  app.add_option("--seed", cfg.seed, "sampling seed");
  app.add_option("--tol", cfg.tol, "assertion tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--rank-tol", cfg.rank_tol, "rank decision tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", cfg.json, "emit the machine-readable report");

  std::string file, form, cx = "J", metric = "g", fexpr, gexpr, at;

  auto* validate = app.add_subcommand("validate", "check the bracket axioms");
  validate->add_option("file", file)->required();

  auto* check = app.add_subcommand("check", "run a verification suite");
  check->require_subcommand(1);
  auto* symp = check->add_subcommand("symplectic");
  symp->add_option("file", file)->required();
  symp->add_option("--form", form)->required();
  auto* triple = check->add_subcommand("triple");
  triple->add_option("file", file)->required();
  triple->add_option("--form", form)->required();
  triple->add_option("--complex", cx);
  triple->add_option("--metric", metric);
  auto* contact = check->add_subcommand("contact");
  contact->add_option("file", file)->required();
  contact->add_option("--form", form)->required();
  auto* theorems = check->add_subcommand("theorems");
  theorems->add_option("file", file)->required();

  auto* decompose = app.add_subcommand("decompose", "pointwise fiber blocks");
  decompose->add_option("file", file)->required();
  decompose->add_option("--form", form)->required();
  decompose->add_option("--complex", cx);
  decompose->add_option("--metric", metric);
  decompose->add_option("--at", at)->required();

  auto* poisson = app.add_subcommand("poisson", "symplectic bracket value");
  poisson->add_option("file", file)->required();
  poisson->add_option("--form", form)->required();
  poisson->add_option("-f", fexpr)->required();
  poisson->add_option("-g", gexpr)->required();
  poisson->add_option("--at", at)->required();

  auto* reeb = app.add_subcommand("reeb", "Reeb section at a point");
  reeb->add_option("file", file)->required();
  reeb->add_option("--form", form)->required();
  reeb->add_option("--at", at)->required();

  auto* cpoisson =
      app.add_subcommand("contact-poisson", "contact bracket value");
  cpoisson->add_option("file", file)->required();
  cpoisson->add_option("--form", form)->required();
  cpoisson->add_option("-f", fexpr)->required();
  cpoisson->add_option("-g", gexpr)->required();
  cpoisson->add_option("--at", at)->required();

  std::vector<std::string> argv_copy = args;
  try {
    std::vector<const char*> argv;
    argv.push_back("algebroid");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()),
              const_cast<char**>(argv.data()));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  if (const char* env = std::getenv("ALGEBROID_SEED"))
    cfg.seed = std::strtoull(env, nullptr, 10);

  try {
    AlgebroidDocument doc = load_document(file);
    if (validate->parsed()) return cmd_validate(doc, cfg, out);
    if (symp->parsed()) return cmd_check_symplectic(doc, cfg, form, out);
    if (triple->parsed())
      return cmd_check_triple(doc, cfg, form, cx, metric, out);
    if (contact->parsed()) return cmd_check_contact(doc, cfg, form, out);
    if (theorems->parsed()) return cmd_check_theorems(doc, cfg, out);
    if (decompose->parsed())
      return cmd_decompose(doc, cfg, form, cx, metric, at, out);
    if (poisson->parsed())
      return cmd_poisson(doc, cfg, form, fexpr, gexpr, at, out);
    if (reeb->parsed()) return cmd_reeb(doc, cfg, form, at, out);
    if (cpoisson->parsed())
      return cmd_contact_poisson(doc, cfg, form, fexpr, gexpr, at, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "unknown subcommand\n";
  return 2;
}

}  // namespace algebroid
