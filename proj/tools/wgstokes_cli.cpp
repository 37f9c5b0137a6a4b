// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the convergence-study library. Parses flags (or
// a key=value config file), runs one study through the public C API, prints
// the table, and optionally writes table files and field samples.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wgstokes.h"

namespace {

// "a..b" or a single level "a".
bool parse_levels(const std::string& text, int& lo, int& hi) {
  const size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int report_failure(const char* stage) {
  std::fprintf(stderr, "wgstokes: %s: %s\n", stage, wgs_last_error());
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes convergence studies: H(div) weak-Galerkin and Taylor-Hood"};
  app.set_config("--config", "", "Read options from a key=value file; flags win");
  app.allow_config_extras(false);

  int example = 1;
  std::string family = "hdiv";
  int degree = 1;
  std::string levels = "2..5";
  double mu = 1.0;
  int quad_degree = -1;
  std::string solver = "direct";
  std::string out_dir;
  int export_level = -1;
  bool export_fields = false;

  app.add_option("-e,--example", example, "Benchmark: 1, 2 (2D) or 3 (3D)")
      ->capture_default_str();
  app.add_option("-f,--family", family, "Element family: hdiv or taylor-hood")
      ->capture_default_str();
  app.add_option("-k,--degree", degree, "Velocity polynomial degree")
      ->capture_default_str();
  app.add_option("-l,--levels", levels, "Refinement levels, a..b or a")
      ->capture_default_str();
  app.add_option("-m,--mu", mu, "Viscosity")->capture_default_str();
  app.add_option("-q,--quad-degree", quad_degree,
                 "Assembly quadrature degree (-1 = family default)")
      ->capture_default_str();
  app.add_option("-s,--solver", solver, "Linear solver: direct, penalty, or minres")
      ->capture_default_str();
  app.add_option("-o,--out", out_dir, "Directory for table.md, table.csv and field exports");
  app.add_flag("--export-fields", export_fields,
               "Also write lattice samples of each solution component to "
               "<out>/field_*.dat (needs --out)");
  app.add_option("--export-level", export_level,
                 "Level to sample for --export-fields (-1 = finest)");

  CLI11_PARSE(app, argc, argv);

  wgs_options options;
  wgs_options_init(&options);
  options.family = family.c_str();
  options.example = example;
  options.degree = degree;
  options.mu = mu;
  options.quad_degree = quad_degree;
  options.solver = solver.c_str();
  int lo = 0, hi = 0;
  if (!parse_levels(levels, lo, hi)) {
    std::fprintf(stderr, "wgstokes: cannot parse --levels '%s' (expected a..b)\n",
                 levels.c_str());
    return 1;
  }
  options.level_min = lo;
  options.level_max = hi;

  wgs_study* study = nullptr;
  if (wgs_study_run(&options, &study) != WGS_OK) return report_failure("run");

  size_t length = 0;
  if (wgs_study_format(study, "markdown", nullptr, 0, &length) != WGS_OK) {
    wgs_study_destroy(study);
    return report_failure("format");
  }
  std::vector<char> text(length + 1);
  wgs_study_format(study, "markdown", text.data(), text.size(), &length);
  std::fputs(text.data(), stdout);

  if (!out_dir.empty() && wgs_study_write_tables(study, out_dir.c_str()) != WGS_OK) {
    wgs_study_destroy(study);
    return report_failure("write tables");
  }
  if (export_fields) {
    if (out_dir.empty()) {
      std::fprintf(stderr, "wgstokes: --export-fields needs --out\n");
      wgs_study_destroy(study);
      return 1;
    }
    const int level = export_level < 0 ? hi : export_level;
    if (wgs_study_export_fields(study, level, out_dir.c_str()) != WGS_OK) {
      wgs_study_destroy(study);
      return report_failure("export fields");
    }
  }
  wgs_study_destroy(study);
  return 0;
}
