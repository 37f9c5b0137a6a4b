// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wgstokes/solver.hpp"
#include "wgstokes/weak_gradient.hpp"

namespace wgstokes {

/// A refinement study: one manufactured case, one discretization family, a
/// range of uniform refinement levels.
struct StudyOptions {
  std::string family = "hdiv"; ///< "hdiv" or "taylor-hood"
  int example = 1;             ///< manufactured case id (see examples.hpp)
  int degree = 1;              ///< velocity polynomial degree
  int level_min = 2;
  int level_max = 5;
  double mu = 1.0;
  int quad_degree = -1;       ///< assembly rule; < 0 picks the family default
  int error_quad_degree = -1; ///< error rule; < 0 picks max(2*degree + 6, 14)
  std::string solver = "direct";
  BoundaryConvention convention; ///< H(div) family only
};

/// One refinement level of a study. Rates compare against the previous row
/// and are NaN on the first one. `energy` is the weak-gradient error for the
/// H(div) family and the plain gradient error for the conforming one.
struct StudyRow {
  int level = 0;
  double h = 0.0; ///< mesh spacing 2^(1 - level)
  std::int64_t dofs = 0;
  double velocity_l2 = 0.0;
  double velocity_rate = 0.0;
  double energy = 0.0;
  double energy_rate = 0.0;
  double pressure_l2 = 0.0;
  double pressure_rate = 0.0;
  double divergence_sup = 0.0;
  double multiplier = 0.0; ///< mean-constraint multiplier, ~0 at a solution
  SolveReport solve;
};

/// Solve every level in [level_min, level_max] and measure errors.
/// Throws ConfigError for inconsistent options.
std::vector<StudyRow> run_convergence(const StudyOptions& options);

/// Fixed-point scientific notation with a [0.1, 1) mantissa, 4 significant
/// digits: 0.004468 -> "0.4468E-02". The classic table format.
std::string fortran_sci(double v);

std::string format_table_markdown(const StudyOptions& options,
                                  const std::vector<StudyRow>& rows);
std::string format_table_csv(const StudyOptions& options, const std::vector<StudyRow>& rows);

/// Write table.md and table.csv under `out_dir` (created if missing).
void write_study_outputs(const StudyOptions& options, const std::vector<StudyRow>& rows,
                         const std::string& out_dir);

/// Solve one level and write each solution component sampled on a uniform
/// lattice to `out_dir`: field_u1.dat, field_u2.dat (and field_u3.dat in 3D),
/// field_p.dat, each a plain-text "x y (z) value" table ready for surface
/// plotting.
void export_fields(const StudyOptions& options, int level, const std::string& out_dir);

} // namespace wgstokes
