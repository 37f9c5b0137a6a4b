// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "wgstokes/assembly.hpp"
#include "wgstokes/errors.hpp"
#include "wgstokes/examples.hpp"
#include "wgstokes/postproc.hpp"
#include "wgstokes/quadrature.hpp"
#include "wgstokes/taylor_hood.hpp"

namespace wgstokes {

namespace {

void validate_options(const StudyOptions& o, int dim) {
  if (o.family != "hdiv" && o.family != "taylor-hood") {
    throw ConfigError("unknown family '" + o.family + "' (use hdiv or taylor-hood)");
  }
  if (o.degree < 1) {
    throw ConfigError("polynomial degree must be >= 1");
  }
  if (o.family == "hdiv") {
    if (dim == 2 ? o.degree > 4 : o.degree != 2) {
      throw ConfigError(dim == 2 ? "hdiv degree must be in 1..4 on triangles"
                                 : "hdiv degree must be 2 on tetrahedra");
    }
  } else if (dim != 2 || o.degree < 2 || o.degree > 3) {
    throw ConfigError("taylor-hood needs a planar example and degree 2 or 3");
  }
  if (o.level_min < 1 || o.level_max > 10 || o.level_min > o.level_max) {
    throw ConfigError("refinement levels must satisfy 1 <= level_min <= level_max <= 10");
  }
  if (!(o.mu > 0.0)) {
    throw ConfigError("viscosity must be positive");
  }
  if (o.solver != "direct" && o.solver != "penalty" && o.solver != "minres") {
    throw ConfigError("unknown solver '" + o.solver + "' (use direct, penalty, or minres)");
  }
  if (o.solver == "penalty" && o.family != "hdiv") {
    throw ConfigError("the penalty solver applies to the hdiv family only");
  }
}

SimplicialMesh study_mesh(int dim, int level) {
  return dim == 2 ? unit_square_mesh(level) : unit_cube_mesh(level);
}

StokesProblem make_problem(const ManufacturedCase& mc, double mu) {
  StokesProblem p;
  p.mu = mu;
  p.forcing = mc.forcing(mu);
  if (!mc.homogeneous_boundary) {
    p.boundary_velocity = mc.velocity;
  }
  return p;
}

double nodal_divergence_sup(const LagrangeSpace& space, const Eigen::VectorXd& nodal,
                            int quad_degree) {
  const SimplicialMesh& mesh = space.mesh();
  const std::int64_t n = space.num_nodes();
  const QuadRule ref = simplex_rule(mesh.dim, quad_degree);
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    const std::vector<std::int64_t>& vn = space.cell_nodes(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::MatrixXd sg = space.shape_grad(c, rule.points.col(q));
      double div = 0.0;
      for (int comp = 0; comp < mesh.dim; ++comp) {
        for (int i = 0; i < static_cast<int>(vn.size()); ++i) {
          div += nodal[comp * n + vn[i]] * sg(i, comp);
        }
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return worst;
}

double convergence_rate(double prev, double cur) {
  if (!(prev > 0.0) || !(cur > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log2(prev / cur);
}

std::string rate_text(double r) {
  if (std::isnan(r)) {
    return "-";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

} // namespace

std::vector<StudyRow> run_convergence(const StudyOptions& options) {
  const ManufacturedCase mc = example_case(options.example);
  validate_options(options, mc.dim);
  const int k = options.degree;
  const int error_qd =
      options.error_quad_degree > 0 ? options.error_quad_degree : std::max(2 * k + 6, 14);

  std::vector<StudyRow> rows;
  rows.reserve(options.level_max - options.level_min + 1);
  for (int level = options.level_min; level <= options.level_max; ++level) {
    const SimplicialMesh mesh = study_mesh(mc.dim, level);
    const StokesProblem problem = make_problem(mc, options.mu);

    StudyRow row;
    row.level = level;
    row.h = std::ldexp(1.0, 1 - level);

    if (options.family == "hdiv") {
      const int qd = options.quad_degree > 0 ? options.quad_degree : 2 * k + 6;
      const HdivSpace velocity(mesh, k, qd);
      const PressureSpace pressure(mesh, k);
      AssemblyOptions aopts;
      aopts.quad_degree = options.quad_degree;
      aopts.convention = options.convention;
      const SaddleSystem system(velocity, pressure, problem, aopts);
      const Eigen::VectorXd x = system.solve(options.solver, row.solve);
      const Eigen::VectorXd u = system.full_velocity(x);
      const Eigen::VectorXd p = system.pressure(x);
      row.multiplier = system.multiplier(x);
      row.dofs = velocity.total_dofs() + pressure.total_dofs();

      const VectorField data = mc.homogeneous_boundary ? VectorField{} : mc.velocity;
      const HdivErrors err =
          measure_errors(velocity, pressure, u, p, mc.velocity, mc.velocity_gradient,
                         mc.pressure, data, error_qd, options.convention);
      row.velocity_l2 = err.velocity_l2;
      row.energy = err.energy;
      row.pressure_l2 = err.pressure_l2;
      row.divergence_sup = err.divergence_sup;
    } else {
      const TaylorHoodSystem system(mesh, k, problem, options.quad_degree);
      const Eigen::VectorXd x = system.solve(options.solver, row.solve);
      const Eigen::VectorXd u = system.full_velocity(x);
      const Eigen::VectorXd p = system.pressure(x);
      row.multiplier = system.multiplier(x);
      row.dofs = 2 * system.velocity_space().num_nodes() + system.pressure_space().num_nodes();

      const TaylorHoodSystem::Errors err = system.measure_errors(
          u, p, mc.velocity, mc.velocity_gradient, mc.pressure, error_qd);
      row.velocity_l2 = err.velocity_l2;
      row.energy = err.gradient;
      row.pressure_l2 = err.pressure_l2;
      row.divergence_sup = nodal_divergence_sup(system.velocity_space(), u, error_qd);
    }
    rows.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rows[i].velocity_rate = nan;
      rows[i].energy_rate = nan;
      rows[i].pressure_rate = nan;
      continue;
    }
    rows[i].velocity_rate = convergence_rate(rows[i - 1].velocity_l2, rows[i].velocity_l2);
    rows[i].energy_rate = convergence_rate(rows[i - 1].energy, rows[i].energy);
    rows[i].pressure_rate = convergence_rate(rows[i - 1].pressure_l2, rows[i].pressure_l2);
  }
  return rows;
}

std::string fortran_sci(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  if (v == 0.0) {
    return "0.0000E+00";
  }
  const double a = std::abs(v);
  int exponent = static_cast<int>(std::floor(std::log10(a))) + 1;
  double mantissa = a / std::pow(10.0, exponent);
  // Rounding to four digits can carry the mantissa up to 1.0; renormalize.
  double rounded = std::round(mantissa * 1e4) / 1e4;
  if (rounded >= 1.0) {
    rounded /= 10.0;
    exponent += 1;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s0.%04dE%+03d", v < 0 ? "-" : "",
                static_cast<int>(std::llround(rounded * 1e4)), exponent);
  return buf;
}

std::string format_table_markdown(const StudyOptions& options,
                                  const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "## " << options.family << ", case " << options.example << ", degree "
      << options.degree << ", mu = " << options.mu << ", solver = " << options.solver
      << "\n\n";
  out << "| level | h | dofs | velocity L2 | rate | energy | rate | pressure L2 | rate |"
         " max div | multiplier |\n";
  out << "|------:|--:|-----:|------------:|-----:|-------:|-----:|------------:|-----:|"
         "--------:|-----------:|\n";
  for (const StudyRow& r : rows) {
    out << "| " << r.level << " | 1/" << (1LL << (r.level - 1)) << " | " << r.dofs << " | "
        << fortran_sci(r.velocity_l2) << " | " << rate_text(r.velocity_rate) << " | "
        << fortran_sci(r.energy) << " | " << rate_text(r.energy_rate) << " | "
        << fortran_sci(r.pressure_l2) << " | " << rate_text(r.pressure_rate) << " | "
        << fortran_sci(r.divergence_sup) << " | " << fortran_sci(r.multiplier) << " |\n";
  }
  return out.str();
}

std::string format_table_csv(const StudyOptions& options, const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "family,example,degree,mu,solver,level,h,dofs,velocity_l2,velocity_rate,energy,"
         "energy_rate,pressure_l2,pressure_rate,divergence_sup,multiplier,iterations,"
         "relative_residual\n";
  char buf[512];
  for (const StudyRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%s,%d,%.17g,%lld,%s,%s,%s,%s,%s,%s,%s,%s,%d,%s\n",
                  options.family.c_str(), options.example, options.degree, options.mu,
                  options.solver.c_str(), r.level, r.h, static_cast<long long>(r.dofs),
                  fortran_sci(r.velocity_l2).c_str(), rate_text(r.velocity_rate).c_str(),
                  fortran_sci(r.energy).c_str(), rate_text(r.energy_rate).c_str(),
                  fortran_sci(r.pressure_l2).c_str(), rate_text(r.pressure_rate).c_str(),
                  fortran_sci(r.divergence_sup).c_str(), fortran_sci(r.multiplier).c_str(),
                  r.solve.iterations, fortran_sci(r.solve.relative_residual).c_str());
    out << buf;
  }
  return out.str();
}

void write_study_outputs(const StudyOptions& options, const std::vector<StudyRow>& rows,
                         const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }
  const auto write_file = [&](const std::string& name, const std::string& text) {
    const std::filesystem::path path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path);
    out << text;
    if (!out) {
      throw IoError("cannot write '" + path.string() + "'");
    }
  };
  write_file("table.md", format_table_markdown(options, rows));
  write_file("table.csv", format_table_csv(options, rows));
}

namespace {

// Containing-cell lookup for the structured unit-box meshes. Cells are
// bucketed by the grid box holding their centroid; a query gathers the
// candidates from every box it touches and settles ties (points on shared
// faces) by taking the lowest cell index, which keeps the sampled output
// deterministic.
class CellLocator {
 public:
  explicit CellLocator(const SimplicialMesh& mesh, int boxes_per_side)
      : mesh_(&mesh), n_(boxes_per_side) {
    const int total = mesh.dim == 2 ? n_ * n_ : n_ * n_ * n_;
    buckets_.resize(total);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      buckets_[box_of(mesh.cell_centroids[c])].push_back(c);
    }
  }

  int locate(const Eigen::Vector3d& x) const {
    const int dim = mesh_->dim;
    int best = -1;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      Eigen::Vector3d shifted = x;
      for (int d = 0; d < dim; ++d) {
        shifted[d] += (corner >> d & 1) ? 1e-9 : -1e-9;
      }
      for (const int c : buckets_[box_of(shifted)]) {
        if ((best < 0 || c < best) && contains(c, x)) {
          best = c;
        }
      }
    }
    if (best < 0) {
      throw StructureError("sample point lies outside the mesh");
    }
    return best;
  }

 private:
  int box_of(const Eigen::Vector3d& x) const {
    const auto clamp = [&](double v) {
      return std::min(n_ - 1, std::max(0, static_cast<int>(std::floor(v * n_))));
    };
    const int ix = clamp(x[0]);
    const int iy = clamp(x[1]);
    return mesh_->dim == 2 ? ix + n_ * iy : ix + n_ * (iy + n_ * clamp(x[2]));
  }

  bool contains(int c, const Eigen::Vector3d& x) const {
    const int dim = mesh_->dim;
    const Eigen::Matrix3Xd v = mesh_->cell_vertex_matrix(c);
    Eigen::MatrixXd edges(dim, dim);
    for (int d = 0; d < dim; ++d) {
      edges.col(d) = (v.col(d + 1) - v.col(0)).head(dim);
    }
    const Eigen::VectorXd rhs = (x - v.col(0)).head(dim);
    const Eigen::VectorXd lam = edges.partialPivLu().solve(rhs);
    return lam.minCoeff() >= -1e-10 && lam.sum() <= 1.0 + 1e-10;
  }

  const SimplicialMesh* mesh_;
  int n_;
  std::vector<std::vector<int>> buckets_;
};

// One plain-text file per scalar field: coordinate columns then the value,
// with a blank line after each constant-y scanline so gnuplot and friends can
// draw the samples as a surface directly.
void write_lattice_field(const std::filesystem::path& path, int dim,
                         const std::vector<Eigen::Vector3d>& points,
                         const std::vector<double>& values, int row_length) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << (dim == 2 ? "# x y value\n" : "# x y z value\n");
  char buf[128];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d& x = points[i];
    if (dim == 2) {
      std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g\n", x[0], x[1], values[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g %.10g\n", x[0], x[1], x[2], values[i]);
    }
    out << buf;
    if ((i + 1) % static_cast<std::size_t>(row_length) == 0) {
      out << "\n";
    }
  }
  if (!out) {
    throw IoError("writing '" + path.string() + "' failed");
  }
}

} // namespace

void export_fields(const StudyOptions& options, int level, const std::string& out_dir) {
  if (level < 1 || level > 10) {
    throw ConfigError("refinement level must be between 1 and 10");
  }
  const ManufacturedCase mc = example_case(options.example);
  validate_options(options, mc.dim);
  const SimplicialMesh mesh = study_mesh(mc.dim, level);
  const StokesProblem problem = make_problem(mc, options.mu);
  const int dim = mc.dim;
  const int n_side = 1 << (level - 1);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }

  // Two samples per mesh box and direction in 2D; vertices only in 3D, where
  // the point count grows cubically.
  const int m = dim == 2 ? 2 * n_side + 1 : n_side + 1;
  std::vector<Eigen::Vector3d> points;
  points.reserve(static_cast<std::size_t>(dim == 2 ? m * m : m * m * m));
  const int layers = dim == 2 ? 1 : m;
  for (int kz = 0; kz < layers; ++kz) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        points.emplace_back(double(i) / (m - 1), double(j) / (m - 1),
                            dim == 2 ? 0.0 : double(kz) / (m - 1));
      }
    }
  }

  const CellLocator locator(mesh, n_side);
  const auto sample_and_write = [&](const auto& eval_u, const auto& eval_p) {
    std::vector<std::vector<double>> uvals(dim);
    for (auto& v : uvals) v.reserve(points.size());
    std::vector<double> pvals;
    pvals.reserve(points.size());
    for (const Eigen::Vector3d& x : points) {
      const int c = locator.locate(x);
      const Eigen::Vector3d u = eval_u(c, x);
      for (int d = 0; d < dim; ++d) uvals[d].push_back(u[d]);
      pvals.push_back(eval_p(c, x));
    }
    const std::filesystem::path dir(out_dir);
    for (int d = 0; d < dim; ++d) {
      write_lattice_field(dir / ("field_u" + std::to_string(d + 1) + ".dat"), dim, points,
                          uvals[d], m);
    }
    write_lattice_field(dir / "field_p.dat", dim, points, pvals, m);
  };

  SolveReport report;
  if (options.family == "hdiv") {
    const int k = options.degree;
    const int qd = options.quad_degree > 0 ? options.quad_degree : 2 * k + 6;
    const HdivSpace velocity(mesh, k, qd);
    const PressureSpace pressure(mesh, k);
    AssemblyOptions aopts;
    aopts.quad_degree = options.quad_degree;
    aopts.convention = options.convention;
    const SaddleSystem system(velocity, pressure, problem, aopts);
    const Eigen::VectorXd x = system.solve(options.solver, report);
    const Eigen::VectorXd u = system.full_velocity(x);
    const Eigen::VectorXd p = system.pressure(x);
    sample_and_write(
        [&](int c, const Eigen::Vector3d& xq) { return velocity.eval(u, c, xq); },
        [&](int c, const Eigen::Vector3d& xq) { return pressure.eval(p, c, xq); });
  } else {
    const TaylorHoodSystem system(mesh, options.degree, problem, options.quad_degree);
    const Eigen::VectorXd x = system.solve(options.solver, report);
    const Eigen::VectorXd u = system.full_velocity(x);
    const Eigen::VectorXd p = system.pressure(x);
    const LagrangeSpace& vs = system.velocity_space();
    const LagrangeSpace& ps = system.pressure_space();
    const std::int64_t n = vs.num_nodes();
    sample_and_write(
        [&](int c, const Eigen::Vector3d& xq) {
          const Eigen::VectorXd sh = vs.shape(c, xq);
          const std::vector<std::int64_t>& vn = vs.cell_nodes(c);
          Eigen::Vector3d uh = Eigen::Vector3d::Zero();
          for (int comp = 0; comp < 2; ++comp) {
            for (int i = 0; i < static_cast<int>(vn.size()); ++i) {
              uh[comp] += u[comp * n + vn[i]] * sh[i];
            }
          }
          return uh;
        },
        [&](int c, const Eigen::Vector3d& xq) {
          const Eigen::VectorXd psh = ps.shape(c, xq);
          const std::vector<std::int64_t>& pn = ps.cell_nodes(c);
          double ph = 0.0;
          for (int i = 0; i < static_cast<int>(pn.size()); ++i) {
            ph += p[pn[i]] * psh[i];
          }
          return ph;
        });
  }
}

} // namespace wgstokes
