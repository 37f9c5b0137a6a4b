// SPDX-License-Identifier: Apache-2.0
//
// C surface of the library: thin argument checking and exception-to-status
// translation around the study layer. No numerics live here.
#include "wgstokes.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "wgstokes/errors.hpp"
#include "wgstokes/study.hpp"

struct wgs_study {
  wgstokes::StudyOptions options;
  std::vector<wgstokes::StudyRow> rows;
};

namespace {

thread_local std::string g_last_error = "no error";

wgs_status fail(wgs_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Run `body` translating the library's exception taxonomy into status codes.
template <typename Fn>
wgs_status guarded(Fn&& body) {
  try {
    return body();
  } catch (const wgstokes::ConfigError& e) {
    return fail(WGS_ERR_CONFIG, e.what());
  } catch (const wgstokes::StructureError& e) {
    return fail(WGS_ERR_STRUCTURE, e.what());
  } catch (const wgstokes::NumericError& e) {
    return fail(WGS_ERR_NUMERIC, e.what());
  } catch (const wgstokes::SolverError& e) {
    return fail(WGS_ERR_SOLVER, e.what());
  } catch (const wgstokes::IoError& e) {
    return fail(WGS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(WGS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WGS_ERR_INTERNAL, "unknown exception");
  }
}

wgstokes::StudyOptions to_options(const wgs_options& o) {
  wgstokes::StudyOptions s;
  if (o.family) s.family = o.family;
  s.example = o.example;
  s.degree = o.degree;
  s.level_min = o.level_min;
  s.level_max = o.level_max;
  s.mu = o.mu;
  s.quad_degree = o.quad_degree;
  s.error_quad_degree = o.error_quad_degree;
  if (o.solver) s.solver = o.solver;
  s.convention.own_weight = o.boundary_own_weight;
  s.convention.data_weight = o.boundary_data_weight;
  return s;
}

} // namespace

extern "C" {

const char* wgs_version(void) { return "1.0.0"; }

const char* wgs_last_error(void) { return g_last_error.c_str(); }

void wgs_options_init(wgs_options* options) {
  if (!options) return;
  const wgstokes::StudyOptions d;
  options->family = "hdiv";
  options->example = d.example;
  options->degree = d.degree;
  options->level_min = d.level_min;
  options->level_max = d.level_max;
  options->mu = d.mu;
  options->quad_degree = d.quad_degree;
  options->error_quad_degree = d.error_quad_degree;
  options->solver = "direct";
  options->boundary_own_weight = d.convention.own_weight;
  options->boundary_data_weight = d.convention.data_weight;
}

wgs_status wgs_study_run(const wgs_options* options, wgs_study** out_study) {
  if (!options || !out_study) return fail(WGS_ERR_INVALID, "null options or out pointer");
  *out_study = nullptr;
  return guarded([&]() {
    auto study = std::make_unique<wgs_study>();
    study->options = to_options(*options);
    study->rows = wgstokes::run_convergence(study->options);
    *out_study = study.release();
    return WGS_OK;
  });
}

void wgs_study_destroy(wgs_study* study) { delete study; }

int64_t wgs_study_num_rows(const wgs_study* study) {
  return study ? static_cast<int64_t>(study->rows.size()) : 0;
}

wgs_status wgs_study_row(const wgs_study* study, int64_t index, wgs_row* out_row) {
  if (!study || !out_row) return fail(WGS_ERR_INVALID, "null study or out pointer");
  if (index < 0 || index >= wgs_study_num_rows(study)) {
    return fail(WGS_ERR_INVALID, "row index out of range");
  }
  const wgstokes::StudyRow& r = study->rows[static_cast<size_t>(index)];
  wgs_row out{};
  out.level = r.level;
  out.h = r.h;
  out.dofs = r.dofs;
  out.velocity_l2 = r.velocity_l2;
  out.velocity_rate = r.velocity_rate;
  out.energy = r.energy;
  out.energy_rate = r.energy_rate;
  out.pressure_l2 = r.pressure_l2;
  out.pressure_rate = r.pressure_rate;
  out.divergence_sup = r.divergence_sup;
  out.multiplier = r.multiplier;
  std::strncpy(out.solver_method, r.solve.method.c_str(), sizeof(out.solver_method) - 1);
  out.solver_iterations = r.solve.iterations;
  out.solver_relative_residual = r.solve.relative_residual;
  *out_row = out;
  return WGS_OK;
}

wgs_status wgs_study_format(const wgs_study* study, const char* format, char* buffer,
                            size_t capacity, size_t* out_length) {
  if (!study || !format || !out_length) {
    return fail(WGS_ERR_INVALID, "null study, format, or out pointer");
  }
  if (capacity > 0 && !buffer) return fail(WGS_ERR_INVALID, "null buffer with capacity");
  return guarded([&]() {
    std::string text;
    if (std::strcmp(format, "markdown") == 0) {
      text = wgstokes::format_table_markdown(study->options, study->rows);
    } else if (std::strcmp(format, "csv") == 0) {
      text = wgstokes::format_table_csv(study->options, study->rows);
    } else {
      return fail(WGS_ERR_INVALID, "format must be \"markdown\" or \"csv\"");
    }
    *out_length = text.size();
    if (capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
    return WGS_OK;
  });
}

wgs_status wgs_study_write_tables(const wgs_study* study, const char* out_dir) {
  if (!study || !out_dir) return fail(WGS_ERR_INVALID, "null study or directory");
  return guarded([&]() {
    wgstokes::write_study_outputs(study->options, study->rows, out_dir);
    return WGS_OK;
  });
}

wgs_status wgs_study_export_fields(const wgs_study* study, int32_t level, const char* out_dir) {
  if (!study || !out_dir) return fail(WGS_ERR_INVALID, "null study or output directory");
  return guarded([&]() {
    wgstokes::export_fields(study->options, level, out_dir);
    return WGS_OK;
  });
}

} // extern "C"
