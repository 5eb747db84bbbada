#pragma once

#include "hvp/config.hpp"

namespace hvp {

struct StudyRow {
  double h = 0.0;
  double k = 0.0;
  int dofs = 0;
  double v_error = 0.0;         // V-norm error against the analytic oracle
  double interp_error = 0.0;    // V-norm error of the nodal interpolant
  double rate = 0.0;            // empirical order vs previous row (NaN first)
  double quasi_ratio = 0.0;     // v_error / interp_error
  double solve_residual = 0.0;  // |Mx - b| / |b|
};

struct StudyTable {
  std::vector<StudyRow> rows;

  void write_csv(const std::string& path) const;
  Json to_json() const;
};

/// 1D quintic-Hermite refinement/robustness study against the analytic
/// constant-forcing oracle. h-refinement sweeps cfg.hs at fixed k; k-sweep
/// holds kh = cfg.kh and sweeps cfg.ks. Precision "longdouble" runs the
/// whole pipeline (assembly, solve, error norms) in extended precision; the
/// gamma1 h^-4 conditioning makes that necessary below h ~ 1/64.
StudyTable convergence_study(const ConvergenceStudyConfig& cfg);

}  // namespace hvp
