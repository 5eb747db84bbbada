#include "hvp/study.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "hvp/fem1d.hpp"

namespace hvp {

namespace {

template <class Real>
StudyRow run_case(double k, double h, const ConvergenceStudyConfig& cfg) {
  const int cells = static_cast<int>(std::lround(1.0 / h));
  if (std::abs(cells * h - 1.0) > 1e-9) {
    throw IncompatibleMesh("study h must divide the unit interval");
  }
  const Real lo = 0, hi = 1;
  const Real kk = Real(k);
  const Real gamma1 = Real(cfg.gamma1);
  const Real bweight = cfg.gamma2 ? Real(2.0 * *cfg.gamma2)
                                  : Real(*cfg.lambda) / Real(h);
  const bool galerkin = cfg.formulation == "galerkin";

  const auto ref = fem1d::exact_constant_forcing<Real>(kk, {1, 0});
  auto f = [](Real) { return std::complex<Real>(1, 0); };
  const auto sys = fem1d::assemble<Real>(cells, lo, hi, kk, gamma1, bweight,
                                         galerkin, f, 10);
  const auto x = fem1d::solve<Real>(sys, Real(1e-10));

  StudyRow row;
  row.h = h;
  row.k = k;
  row.dofs = static_cast<int>(x.size());
  row.v_error = static_cast<double>(std::sqrt(
      fem1d::vnorm_error<Real>(x, ref, cells, lo, hi, kk, 12).total(false, 1)));
  const auto xi = fem1d::interpolate<Real>(ref, cells, lo, hi);
  row.interp_error = static_cast<double>(std::sqrt(
      fem1d::vnorm_error<Real>(xi, ref, cells, lo, hi, kk, 12).total(false, 1)));
  row.quasi_ratio = row.v_error / row.interp_error;
  row.solve_residual = static_cast<double>(
      (sys.matrix * x - sys.rhs).norm() / sys.rhs.norm());
  row.rate = std::numeric_limits<double>::quiet_NaN();
  return row;
}

StudyRow dispatch(double k, double h, const ConvergenceStudyConfig& cfg) {
  if (cfg.precision == "longdouble") return run_case<long double>(k, h, cfg);
  return run_case<double>(k, h, cfg);
}

}  // namespace

StudyTable convergence_study(const ConvergenceStudyConfig& cfg) {
  StudyTable table;
  if (cfg.mode == "h-refinement") {
    for (double h : cfg.hs) table.rows.push_back(dispatch(cfg.k, h, cfg));
    for (size_t i = 1; i < table.rows.size(); ++i) {
      const double num = table.rows[i - 1].v_error / table.rows[i].v_error;
      const double den = table.rows[i - 1].h / table.rows[i].h;
      table.rows[i].rate = std::log(num) / std::log(den);
    }
  } else {
    std::vector<double> ks = cfg.ks;
    if (ks.empty()) ks = {M_PI, 2 * M_PI, 4 * M_PI, 8 * M_PI};
    for (double k : ks) {
      // h = kh / k rounded to the nearest admissible 1/cells
      const int cells = std::max(1, static_cast<int>(std::lround(k / cfg.kh)));
      table.rows.push_back(dispatch(k, 1.0 / cells, cfg));
    }
  }
  return table;
}

void StudyTable::write_csv(const std::string& path) const {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path);
  std::fprintf(fp, "h,k,dofs,v_error,interp_error,rate,quasi_ratio\n");
  for (const auto& r : rows) {
    std::fprintf(fp, "%.17g,%.17g,%d,%.17g,%.17g,", r.h, r.k, r.dofs,
                 r.v_error, r.interp_error);
    if (std::isnan(r.rate)) {
      std::fprintf(fp, ",");
    } else {
      std::fprintf(fp, "%.17g,", r.rate);
    }
    std::fprintf(fp, "%.17g\n", r.quasi_ratio);
  }
  std::fclose(fp);
}

Json StudyTable::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    Json jr;
    jr["h"] = r.h;
    jr["k"] = r.k;
    jr["dofs"] = r.dofs;
    jr["v_error"] = r.v_error;
    jr["interp_error"] = r.interp_error;
    if (!std::isnan(r.rate)) jr["rate"] = r.rate;
    jr["quasi_ratio"] = r.quasi_ratio;
    jr["solve_residual"] = r.solve_residual;
    rows_json.push_back(jr);
  }
  Json out;
  out["rows"] = rows_json;
  return out;
}

}  // namespace hvp
