#include "csviu/region.h"

#include <cmath>

#include "csviu/errors.h"

namespace csviu {
namespace {

double grid_point(double lo, double hi, int i, int res) {
  if (i == res - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(res - 1);
}

}  // namespace

RegionMap scan_region(const RiccatiSolution& sol, const GridSpec& grid,
                      const ControlOptions& options) {
  const int n = sol.model.n();
  const int m = sol.model.m();
  if (grid.resolution < 2) {
    throw ValidationError("scan_region: resolution must be >= 2");
  }
  if (grid.axis0 < 0 || grid.axis0 >= n || grid.axis1 >= n ||
      grid.axis1 == grid.axis0) {
    throw ValidationError("scan_region: axis index out of range");
  }
  if (grid.base.size() != 0 && grid.base.size() != n) {
    throw ValidationError("scan_region: base point must have n entries");
  }
  const ControlLaw law(sol, options);
  RegionMap map;
  map.grid = grid;
  map.mu_kind = options.mu_kind;
  const Vector base = grid.base.size() == n ? grid.base : Vector::Zero(n);
  const int rows = grid.two_dimensional() ? grid.resolution : 1;
  map.cells.reserve(static_cast<std::size_t>(rows) * grid.resolution);

  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < grid.resolution; ++i) {
      RegionCell cell;
      cell.x = base;
      cell.coord0 = grid_point(grid.lo0, grid.hi0, i, grid.resolution);
      cell.x[grid.axis0] = cell.coord0;
      if (grid.two_dimensional()) {
        cell.coord1 = grid_point(grid.lo1, grid.hi1, j, grid.resolution);
        cell.x[grid.axis1] = cell.coord1;
      }
      cell.s_x = sign_vector(cell.x);
      try {
        const OptimalControl oc = law.solve(cell.x);
        cell.u_star = oc.u_star;
        cell.mu = oc.mu;
        cell.labels.resize(m);
        cell.margin.resize(m);
        cell.coupled_margin.resize(m);
        cell.boundary.assign(m, false);
        for (int c = 0; c < m; ++c) {
          const double v = oc.u_star[c];
          cell.labels[c] = std::abs(v) <= map.label_tol ? 0 : (v > 0 ? 1 : -1);
          cell.margin[c] = inaction_test(sol, cell.x, oc.mu, c).margin;
          cell.coupled_margin[c] =
              coupled_inaction_margin(oc.sub, oc.u_star, c, sol.alpha);
          cell.boundary[c] = std::abs(cell.coupled_margin[c]) <= map.margin_tol;
          auto contradicts = [&](double margin) {
            if (margin > map.margin_tol) return cell.labels[c] != 0;
            if (margin < -map.margin_tol) return cell.labels[c] == 0;
            return false;
          };
          if (contradicts(cell.coupled_margin[c])) ++map.coupled_disagreements;
          if (contradicts(cell.margin[c])) ++map.single_channel_disagreements;
        }
      } catch (const Error& e) {
        cell.valid = false;
        cell.error = e.what();
        ++map.invalid_cells;
      }
      map.cells.push_back(std::move(cell));
    }
  }
  return map;
}

std::vector<AffineLaw> asymptotic_gain_table(
    const RiccatiSolution& sol, const std::vector<SignVector>& s_x_patterns,
    MuResolvent resolvent) {
  const int m = sol.model.m();
  const auto ldlt = sol.Lambda.ldlt();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularLambda("asymptotic_gain_table");
  }
  if (m > 12) {
    throw ValidationError("asymptotic_gain_table: 3^m patterns for m > 12");
  }
  int count = 1;
  for (int i = 0; i < m; ++i) count *= 3;

  std::vector<AffineLaw> table;
  table.reserve(static_cast<std::size_t>(count) * s_x_patterns.size());
  for (const SignVector& s_x : s_x_patterns) {
    for (int code = 0; code < count; ++code) {
      SignVector s_u(m);
      int rest = code;
      for (int i = 0; i < m; ++i) {
        s_u[i] = rest % 3 - 1;
        rest /= 3;
      }
      AffineLaw law;
      law.s_x = s_x;
      law.s_u = s_u;
      law.gain = sol.G;
      const Vector mu = mu_asymptotic(sol, s_x, s_u, resolvent);
      law.offset = -0.5 * ldlt.solve(sol.model.B.transpose() * mu +
                                     sol.forms.Wu * s_u.cast<double>());
      table.push_back(std::move(law));
    }
  }
  return table;
}

}  // namespace csviu
