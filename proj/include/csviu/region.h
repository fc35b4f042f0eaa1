#pragma once

#include <string>
#include <vector>

#include "csviu/control.h"
#include "csviu/riccati.h"

namespace csviu {

/// A 1D or 2D slice through state space. Coordinates not on an axis keep
/// their value from `base`.
struct GridSpec {
  int axis0 = 0;
  int axis1 = -1;  // -1 for a 1D scan
  double lo0 = -1.0, hi0 = 1.0;
  double lo1 = -1.0, hi1 = 1.0;
  int resolution = 101;
  Vector base;  // empty means the origin

  bool two_dimensional() const { return axis1 >= 0; }
};

struct RegionCell {
  double coord0 = 0.0;
  double coord1 = 0.0;
  Vector x;
  Vector u_star;
  Vector mu;
  /// -1, 0, +1 per channel; 0 exactly when |u*_i| <= 1e-9.
  std::vector<int> labels;
  /// Single-channel inaction margins, in W_ud(L) units.
  Vector margin;
  /// Margins with the other channels held at their optimal values.
  Vector coupled_margin;
  std::vector<bool> boundary;
  SignVector s_x;
  bool valid = true;
  std::string error;
};

struct RegionMap {
  GridSpec grid;
  MuKind mu_kind = MuKind::asymptotic;
  double label_tol = 1e-9;
  double margin_tol = 1e-9;
  std::vector<RegionCell> cells;  // axis0 fastest
  int invalid_cells = 0;
  /// Strict-margin cells whose label contradicts the margin sign.
  int coupled_disagreements = 0;
  int single_channel_disagreements = 0;
};

/// Solves the stage problem on every grid point and classifies each channel.
/// Solver failures mark the cell invalid and the scan continues.
RegionMap scan_region(const RiccatiSolution& sol, const GridSpec& grid,
                      const ControlOptions& options = {});

struct AffineLaw {
  SignVector s_x;
  SignVector s_u;
  Matrix gain;    // -Lambda(L)^{-1} Sigma(L)
  Vector offset;  // -Lambda(L)^{-1} (B' mu(s_x, s_u) + W_u(L) s_u) / 2

  Vector operator()(const Vector& x) const { return gain * x + offset; }
};

/// Frozen-sign affine laws for every s_u in {-1,0,1}^m and each given s_x.
std::vector<AffineLaw> asymptotic_gain_table(
    const RiccatiSolution& sol, const std::vector<SignVector>& s_x_patterns,
    MuResolvent resolvent = MuResolvent::series);

}  // namespace csviu
