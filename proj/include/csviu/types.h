#pragma once

#include <Eigen/Dense>

namespace csviu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Entries in {-1, 0, +1}.
using SignVector = Eigen::VectorXi;

/// Outcome of a strict-inequality test evaluated with a finite margin.
enum class Verdict { no, yes, indeterminate };

const char* to_string(Verdict v);

/// Strict test `value < bound`; values within `margin` of the bound are
/// indeterminate.
Verdict strictly_less(double value, double bound, double margin = 1e-10);

}  // namespace csviu
