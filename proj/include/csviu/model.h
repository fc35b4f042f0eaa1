#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "csviu/types.h"

namespace csviu {

/// Data of the controlled CSVIU system
///
///   x+ = A x + B u + (sigma_x + sigma_bar_x diag|x|) eps_x
///              + (sigma_u + sigma_bar_u diag|u|) eps_u + sigma w,
///   y  = C x + D u.
///
/// Dimensions are read off the matrices: n = rows(A), m = cols(B),
/// p = rows(C), r = cols(sigma).
struct SystemModel {
  Matrix A;            // n x n
  Matrix B;            // n x m
  Matrix C;            // p x n
  Matrix D;            // p x m
  Matrix sigma;        // n x r
  Matrix sigma_x;      // n x n
  Matrix sigma_bar_x;  // n x n
  Matrix sigma_u;      // n x m
  Matrix sigma_bar_u;  // n x m

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
  int r() const { return static_cast<int>(sigma.cols()); }

  /// Deterministic model with all noise gains zero (r = 1).
  static SystemModel deterministic(Matrix A, Matrix B, Matrix C, Matrix D);
};

/// Throws ValidationError naming the first offending field when a shape is
/// inconsistent or an entry is not finite.
void validate(const SystemModel& model);

enum class NoiseKind { gaussian, rademacher, uniform };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

struct CriterionConfig {
  double alpha = 0.9;
  /// Empty means an infinite horizon.
  std::optional<int> horizon_kappa;
  int paths = 1000;
  std::uint64_t seed = 0;
  double tol_fixed_point = 1e-11;
  double tol_sor = 1e-12;
  int max_iters = 200000;
  double sor_omega = 1.0;
  NoiseKind noise = NoiseKind::gaussian;
};

void validate(const CriterionConfig& config);

/// Parses the JSON model schema. Missing noise gains default to zeros.
SystemModel parse_model(std::string_view json_text);
SystemModel load_model(const std::filesystem::path& path);

/// Reads the optional "criterion" object; absent keys keep their defaults.
CriterionConfig parse_criterion(std::string_view json_text);
CriterionConfig load_criterion(const std::filesystem::path& path);

/// Componentwise sign with sign(0) = 0.
SignVector sign_vector(const Vector& x);

}  // namespace csviu
