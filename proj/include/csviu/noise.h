#pragma once

#include <cstdint>

#include "csviu/model.h"
#include "csviu/types.h"

namespace csviu {

/// Counter-based random source: every variate is a pure function of
/// (seed, path, stage, index), so a path's stream does not depend on how many
/// other paths are simulated or on evaluation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path);

  /// Uniform on (0, 1).
  double uniform(std::uint64_t stage, std::uint64_t index) const;
  double gaussian(std::uint64_t stage, std::uint64_t index) const;
  /// Zero mean, unit variance variate of the requested family.
  double standard(NoiseKind kind, std::uint64_t stage,
                  std::uint64_t index) const;

 private:
  std::uint64_t bits(std::uint64_t stage, std::uint64_t index) const;
  std::uint64_t key_;
};

/// One draw of the stacked vector (w, eps_x, eps_u) of size r + n + m.
struct NoiseDraw {
  Vector omega;  // r
  Vector eps_x;  // n
  Vector eps_u;  // m

  static NoiseDraw zero(const SystemModel& model);
};

NoiseDraw draw_noise(const CounterRng& rng, std::uint64_t stage,
                     const SystemModel& model, NoiseKind kind);

}  // namespace csviu
