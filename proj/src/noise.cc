#include "csviu/noise.h"

#include <cmath>
#include <numbers>

namespace csviu {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path)
    : key_(splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t stage, std::uint64_t index) const {
  return splitmix64(splitmix64(key_ ^ splitmix64(stage)) + index);
}

double CounterRng::uniform(std::uint64_t stage, std::uint64_t index) const {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits(stage, index) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t stage, std::uint64_t index) const {
  // Box-Muller on a pair of uniforms private to this index.
  const double u1 = uniform(stage, 2 * index);
  const double u2 = uniform(stage, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::standard(NoiseKind kind, std::uint64_t stage,
                            std::uint64_t index) const {
  switch (kind) {
    case NoiseKind::gaussian:
      return gaussian(stage, index);
    case NoiseKind::rademacher:
      return (bits(stage, index) >> 63) ? 1.0 : -1.0;
    case NoiseKind::uniform:
      return std::numbers::sqrt3 * (2.0 * uniform(stage, index) - 1.0);
  }
  return 0.0;
}

NoiseDraw NoiseDraw::zero(const SystemModel& model) {
  return {Vector::Zero(model.r()), Vector::Zero(model.n()),
          Vector::Zero(model.m())};
}

NoiseDraw draw_noise(const CounterRng& rng, std::uint64_t stage,
                     const SystemModel& model, NoiseKind kind) {
  NoiseDraw d = NoiseDraw::zero(model);
  std::uint64_t idx = 0;
  for (Eigen::Index i = 0; i < d.omega.size(); ++i) {
    d.omega[i] = rng.standard(kind, stage, idx++);
  }
  for (Eigen::Index i = 0; i < d.eps_x.size(); ++i) {
    d.eps_x[i] = rng.standard(kind, stage, idx++);
  }
  for (Eigen::Index i = 0; i < d.eps_u.size(); ++i) {
    d.eps_u[i] = rng.standard(kind, stage, idx++);
  }
  return d;
}

}  // namespace csviu
