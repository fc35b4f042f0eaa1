#pragma once

#include <functional>

#include "csviu/model.h"
#include "csviu/noise.h"
#include "csviu/types.h"

namespace csviu {

/// Deterministic state feedback x -> u.
using PolicyFn = std::function<Vector(const Vector&)>;

struct StepResult {
  Vector x_next;
  Vector y;
};

/// One transition of the controlled system for a given noise draw.
StepResult step(const SystemModel& model, const Vector& x, const Vector& u,
                const NoiseDraw& noise);

}  // namespace csviu
