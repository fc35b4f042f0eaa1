#include "csviu/dynamics.h"

namespace csviu {

StepResult step(const SystemModel& model, const Vector& x, const Vector& u,
                const NoiseDraw& noise) {
  StepResult out;
  out.y = model.C * x + model.D * u;
  out.x_next = model.A * x + model.B * u + model.sigma * noise.omega +
               model.sigma_x * noise.eps_x +
               model.sigma_bar_x * x.cwiseAbs().cwiseProduct(noise.eps_x) +
               model.sigma_u * noise.eps_u +
               model.sigma_bar_u * u.cwiseAbs().cwiseProduct(noise.eps_u);
  return out;
}

}  // namespace csviu
