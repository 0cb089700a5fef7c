#include "mdisp/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace mdisp {

void DispersionParams::validate() const {
  if (!(gamma_dm > 0.0)) throw std::invalid_argument("DispersionParams: gamma_dm must be positive");
  if (!(alpha_l >= 0.0) || !(alpha_t >= 0.0))
    throw std::invalid_argument("DispersionParams: dispersivities must be nonnegative");
}

void ScalarDispersionParams::validate() const {
  if (!(base > 0.0)) throw std::invalid_argument("ScalarDispersionParams: base must be positive");
  if (!(slope >= 0.0)) throw std::invalid_argument("ScalarDispersionParams: slope must be nonnegative");
}

SymMat2 bear_scheidegger(Vec2 u, const DispersionParams& params) {
  const double speed = norm(u);
  SymMat2 d{params.gamma_dm, 0.0, params.gamma_dm};
  if (speed < kZeroSpeed) return d;
  const double iso = params.alpha_t * speed;
  const double aniso = (params.alpha_l - params.alpha_t) / speed;
  d.xx += iso + aniso * u.x * u.x;
  d.xy += aniso * u.x * u.y;
  d.yy += iso + aniso * u.y * u.y;
  return d;
}

DispersionEigenvalues dispersion_eigenvalues(Vec2 u, const DispersionParams& params) {
  const double speed = norm(u) < kZeroSpeed ? 0.0 : norm(u);
  return {params.gamma_dm + params.alpha_l * speed, params.gamma_dm + params.alpha_t * speed};
}

double scalar_dispersion(Vec2 u, const ScalarDispersionParams& params) { return params.base + params.slope * norm(u); }

SymMat2 evaluate_dispersion(const DispersionModel& model, Vec2 u) {
  if (const auto* scalar = std::get_if<ScalarDispersionParams>(&model)) {
    const double d = scalar_dispersion(u, *scalar);
    return {d, 0.0, d};
  }
  return bear_scheidegger(u, std::get<DispersionParams>(model));
}

}  // namespace mdisp
