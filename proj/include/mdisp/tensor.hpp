#pragma once

#include <variant>

#include "mdisp/geometry.hpp"

namespace mdisp {

/// Bear-Scheidegger diffusion-dispersion parameters.
struct DispersionParams {
  double gamma_dm = 1.0;  // porosity times molecular diffusion
  double alpha_l = 0.0;   // longitudinal dispersivity
  double alpha_t = 0.0;   // transversal dispersivity

  void validate() const;
};

/// Isotropic model D(u) = base + slope |u|.
struct ScalarDispersionParams {
  double base = 1.0;
  double slope = 0.0;

  void validate() const;
};

/// Speeds below this are treated as zero velocity.
inline constexpr double kZeroSpeed = 1e-300;

/// D(u) = gamma_dm I + alpha_t |u| I + (alpha_l - alpha_t) u (x) u / |u|,
/// extended continuously by gamma_dm I at u = 0.
SymMat2 bear_scheidegger(Vec2 u, const DispersionParams& params);

struct DispersionEigenvalues {
  double longitudinal = 0.0;  // along u
  double transverse = 0.0;    // orthogonal to u
};

DispersionEigenvalues dispersion_eigenvalues(Vec2 u, const DispersionParams& params);

double scalar_dispersion(Vec2 u, const ScalarDispersionParams& params);

using DispersionModel = std::variant<DispersionParams, ScalarDispersionParams>;

/// Dispersion tensor of either model at a point with velocity u.
SymMat2 evaluate_dispersion(const DispersionModel& model, Vec2 u);

}  // namespace mdisp
