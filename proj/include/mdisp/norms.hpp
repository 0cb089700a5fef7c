#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mdisp/assembly.hpp"
#include "mdisp/fe.hpp"

namespace mdisp {

enum class Norm { l2, linf, h1_semi };

/// Error of a finite element function against an exact field. L2 and the H1
/// seminorm use the assembler's volume quadrature; Linf is the maximum over
/// quadrature points and dof nodes. `exact_gradient` is required for h1_semi.
double error_scalar(const Assembler& assembler, const DofMap& dofs, std::span<const double> coeffs,
                    const ScalarField& exact, Norm norm,
                    const std::function<Vec2(Vec2)>& exact_gradient = {});

/// Error of a quadrature-point velocity field; pointwise errors are
/// Euclidean lengths of the vector difference.
double error_velocity(const Assembler& assembler, const VelocityField& velocity,
                      const std::function<Vec2(Vec2)>& exact, Norm norm);

/// L^q norm of the gradient error, the W^{1,q} proxy for pressure errors.
double gradient_lq_error(const Assembler& assembler, const DofMap& dofs, std::span<const double> coeffs,
                         const std::function<Vec2(Vec2)>& exact_gradient, double q);

/// Mean of a field over the (polygonal) mesh domain.
double domain_mean(const Assembler& assembler, const ScalarField& f);

/// Time-discrete Bochner norm (sum_n tau v_n^p)^{1/p}; p = infinity gives
/// the maximum.
double discrete_lp_norm(std::span<const double> values, double tau, double p);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// log2(e_i / e_{i+1}) for each adjacent pair of a halving sequence.
std::vector<double> observed_orders(std::span<const double> errors);

}  // namespace mdisp
