#include "mdisp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdisp {

double error_scalar(const Assembler& a, const DofMap& dofs, std::span<const double> coeffs, const ScalarField& exact,
                    Norm norm, const std::function<Vec2(Vec2)>& exact_gradient) {
  if (coeffs.size() != dofs.dof_count()) throw std::invalid_argument("error_scalar: coefficient vector size");
  if (norm == Norm::h1_semi && !exact_gradient) throw std::invalid_argument("error_scalar: h1_semi needs a gradient");
  const auto& rule = a.rule();
  double sum = 0.0;
  double max = 0.0;
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const int qi = static_cast<int>(q);
      const Vec2 x = a.point(t, qi);
      if (norm == Norm::h1_semi) {
        const PointValue v = evaluate(a.mesh(), dofs, coeffs, t, rule.points[q]);
        const Vec2 diff = v.gradient - exact_gradient(x);
        sum += a.weight(t, qi) * dot(diff, diff);
      } else {
        const double diff = a.value_at(dofs, coeffs, t, qi) - exact(x);
        sum += a.weight(t, qi) * diff * diff;
        max = std::max(max, std::abs(diff));
      }
    }
  }
  if (norm == Norm::linf) {
    const auto& nodes = dofs.coordinates();
    for (std::size_t i = 0; i < nodes.size(); ++i) max = std::max(max, std::abs(coeffs[i] - exact(nodes[i])));
    return max;
  }
  return std::sqrt(sum);
}

double error_velocity(const Assembler& a, const VelocityField& velocity, const std::function<Vec2(Vec2)>& exact,
                      Norm norm) {
  if (norm == Norm::h1_semi) throw std::invalid_argument("error_velocity: only L2 and Linf are defined");
  if (velocity.volume_points != static_cast<int>(a.rule().size()) ||
      velocity.volume.size() != a.mesh().triangle_count() * a.rule().size())
    throw std::invalid_argument("error_velocity: velocity field does not match the quadrature");
  double sum = 0.0;
  double max = 0.0;
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t) {
    for (int q = 0; q < velocity.volume_points; ++q) {
      const Vec2 diff = velocity.at(t, q) - exact(a.point(t, q));
      const double d2 = dot(diff, diff);
      sum += a.weight(t, q) * d2;
      max = std::max(max, std::sqrt(d2));
    }
  }
  return norm == Norm::l2 ? std::sqrt(sum) : max;
}

double gradient_lq_error(const Assembler& a, const DofMap& dofs, std::span<const double> coeffs,
                         const std::function<Vec2(Vec2)>& exact_gradient, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("gradient_lq_error: q must be at least 1");
  const auto& rule = a.rule();
  double sum = 0.0;
  double max = 0.0;
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t) {
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const int ki = static_cast<int>(k);
      const PointValue v = evaluate(a.mesh(), dofs, coeffs, t, rule.points[k]);
      const double e = norm(v.gradient - exact_gradient(a.point(t, ki)));
      if (std::isinf(q)) {
        max = std::max(max, e);
      } else {
        sum += a.weight(t, ki) * std::pow(e, q);
      }
    }
  }
  return std::isinf(q) ? max : std::pow(sum, 1.0 / q);
}

double domain_mean(const Assembler& a, const ScalarField& f) {
  double integral = 0.0;
  double area = 0.0;
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t) {
    for (std::size_t q = 0; q < a.rule().size(); ++q) {
      const int qi = static_cast<int>(q);
      integral += a.weight(t, qi) * f(a.point(t, qi));
      area += a.weight(t, qi);
    }
  }
  return integral / area;
}

double discrete_lp_norm(std::span<const double> values, double tau, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("discrete_lp_norm: p must exceed 1");
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("discrete_lp_norm: values must be nonnegative");
  if (std::isinf(p)) return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += tau * std::pow(v, p);
  return std::pow(sum, 1.0 / p);
}

std::vector<double> observed_orders(std::span<const double> errors) {
  if (errors.size() < 2) throw std::invalid_argument("observed_orders: need at least two errors");
  for (double e : errors)
    if (!(e > 0.0)) throw std::invalid_argument("observed_orders: errors must be positive");
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) orders.push_back(std::log2(errors[i] / errors[i + 1]));
  return orders;
}

}  // namespace mdisp
