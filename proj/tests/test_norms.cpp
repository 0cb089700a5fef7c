#include <gtest/gtest.h>

#include <cmath>

#include "mdisp/mesh.hpp"
#include "mdisp/mms.hpp"
#include "mdisp/norms.hpp"
#include "oracles.hpp"

using namespace mdisp;

namespace {

Assembler disk_assembler(int m) { return Assembler(generate_disk_mesh({0.5, 0.5}, 0.5, m)); }

/// Area of the boundary polygon by the shoelace formula.
double polygon_area(const Mesh& mesh) {
  double twice = 0.0;
  for (const auto& e : mesh.boundary_edges) twice += cross(mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
  return 0.5 * twice;
}

/// Exact integral of x^2 over a mesh from the closed-form triangle moment
/// area/6 (x1^2 + x2^2 + x3^2 + x1 x2 + x2 x3 + x3 x1).
double integral_x_squared(const Mesh& mesh) {
  double s = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    const double area = 0.5 * orient2d(a, b, c);
    s += area / 6.0 * (a.x * a.x + b.x * b.x + c.x * c.x + a.x * b.x + b.x * c.x + c.x * a.x);
  }
  return s;
}

}  // namespace

TEST(ErrorScalar, LinearInterpolantIsExact) {
  const auto a = disk_assembler(16);
  const ScalarField f = [](Vec2 x) { return 2.0 * x.x - 3.0 * x.y + 0.5; };
  const auto grad = [](Vec2) { return Vec2{2.0, -3.0}; };
  for (const DofMap* dofs : {&a.p1(), &a.p2()}) {
    const auto c = interpolate(*dofs, f);
    EXPECT_LE(error_scalar(a, *dofs, c, f, Norm::l2), 1e-13);
    EXPECT_LE(error_scalar(a, *dofs, c, f, Norm::linf), 1e-13);
    EXPECT_LE(error_scalar(a, *dofs, c, f, Norm::h1_semi, grad), 1e-13);
  }
}

TEST(ErrorScalar, ZeroCoefficientsAgainstOneGiveAreaRoot) {
  const auto a = disk_assembler(32);
  const std::vector<double> zero(a.p1().dof_count(), 0.0);
  const double l2 = error_scalar(a, a.p1(), zero, [](Vec2) { return 1.0; }, Norm::l2);
  EXPECT_NEAR(l2, std::sqrt(polygon_area(a.mesh())), 1e-14);
  // polygonal deficit of the inscribed 32-gon is O(h^2)
  EXPECT_NEAR(l2, std::sqrt(M_PI / 4.0), 0.01);
  EXPECT_LT(l2, std::sqrt(M_PI / 4.0));
  EXPECT_EQ(error_scalar(a, a.p1(), zero, [](Vec2) { return 1.0; }, Norm::linf), 1.0);
}

TEST(ErrorScalar, ZeroExactGivesOwnNorm) {
  const auto a = disk_assembler(16);
  const auto c = interpolate(a.p1(), [](Vec2 x) { return x.x; });
  const double l2 = error_scalar(a, a.p1(), c, [](Vec2) { return 0.0; }, Norm::l2);
  EXPECT_NEAR(l2, std::sqrt(integral_x_squared(a.mesh())), 1e-13);
  const double h1 = error_scalar(a, a.p1(), c, [](Vec2) { return 0.0; }, Norm::h1_semi, [](Vec2) { return Vec2{}; });
  EXPECT_NEAR(h1, std::sqrt(polygon_area(a.mesh())), 1e-13);
  double max_x = 0.0;
  for (const auto& v : a.mesh().vertices) max_x = std::max(max_x, v.x);
  EXPECT_NEAR(error_scalar(a, a.p1(), c, [](Vec2) { return 0.0; }, Norm::linf), max_x, 1e-15);
}

TEST(ErrorScalar, InterpolantConvergesAtSecondOrder) {
  const ScalarField f = [](Vec2 x) { return std::exp(x.x) * std::sin(3.0 * x.y); };
  std::vector<double> l2;
  for (int m : {16, 32, 64}) {
    const auto a = disk_assembler(m);
    l2.push_back(error_scalar(a, a.p1(), interpolate(a.p1(), f), f, Norm::l2));
  }
  for (double order : observed_orders(l2)) EXPECT_GE(order, 1.7);
}

TEST(ErrorScalar, RejectsMismatchedInput) {
  const auto a = disk_assembler(8);
  const std::vector<double> short_vector(3, 0.0);
  EXPECT_THROW(error_scalar(a, a.p1(), short_vector, [](Vec2) { return 0.0; }, Norm::l2), std::invalid_argument);
  const std::vector<double> zero(a.p1().dof_count(), 0.0);
  EXPECT_THROW(error_scalar(a, a.p1(), zero, [](Vec2) { return 0.0; }, Norm::h1_semi), std::invalid_argument);
}

TEST(ErrorVelocity, SampledExactVelocityHasNoError) {
  const auto a = disk_assembler(16);
  const auto u = [](Vec2 x) { return Vec2{std::sin(x.y), x.x * x.y}; };
  const auto sampled = a.sample_velocity(u);
  EXPECT_EQ(error_velocity(a, sampled, u, Norm::l2), 0.0);
  EXPECT_EQ(error_velocity(a, sampled, u, Norm::linf), 0.0);
}

TEST(ErrorVelocity, ZeroAgainstUnitFlow) {
  const auto a = disk_assembler(16);
  const auto zero = a.sample_velocity([](Vec2) { return Vec2{}; });
  const auto unit = [](Vec2) { return Vec2{1.0, 0.0}; };
  EXPECT_NEAR(error_velocity(a, zero, unit, Norm::l2), std::sqrt(polygon_area(a.mesh())), 1e-14);
  EXPECT_EQ(error_velocity(a, zero, unit, Norm::linf), 1.0);
  EXPECT_THROW(error_velocity(a, zero, unit, Norm::h1_semi), std::invalid_argument);
}

TEST(ErrorVelocity, DarcyVelocityOfInterpolantsConvergesAtSecondOrder) {
  // Velocity recovered from the P2 pressure and P1 concentration
  // interpolants of the disk solution at t = 1: the same quantity whose
  // L2 error drops by about 4.3 from h = 1/16 to 1/32 in the paper.
  const auto s = section6_solution();
  const auto problem = manufactured_problem(s, manufacture_sources(s));
  std::vector<double> l2;
  for (int m : {16, 32}) {
    const auto a = disk_assembler(m);
    const auto p = interpolate(a.p2(), [&](Vec2 x) { return s.pressure(x, 1.0); });
    const auto c = interpolate(a.p1(), [&](Vec2 x) { return s.concentration(x, 1.0); });
    const auto u = a.compute_velocity(p, c, problem);
    l2.push_back(error_velocity(a, u, [&](Vec2 x) { return s.velocity(x, 1.0); }, Norm::l2));
  }
  const double ratio = l2[0] / l2[1];
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.2);
}

TEST(GradientError, QuadraticPressureIsExactInP2) {
  const auto a = disk_assembler(16);
  const auto p = interpolate(a.p2(), [](Vec2 x) { return x.x * x.x - x.x * x.y; });
  const auto grad = [](Vec2 x) { return Vec2{2.0 * x.x - x.y, -x.x}; };
  EXPECT_LE(gradient_lq_error(a, a.p2(), p, grad, 2.0), 1e-12);
  EXPECT_LE(gradient_lq_error(a, a.p2(), p, grad, kInfinity), 1e-12);
  EXPECT_THROW(gradient_lq_error(a, a.p2(), p, grad, 0.5), std::invalid_argument);
}

TEST(GradientError, L2MatchesH1Seminorm) {
  const auto a = disk_assembler(16);
  const ScalarField f = [](Vec2 x) { return std::cos(2.0 * x.x) * x.y; };
  const auto grad = [](Vec2 x) { return Vec2{-2.0 * std::sin(2.0 * x.x) * x.y, std::cos(2.0 * x.x)}; };
  const auto p = interpolate(a.p2(), f);
  EXPECT_NEAR(gradient_lq_error(a, a.p2(), p, grad, 2.0), error_scalar(a, a.p2(), p, f, Norm::h1_semi, grad), 1e-15);
}

TEST(DomainMean, ConstantsAndSymmetricFields) {
  const auto a = disk_assembler(16);
  EXPECT_NEAR(domain_mean(a, [](Vec2) { return 3.5; }), 3.5, 1e-14);
  // the mesh is symmetric about the centre, so linear fields average to their centre value
  EXPECT_NEAR(domain_mean(a, [](Vec2 x) { return x.x - 2.0 * x.y; }), 0.5 - 1.0, 1e-13);
}

TEST(DiscreteLpNorm, Examples) {
  const std::vector<double> ones(8, 1.0);
  EXPECT_NEAR(discrete_lp_norm(ones, 1.0 / 8, 2.0), 1.0, 1e-15);
  const std::vector<double> v{1.0, 2.0};
  EXPECT_NEAR(discrete_lp_norm(v, 0.5, 2.0), std::sqrt(2.5), 1e-15);
  EXPECT_EQ(discrete_lp_norm(v, 0.5, kInfinity), 2.0);
  EXPECT_THROW(discrete_lp_norm(v, 0.5, 1.0), std::invalid_argument);
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(discrete_lp_norm(negative, 0.5, 2.0), std::invalid_argument);
}

TEST(DiscreteLpNorm, MaximumBoundsFiniteExponents) {
  oracle::SplitMix rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 40);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(0.0, 5.0);
    const double tau = rng.uniform(0.001, 0.2);
    const double p = rng.uniform(1.01, 12.0);
    const double max = discrete_lp_norm(v, tau, kInfinity);
    EXPECT_GE(max * (1.0 + 1e-14), discrete_lp_norm(v, tau, p) * std::pow(n * tau, -1.0 / p));
  }
}

TEST(ObservedOrders, ExactQuartering) {
  const std::vector<double> e{4e-4, 1e-4, 2.5e-5};
  const auto orders = observed_orders(e);
  ASSERT_EQ(orders.size(), 2u);
  EXPECT_NEAR(orders[0], 2.0, 1e-12);
  EXPECT_NEAR(orders[1], 2.0, 1e-12);
}

TEST(ObservedOrders, SpatialTableColumnsReproduceTheirOrderRow) {
  // rows h = 1/16, 1/32, 1/64 and the printed order row, to rounding
  const std::vector<std::vector<double>> columns{{1.3995e-4, 2.8838e-5, 7.1872e-6},
                                                 {3.0027e-3, 6.9765e-4, 1.7068e-4},
                                                 {5.1714e-4, 1.4176e-4, 3.4551e-5},
                                                 {1.7159e-2, 5.2594e-3, 1.2412e-3}};
  const std::vector<double> printed{2.00, 2.02, 2.03, 2.08};
  for (std::size_t i = 0; i < columns.size(); ++i)
    EXPECT_NEAR(observed_orders(columns[i]).back(), printed[i], 0.015) << "column " << i;
}

TEST(ObservedOrders, TemporalTableColumns) {
  // rows tau = 1/32, 1/64, 1/128; printed orders 1.06, 1.06, 1.07, 1.12
  const std::vector<double> c_linf{2.3635e-3, 1.1310e-3, 5.3595e-4};
  EXPECT_NEAR(observed_orders(c_linf).back(), 1.07, 0.05);
  const std::vector<double> u_l2{6.2041e-4, 2.8533e-4, 1.3755e-4};
  EXPECT_NEAR(observed_orders(u_l2).back(), 1.06, 0.05);
  const std::vector<double> u_linf{2.4287e-3, 1.0462e-3, 4.7889e-4};
  EXPECT_NEAR(observed_orders(u_linf).back(), 1.12, 0.05);
  // The printed 1.06 for the c L2 column is not recoverable from its rows:
  // the final pair gives 1.11 and the first pair 1.17.
  const std::vector<double> c_l2{4.1618e-4, 1.8478e-4, 8.5562e-5};
  EXPECT_NEAR(observed_orders(c_l2).back(), 1.111, 0.001);
  EXPECT_NEAR(observed_orders(c_l2).front(), 1.171, 0.001);
}

TEST(ObservedOrders, RejectsDegenerateInput) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(observed_orders(one), std::invalid_argument);
  const std::vector<double> zero{1.0, 0.0};
  EXPECT_THROW(observed_orders(zero), std::invalid_argument);
}
