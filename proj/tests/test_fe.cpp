#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mdisp/assembly.hpp"
#include "mdisp/fe.hpp"
#include "mdisp/norms.hpp"
#include "oracles.hpp"

using namespace mdisp;

namespace {

Vec2 reference_point(const Barycentric& b) { return {b[1], b[2]}; }

Mesh unit_triangle() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = find_boundary_edges(m);
  return m;
}

}  // namespace

TEST(ReferenceBasis, P1IsLagrangeAtVertices) {
  const auto b = reference_basis(1, {0.0, 1.0, 0.0});
  ASSERT_EQ(b.size, 3);
  EXPECT_EQ(b.values[0], 0.0);
  EXPECT_EQ(b.values[1], 1.0);
  EXPECT_EQ(b.values[2], 0.0);
}

TEST(ReferenceBasis, P2AtCentroid) {
  const auto b = reference_basis(2, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  // hand-written quadratic Lagrange polynomials as the oracle
  const auto oracle_basis = oracle::p2_basis();
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(b.values[i], -1.0 / 9, 1e-15);
    EXPECT_NEAR(oracle_basis[i](1.0 / 3, 1.0 / 3), -1.0 / 9, 1e-15);
  }
  for (int i = 3; i < 6; ++i) {
    EXPECT_NEAR(b.values[i], 4.0 / 9, 1e-15);
    EXPECT_NEAR(oracle_basis[i](1.0 / 3, 1.0 / 3), 4.0 / 9, 1e-15);
  }
  EXPECT_NEAR(std::accumulate(b.values.begin(), b.values.end(), 0.0), 1.0, 1e-15);
}

TEST(ReferenceBasis, MatchesHandWrittenPolynomialsEverywhere) {
  const auto p1 = oracle::p1_basis();
  const auto p2 = oracle::p2_basis();
  oracle::SplitMix rng(7);
  for (int k = 0; k < 200; ++k) {
    double a = rng.uniform(), b = rng.uniform();
    if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
    const Barycentric bary{1.0 - a - b, a, b};
    for (int order : {1, 2}) {
      const auto v = reference_basis(order, bary);
      const auto& ref = order == 1 ? p1 : p2;
      for (int i = 0; i < v.size; ++i) {
        EXPECT_NEAR(v.values[i], ref[i](a, b), 1e-14);
        EXPECT_NEAR(v.gradients[i].x, ref[i].dx()(a, b), 1e-13);
        EXPECT_NEAR(v.gradients[i].y, ref[i].dy()(a, b), 1e-13);
      }
    }
  }
}

TEST(ReferenceBasis, PartitionOfUnityAndZeroGradientSum) {
  oracle::SplitMix rng(11);
  for (int k = 0; k < 100; ++k) {
    double a = rng.uniform(), b = rng.uniform();
    if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
    for (int order : {1, 2}) {
      const auto v = reference_basis(order, {1.0 - a - b, a, b});
      double sum = 0.0;
      Vec2 grad{0, 0};
      for (int i = 0; i < v.size; ++i) {
        sum += v.values[i];
        grad = grad + v.gradients[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
      EXPECT_NEAR(grad.x, 0.0, 1e-13);
      EXPECT_NEAR(grad.y, 0.0, 1e-13);
    }
  }
}

TEST(ReferenceBasis, KroneckerPropertyAtP2Nodes) {
  const Barycentric nodes[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
  for (int j = 0; j < 6; ++j) {
    const auto v = reference_basis(2, nodes[j]);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(v.values[i], i == j ? 1.0 : 0.0, 1e-15);
  }
}

TEST(ReferenceBasis, RejectsUnsupportedOrder) {
  EXPECT_THROW(reference_basis(0, {1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(reference_basis(3, {1, 0, 0}), std::invalid_argument);
}

TEST(Quadrature, MidpointRule) {
  const auto& q = quadrature_rule(1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_DOUBLE_EQ(q.weights[0], 0.5);
  EXPECT_NEAR(q.points[0][0], 1.0 / 3, 1e-16);
}

TEST(Quadrature, DegreeFourIntegratesXSquaredYSquared) {
  const auto& q = quadrature_rule(4);
  EXPECT_EQ(q.size(), 6u);
  double s = 0.0, area = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Vec2 p = reference_point(q.points[k]);
    s += q.weights[k] * p.x * p.x * p.y * p.y;
    area += q.weights[k];
  }
  EXPECT_NEAR(s, 1.0 / 180, 1e-15);
  EXPECT_NEAR(oracle::monomial_integral(2, 2), 1.0 / 180, 1e-18);
  EXPECT_NEAR(area, 0.5, 1e-15);
}

TEST(Quadrature, ExactOnAllMonomialsUpToDeclaredDegree) {
  for (int degree = 1; degree <= 6; ++degree) {
    const auto& q = quadrature_rule(degree);
    EXPECT_GE(q.degree, degree);
    for (double w : q.weights) EXPECT_GT(w, 0.0);
    for (int a = 0; a <= q.degree; ++a) {
      for (int b = 0; a + b <= q.degree; ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
          const Vec2 p = reference_point(q.points[k]);
          s += q.weights[k] * std::pow(p.x, a) * std::pow(p.y, b);
        }
        EXPECT_NEAR(s, oracle::monomial_integral(a, b), 1e-14) << "rule " << degree << " monomial x^" << a << " y^" << b;
      }
    }
  }
}

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(quadrature_rule(0), std::invalid_argument);
  EXPECT_THROW(quadrature_rule(7), std::invalid_argument);
}

TEST(Quadrature, EdgeRuleIsExactToDegreeFive) {
  const auto& e = edge_quadrature();
  ASSERT_EQ(e.points.size(), 3u);
  for (int k = 0; k <= 5; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < e.points.size(); ++i) s += e.weights[i] * std::pow(e.points[i], k);
    EXPECT_NEAR(s, 1.0 / (k + 1), 1e-15);
  }
}

TEST(DofMap, CountsAndSharedMidpoints) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 16);
  const DofMap p1(mesh, 1), p2(mesh, 2);
  const auto edges = build_edges(mesh);
  EXPECT_EQ(p1.dof_count(), mesh.vertex_count());
  EXPECT_EQ(p2.dof_count(), mesh.vertex_count() + edges.edges.size());
  // every midpoint dof sits at the midpoint of its edge, whichever triangle numbers it
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto cell = p2.cell_dofs(t);
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const Vec2 mid = 0.5 * (mesh.vertices[tri[e]] + mesh.vertices[tri[(e + 1) % 3]]);
      const Vec2 x = p2.coordinates()[cell[3 + e]];
      EXPECT_NEAR(x.x, mid.x, 1e-15);
      EXPECT_NEAR(x.y, mid.y, 1e-15);
    }
  }
  for (std::size_t e = 0; e < edges.edges.size(); ++e) {
    const auto [a, b] = edges.edge_triangles[e];
    if (b < 0) continue;
    // the two owners agree on the global index of the shared midpoint
    int from_a = -1, from_b = -1;
    for (int k = 0; k < 3; ++k) {
      if (edges.triangle_edges[a][k] == static_cast<int>(e)) from_a = p2.cell_dofs(a)[3 + k];
      if (edges.triangle_edges[b][k] == static_cast<int>(e)) from_b = p2.cell_dofs(b)[3 + k];
    }
    EXPECT_EQ(from_a, from_b);
    EXPECT_GE(from_a, static_cast<int>(mesh.vertex_count()));
  }
}

TEST(Interpolation, P1ReproducesLinearsAtQuadraturePoints) {
  const Assembler a(generate_disk_mesh({0.5, 0.5}, 0.5, 16));
  const auto f = [](Vec2 x) { return x.x + x.y; };
  const auto c = interpolate(a.p1(), f);
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t)
    for (int q = 0; q < static_cast<int>(a.rule().size()); ++q)
      EXPECT_NEAR(a.value_at(a.p1(), c, t, q), f(a.point(t, q)), 1e-14);
}

TEST(Interpolation, P2ReproducesQuadratics) {
  const Assembler a(generate_disk_mesh({0.5, 0.5}, 0.5, 16));
  const auto f = [](Vec2 x) { return x.x * x.x - 0.3 * x.x * x.y + 2.0 * x.y; };
  const auto c = interpolate(a.p2(), f);
  for (std::size_t t = 0; t < a.mesh().triangle_count(); ++t)
    for (int q = 0; q < static_cast<int>(a.rule().size()); ++q)
      EXPECT_NEAR(a.value_at(a.p2(), c, t, q), f(a.point(t, q)), 1e-14);
}

TEST(Interpolation, SecondOrderOnTheDisk) {
  const auto f = [](Vec2 x) { return std::sin(x.x); };
  double errors[2];
  int k = 0;
  for (int m : {16, 32}) {
    const Assembler a(generate_disk_mesh({0.5, 0.5}, 0.5, m));
    errors[k++] = error_scalar(a, a.p1(), interpolate(a.p1(), f), f, Norm::l2);
  }
  const double ratio = errors[0] / errors[1];
  EXPECT_GE(ratio, 3.2);
  EXPECT_LE(ratio, 4.8);
}

TEST(Interpolation, P1FunctionsLieInP2) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 20);
  const DofMap p1(mesh, 1), p2(mesh, 2);
  oracle::SplitMix rng(3);
  std::vector<double> c1(p1.dof_count());
  for (double& v : c1) v = rng.uniform(-1, 1);
  // interpolate the P1 function into P2 by evaluating it at the P2 nodes
  std::vector<double> c2(p2.dof_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Barycentric nodes[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
    const auto cell = p2.cell_dofs(t);
    for (int i = 0; i < 6; ++i) c2[cell[i]] = evaluate(mesh, p1, c1, t, nodes[i]).value;
  }
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    for (int k = 0; k < 10; ++k) {
      double a = rng.uniform(), b = rng.uniform();
      if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
      const Barycentric bary{1 - a - b, a, b};
      const auto v1 = evaluate(mesh, p1, c1, t, bary);
      const auto v2 = evaluate(mesh, p2, c2, t, bary);
      EXPECT_NEAR(v1.value, v2.value, 1e-13);
      EXPECT_NEAR(v1.gradient.x, v2.gradient.x, 1e-12);
      EXPECT_NEAR(v1.gradient.y, v2.gradient.y, 1e-12);
    }
  }
}

TEST(Evaluate, ConstantHasZeroGradient) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 12);
  for (int order : {1, 2}) {
    const DofMap dofs(mesh, order);
    const std::vector<double> c(dofs.dof_count(), 2.5);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto v = evaluate(mesh, dofs, c, t, {0.2, 0.3, 0.5});
      EXPECT_NEAR(v.value, 2.5, 1e-14);
      EXPECT_NEAR(v.gradient.x, 0.0, 1e-12);
      EXPECT_NEAR(v.gradient.y, 0.0, 1e-12);
    }
  }
}

TEST(Evaluate, LinearGradientOnEveryElement) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 16);
  const DofMap p1(mesh, 1);
  const auto c = interpolate(p1, [](Vec2 x) { return x.x + 2.0 * x.y; });
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto v = evaluate(mesh, p1, c, t, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    EXPECT_NEAR(v.gradient.x, 1.0, 1e-12);
    EXPECT_NEAR(v.gradient.y, 2.0, 1e-12);
  }
}

TEST(Evaluate, P2InterpolantOfXSquaredAtBarycenters) {
  const Mesh mesh = generate_disk_mesh({0.5, 0.5}, 0.5, 16);
  const DofMap p2(mesh, 2);
  const auto c = interpolate(p2, [](Vec2 x) { return x.x * x.x; });
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double xc = (mesh.vertices[tri[0]].x + mesh.vertices[tri[1]].x + mesh.vertices[tri[2]].x) / 3.0;
    const auto v = evaluate(mesh, p2, c, t, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    EXPECT_NEAR(v.value, xc * xc, 1e-14);
    EXPECT_NEAR(v.gradient.x, 2.0 * xc, 1e-12);
  }
}

TEST(Evaluate, RejectsOutOfRangeIndices) {
  const Mesh mesh = unit_triangle();
  const DofMap p1(mesh, 1);
  const std::vector<double> c(3, 0.0);
  EXPECT_THROW((void)evaluate(mesh, p1, c, 1, {1, 0, 0}), std::invalid_argument);
  const std::vector<double> short_c(2, 0.0);
  EXPECT_THROW((void)evaluate(mesh, p1, short_c, 0, {1, 0, 0}), std::invalid_argument);
}

TEST(ElementMap, MapsReferenceVerticesAndScalesArea) {
  const ElementMap m({1, 1}, {3, 2}, {0, 4});
  const Vec2 a = m.to_physical({1, 0, 0}), b = m.to_physical({0, 1, 0}), c = m.to_physical({0, 0, 1});
  EXPECT_EQ(a.x, 1.0);
  EXPECT_EQ(b.x, 3.0);
  EXPECT_EQ(c.y, 4.0);
  EXPECT_NEAR(m.det, (3 - 1) * (4 - 1) - (2 - 1) * (0 - 1), 1e-15);
}
