#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "esrom/operators.hpp"

#include <Eigen/Eigenvalues>

using namespace esrom;

TEST_CASE("periodic stencil matches the k=3 display") {
  DenseMatrix q = periodic_diff_matrix(3);
  DenseMatrix expect(3, 3);
  expect << 0, 1, -1, -1, 0, 1, 1, -1, 0;
  expect *= 0.5;
  CHECK((q - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic Q is exactly skew with exact zero row sums") {
  for (Index k : {3, 5, 17, 64}) {
    DenseMatrix q = periodic_diff_matrix(k);
    CHECK((q + q.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((q * Vector::Ones(k)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(periodic_diff_matrix(2), Error);
}

TEST_CASE("SBP pair matches the k=3 display and the SBP identity") {
  auto [q, b] = sbp_diff_matrix(3);
  DenseMatrix qe(3, 3);
  qe << -1, 1, 0, -1, 0, 1, 0, -1, 1;
  qe *= 0.5;
  CHECK((q - qe).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b(0, 0) == -1.0);
  CHECK(b(1, 1) == 0.0);
  CHECK(b(2, 2) == 1.0);
  for (Index k : {3, 9, 41}) {
    auto [qq, bb] = sbp_diff_matrix(k);
    CHECK((qq + qq.transpose() - bb).cwiseAbs().maxCoeff() == 0.0);
    CHECK((qq * Vector::Ones(k)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(sbp_diff_matrix(2), Error);
}

TEST_CASE("diffusion matrices: stencil, null space, factorization") {
  auto [kk, d] = diffusion_matrices(3, 1.0);
  DenseMatrix ke(3, 3);
  ke << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((kk - ke).cwiseAbs().maxCoeff() == 0.0);

  for (Index k : {2, 7, 50}) {
    auto [km, dm] = diffusion_matrices(k, 0.37);
    CHECK((km * Vector::Ones(k)).cwiseAbs().maxCoeff() <= 1e-12 / (0.37 * 0.37));
    CHECK((km - dm.transpose() * dm).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("kron_extend_2d against a hand expansion") {
  DenseMatrix q(2, 2);
  q << 0, 1, -1, 0;
  const double dx = 0.5;
  DenseMatrix a1 = kron_extend_2d(q, dx, 1);  // Q (x) dx I
  DenseMatrix e1(4, 4);
  e1 << 0, 0, dx, 0,
        0, 0, 0, dx,
        -dx, 0, 0, 0,
        0, -dx, 0, 0;
  CHECK((a1 - e1).cwiseAbs().maxCoeff() == 0.0);
  DenseMatrix a2 = kron_extend_2d(q, dx, 2);  // dx I (x) Q
  DenseMatrix e2(4, 4);
  e2 << 0, dx, 0, 0,
        -dx, 0, 0, 0,
        0, 0, 0, dx,
        0, 0, -dx, 0;
  CHECK((a2 - e2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron extension inherits skew symmetry and zero row sums") {
  DenseMatrix q = periodic_diff_matrix(5);
  for (int axis : {1, 2}) {
    DenseMatrix a = kron_extend_2d(q, 0.2, axis);
    CHECK((a + a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a * Vector::Ones(25)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("2D diffusion Kronecker sum is positive semidefinite") {
  for (Index k : {4, 9, 16}) {
    auto [k1, d1] = diffusion_matrices(k, 1.0 / static_cast<double>(k));
    DenseMatrix eye = DenseMatrix::Identity(k, k);
    DenseMatrix k2 = kron(k1, eye) + kron(eye, k1);
    CHECK((k2 - k2.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(k2, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("directional applications agree with dense Kronecker operators") {
  const Index k = 6;
  const double dx = 2.0 / k;
  FomOperators ops = make_fom_operators(k, dx, true, 2);
  DenseMatrix field = DenseMatrix::Random(k * k, 3);

  // Grid layout is ix fastest: x-derivative = dx I (x) Q acting on stacked points.
  DenseMatrix qx = kron(dx * DenseMatrix::Identity(k, k), ops.q1d);
  DenseMatrix qy = kron(ops.q1d, dx * DenseMatrix::Identity(k, k));
  CHECK((apply_q_dir(ops, 0, field) - qx * field).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((apply_q_dir(ops, 1, field) - qy * field).cwiseAbs().maxCoeff() <= 1e-13);

  DenseMatrix eye = DenseMatrix::Identity(k, k);
  DenseMatrix k2 = kron(eye, ops.k1d) + kron(ops.k1d, eye);
  CHECK((apply_k(ops, field) - k2 * field).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("apply_d rows match interface_cells bookkeeping") {
  for (int dim : {1, 2}) {
    const Index k = 5;
    FomOperators ops = make_fom_operators(k, 0.4, true, dim);
    const Index pts = ops.n_points();
    DenseMatrix field = DenseMatrix::Random(pts, 2);
    DenseMatrix diffs = apply_d(ops, field);
    CHECK(diffs.rows() == ops.n_interfaces());
    for (Index r = 0; r < diffs.rows(); ++r) {
      auto [l, rr] = interface_cells(ops, r);
      for (Index c = 0; c < 2; ++c) {
        CHECK(diffs(r, c) ==
              doctest::Approx((field(l, c) - field(rr, c)) / 0.4).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("qt_one is the signed-face vector") {
  FomOperators ops1 = make_fom_operators(5, 0.4, false, 1);
  Vector g = qt_one(ops1, 0);
  CHECK(g[0] == -1.0);
  CHECK(g[4] == 1.0);
  CHECK(g.segment(1, 3).cwiseAbs().maxCoeff() == 0.0);

  const Index k = 4;
  FomOperators ops2 = make_fom_operators(k, 0.5, false, 2);
  // Compare against the dense Kronecker SBP operator transpose.
  auto [q1, b1] = sbp_diff_matrix(k);
  DenseMatrix qx = kron(0.5 * DenseMatrix::Identity(k, k), q1);
  DenseMatrix qy = kron(q1, 0.5 * DenseMatrix::Identity(k, k));
  CHECK((qt_one(ops2, 0) - qx.transpose() * Vector::Ones(k * k)).cwiseAbs().maxCoeff() <=
        1e-14);
  CHECK((qt_one(ops2, 1) - qy.transpose() * Vector::Ones(k * k)).cwiseAbs().maxCoeff() <=
        1e-14);
}

TEST_CASE("2D boundary bookkeeping: four faces, outward normals") {
  const Index k = 4;
  FomOperators ops = make_fom_operators(k, 0.5, false, 2);
  CHECK(ops.boundary.size() == 4 * static_cast<size_t>(k));
  double sum_nx = 0.0, sum_ny = 0.0;
  for (const auto& bp : ops.boundary) {
    CHECK(std::abs(bp.nx) + std::abs(bp.ny) == 1.0);
    sum_nx += bp.nx;
    sum_ny += bp.ny;
  }
  // Closed surface: normals cancel.
  CHECK(sum_nx == 0.0);
  CHECK(sum_ny == 0.0);
}
