#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "esrom/physics.hpp"

#include <cmath>
#include <random>

using namespace esrom;

namespace {

std::mt19937_64 rng(777);

State random_euler_state(int dim, double gamma) {
  std::uniform_real_distribution<double> rdist(0.5, 3.0);
  std::uniform_real_distribution<double> udist(-2.0, 2.0);
  std::uniform_real_distribution<double> pdist(0.5, 3.0);
  const double rho = rdist(rng);
  const double p = pdist(rng);
  State u(dim + 2);
  u[0] = rho;
  double ke = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double vel = udist(rng);
    u[1 + i] = rho * vel;
    ke += 0.5 * rho * vel * vel;
  }
  u[dim + 1] = p / (gamma - 1.0) + ke;
  return u;
}

State euler_state(double rho, double vel, double p, double gamma) {
  State u(3);
  u[0] = rho;
  u[1] = rho * vel;
  u[2] = p / (gamma - 1.0) + 0.5 * rho * vel * vel;
  return u;
}

}  // namespace

TEST_CASE("log_mean") {
  CHECK(log_mean(2.0, 2.0) == 2.0);
  CHECK(log_mean(1.0, std::exp(1.0)) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  // Near-equal arguments: series branch vs long-double quadrature of the
  // defining formula.
  const double a = 1.0, b = 1.0 + 1e-9;
  const long double ref = (static_cast<long double>(b) - a) /
                          (std::log(static_cast<long double>(b)) - std::log(static_cast<long double>(a)));
  CHECK(std::abs(log_mean(a, b) - static_cast<double>(ref)) <= 1e-13 * static_cast<double>(ref));
  CHECK_THROWS_AS(log_mean(-1.0, 2.0), Error);
}

TEST_CASE("burgers basics") {
  Burgers law;
  State u(1), out[2];
  u[0] = 2.0;
  law.flux(u, out);
  CHECK(out[0][0] == 2.0);
  CHECK(law.entropy_variables(u)[0] == 2.0);
  CHECK(law.conservative_from_entropy(u)[0] == 2.0);
  double psi;
  law.potential(u, &psi);
  CHECK(psi == doctest::Approx(8.0 / 6.0));
  CHECK(law.jacobian_dudv(u)(0, 0) == 1.0);
  // EC flux identity is exact for the cubic-mean flux.
  State a(1), b(1);
  a[0] = 0.7;
  b[0] = -1.3;
  law.ec_flux(a, b, out);
  const double lhs = (a[0] - b[0]) * out[0][0];
  const double rhs = (a[0] * a[0] * a[0] - b[0] * b[0] * b[0]) / 6.0;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("euler flux values") {
  Euler law(1);
  State out[2];
  law.flux(euler_state(1.0, 0.0, 1.0, 1.4), out);
  CHECK(out[0][0] == 0.0);
  CHECK(out[0][1] == doctest::Approx(1.0));
  CHECK(out[0][2] == 0.0);

  Euler law2(2);
  State u(4);
  u << 1.3, 0.0, 0.0, 2.0;  // zero velocity
  law2.flux(u, out);
  const double p = law2.pressure(u);
  CHECK(out[0][0] == 0.0);
  CHECK(out[0][1] == doctest::Approx(p));
  CHECK(out[0][2] == 0.0);
  CHECK(out[0][3] == 0.0);
}

TEST_CASE("euler entropy at the reference state") {
  Euler law(1);
  CHECK(law.entropy(euler_state(1.0, 0.0, 1.0, 1.4)) == 0.0);  // s = log 1 = 0
}

TEST_CASE("entropy variable round trip on random admissible states") {
  for (int dim : {1, 2}) {
    Euler law(dim, 1.4);
    for (int i = 0; i < 1000; ++i) {
      State u = random_euler_state(dim, 1.4);
      State back = law.conservative_from_entropy(law.entropy_variables(u));
      CHECK((back - u).cwiseAbs().maxCoeff() <= 1e-12 * u.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("jacobian du/dv: symmetry, FD oracle, SPD") {
  for (int dim : {1, 2}) {
    Euler law(dim, 1.4);
    for (int trial = 0; trial < 20; ++trial) {
      State u = random_euler_state(dim, 1.4);
      DenseMatrix h = law.jacobian_dudv(u);
      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * h.cwiseAbs().maxCoeff());

      // Central finite differences of the inverse map at v(u).
      State v = law.entropy_variables(u);
      const int n = dim + 2;
      DenseMatrix fd(n, n);
      const double step = 1e-6;
      for (int j = 0; j < n; ++j) {
        State vp = v, vm = v;
        vp[j] += step;
        vm[j] -= step;
        State up = law.conservative_from_entropy(vp);
        State um = law.conservative_from_entropy(vm);
        for (int i = 0; i < n; ++i) fd(i, j) = (up[i] - um[i]) / (2.0 * step);
      }
      CHECK((h - fd).cwiseAbs().maxCoeff() <= 1e-5 * h.cwiseAbs().maxCoeff());

      Eigen::LLT<DenseMatrix> llt(h);
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("ec flux conditions: the core property suite") {
  auto run = [](const ConservationLaw& law, auto make_state) {
    const int dim = law.dim();
    State fs[2], fr[2], fa[2];
    double psi_l[2], psi_r[2];
    double worst_cons = 0.0, worst_sym = 0.0, worst_ec = 0.0;
    for (int i = 0; i < 10000; ++i) {
      State ul = make_state();
      State ur = make_state();
      law.ec_flux(ul, ul, fs);
      law.flux(ul, fa);
      for (int d = 0; d < dim; ++d) {
        worst_cons = std::max(worst_cons, (fs[d] - fa[d]).cwiseAbs().maxCoeff());
      }
      law.ec_flux(ul, ur, fs);
      law.ec_flux(ur, ul, fr);
      for (int d = 0; d < dim; ++d) {
        worst_sym = std::max(worst_sym, (fs[d] - fr[d]).cwiseAbs().maxCoeff());
      }
      State vl = law.entropy_variables(ul);
      State vr = law.entropy_variables(ur);
      law.potential(ul, psi_l);
      law.potential(ur, psi_r);
      for (int d = 0; d < dim; ++d) {
        const double lhs = (vl - vr).dot(fs[d]);
        worst_ec = std::max(worst_ec, std::abs(lhs - (psi_l[d] - psi_r[d])));
      }
    }
    CHECK(worst_cons <= 1e-13);
    CHECK(worst_sym <= 1e-13);
    CHECK(worst_ec <= 1e-11);
  };

  Burgers burgers;
  std::uniform_real_distribution<double> bdist(-2.0, 2.0);
  run(burgers, [&] {
    State u(1);
    u[0] = bdist(rng);
    return u;
  });
  Euler e1(1, 1.4);
  run(e1, [&] { return random_euler_state(1, 1.4); });
  Euler e2(2, 1.4);
  run(e2, [&] { return random_euler_state(2, 1.4); });
}

TEST_CASE("mirror states") {
  Euler law(1);
  State u = euler_state(2.0, 0.05, 1.0, 1.4);  // (rho, u, p) = (2, .1/2, 1)
  u = euler_state(2.0, 0.1, 1.0, 1.4);
  const double n1 = 1.0;
  State m = law.mirror_state(u, &n1);
  CHECK(m[0] == 2.0);
  CHECK(m[1] == doctest::Approx(-0.2));
  CHECK(m[2] == u[2]);

  State z = euler_state(1.0, 0.0, 1.0, 1.4);
  CHECK((law.mirror_state(z, &n1) - z).cwiseAbs().maxCoeff() == 0.0);

  Euler law2(2);
  State u2(4);
  const double rho = 1.5;
  u2 << rho, rho * 3.0, rho * 4.0, 20.0;
  const double ny[2] = {0.0, 1.0};
  State m2 = law2.mirror_state(u2, ny);
  CHECK(m2[1] == doctest::Approx(rho * 3.0));
  CHECK(m2[2] == doctest::Approx(-rho * 4.0));
}

TEST_CASE("lax-friedrichs penalty: wavespeed and dissipative sign") {
  Euler law(1);
  State u = euler_state(1.0, 0.0, 1.0, 1.4);
  const double n1 = 1.0;
  CHECK(law.normal_wavespeed(u, &n1) == doctest::Approx(std::sqrt(1.4)));
  CHECK(law.lax_friedrichs_penalty(u, u, &n1).cwiseAbs().maxCoeff() == 0.0);

  // Penalty contribution to the boundary entropy balance along mirror pairs:
  // n (psi_n - v . f_n*) with f* = f_S(u+, u) + n * penalty must be <= 0.
  State fs[2];
  double psi[2];
  for (int dim : {1, 2}) {
    Euler ld(dim, 1.4);
    for (int trial = 0; trial < 200; ++trial) {
      State ui = random_euler_state(dim, 1.4);
      double normal[2] = {1.0, 0.0};
      if (dim == 2) {
        std::uniform_real_distribution<double> adist(0.0, 2.0 * M_PI);
        const double a = adist(rng);
        normal[0] = std::cos(a);
        normal[1] = std::sin(a);
      } else if (trial % 2) {
        normal[0] = -1.0;
      }
      State up = ld.mirror_state(ui, normal);
      ld.ec_flux(up, ui, fs);
      State pen = ld.lax_friedrichs_penalty(ui, up, normal);
      State v = ld.entropy_variables(ui);
      ld.potential(ui, psi);
      double balance = 0.0;
      for (int d = 0; d < dim; ++d) {
        const State fstar = fs[d] + normal[d] * pen;
        balance += normal[d] * (psi[d] - v.dot(fstar));
      }
      CHECK(balance <= 1e-12);
    }
  }
}

TEST_CASE("positivity violations raise structured errors") {
  Euler law(1);
  State bad(3);
  bad << -1.0, 0.0, 1.0;
  CHECK_THROWS_AS(law.check_admissible(bad), PositivityError);
  bad << 1.0, 10.0, 1.0;  // kinetic energy exceeds total energy
  CHECK_THROWS_AS(law.check_admissible(bad), PositivityError);

  StateField f(2, 3);
  f.row(0) << 1.0, 0.0, 2.5;
  f.row(1) << 1.0, 10.0, 1.0;
  try {
    check_field_admissible(law, f);
    FAIL("expected PositivityError");
  } catch (const PositivityError& e) {
    CHECK(e.point == 1);
    CHECK(e.quantity == "pressure");
  }
}

TEST_CASE("hessian dv/du is SPD at random states") {
  // dv/du is the inverse of du/dv; SPD of the inverse follows from SPD of H,
  // checked through a Cholesky of the explicitly inverted matrix.
  Euler law(1, 1.4);
  for (int trial = 0; trial < 50; ++trial) {
    State u = random_euler_state(1, 1.4);
    DenseMatrix h = law.jacobian_dudv(u);
    DenseMatrix hinv = h.inverse();
    DenseMatrix sym = 0.5 * (hinv + hinv.transpose());
    Eigen::LLT<DenseMatrix> llt(sym);
    CHECK(llt.info() == Eigen::Success);
  }
}
