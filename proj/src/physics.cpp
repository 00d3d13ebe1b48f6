#include "esrom/physics.hpp"

#include <cmath>

namespace esrom {

double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error("log_mean: arguments must be positive");
  }
  // Ismail & Roe: series branch when the squared ratio parameter is small.
  const double zeta = a / b;
  const double f = (zeta - 1.0) / (zeta + 1.0);
  const double u = f * f;
  double big;
  if (u < 1e-4) {
    big = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
  } else {
    big = std::log(zeta) / (2.0 * f);
  }
  return (a + b) / (2.0 * big);
}

State ConservationLaw::lax_friedrichs_penalty(const State& ul, const State& ur,
                                              const double* normal) const {
  const double lam =
      std::max(normal_wavespeed(ul, normal), normal_wavespeed(ur, normal));
  return 0.5 * lam * (ul - ur);
}

void Burgers::flux(const State& u, State* out) const {
  out[0] = u;
  out[0][0] = 0.5 * u[0] * u[0];
}

void Burgers::ec_flux(const State& ul, const State& ur, State* out) const {
  out[0] = ul;
  out[0][0] = (ul[0] * ul[0] + ul[0] * ur[0] + ur[0] * ur[0]) / 6.0;
}

double Euler::pressure(const State& u) const {
  double ke = 0.0;
  for (int i = 0; i < dim_; ++i) ke += u[1 + i] * u[1 + i];
  ke /= 2.0 * u[0];
  return (gamma_ - 1.0) * (u[dim_ + 1] - ke);
}

bool Euler::is_admissible(const State& u) const {
  return u[0] > 0.0 && pressure(u) > 0.0 && u.allFinite();
}

void Euler::check_admissible(const State& u) const {
  if (!u.allFinite() || !(u[0] > 0.0)) {
    throw PositivityError("nonpositive density", -1, "density");
  }
  if (!(pressure(u) > 0.0)) {
    throw PositivityError("nonpositive pressure", -1, "pressure");
  }
}

void Euler::flux(const State& u, State* out) const {
  check_admissible(u);
  const double p = pressure(u);
  const double rho = u[0];
  const double e_tot = u[dim_ + 1];
  for (int d = 0; d < dim_; ++d) {
    State& f = out[d];
    f.resize(dim_ + 2);
    const double vel = u[1 + d] / rho;
    f[0] = u[1 + d];
    for (int i = 0; i < dim_; ++i) f[1 + i] = u[1 + i] * vel;
    f[1 + d] += p;
    f[dim_ + 1] = vel * (e_tot + p);
  }
}

double Euler::entropy(const State& u) const {
  check_admissible(u);
  const double s = std::log(pressure(u)) - gamma_ * std::log(u[0]);
  return -u[0] * s / (gamma_ - 1.0);
}

// v = dS/du for S = -rho s / (gamma - 1):
// v1 = (gamma - s)/(gamma - 1) - rho|u|^2/(2p), v_{1+i} = rho u_i / p,
// v_{d+2} = -rho / p.
State Euler::entropy_variables(const State& u) const {
  check_admissible(u);
  const double p = pressure(u);
  const double rho = u[0];
  const double s = std::log(p) - gamma_ * std::log(rho);
  State v(dim_ + 2);
  double ke = 0.0;
  for (int i = 0; i < dim_; ++i) ke += u[1 + i] * u[1 + i];
  ke /= 2.0 * rho;
  v[0] = (gamma_ - s) / (gamma_ - 1.0) - ke / p;
  for (int i = 0; i < dim_; ++i) v[1 + i] = u[1 + i] / p;
  v[dim_ + 1] = -rho / p;
  return v;
}

State Euler::conservative_from_entropy(const State& v) const {
  if (!(v[dim_ + 1] < 0.0)) {
    throw PositivityError("entropy variables outside the admissible cone", -1,
                          "density");
  }
  // The inverse map in the (gamma-1)-scaled variables w = (gamma-1) v.
  State w = (gamma_ - 1.0) * v;
  double q = 0.0;
  for (int i = 0; i < dim_; ++i) q += w[1 + i] * w[1 + i];
  const double s = gamma_ - w[0] + q / (2.0 * w[dim_ + 1]);
  const double rho_e =
      std::pow((gamma_ - 1.0) / std::pow(-w[dim_ + 1], gamma_), 1.0 / (gamma_ - 1.0)) *
      std::exp(-s / (gamma_ - 1.0));
  State u(dim_ + 2);
  u[0] = -rho_e * w[dim_ + 1];
  for (int i = 0; i < dim_; ++i) u[1 + i] = rho_e * w[1 + i];
  u[dim_ + 1] = rho_e * (1.0 - q / (2.0 * w[dim_ + 1]));
  check_admissible(u);
  return u;
}

void Euler::potential(const State& u, double* psi) const {
  for (int i = 0; i < dim_; ++i) psi[i] = u[1 + i];
}

// du/dv, the symmetric A0 matrix of Hughes, Franca & Mallet.
DenseMatrix Euler::jacobian_dudv(const State& u) const {
  check_admissible(u);
  const int n = dim_ + 2;
  const double rho = u[0];
  const double p = pressure(u);
  const double e_tot = u[dim_ + 1];
  const double h = (e_tot + p) / rho;  // total specific enthalpy
  const double a2 = gamma_ * p / rho;
  DenseMatrix m(n, n);
  m(0, 0) = rho;
  for (int i = 0; i < dim_; ++i) {
    m(0, 1 + i) = u[1 + i];
    m(1 + i, 0) = u[1 + i];
    for (int j = 0; j < dim_; ++j) m(1 + i, 1 + j) = u[1 + i] * u[1 + j] / rho;
    m(1 + i, 1 + i) += p;
    m(1 + i, n - 1) = h * u[1 + i];
    m(n - 1, 1 + i) = h * u[1 + i];
  }
  m(0, n - 1) = e_tot;
  m(n - 1, 0) = e_tot;
  m(n - 1, n - 1) = rho * h * h - a2 * p / (gamma_ - 1.0);
  return m;
}

// Chandrashekar entropy-conservative fluxes.
void Euler::ec_flux(const State& ul, const State& ur, State* out) const {
  check_admissible(ul);
  check_admissible(ur);
  const double rl = ul[0], rr = ur[0];
  const double pl = pressure(ul), pr = pressure(ur);
  const double bl = rl / (2.0 * pl), br = rr / (2.0 * pr);
  const double rho_log = log_mean(rl, rr);
  const double beta_log = log_mean(bl, br);
  const double rho_avg = 0.5 * (rl + rr);
  const double beta_avg = 0.5 * (bl + br);
  const double p_avg = rho_avg / (2.0 * beta_avg);

  double ubar[2] = {0.0, 0.0};
  double u2_avg = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double vl = ul[1 + i] / rl;
    const double vr = ur[1 + i] / rr;
    ubar[i] = 0.5 * (vl + vr);
    u2_avg += 2.0 * ubar[i] * ubar[i] - 0.5 * (vl * vl + vr * vr);
  }
  const double e_avg =
      rho_log / (2.0 * beta_log * (gamma_ - 1.0)) + rho_log * u2_avg / 2.0;

  for (int d = 0; d < dim_; ++d) {
    State& f = out[d];
    f.resize(dim_ + 2);
    const double mass = rho_log * ubar[d];
    f[0] = mass;
    for (int i = 0; i < dim_; ++i) f[1 + i] = mass * ubar[i];
    f[1 + d] += p_avg;
    f[dim_ + 1] = (e_avg + p_avg) * ubar[d];
  }
}

State Euler::mirror_state(const State& u, const double* normal) const {
  State m = u;
  if (dim_ == 1) {
    m[1] = -u[1];
    return m;
  }
  const double un = u[1] * normal[0] + u[2] * normal[1];
  m[1] = u[1] - 2.0 * un * normal[0];
  m[2] = u[2] - 2.0 * un * normal[1];
  return m;
}

double Euler::max_wavespeed(const State& u) const {
  check_admissible(u);
  const double c = std::sqrt(gamma_ * pressure(u) / u[0]);
  double vmax = 0.0;
  for (int i = 0; i < dim_; ++i) vmax = std::max(vmax, std::abs(u[1 + i] / u[0]));
  return vmax + c;
}

double Euler::normal_wavespeed(const State& u, const double* normal) const {
  check_admissible(u);
  const double c = std::sqrt(gamma_ * pressure(u) / u[0]);
  double un = u[1] * normal[0];
  if (dim_ == 2) un += u[2] * normal[1];
  return std::abs(un / u[0]) + c;
}

std::shared_ptr<const ConservationLaw> make_law(const std::string& name, double gamma) {
  if (name == "burgers") return std::make_shared<Burgers>();
  if (name == "euler1d") return std::make_shared<Euler>(1, gamma);
  if (name == "euler2d") return std::make_shared<Euler>(2, gamma);
  throw Error("unknown conservation law: " + name);
}

void check_field_admissible(const ConservationLaw& law, const StateField& f) {
  for (Index i = 0; i < f.rows(); ++i) {
    try {
      law.check_admissible(row_state(f, i));
    } catch (const PositivityError& e) {
      throw PositivityError(std::string(e.what()) + " at point " + std::to_string(i),
                            i, e.quantity);
    }
  }
}

}  // namespace esrom
