#pragma once

#include "esrom/types.hpp"

#include <memory>
#include <string>

namespace esrom {

/// (a - b) / (log a - log b) with the series branch of Ismail-Roe near a = b.
double log_mean(double a, double b);

/// A conservation law bundles the flux, the entropy pair (S, psi), the
/// entropy-variable maps and Jacobian, the entropy-conservative two-point
/// flux, and the wall-state machinery. All members are pure and reentrant.
class ConservationLaw {
 public:
  virtual ~ConservationLaw() = default;

  virtual int n_components() const = 0;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  virtual bool is_admissible(const State& u) const = 0;
  /// Throws PositivityError (point = -1) if u is inadmissible.
  virtual void check_admissible(const State& u) const = 0;

  /// Analytic flux, one State per direction written to out[0..dim-1].
  virtual void flux(const State& u, State* out) const = 0;

  virtual double entropy(const State& u) const = 0;
  virtual State entropy_variables(const State& u) const = 0;
  virtual State conservative_from_entropy(const State& v) const = 0;
  /// Entropy potential per direction, psi[0..dim-1].
  virtual void potential(const State& u, double* psi) const = 0;

  /// du/dv, symmetric positive definite on admissible states.
  virtual DenseMatrix jacobian_dudv(const State& u) const = 0;

  /// Entropy-conservative two-point flux, one State per direction.
  virtual void ec_flux(const State& ul, const State& ur, State* out) const = 0;

  /// Reflect the normal velocity; density and pressure preserved.
  virtual State mirror_state(const State& u, const double* normal) const = 0;

  /// max_i |u_i| + c, the CFL wavespeed.
  virtual double max_wavespeed(const State& u) const = 0;
  /// |u . n| + c.
  virtual double normal_wavespeed(const State& u, const double* normal) const = 0;

  /// (lambda/2) (ul - ur); scaled by the face normal component when composed
  /// into a directional boundary flux, which fixes the dissipative sign.
  State lax_friedrichs_penalty(const State& ul, const State& ur, const double* normal) const;
};

class Burgers final : public ConservationLaw {
 public:
  int n_components() const override { return 1; }
  int dim() const override { return 1; }
  std::string name() const override { return "burgers"; }
  bool is_admissible(const State&) const override { return true; }
  void check_admissible(const State&) const override {}
  void flux(const State& u, State* out) const override;
  double entropy(const State& u) const override { return 0.5 * u[0] * u[0]; }
  State entropy_variables(const State& u) const override { return u; }
  State conservative_from_entropy(const State& v) const override { return v; }
  void potential(const State& u, double* psi) const override {
    psi[0] = u[0] * u[0] * u[0] / 6.0;
  }
  DenseMatrix jacobian_dudv(const State&) const override {
    return DenseMatrix::Identity(1, 1);
  }
  void ec_flux(const State& ul, const State& ur, State* out) const override;
  State mirror_state(const State& u, const double*) const override { return -u; }
  double max_wavespeed(const State& u) const override { return std::abs(u[0]); }
  double normal_wavespeed(const State& u, const double*) const override {
    return std::abs(u[0]);
  }
};

/// Compressible Euler, 1D (rho, rho u, E) or 2D (rho, rho u, rho v, E).
class Euler final : public ConservationLaw {
 public:
  explicit Euler(int dim, double gamma = 1.4) : dim_(dim), gamma_(gamma) {}

  int n_components() const override { return dim_ + 2; }
  int dim() const override { return dim_; }
  std::string name() const override { return dim_ == 1 ? "euler1d" : "euler2d"; }
  double gamma() const { return gamma_; }

  double pressure(const State& u) const;
  bool is_admissible(const State& u) const override;
  void check_admissible(const State& u) const override;
  void flux(const State& u, State* out) const override;
  double entropy(const State& u) const override;
  State entropy_variables(const State& u) const override;
  State conservative_from_entropy(const State& v) const override;
  void potential(const State& u, double* psi) const override;
  DenseMatrix jacobian_dudv(const State& u) const override;
  void ec_flux(const State& ul, const State& ur, State* out) const override;
  State mirror_state(const State& u, const double* normal) const override;
  double max_wavespeed(const State& u) const override;
  double normal_wavespeed(const State& u, const double* normal) const override;

 private:
  int dim_;
  double gamma_;
};

std::shared_ptr<const ConservationLaw> make_law(const std::string& name, double gamma = 1.4);

/// Row i of the field as a State.
inline State row_state(const StateField& f, Index i) {
  return f.row(i).transpose();
}

/// check_admissible over all rows; PositivityError carries the row index.
void check_field_admissible(const ConservationLaw& law, const StateField& f);

}  // namespace esrom
