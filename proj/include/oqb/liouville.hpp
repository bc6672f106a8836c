#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "oqb/kernels.hpp"
#include "oqb/qubit.hpp"

// Generator and propagator of the uncontrolled open dynamics
//   d rho / dt = -i [H0, rho] + D[rho],
// with D the pure-dephasing dissipator in the computational basis,
//   D[rho] = gamma (N rho N - {N, rho}/2),  N = |1><1|,
// i.e. the Lindblad dissipator of the jump operator sqrt(gamma) N; coherences
// decay at rate gamma/2. Vectorization is column-stacking, so
// -i[H0, .] maps to -i (I (x) H0 - H0^T (x) I) on vec(rho).

namespace oqb {

struct dephasing_generator {
  double rate = 0.0;  // gamma >= 0

  static dephasing_generator pure_dephasing(double gamma);
  // N = |1><1| = diag(1, 0)
  static mat2 number_projector() {
    mat2 n;
    n << 1.0, 0.0, 0.0, 0.0;
    return n;
  }
};

// D[rho]; Hermitian and traceless.
mat2 dissipator(const mat2& rho, const dephasing_generator& g);

// Matrix exponential of L*dt, stored column-major for the matvec kernels.
struct propagator {
  double dt = 0.0;
  Eigen::Matrix4cd matrix;
  std::array<cplx, 16> columns;

  void apply(const cplx* x, cplx* y) const { kernels::active().matvec4(columns.data(), x, y); }
};

class liouvillian {
 public:
  liouvillian(const hamiltonian& h, const dephasing_generator& g);

  const Eigen::Matrix4cd& generator() const noexcept { return l_; }
  const hamiltonian& h0() const noexcept { return h_; }
  const dephasing_generator& noise() const noexcept { return g_; }

  // L[rho] as a 2x2 matrix.
  mat2 apply_generator(const mat2& rho) const;

  // Cached exp(L dt); thread-safe, keyed by the exact step value.
  const propagator& step(double dt) const;

  // exp(L dt) applied to rho, re-validated under the qubit_state clip policy.
  qubit_state propagate(const qubit_state& rho, double dt) const;

 private:
  hamiltonian h_;
  dephasing_generator g_;
  Eigen::Matrix4cd l_;
  mutable std::map<double, std::unique_ptr<propagator>> cache_;
  mutable std::mutex cache_mutex_;
};

struct steady_state_result {
  qubit_state state;
  int null_space_dim = 0;  // singular values of L below 1e-9
  bool unique() const noexcept { return null_space_dim == 1; }
};

// Unit-trace Hermitian PSD null vector of L. Throws numerical_error when no
// such vector exists.
steady_state_result steady_state(const liouvillian& l);

struct effective_temperature_result {
  bool unbounded = false;   // populations equal within 1e-9
  double value = 0.0;       // meaningful only when !unbounded
  bool inverted = false;    // negative temperature (p_e > p_g)
};

// Gibbs temperature reproducing the steady-state populations in the energy
// basis. Requires the steady state to be diagonal in that basis within 1e-9.
effective_temperature_result effective_temperature(const steady_state_result& ss,
                                                   const hamiltonian& h);

// Spohn entropy production rate of the uncontrolled generator,
// -Tr[L[rho](log rho - log rho_ss)], spectral floor 1e-12.
double entropy_production_rate(const qubit_state& rho, const liouvillian& l,
                               const steady_state_result& ss);

// Energy current driven by the environment, Tr[D[rho] H].
double energy_current(const qubit_state& rho, const hamiltonian& h,
                      const dephasing_generator& g);

struct entropy_rate_result {
  double value = 0.0;
  bool regularized = false;  // the spectral floor was active
};

// d/dt of the von Neumann entropy along the uncontrolled flow,
// -Tr[L[rho] log rho] (the unitary part contributes exactly zero).
entropy_rate_result entropy_rate(const qubit_state& rho, const liouvillian& l);

// S(rho || sigma) with the shared spectral floor; used for the contraction
// checks of the second-law inequality.
double relative_entropy(const qubit_state& rho, const qubit_state& sigma);

}  // namespace oqb
