#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "oqb/errors.hpp"

// Qubit density-matrix primitives in natural units (hbar = 1). Basis
// convention throughout: |1> = [1,0]^T and |0> = [0,1]^T, so the top-left
// matrix entry is the population of |1>.

namespace oqb {

using cplx = std::complex<double>;
using mat2 = Eigen::Matrix2cd;
using vec2 = Eigen::Vector2cd;

// Validation tolerances shared across the library.
inline constexpr double k_herm_tol = 1e-10;
inline constexpr double k_trace_tol = 1e-10;
inline constexpr double k_psd_clip = 1e-8;    // eigenvalues in [-clip, 0) are clipped
inline constexpr double k_log_floor = 1e-12;  // spectral floor inside logarithms

// Eigenvalues of a Hermitian 2x2 matrix, ascending.
std::pair<double, double> hermitian_eigenvalues(const mat2& m);

// Immutable, validated density operator of a qubit.
//
// Construction enforces Hermiticity and unit trace within 1e-10 and positive
// semidefiniteness up to the clip policy: an eigenvalue in [-1e-8, 0) is
// clipped to zero and the state renormalized, anything lower is rejected.
class qubit_state {
 public:
  // default: the maximally mixed state
  qubit_state() : rho_(0.5 * mat2::Identity()) {}

  static qubit_state from_matrix(const mat2& rho);
  static qubit_state pure(const vec2& psi);
  static qubit_state maximally_mixed();

  const mat2& matrix() const noexcept { return rho_; }
  cplx entry(int i, int j) const { return rho_(i, j); }
  double population_top() const { return rho_(0, 0).real(); }
  cplx coherence() const { return rho_(0, 1); }

  // Ascending eigenvalues.
  std::pair<double, double> eigenvalues() const { return hermitian_eigenvalues(rho_); }
  bool is_pure(double tol = 1e-9) const;

  // Bloch vector (x, y, z) with rho = (I + r.sigma)/2.
  Eigen::Vector3d bloch() const;

 private:
  explicit qubit_state(const mat2& rho) : rho_(rho) {}
  mat2 rho_;
};

// Static qubit Hamiltonian with cached eigen-decomposition. Degenerate
// spectra (gap below 1e-9) are rejected at construction.
class hamiltonian {
 public:
  static hamiltonian from_matrix(const mat2& h);
  // Omega * sigma_x + omega * sigma_z
  static hamiltonian xz(double big_omega, double small_omega);

  const mat2& matrix() const noexcept { return h_; }
  double ground_energy() const noexcept { return e_ground_; }
  double excited_energy() const noexcept { return e_excited_; }
  double capacity() const noexcept { return e_excited_ - e_ground_; }

  const qubit_state& excited_state() const noexcept { return excited_; }
  const qubit_state& ground_state() const noexcept { return ground_; }
  // Eigenvectors under the global-phase convention that the first component
  // with modulus above 1e-12 is real and positive.
  const vec2& excited_ket() const noexcept { return ket_e_; }
  const vec2& ground_ket() const noexcept { return ket_g_; }

 private:
  hamiltonian(const mat2& h, double eg, double ee, vec2 kg, vec2 ke);
  mat2 h_;
  double e_ground_, e_excited_;
  vec2 ket_g_, ket_e_;
  qubit_state ground_, excited_;
};

// Probabilities of the two projective energy-measurement outcomes.
struct outcome_distribution {
  double p_excited;
  double p_ground;

  static outcome_distribution make(double p_excited);
  // P_e = Tr[rho rho_e]
  static outcome_distribution of_state(const qubit_state& rho, const hamiltonian& h);
};

// (rho_e, rho_g): projectors onto the max/min energy eigenvectors.
std::pair<qubit_state, qubit_state> max_min_energy_states(const hamiltonian& h);

// T(rho, sigma) = 0.5 Tr|rho - sigma|
double trace_distance(const qubit_state& rho, const qubit_state& sigma);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const qubit_state& rho, const qubit_state& sigma);
// Shortcut valid when rho is pure: Tr[rho sigma].
double fidelity_pure(const qubit_state& rho, const qubit_state& sigma);

// -sum lambda log lambda, natural log, eigenvalues below 1e-12 contribute 0.
double von_neumann_entropy(const qubit_state& rho);
double shannon_entropy(const outcome_distribution& p);

// Tr[H rho]
double energy(const qubit_state& rho, const hamiltonian& h);

// Tr[H rho] minus the passive-state energy (descending state spectrum paired
// with ascending Hamiltonian spectrum).
double ergotropy(const qubit_state& rho, const hamiltonian& h);

}  // namespace oqb
