#include "oqb/qubit.hpp"

#include <algorithm>
#include <cmath>

namespace oqb {

namespace {

double xlogx(double x) {
  return x < k_log_floor ? 0.0 : x * std::log(x);
}

// Normalized eigenvector of a Hermitian 2x2 matrix for eigenvalue lam, with
// the first component of modulus > 1e-12 made real positive.
vec2 hermitian_eigenvector(const mat2& m, double lam) {
  const cplx a = m(0, 0) - lam;
  const cplx b = m(0, 1);
  const cplx d = m(1, 1) - lam;
  // rows of (m - lam I) are both orthogonal to the eigenvector; pick the
  // better-conditioned one.
  vec2 v;
  if (std::abs(a) + std::abs(b) >= std::abs(b) + std::abs(d)) {
    v << -b, a;
  } else {
    v << -d, std::conj(b);
  }
  double n = v.norm();
  if (n < 1e-14) {  // matrix is (numerically) lam * I
    v << 1.0, 0.0;
    n = 1.0;
  }
  v /= n;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

}  // namespace

std::pair<double, double> hermitian_eigenvalues(const mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {mean - r, mean + r};
}

qubit_state qubit_state::from_matrix(const mat2& rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > k_herm_tol)
    throw state_error("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
  mat2 m = 0.5 * (rho + rho.adjoint());
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > k_trace_tol)
    throw state_error("density matrix trace deviates from 1 by " + std::to_string(tr - 1.0));
  auto [lo, hi] = hermitian_eigenvalues(m);
  if (lo < -k_psd_clip)
    throw state_error("density matrix not PSD (min eigenvalue " + std::to_string(lo) + ")");
  if (lo < 0.0) {
    // clip the negative eigenvalue and renormalize
    const vec2 v_lo = hermitian_eigenvector(m, lo);
    m -= lo * (v_lo * v_lo.adjoint());
    m /= m.trace().real();
  }
  return qubit_state(m);
}

qubit_state qubit_state::pure(const vec2& psi) {
  const double n = psi.norm();
  if (n < 1e-12) throw state_error("cannot build a state from a null ket");
  const vec2 v = psi / n;
  return qubit_state(v * v.adjoint());
}

qubit_state qubit_state::maximally_mixed() {
  return qubit_state(0.5 * mat2::Identity());
}

bool qubit_state::is_pure(double tol) const {
  auto [lo, hi] = eigenvalues();
  (void)hi;
  return std::abs(lo) <= tol;
}

Eigen::Vector3d qubit_state::bloch() const {
  return {2.0 * rho_(0, 1).real(), -2.0 * rho_(0, 1).imag(),
          rho_(0, 0).real() - rho_(1, 1).real()};
}

hamiltonian::hamiltonian(const mat2& h, double eg, double ee, vec2 kg, vec2 ke)
    : h_(h),
      e_ground_(eg),
      e_excited_(ee),
      ket_g_(std::move(kg)),
      ket_e_(std::move(ke)),
      ground_(qubit_state::pure(ket_g_)),
      excited_(qubit_state::pure(ket_e_)) {}

hamiltonian hamiltonian::from_matrix(const mat2& h) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw state_error("Hamiltonian must be Hermitian");
  const mat2 hs = 0.5 * (h + h.adjoint());
  auto [eg, ee] = hermitian_eigenvalues(hs);
  if (ee - eg < 1e-9)
    throw state_error("degenerate Hamiltonian spectrum: gap " + std::to_string(ee - eg));
  return hamiltonian(hs, eg, ee, hermitian_eigenvector(hs, eg), hermitian_eigenvector(hs, ee));
}

hamiltonian hamiltonian::xz(double big_omega, double small_omega) {
  mat2 h;
  h << small_omega, big_omega, big_omega, -small_omega;
  return from_matrix(h);
}

outcome_distribution outcome_distribution::make(double p_excited) {
  if (!(p_excited >= -1e-12 && p_excited <= 1.0 + 1e-12))
    throw state_error("outcome probability outside [0,1]");
  const double p = std::clamp(p_excited, 0.0, 1.0);
  return {p, 1.0 - p};
}

outcome_distribution outcome_distribution::of_state(const qubit_state& rho,
                                                    const hamiltonian& h) {
  const double pe = (rho.matrix() * h.excited_state().matrix()).trace().real();
  return make(pe);
}

std::pair<qubit_state, qubit_state> max_min_energy_states(const hamiltonian& h) {
  return {h.excited_state(), h.ground_state()};
}

double trace_distance(const qubit_state& rho, const qubit_state& sigma) {
  auto [lo, hi] = hermitian_eigenvalues(rho.matrix() - sigma.matrix());
  return 0.5 * (std::abs(lo) + std::abs(hi));
}

double fidelity(const qubit_state& rho, const qubit_state& sigma) {
  // sqrt(rho) through the eigen-decomposition, then the Uhlmann trace.
  Eigen::SelfAdjointEigenSolver<mat2> es(rho.matrix());
  const Eigen::Vector2d lam = es.eigenvalues().cwiseMax(0.0);
  const mat2 sqrt_rho =
      es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  const mat2 m = sqrt_rho * sigma.matrix() * sqrt_rho;
  auto [lo, hi] = hermitian_eigenvalues(m);
  // rounding noise below the machine floor would otherwise enter as sqrt(eps)
  if (lo < 1e-14) lo = 0.0;
  const double f = std::sqrt(lo) + std::sqrt(std::max(hi, 0.0));
  return std::clamp(f * f, 0.0, 1.0);
}

double fidelity_pure(const qubit_state& rho, const qubit_state& sigma) {
  return std::clamp((rho.matrix() * sigma.matrix()).trace().real(), 0.0, 1.0);
}

double von_neumann_entropy(const qubit_state& rho) {
  auto [lo, hi] = rho.eigenvalues();
  return std::max(0.0, -xlogx(std::max(lo, 0.0)) - xlogx(std::max(hi, 0.0)));
}

double shannon_entropy(const outcome_distribution& p) {
  return std::max(0.0, -xlogx(p.p_excited) - xlogx(p.p_ground));
}

double energy(const qubit_state& rho, const hamiltonian& h) {
  return (h.matrix() * rho.matrix()).trace().real();
}

double ergotropy(const qubit_state& rho, const hamiltonian& h) {
  auto [lo, hi] = rho.eigenvalues();
  const double passive = hi * h.ground_energy() + lo * h.excited_energy();
  return energy(rho, h) - passive;
}

}  // namespace oqb
