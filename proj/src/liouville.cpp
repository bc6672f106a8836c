#include "oqb/liouville.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace oqb {

namespace {

Eigen::Matrix4cd kron(const mat2& a, const mat2& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Eigen::Vector4cd vec(const mat2& m) {
  return Eigen::Map<const Eigen::Vector4cd>(m.data());  // column-major = column stacking
}

mat2 unvec(const Eigen::Vector4cd& v) {
  return Eigen::Map<const mat2>(v.data());
}

// log(rho) under the spectral floor; flags whether the floor was active.
mat2 floored_log(const qubit_state& rho, bool* regularized = nullptr) {
  Eigen::SelfAdjointEigenSolver<mat2> es(rho.matrix());
  Eigen::Vector2d lam = es.eigenvalues();
  bool reg = false;
  for (int i = 0; i < 2; ++i) {
    if (lam(i) < k_log_floor) {
      lam(i) = k_log_floor;
      reg = true;
    }
  }
  if (regularized) *regularized = reg;
  return es.eigenvectors() * lam.array().log().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

dephasing_generator dephasing_generator::pure_dephasing(double gamma) {
  if (gamma < 0.0) throw config_error("dephasing rate must be nonnegative");
  return {gamma};
}

mat2 dissipator(const mat2& rho, const dephasing_generator& g) {
  const mat2 n = dephasing_generator::number_projector();
  return g.rate * (n * rho * n - 0.5 * (n * rho + rho * n));
}

liouvillian::liouvillian(const hamiltonian& h, const dephasing_generator& g) : h_(h), g_(g) {
  const mat2 id = mat2::Identity();
  const mat2 n = dephasing_generator::number_projector();
  const cplx i_unit(0.0, 1.0);
  l_ = -i_unit * (kron(id, h.matrix()) - kron(h.matrix().transpose(), id)) +
       g.rate * (kron(n.transpose(), n) -
                 0.5 * (kron(id, n) + kron(n.transpose(), id)));
}

mat2 liouvillian::apply_generator(const mat2& rho) const {
  return unvec(l_ * vec(rho));
}

const propagator& liouvillian::step(double dt) const {
  if (dt < 0.0) throw numerical_error("propagation requires dt >= 0");
  std::lock_guard lock(cache_mutex_);
  auto it = cache_.find(dt);
  if (it == cache_.end()) {
    auto p = std::make_unique<propagator>();
    p->dt = dt;
    p->matrix = (l_ * dt).exp();
    Eigen::Map<Eigen::Matrix4cd>(p->columns.data()) = p->matrix;
    it = cache_.emplace(dt, std::move(p)).first;
  }
  return *it->second;
}

qubit_state liouvillian::propagate(const qubit_state& rho, double dt) const {
  const propagator& p = step(dt);
  Eigen::Vector4cd out;
  p.apply(vec(rho.matrix()).data(), out.data());
  try {
    return qubit_state::from_matrix(unvec(out));
  } catch (const state_error& e) {
    throw numerical_error(std::string("propagator produced an invalid state: ") + e.what());
  }
}

steady_state_result steady_state(const liouvillian& l) {
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(l.generator(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int dim = 0;
  for (int i = 0; i < 4; ++i)
    if (sv(i) < 1e-9) ++dim;
  if (dim == 0) throw numerical_error("generator has no numerical null space");

  // Project the maximally mixed state onto the null space; for every unital
  // generator in this family that projection is itself a fixed point.
  const Eigen::Matrix4cd v = svd.matrixV();
  Eigen::Vector4cd proj = Eigen::Vector4cd::Zero();
  const Eigen::Vector4cd target = vec(0.5 * mat2::Identity());
  for (int i = 4 - dim; i < 4; ++i) proj += v.col(i) * (v.col(i).adjoint() * target);

  mat2 cand = unvec(proj);
  cand = 0.5 * (cand + cand.adjoint());
  double tr = cand.trace().real();
  if (std::abs(tr) < 1e-9) {
    // fall back to the Hermitized strongest null vector
    cand = unvec(v.col(3));
    cand = 0.5 * (cand + cand.adjoint());
    tr = cand.trace().real();
    if (std::abs(tr) < 1e-9)
      throw numerical_error("null space contains no unit-trace Hermitian state");
  }
  cand /= tr;

  qubit_state state = qubit_state::from_matrix(cand);
  const double residual = (l.generator() * vec(state.matrix())).norm();
  if (residual > 1e-10)
    throw numerical_error("steady-state residual " + std::to_string(residual));
  return {state, dim};
}

effective_temperature_result effective_temperature(const steady_state_result& ss,
                                                   const hamiltonian& h) {
  const mat2& rho = ss.state.matrix();
  const double p_e = (rho * h.excited_state().matrix()).trace().real();
  const double p_g = (rho * h.ground_state().matrix()).trace().real();
  // energy-basis coherence
  const cplx coh = (h.excited_ket().adjoint() * rho * h.ground_ket())(0, 0);
  if (std::abs(coh) > 1e-9)
    throw numerical_error("steady state carries energy-basis coherence; no Gibbs form");
  if (std::abs(p_g - p_e) < 1e-9) return {true, 0.0, false};
  const double t = h.capacity() / std::log(p_g / p_e);
  return {false, t, p_e > p_g};
}

double entropy_production_rate(const qubit_state& rho, const liouvillian& l,
                               const steady_state_result& ss) {
  const mat2 drho = l.apply_generator(rho.matrix());
  const mat2 diff = floored_log(rho) - floored_log(ss.state);
  return -(drho * diff).trace().real();
}

double energy_current(const qubit_state& rho, const hamiltonian& h,
                      const dephasing_generator& g) {
  return (dissipator(rho.matrix(), g) * h.matrix()).trace().real();
}

entropy_rate_result entropy_rate(const qubit_state& rho, const liouvillian& l) {
  bool reg = false;
  const mat2 log_rho = floored_log(rho, &reg);
  const mat2 drho = l.apply_generator(rho.matrix());
  return {-(drho * log_rho).trace().real(), reg};
}

double relative_entropy(const qubit_state& rho, const qubit_state& sigma) {
  const mat2 diff = floored_log(rho) - floored_log(sigma);
  return (rho.matrix() * diff).trace().real();
}

}  // namespace oqb
