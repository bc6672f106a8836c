#include "oqb/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

namespace oqb {

namespace {

constexpr double k_pi = 3.14159265358979323846;

mat2 y_rotation(double phi) {
  mat2 v;
  v << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return v;
}

double zero_population(const mat2& rho) { return rho(1, 1).real(); }

// Per-realization engine. Owns nothing; all shared state is read-only.
struct run_context {
  const protocol_config& cfg;
  liouvillian liouv;
  const propagator& step;
  qubit_state rho_e;
  qubit_state rho_g;
  double e_excited;
  double e_ground;
  qubit_state rho0;
  fast_unitary_result first_unitary;
  fast_unitary_result reinit_unitary;
  int ns;  // grid steps per charging segment
  int nt;  // grid steps per Zeno period
  int grid;

  explicit run_context(const protocol_config& c)
      : cfg(c),
        liouv(c.h0, dephasing_generator::pure_dephasing(c.gamma)),
        step(liouv.step(c.h)),
        rho_e(c.h0.excited_state()),
        rho_g(c.h0.ground_state()),
        e_excited(c.h0.excited_energy()),
        e_ground(c.h0.ground_energy()),
        rho0(c.initial_state()),
        first_unitary(fast_unitary_init(rho0, c.h0)),
        reinit_unitary(fast_unitary_init(rho_g, c.h0)),
        ns(c.steps_per_t_star()),
        nt(c.steps_per_tau()),
        grid(c.grid_points()) {}
};

qubit_state propagate_one_step(const run_context& ctx, const qubit_state& s) {
  Eigen::Vector4cd out;
  ctx.step.apply(Eigen::Map<const Eigen::Vector4cd>(s.matrix().data()).data(), out.data());
  try {
    return qubit_state::from_matrix(Eigen::Map<const mat2>(out.data()));
  } catch (const state_error& e) {
    throw numerical_error(std::string("propagation produced an invalid state: ") + e.what());
  }
}

trajectory_record run_one(const run_context& ctx, int index) {
  const protocol_config& cfg = ctx.cfg;
  rng_stream rng(cfg.master_seed, static_cast<std::uint64_t>(index));
  const int grid = ctx.grid;

  trajectory_record rec;
  rec.times.resize(grid);
  rec.states.reserve(grid);
  rec.ledger.times.resize(grid);
  rec.ledger.work.resize(grid);
  rec.ledger.loss.resize(grid);
  rec.ledger.capacity = cfg.h0.capacity();

  const dephasing_generator noise = dephasing_generator::pure_dephasing(cfg.gamma);

  enum class phase_t { charging, zeno };
  phase_t phase = phase_t::charging;

  qubit_state cur = ctx.first_unitary.state;
  double work_done = 0.0;           // completed ledger contributions
  double loss_cum = 0.0;            // trapezoid of the energy current
  double attempt_ref_energy = energy(ctx.rho0, cfg.h0);  // E at the pre-unitary start
  int segment_start = 0;
  double segment_loss = 0.0;
  double f_prev = energy_current(cur, cfg.h0, noise);
  int next_meas = ctx.ns;
  rec.attempts = 1;

  auto record_point = [&](int k) {
    rec.times[k] = k * cfg.h;
    rec.states.push_back(cur);
    rec.ledger.times[k] = rec.times[k];
    double ramp = 0.0;
    if (phase == phase_t::charging && k > segment_start)
      ramp = energy(cur, cfg.h0) - attempt_ref_energy;
    rec.ledger.work[k] = work_done + ramp;
    rec.ledger.loss[k] = loss_cum;
  };

  auto close_segment = [&](double duration) {
    rec.segment_losses.push_back(segment_loss);
    rec.segment_durations.push_back(duration);
  };

  record_point(0);

  for (int k = 1; k < grid; ++k) {
    cur = propagate_one_step(ctx, cur);
    const double f_cur = energy_current(cur, cfg.h0, noise);
    const double inc = 0.5 * cfg.h * (f_prev + f_cur);
    loss_cum += inc;
    segment_loss += inc;
    f_prev = f_cur;

    if (k == next_meas) {
      const double t = k * cfg.h;
      const double e_pre = energy(cur, cfg.h0);
      const auto p = outcome_distribution::of_state(cur, cfg.h0);
      const double landauer = landauer_cost(p, cfg.beta);
      const bool excited = rng.uniform() < p.p_excited;

      measurement_event ev;
      ev.time = t;
      ev.result = excited ? outcome::excited : outcome::ground;
      ev.phase = phase == phase_t::zeno
                     ? measurement_phase::zeno
                     : (rec.attempts == 1 ? measurement_phase::first : measurement_phase::reinit);
      ev.p_excited = p.p_excited;
      ev.energy_before = e_pre;
      ev.energy_after = excited ? ctx.e_excited : ctx.e_ground;
      ev.landauer = landauer;
      rec.events.push_back(ev);

      if (phase == phase_t::charging) {
        // the attempt's evolution work, fast unitary included
        rec.ledger.entries.push_back({t, ledger_kind::evol, e_pre - attempt_ref_energy});
        work_done += e_pre - attempt_ref_energy;
      } else {
        ++rec.zeno_measurements;
        if (!excited) ++rec.zeno_failures;
        rec.ledger.entries.push_back({t, ledger_kind::zeno_loss, segment_loss});
      }
      rec.ledger.entries.push_back({t, ledger_kind::landauer, landauer});
      work_done += landauer;
      rec.ledger.entries.push_back({t, ledger_kind::meas, ev.energy_after - e_pre});
      work_done += ev.energy_after - e_pre;

      close_segment((k - segment_start) * cfg.h);
      segment_start = k;
      segment_loss = 0.0;

      if (excited) {
        cur = ctx.rho_e;
        phase = phase_t::zeno;
        next_meas = k + ctx.nt;
      } else {
        // re-initialize: fast unitary from rho_g, then free evolution
        cur = ctx.reinit_unitary.state;
        phase = phase_t::charging;
        ++rec.attempts;
        attempt_ref_energy = ctx.e_ground;
        next_meas = k + ctx.ns;
      }
      f_prev = energy_current(cur, cfg.h0, noise);
    }

    record_point(k);
  }

  // close the truncated tail segment
  if (segment_start < grid - 1) {
    close_segment((grid - 1 - segment_start) * cfg.h);
    if (phase == phase_t::charging) {
      const double partial = energy(cur, cfg.h0) - attempt_ref_energy;
      rec.ledger.entries.push_back({rec.times.back(), ledger_kind::evol, partial});
      work_done += partial;
    }
  }
  return rec;
}

std::size_t flat_size(int grid) { return static_cast<std::size_t>(grid) * 11 + 3; }

// Layout: [8*grid state components][grid fidelity][grid work][grid loss]
// [attempts, zeno_measurements, zeno_failures]
void flatten(const trajectory_record& rec, const qubit_state& rho_e, std::vector<double>& out) {
  const int grid = static_cast<int>(rec.times.size());
  out.resize(flat_size(grid));
  double* p = out.data();
  for (int k = 0; k < grid; ++k) {
    const mat2& m = rec.states[k].matrix();
    std::memcpy(p + 8 * k, m.data(), 8 * sizeof(double));
  }
  p += 8 * grid;
  for (int k = 0; k < grid; ++k)
    p[k] = fidelity_pure(rho_e, rec.states[k]);
  p += grid;
  std::memcpy(p, rec.ledger.work.data(), grid * sizeof(double));
  p += grid;
  std::memcpy(p, rec.ledger.loss.data(), grid * sizeof(double));
  p += grid;
  p[0] = rec.attempts;
  p[1] = rec.zeno_measurements;
  p[2] = rec.zeno_failures;
}

}  // namespace

protocol_config protocol_config::defaults() {
  return protocol_config{hamiltonian::xz(3.0, 1.0)};
}

void protocol_config::validate() const {
  if (!(h > 0.0)) throw config_error("recording step h must be positive");
  if (!(h <= tau && tau <= t_star && t_star <= t_fin))
    throw config_error("time scales must satisfy 0 < h <= tau <= t_star <= t_fin");
  if (gamma < 0.0) throw config_error("gamma must be nonnegative");
  if (!(beta > 0.0)) throw config_error("beta must be positive");
  if (realizations < 1) throw config_error("need at least one realization");
}

int protocol_config::steps_per_t_star() const {
  return static_cast<int>(std::llround(t_star / h));
}

int protocol_config::steps_per_tau() const {
  return std::max(1, static_cast<int>(std::llround(tau / h)));
}

int protocol_config::grid_points() const {
  return static_cast<int>(std::llround(t_fin / h)) + 1;
}

fast_unitary_result fast_unitary_init(const qubit_state& rho0, const hamiltonian& h) {
  (void)h;  // the target |0><0| is basis-fixed; kept for interface symmetry
  const mat2& r = rho0.matrix();
  const bool in_plane = std::abs(r(0, 1).imag()) <= 1e-9;

  fast_unitary_result out;
  out.off_plane = !in_plane;
  if (rho0.is_pure(1e-9) && in_plane) {
    const double num = r(0, 0).real();
    const double den = r(1, 0).real();
    if (std::abs(den) >= 1e-12)
      out.angle = std::atan(num / den);
    else
      // arctan branch at a vanishing denominator: pi/2 rotation, except when
      // the state already sits on the target and no rotation is needed
      out.angle = std::abs(num) < 1e-12 ? 0.0 : 0.5 * k_pi;
    out.via_formula = true;
  } else {
    // maximize <0|V rho V^dag|0>; the overlap is a sinusoid in 2*phi, so a
    // coarse grid plus ternary refinement reaches machine precision
    auto overlap = [&](double phi) {
      const mat2 v = y_rotation(phi);
      return zero_population(v * r * v.adjoint());
    };
    double best_phi = 0.0, best = -1.0;
    const int n = 181;
    for (int i = 0; i < n; ++i) {
      const double phi = -0.5 * k_pi + k_pi * i / n;
      const double f = overlap(phi);
      if (f > best) {
        best = f;
        best_phi = phi;
      }
    }
    double lo = best_phi - k_pi / n, hi = best_phi + k_pi / n;
    while (hi - lo > 1e-12) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (overlap(m1) < overlap(m2))
        lo = m1;
      else
        hi = m2;
    }
    out.angle = 0.5 * (lo + hi);
    out.via_formula = false;
  }
  const mat2 v = y_rotation(out.angle);
  out.state = qubit_state::from_matrix(v * r * v.adjoint());
  return out;
}

init_segment initialize(const qubit_state& rho0, const protocol_config& cfg,
                        const liouvillian& l) {
  init_segment seg;
  seg.unitary = fast_unitary_init(rho0, cfg.h0);
  const int ns = cfg.steps_per_t_star();
  seg.states.reserve(ns + 1);
  seg.states.push_back(seg.unitary.state);
  qubit_state cur = seg.unitary.state;
  for (int k = 0; k < ns; ++k) {
    cur = l.propagate(cur, cfg.h);
    seg.states.push_back(cur);
  }
  seg.rho_i = cur;
  seg.duration = ns * cfg.h;
  seg.de_evol = delta_e_evol(rho0, seg.rho_i, cfg.h0);
  seg.dl_evol = ns > 0 ? loss_integral(seg.states, cfg.h, cfg.h0, l.noise()) : 0.0;
  return seg;
}

std::pair<measurement_event, qubit_state> projective_measurement(
    const qubit_state& rho, const hamiltonian& h, double beta, rng_stream& rng,
    measurement_phase phase, double time) {
  const auto p = outcome_distribution::of_state(rho, h);
  const bool excited = rng.uniform() < p.p_excited;
  measurement_event ev;
  ev.time = time;
  ev.result = excited ? outcome::excited : outcome::ground;
  ev.phase = phase;
  ev.p_excited = p.p_excited;
  ev.energy_before = energy(rho, h);
  ev.energy_after = excited ? h.excited_energy() : h.ground_energy();
  ev.landauer = landauer_cost(p, beta);
  return {ev, excited ? h.excited_state() : h.ground_state()};
}

std::pair<measurement_event, qubit_state> zeno_step(const qubit_state& rho,
                                                    const liouvillian& l,
                                                    const protocol_config& cfg,
                                                    rng_stream& rng, double time) {
  const qubit_state evolved = l.propagate(rho, cfg.tau);
  return projective_measurement(evolved, cfg.h0, cfg.beta, rng, measurement_phase::zeno,
                                time + cfg.tau);
}

qubit_state zeno_premeasurement_state(const liouvillian& l, double tau) {
  return l.propagate(l.h0().excited_state(), tau);
}

trajectory_record run_single(const protocol_config& cfg, int realization_index) {
  cfg.validate();
  run_context ctx(cfg);
  return run_one(ctx, realization_index);
}

trajectory_record uncontrolled_run(const protocol_config& cfg) {
  if (!(cfg.h > 0.0) || cfg.t_fin < cfg.h) throw config_error("invalid time grid");
  run_context ctx(cfg);
  const dephasing_generator noise = dephasing_generator::pure_dephasing(cfg.gamma);

  trajectory_record rec;
  const int grid = ctx.grid;
  rec.times.resize(grid);
  rec.states.reserve(grid);
  rec.ledger.times.resize(grid);
  rec.ledger.work.assign(grid, 0.0);
  rec.ledger.loss.resize(grid);
  rec.ledger.capacity = cfg.h0.capacity();

  qubit_state cur = qubit_state::pure((vec2() << 0.0, 1.0).finished());
  double loss_cum = 0.0;
  double f_prev = energy_current(cur, cfg.h0, noise);
  for (int k = 0; k < grid; ++k) {
    if (k > 0) {
      cur = propagate_one_step(ctx, cur);
      const double f_cur = energy_current(cur, cfg.h0, noise);
      loss_cum += 0.5 * cfg.h * (f_prev + f_cur);
      f_prev = f_cur;
    }
    rec.times[k] = k * cfg.h;
    rec.states.push_back(cur);
    rec.ledger.times[k] = rec.times[k];
    rec.ledger.loss[k] = loss_cum;
  }
  rec.segment_losses.push_back(loss_cum);
  rec.segment_durations.push_back((grid - 1) * cfg.h);
  return rec;
}

ensemble_result run_ensemble(const protocol_config& cfg) {
  cfg.validate();
  run_context ctx(cfg);
  const int grid = ctx.grid;
  const int total = cfg.realizations;
  int workers = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, total);

  std::vector<double> accum(flat_size(grid), 0.0);
  const auto reduce = [&](const std::vector<double>& flat) {
    kernels::active().accumulate(flat.data(), accum.data(), flat.size());
  };

  if (workers == 1) {
    std::vector<double> flat;
    for (int i = 0; i < total; ++i) {
      flatten(run_one(ctx, i), ctx.rho_e, flat);
      reduce(flat);
    }
  } else {
    // Workers may finish out of order; the reducer consumes strictly in index
    // order so the accumulated sums do not depend on the worker count.
    std::mutex m;
    std::condition_variable produced, drained;
    std::map<int, std::vector<double>> ready;
    std::atomic<int> next{0};
    int reduced = 0;
    const int window = 4 * workers;

    auto work = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) return;
        std::vector<double> flat;
        flatten(run_one(ctx, i), ctx.rho_e, flat);
        std::unique_lock lock(m);
        drained.wait(lock, [&] { return i < reduced + window; });
        ready.emplace(i, std::move(flat));
        produced.notify_all();
      }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    {
      std::unique_lock lock(m);
      while (reduced < total) {
        produced.wait(lock, [&] { return ready.count(reduced) != 0; });
        const std::vector<double> flat = std::move(ready.at(reduced));
        ready.erase(reduced);
        lock.unlock();
        reduce(flat);
        lock.lock();
        ++reduced;
        drained.notify_all();
      }
    }
    for (auto& t : pool) t.join();
  }

  ensemble_result res;
  res.realizations = total;
  res.times.resize(grid);
  for (int k = 0; k < grid; ++k) res.times[k] = k * cfg.h;

  const double inv = 1.0 / total;
  res.mean_states.reserve(grid);
  res.fidelity_of_mean.resize(grid);
  res.mean_fidelity.resize(grid);
  res.mean_work.resize(grid);
  res.mean_loss.resize(grid);
  const double* p = accum.data();
  for (int k = 0; k < grid; ++k) {
    mat2 mstate = Eigen::Map<const mat2>(reinterpret_cast<const cplx*>(p + 8 * k)) * inv;
    mstate = 0.5 * (mstate + mstate.adjoint());
    res.mean_states.push_back(qubit_state::from_matrix(mstate));
    res.fidelity_of_mean[k] = fidelity_pure(ctx.rho_e, res.mean_states.back());
  }
  p += 8 * grid;
  for (int k = 0; k < grid; ++k) res.mean_fidelity[k] = p[k] * inv;
  p += grid;
  for (int k = 0; k < grid; ++k) res.mean_work[k] = p[k] * inv;
  p += grid;
  for (int k = 0; k < grid; ++k) res.mean_loss[k] = p[k] * inv;
  p += grid;
  res.mean_attempts = p[0] * inv;
  res.mean_zeno_measurements = p[1] * inv;
  res.total_zeno_measurements = static_cast<long long>(std::llround(p[1]));
  res.zeno_failure_rate = p[1] > 0.0 ? p[2] / p[1] : 0.0;
  return res;
}

}  // namespace oqb
