#include "frontlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontlab::evolve {

void SolverConfig::validate() const {
  std::vector<std::string> problems;
  if (!(dt_init > 0.0)) problems.push_back("dt_init must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) problems.push_back("cfl must lie in (0, 1]");
  if (!(t_end >= 0.0)) problems.push_back("t_end must be >= 0");
  if (!(snapshot_interval > 0.0)) problems.push_back("snapshot_interval must be > 0");
  if (dissipation) {
    if (!(dissipation->nu >= 0.0)) problems.push_back("hyperviscosity nu must be >= 0");
    if (dissipation->power < 1) problems.push_back("hyperviscosity power must be a positive integer");
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid solver config:";
    for (const auto& p : problems) os << ' ' << p << ';';
    throw InvalidInput(os.str());
  }
}

const char* to_string(AbortReason reason) noexcept {
  switch (reason) {
    case AbortReason::NonFinite:
      return "non-finite";
    case AbortReason::DtUnderflow:
      return "dt-underflow";
  }
  return "unknown";
}

SolverAbort::SolverAbort(AbortReason reason, SimulationState last_good, const std::string& message)
    : Error(to_string(reason), message), reason_(reason), last_good_(std::move(last_good)) {}

struct Evolver::Workspace {
  explicit Workspace(const Grid& g)
      : fft(Fft2::for_grid(g)),
        spectral(g.spectral_size()),
        scratch(g.spectral_size()),
        u1(g.size()),
        u2(g.size()),
        g1(g.size()),
        g2(g.size()),
        q_hat(g.spectral_size()),
        stage(g.spectral_size()),
        k1(g.spectral_size()),
        k2(g.spectral_size()),
        k3(g.spectral_size()),
        k4(g.spectral_size()) {}

  std::shared_ptr<const Fft2> fft;
  std::vector<double> dk1, dk2;      // derivative wavenumbers per row / column
  std::vector<double> inv_laplace;   // |k|^{-2a}
  std::vector<double> mask;          // 1 inside the retained band
  std::vector<double> damping;       // ν|k|^{2p}

  AlignedArray<std::complex<double>> spectral;
  AlignedArray<std::complex<double>> scratch;
  AlignedArray<double> u1, u2, g1, g2;
  std::vector<std::complex<double>> q_hat, stage, k1, k2, k3, k4;
};

Evolver::Evolver(const Grid& grid, FieldKind kind, SolverConfig config)
    : grid_(grid), kind_(kind), config_(std::move(config)), ws_(std::make_unique<Workspace>(grid)) {
  config_.validate();
  const Wavenumbers kw(grid);
  ws_->dk1 = kw.dk1;
  ws_->dk2 = kw.dk2;
  const std::size_t ns = grid.spectral_size();
  ws_->inv_laplace.assign(ns, 0.0);
  ws_->mask.assign(ns, 1.0);
  ws_->damping.assign(ns, 0.0);
  const int cut1 = grid.n1() / 3;
  const int cut2 = grid.n2() / 3;
  const bool dealias = config_.dealias == Dealias::TwoThirds;
  for (int r1 = 0; r1 < grid.n1(); ++r1) {
    for (int c = 0; c < grid.n2_half(); ++c) {
      const std::size_t i = std::size_t(r1) * grid.n2_half() + c;
      const double ksq = kw.k_squared[i];
      if (i != 0) {
        ws_->inv_laplace[i] = inversion_order(kind) == RieszOrder::Half ? 1.0 / std::sqrt(ksq)
                                                                        : 1.0 / ksq;
      }
      if (dealias && (std::abs(grid.k1_of_row(r1)) > cut1 || c > cut2)) ws_->mask[i] = 0.0;
      if (config_.dissipation && config_.dissipation->nu > 0.0) {
        ws_->damping[i] = config_.dissipation->nu * std::pow(ksq, config_.dissipation->power);
      }
    }
  }
}

Evolver::~Evolver() = default;

double Evolver::compute_rhs(const std::complex<double>* q_hat, std::complex<double>* out) {
  Workspace& w = *ws_;
  const int nh = grid_.n2_half();
  const std::size_t ns = grid_.spectral_size();
  const std::size_t np = grid_.size();
  const std::complex<double> I(0.0, 1.0);

  // u1 = −∂2ψ, u2 = ∂1ψ, then ∂1q, ∂2q.
  auto fill = [&](auto&& multiplier, AlignedArray<double>& dst) {
    for (int r1 = 0; r1 < grid_.n1(); ++r1) {
      for (int c = 0; c < nh; ++c) {
        const std::size_t i = std::size_t(r1) * nh + c;
        w.spectral[i] = multiplier(r1, c, i) * q_hat[i];
      }
    }
    w.fft->inverse_inplace_input(w.spectral.data(), dst.data());
  };
  fill([&](int, int c, std::size_t i) { return -I * w.dk2[c] * w.inv_laplace[i] * w.mask[i]; },
       w.u1);
  fill([&](int r1, int, std::size_t i) { return I * w.dk1[r1] * w.inv_laplace[i] * w.mask[i]; },
       w.u2);
  fill([&](int r1, int, std::size_t i) { return I * w.dk1[r1] * w.mask[i]; }, w.g1);
  fill([&](int, int c, std::size_t i) { return I * w.dk2[c] * w.mask[i]; }, w.g2);

  double umax = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    umax = std::max(umax, std::hypot(w.u1[i], w.u2[i]));
    w.g1[i] = w.u1[i] * w.g1[i] + w.u2[i] * w.g2[i];
  }
  w.fft->forward_aligned(w.g1.data(), w.scratch.data());
  const double sign = config_.reverse_velocity ? 1.0 : -1.0;
  const double scale = sign / double(np);
  for (std::size_t i = 0; i < ns; ++i) {
    out[i] = scale * w.mask[i] * w.scratch[i] - w.damping[i] * q_hat[i];
  }
  out[0] = 0.0;
  return umax;
}

double Evolver::velocity_sup_spectral(const std::complex<double>* q_hat) {
  Workspace& w = *ws_;
  const int nh = grid_.n2_half();
  const std::complex<double> I(0.0, 1.0);
  for (int r1 = 0; r1 < grid_.n1(); ++r1) {
    for (int c = 0; c < nh; ++c) {
      const std::size_t i = std::size_t(r1) * nh + c;
      w.spectral[i] = -I * w.dk2[c] * w.inv_laplace[i] * w.mask[i] * q_hat[i];
    }
  }
  w.fft->inverse_inplace_input(w.spectral.data(), w.u1.data());
  for (int r1 = 0; r1 < grid_.n1(); ++r1) {
    for (int c = 0; c < nh; ++c) {
      const std::size_t i = std::size_t(r1) * nh + c;
      w.spectral[i] = I * w.dk1[r1] * w.inv_laplace[i] * w.mask[i] * q_hat[i];
    }
  }
  w.fft->inverse_inplace_input(w.spectral.data(), w.u2.data());
  double umax = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) umax = std::max(umax, std::hypot(w.u1[i], w.u2[i]));
  return umax;
}

namespace {

void load_spectral(const Fft2& fft, const ScalarField& q, AlignedArray<double>& real_buf,
                   AlignedArray<std::complex<double>>& spec_buf,
                   std::vector<std::complex<double>>& out, const std::vector<double>& mask) {
  std::copy(q.values().begin(), q.values().end(), real_buf.data());
  fft.forward_aligned(real_buf.data(), spec_buf.data());
  const double scale = 1.0 / double(q.grid().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * mask[i] * spec_buf[i];
  // The mean mode is carried through unchanged.
  out[0] = scale * spec_buf[0];
}

}  // namespace

ScalarField Evolver::rhs(const ScalarField& q) {
  if (!(q.grid() == grid_)) throw InvalidInput("rhs: field grid does not match the evolver");
  Workspace& w = *ws_;
  load_spectral(*w.fft, q, w.g1, w.scratch, w.q_hat, w.mask);
  w.q_hat[0] = 0.0;
  compute_rhs(w.q_hat.data(), w.k1.data());
  std::copy(w.k1.begin(), w.k1.end(), w.spectral.data());
  ScalarField out(grid_, q.kind());
  w.fft->inverse_inplace_input(w.spectral.data(), out.values().data());
  return out;
}

double Evolver::velocity_sup_of(const ScalarField& q) {
  Workspace& w = *ws_;
  load_spectral(*w.fft, q, w.g1, w.scratch, w.q_hat, w.mask);
  return velocity_sup_spectral(w.q_hat.data());
}

SimulationState Evolver::step(const SimulationState& state, double dt_cap) {
  if (!(state.q.grid() == grid_)) throw InvalidInput("step: state grid does not match the evolver");
  Workspace& w = *ws_;
  const std::size_t ns = grid_.spectral_size();
  load_spectral(*w.fft, state.q, w.g1, w.scratch, w.q_hat, w.mask);

  const double umax0 = compute_rhs(w.q_hat.data(), w.k1.data());
  const double dt_cfl =
      std::min(config_.dt_init, config_.cfl * grid_.min_spacing() / std::max(umax0, kVelocityFloor));
  if (dt_cfl < kDtFloor) {
    std::ostringstream os;
    os << "CFL step " << dt_cfl << " fell below " << kDtFloor << " at t = " << state.t
       << " (velocity sup " << umax0 << ")";
    throw SolverAbort(AbortReason::DtUnderflow, state, os.str());
  }
  const double dt = std::min(dt_cfl, dt_cap);

  for (std::size_t i = 0; i < ns; ++i) w.stage[i] = w.q_hat[i] + 0.5 * dt * w.k1[i];
  compute_rhs(w.stage.data(), w.k2.data());
  for (std::size_t i = 0; i < ns; ++i) w.stage[i] = w.q_hat[i] + 0.5 * dt * w.k2[i];
  compute_rhs(w.stage.data(), w.k3.data());
  for (std::size_t i = 0; i < ns; ++i) w.stage[i] = w.q_hat[i] + dt * w.k3[i];
  compute_rhs(w.stage.data(), w.k4.data());

  bool finite = true;
  for (std::size_t i = 0; i < ns; ++i) {
    w.q_hat[i] += (dt / 6.0) * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    finite = finite && std::isfinite(w.q_hat[i].real()) && std::isfinite(w.q_hat[i].imag());
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite field after step " << state.step_count + 1 << " at t = " << state.t + dt;
    throw SolverAbort(AbortReason::NonFinite, state, os.str());
  }

  SimulationState next{state.t + dt, ScalarField(grid_, state.q.kind()), state.step_count + 1,
                       state.u_sup_integral};
  std::copy(w.q_hat.begin(), w.q_hat.end(), w.spectral.data());
  w.fft->inverse_inplace_input(w.spectral.data(), next.q.values().data());
  const double umax1 = velocity_sup_spectral(w.q_hat.data());
  next.u_sup_integral += 0.5 * dt * (umax0 + umax1);
  return next;
}

ScalarField rhs(const ScalarField& q, const SolverConfig& config) {
  Evolver ev(q.grid(), q.kind(), config);
  return ev.rhs(q);
}

SimulationState step(const SimulationState& state, const SolverConfig& config) {
  Evolver ev(state.q.grid(), state.q.kind(), config);
  return ev.step(state);
}

RunResult run(const SimulationState& initial, const SolverConfig& config,
              const std::vector<Observer>& observers, RunOptions options) {
  Evolver ev(initial.q.grid(), initial.q.kind(), config);
  return run(ev, initial, observers, options);
}

RunResult run(Evolver& evolver, const SimulationState& initial,
              const std::vector<Observer>& observers, RunOptions options) {
  const SolverConfig& config = evolver.config();
  RunResult result{initial, {}, false};
  SimulationState& state = result.final_state;

  auto notify = [&]() {
    result.snapshot_times.push_back(state.t);
    bool stop = false;
    for (const auto& obs : observers) {
      if (obs(state) == ObserverAction::Stop) stop = true;
    }
    return stop;
  };

  if (options.emit_initial && notify()) {
    result.stopped_by_observer = true;
    return result;
  }
  const double interval = config.snapshot_interval;
  while (state.t < config.t_end) {
    const double k = std::floor(state.t / interval + 1e-9) + 1.0;
    const double target = std::min(k * interval, config.t_end);
    while (state.t < target) {
      SimulationState next = evolver.step(state, target - state.t);
      if (target - next.t <= 1e-12 * std::max(1.0, std::abs(target))) next.t = target;
      state = std::move(next);
    }
    if (notify()) {
      result.stopped_by_observer = true;
      break;
    }
  }
  return result;
}

}  // namespace frontlab::evolve
