#include "frontlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <new>
#include <string>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW's new-array execute requires the same alignment as the planning
// buffers; we always go through owned fftw_malloc scratch.
struct Scratch {
  explicit Scratch(const Grid& g)
      : real(static_cast<double*>(fftw_malloc(sizeof(double) * g.size()))),
        cplx(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.spectral_size()))) {}
  ~Scratch() {
    fftw_free(real);
    fftw_free(cplx);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  double* real;
  fftw_complex* cplx;
};

}  // namespace

std::shared_ptr<const Fft2> Fft2::for_grid(const Grid& grid) {
  static std::map<std::pair<int, int>, std::shared_ptr<const Fft2>> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(grid.n1(), grid.n2());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const Fft2> plan(new Fft2(grid));
  cache.emplace(key, plan);
  return plan;
}

// Called with planner_mutex held.
Fft2::Fft2(const Grid& grid) : grid_(grid) {
  Scratch s(grid);
  forward_plan_ = fftw_plan_dft_r2c_2d(grid.n1(), grid.n2(), s.real, s.cplx, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_2d(grid.n1(), grid.n2(), s.cplx, s.real, FFTW_ESTIMATE);
}

Fft2::~Fft2() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft2::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  Scratch s(grid_);
  std::copy(in.begin(), in.end(), s.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real, s.cplx);
  const auto* src = reinterpret_cast<const std::complex<double>*>(s.cplx);
  std::copy(src, src + grid_.spectral_size(), out.begin());
}

void Fft2::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  Scratch s(grid_);
  std::copy(in.begin(), in.end(), reinterpret_cast<std::complex<double>*>(s.cplx));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), s.cplx, s.real);
  std::copy(s.real, s.real + grid_.size(), out.begin());
}

void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

void Fft2::forward_aligned(const double* in, std::complex<double>* out) const {
  // Out-of-place r2c leaves its input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Fft2::inverse_inplace_input(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(in),
                       out);
}

Wavenumbers::Wavenumbers(const Grid& g)
    : grid(g),
      k1(g.n1()),
      k2(g.n2_half()),
      dk1(g.n1()),
      dk2(g.n2_half()),
      k_squared(g.spectral_size()) {
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    k1[r1] = g.k1_of_row(r1);
    dk1[r1] = (r1 == g.n1() / 2) ? 0.0 : k1[r1];
  }
  for (int c = 0; c < g.n2_half(); ++c) {
    k2[c] = c;
    dk2[c] = (c == g.n2() / 2) ? 0.0 : k2[c];
  }
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    for (int c = 0; c < g.n2_half(); ++c) {
      k_squared[std::size_t(r1) * g.n2_half() + c] = k1[r1] * k1[r1] + k2[c] * k2[c];
    }
  }
}

SpectralCoeffs to_spectral(const ScalarField& f) {
  for (double v : f.values()) {
    if (!std::isfinite(v)) throw InvalidInput("to_spectral: non-finite sample");
  }
  const Grid& g = f.grid();
  SpectralCoeffs c(g);
  Fft2::for_grid(g)->forward(f.values(), c.data());
  const double scale = 1.0 / double(g.size());
  for (auto& m : c.data()) m *= scale;
  return c;
}

ScalarField from_spectral(const SpectralCoeffs& c, FieldKind kind) {
  for (const auto& m : c.data()) {
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
      throw InvalidInput("from_spectral: non-finite coefficient");
    }
  }
  ScalarField f(c.grid(), kind);
  Fft2::for_grid(c.grid())->inverse(c.data(), f.values());
  return f;
}

SpectralCoeffs invert_fractional_laplacian(const SpectralCoeffs& c, RieszOrder order) {
  const double mean_mode = std::abs(c.at(0, 0));
  if (mean_mode > 1e-12 * c.abs_sum()) {
    throw InvalidInput("invert_fractional_laplacian: nonzero mean mode " +
                       std::to_string(mean_mode) + " (scalar is not zero-mean)");
  }
  const Grid& g = c.grid();
  const Wavenumbers kw(g);
  SpectralCoeffs out(g);
  const auto in = c.data();
  auto dst = out.data();
  for (std::size_t i = 1; i < g.spectral_size(); ++i) {
    const double k2 = kw.k_squared[i];
    const double factor = order == RieszOrder::Half ? 1.0 / std::sqrt(k2) : 1.0 / k2;
    dst[i] = in[i] * factor;
  }
  dst[0] = 0.0;
  return out;
}

SpectralCoeffs stream_function(const ScalarField& q) {
  if (!q.is_zero_mean()) {
    throw InvalidInput("stream_function: scalar mean " + std::to_string(q.mean()) +
                       " exceeds 1e-12 of its max-norm");
  }
  SpectralCoeffs c = to_spectral(q);
  c.at(0, 0) = 0.0;
  return invert_fractional_laplacian(c, inversion_order(q.kind()));
}

namespace {

template <class Fn>
SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, Fn&& fn) {
  const Grid& g = c.grid();
  SpectralCoeffs out(g);
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    for (int k2 = 0; k2 < g.n2_half(); ++k2) out.at(r1, k2) = fn(r1, k2) * c.at(r1, k2);
  }
  return out;
}

}  // namespace

SpectralCoeffs derivative_x1(const SpectralCoeffs& c) {
  const Wavenumbers kw(c.grid());
  return apply_multiplier(c, [&](int r1, int) { return std::complex<double>(0.0, kw.dk1[r1]); });
}

SpectralCoeffs derivative_x2(const SpectralCoeffs& c) {
  const Wavenumbers kw(c.grid());
  return apply_multiplier(c, [&](int, int k2) { return std::complex<double>(0.0, kw.dk2[k2]); });
}

VelocityField velocity_from_stream(const SpectralCoeffs& psi) {
  const Grid& g = psi.grid();
  SpectralCoeffs d2 = derivative_x2(psi);
  for (auto& m : d2.data()) m = -m;
  const ScalarField u1 = from_spectral(d2);
  const ScalarField u2 = from_spectral(derivative_x1(psi));
  return VelocityField{g, {u1.values().begin(), u1.values().end()},
                       {u2.values().begin(), u2.values().end()}};
}

VelocityField velocity_from_scalar(const ScalarField& q) {
  return velocity_from_stream(stream_function(q));
}

double spectral_divergence(const VelocityField& u) {
  const Grid& g = u.grid;
  const SpectralCoeffs c1 = to_spectral(ScalarField(g, FieldKind::QgTheta, u.u1));
  const SpectralCoeffs c2 = to_spectral(ScalarField(g, FieldKind::QgTheta, u.u2));
  const Wavenumbers kw(g);
  double div = 0.0;
  double scale = 0.0;
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    for (int k2 = 0; k2 < g.n2_half(); ++k2) {
      const auto a = c1.at(r1, k2);
      const auto b = c2.at(r1, k2);
      div = std::max(div, std::abs(kw.dk1[r1] * a + kw.dk2[k2] * b));
      scale = std::max({scale, std::abs(a), std::abs(b)});
    }
  }
  return scale == 0.0 ? 0.0 : div / scale;
}

double max_gradient_norm(const ScalarField& q) {
  const SpectralCoeffs c = to_spectral(q);
  const ScalarField g1 = from_spectral(derivative_x1(c));
  const ScalarField g2 = from_spectral(derivative_x2(c));
  double m = 0.0;
  for (std::size_t i = 0; i < q.grid().size(); ++i) {
    m = std::max(m, std::hypot(g1.values()[i], g2.values()[i]));
  }
  return m;
}

int effective_bandwidth(const SpectralCoeffs& c, double rel_tol) {
  const Grid& g = c.grid();
  double cmax = 0.0;
  for (const auto& m : c.data()) cmax = std::max(cmax, std::abs(m));
  if (cmax == 0.0) return 0;
  int band = 0;
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    for (int k2 = 0; k2 < g.n2_half(); ++k2) {
      if (std::abs(c.at(r1, k2)) > rel_tol * cmax) {
        band = std::max({band, std::abs(g.k1_of_row(r1)), k2});
      }
    }
  }
  return band;
}

Norms norms(const ScalarField& q) {
  Norms n;
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : q.values()) {
    s1 += std::abs(v);
    s2 += v * v;
    n.linf = std::max(n.linf, std::abs(v));
  }
  const double area = q.grid().cell_area();
  n.l1 = s1 * area;
  n.l2 = std::sqrt(s2 * area);
  return n;
}

double spectral_l2(const SpectralCoeffs& c) {
  const Grid& g = c.grid();
  double sum = 0.0;
  for (int r1 = 0; r1 < g.n1(); ++r1) {
    for (int k2 = 0; k2 < g.n2_half(); ++k2) {
      const double w = (k2 == 0 || k2 == g.n2() / 2) ? 1.0 : 2.0;
      sum += w * std::norm(c.at(r1, k2));
    }
  }
  return kTwoPi * std::sqrt(sum);
}

double velocity_sup(const VelocityField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.u1.size(); ++i) m = std::max(m, std::hypot(u.u1[i], u.u2[i]));
  return m;
}

}  // namespace frontlab
