#include "cascade/hilbert.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cascade/kernels.hpp"

namespace cascade {

namespace {
// The FFTW planner is not thread-safe; plan execution with the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct HilbertTransformer::Impl {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    if (real == nullptr || spectrum == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_1d(len, real, spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(len, spectrum, real, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~Impl() {
    {
      std::lock_guard lock(planner_mutex());
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(spectrum);
  }
};

HilbertTransformer::HilbertTransformer(std::size_t n) {
  if (n < 2 || !is_power_of_two(n))
    throw std::invalid_argument("HilbertTransformer: size must be a power of two");
  impl_ = std::make_unique<Impl>(n);
}

HilbertTransformer::~HilbertTransformer() = default;
HilbertTransformer::HilbertTransformer(HilbertTransformer&&) noexcept = default;
HilbertTransformer& HilbertTransformer::operator=(HilbertTransformer&&) noexcept = default;

std::size_t HilbertTransformer::size() const { return impl_->n; }

void HilbertTransformer::apply(std::span<const double> in, std::span<double> out,
                               double orientation) {
  const std::size_t n = impl_->n;
  if (in.size() != n || out.size() != n)
    throw std::invalid_argument("HilbertTransformer::apply: length mismatch");
  std::copy(in.begin(), in.end(), impl_->real);
  fftw_execute(impl_->forward);
  auto* spec = reinterpret_cast<std::complex<double>*>(impl_->spectrum);
  kernels::parallel::hilbert_multiplier({spec, n / 2 + 1}, orientation / static_cast<double>(n));
  fftw_execute(impl_->backward);
  std::copy(impl_->real, impl_->real + n, out.begin());
}

namespace {

HilbertTransformer& cached_transformer(std::size_t n) {
  thread_local std::map<std::size_t, HilbertTransformer> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, HilbertTransformer(n)).first;
  return it->second;
}

std::vector<double> transform(std::span<const double> f, double orientation = 1.0) {
  std::vector<double> out(f.size());
  cached_transformer(f.size()).apply(f, out, orientation);
  return out;
}

}  // namespace

GridFunction hilbert_transform(const GridFunction& f, SignConvention sign) {
  return GridFunction(f.grid(), transform(f.values(), sign.factor()));
}

double hilbert_indicator(double x) {
  if (x == 0.0 || x == 1.0) throw std::domain_error("hilbert_indicator: x must avoid {0, 1}");
  return std::log(std::abs(x / (x - 1.0))) / std::numbers::pi;
}

double tricomi_residual(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g, "tricomi_residual");
  const std::size_t n = f.size();
  std::vector<double> fg(n), hf_hg(n);
  const auto hf = transform(f.values());
  const auto hg = transform(g.values());
  kernels::parallel::multiply(f.values(), g.values(), fg);
  kernels::parallel::multiply(hf, hg, hf_hg);
  const auto h_fg = transform(fg);
  const auto h_prod = transform(hf_hg);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i)
    residual[i] = h_fg[i] - g[i] * hf[i] - f[i] * hg[i] - h_prod[i];
  return kernels::parallel::max_abs(residual);
}

GridFunction commutator(const GridFunction& a, const GridFunction& f) {
  require_same_grid(a, f, "commutator");
  const std::size_t n = f.size();
  std::vector<double> af(n), a_hf(n);
  kernels::parallel::multiply(a.values(), f.values(), af);
  const auto hf = transform(f.values());
  const auto h_af = transform(af);
  kernels::parallel::multiply(a.values(), hf, a_hf);
  kernels::parallel::axpy(-1.0, h_af, a_hf);
  return GridFunction(f.grid(), std::move(a_hf));
}

}  // namespace cascade
