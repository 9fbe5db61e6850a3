#include "imscat/fine_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "imscat/specfun.hpp"

namespace imscat {
namespace {

// FFTW planning is not thread safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FineGrid::FineGrid(const CellGrid& coarse, int nodes_per_axis, double period)
    : n_(nodes_per_axis),
      period_(period),
      half_width_(coarse.half_width()),
      divisions_(coarse.divisions()) {
  if (!is_power_of_two(n_) || n_ < 2) {
    throw std::invalid_argument("FineGrid: nodes per axis must be a power of two");
  }
  if (!(period_ >= 4.0 * half_width_ * (1.0 - 1e-12))) {
    throw std::invalid_argument("FineGrid: period must be at least 4S");
  }
  const double ratio = coarse.cell_size() / spacing();
  refine_ = static_cast<int>(std::lround(ratio));
  if (refine_ < 1 || std::abs(ratio - refine_) > 1e-9 * ratio) {
    throw std::invalid_argument("FineGrid: coarse cell size must be an integer multiple of the node spacing");
  }
  support_ = coarse.cells_per_axis() * refine_;
  if (support_ > n_ || (n_ - support_) % 2 != 0) {
    throw std::invalid_argument("FineGrid: support nodes do not fit the periodization cell");
  }
  radius_ = period_ - 2.0 * half_width_;

  const double h = spacing();
  nodes_.reserve(support_size());
  owner_.reserve(support_size());
  const int cells = coarse.cells_per_axis();
  for (int b = 0; b < support_; ++b) {
    for (int a = 0; a < support_; ++a) {
      nodes_.emplace_back(-half_width_ + (a + 0.5) * h, -half_width_ + (b + 0.5) * h);
      owner_.push_back(static_cast<std::size_t>(b / refine_) * cells + static_cast<std::size_t>(a / refine_));
    }
  }
}

bool FineGrid::exact_on_support() const { return radius_ >= 2.0 * std::sqrt(2.0) * half_width_; }

FineGrid make_fine_grid(const CellGrid& coarse, int nodes_per_axis, double period_factor) {
  const double period = period_factor * coarse.half_width();
  return FineGrid(coarse, nodes_per_axis, period);
}

Complex truncated_kernel_transform(double k, double radius, double rho) {
  using specfun::bessel_j0;
  using specfun::bessel_j1;
  const double kr = k * radius;
  const Complex h0 = specfun::hankel0_first(kr);
  const Complex h1 = specfun::hankel1_first(kr);
  auto closed_form = [&](double s) {
    const Complex bracket = k * h1 * bessel_j0(s * radius) - s * h0 * bessel_j1(s * radius);
    const Complex num = 1.0 - kI * (kPi / 2.0) * radius * bracket;
    return num / (s * s - k * k);
  };
  // The closed form is 0/0 at rho = k; interpolate across the removable singularity.
  const double delta = std::min(0.01 / radius, 0.1 * k);
  if (std::abs(rho - k) >= delta) return closed_form(rho);
  const double xs[4] = {k - 2 * delta, k - delta, k + delta, k + 2 * delta};
  Complex result = 0.0;
  for (int i = 0; i < 4; ++i) {
    double basis = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) basis *= (rho - xs[j]) / (xs[i] - xs[j]);
    }
    result += basis * closed_form(xs[i]);
  }
  return result;
}

KernelOperator::KernelOperator(const FineGrid& fine, double k) : fine_(fine), k_(k), pad_(2 * fine.support_per_axis()) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("KernelOperator: wavenumber must be positive");
  const int n = fine_.nodes_per_axis();
  const double step = 2.0 * kPi / fine_.period();
  const double radius = fine_.truncation_radius();

  // Convolution weights from the exact Fourier coefficients of the truncated kernel.
  std::vector<Complex> full(static_cast<std::size_t>(n) * n);
  for (int i0 = 0; i0 < n; ++i0) {
    const int j0 = i0 < n / 2 ? i0 : i0 - n;
    for (int i1 = 0; i1 < n; ++i1) {
      const int j1 = i1 < n / 2 ? i1 : i1 - n;
      const double rho = step * std::hypot(static_cast<double>(j0), static_cast<double>(j1));
      full[static_cast<std::size_t>(i0) * n + i1] = truncated_kernel_transform(k, radius, rho);
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_plan plan = fftw_plan_dft_2d(n, n, as_fftw(full.data()), as_fftw(full.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double norm = 1.0 / (static_cast<double>(n) * n);
  const int support = fine_.support_per_axis();
  const int span = 2 * support - 1;
  weights_.resize(static_cast<std::size_t>(span) * span);
  for (int dy = -(support - 1); dy < support; ++dy) {
    for (int dx = -(support - 1); dx < support; ++dx) {
      const int iy = (dy + n) % n;
      const int ix = (dx + n) % n;
      weights_[static_cast<std::size_t>(dy + support - 1) * span + (dx + support - 1)] =
          full[static_cast<std::size_t>(iy) * n + ix] * norm;
    }
  }

  spectrum_.assign(static_cast<std::size_t>(pad_) * pad_, Complex{});
  for (int dy = -(support - 1); dy < support; ++dy) {
    for (int dx = -(support - 1); dx < support; ++dx) {
      const int iy = (dy + pad_) % pad_;
      const int ix = (dx + pad_) % pad_;
      spectrum_[static_cast<std::size_t>(iy) * pad_ + ix] = weight(dx, dy);
    }
  }
  std::vector<Complex> scratch(spectrum_.size());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(pad_, pad_, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_2d(pad_, pad_, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(spectrum_.data()), as_fftw(spectrum_.data()));
  const double pad_norm = 1.0 / (static_cast<double>(pad_) * pad_);
  for (auto& s : spectrum_) s *= pad_norm;
}

KernelOperator::~KernelOperator() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Complex KernelOperator::weight(int dx, int dy) const {
  const int support = fine_.support_per_axis();
  if (std::abs(dx) >= support || std::abs(dy) >= support) {
    throw std::out_of_range("KernelOperator::weight: offset outside the support span");
  }
  const int span = 2 * support - 1;
  return weights_[static_cast<std::size_t>(dy + support - 1) * span + (dx + support - 1)];
}

void KernelOperator::apply(const CVector& v, CVector& out) const {
  const int support = fine_.support_per_axis();
  if (static_cast<std::size_t>(v.size()) != fine_.support_size()) {
    throw DimensionMismatch("KernelOperator::apply: vector length does not match the support");
  }
  std::vector<Complex> buf(static_cast<std::size_t>(pad_) * pad_, Complex{});
  for (int b = 0; b < support; ++b) {
    for (int a = 0; a < support; ++a) {
      buf[static_cast<std::size_t>(b) * pad_ + a] = v[static_cast<Eigen::Index>(b) * support + a];
    }
  }
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(buf.data()), as_fftw(buf.data()));
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= spectrum_[i];
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(buf.data()), as_fftw(buf.data()));
  out.resize(v.size());
  for (int b = 0; b < support; ++b) {
    for (int a = 0; a < support; ++a) {
      out[static_cast<Eigen::Index>(b) * support + a] = buf[static_cast<std::size_t>(b) * pad_ + a];
    }
  }
}

}  // namespace imscat
