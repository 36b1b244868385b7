#include "varops/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace varops {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t spectrum_size(const Grid& grid) {
  const std::size_t p = static_cast<std::size_t>(grid.points_per_axis());
  std::size_t s = p / 2 + 1;
  for (int a = 1; a < grid.dim(); ++a) s *= p;
  return s;
}

std::vector<std::complex<double>> real_fft(const Grid& grid, std::span<const double> in) {
  if (in.size() != grid.size()) throw std::invalid_argument("fft input size mismatch");
  std::vector<double> buf(in.begin(), in.end());
  std::vector<std::complex<double>> out(spectrum_size(grid));
  int dims[kMaxDim];
  for (int a = 0; a < grid.dim(); ++a) dims[a] = grid.points_per_axis();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c(grid.dim(), dims, buf.data(),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> real_ifft(const Grid& grid, std::span<const std::complex<double>> in) {
  if (in.size() != spectrum_size(grid)) throw std::invalid_argument("ifft input size mismatch");
  // c2r transforms may destroy their input; work on a copy.
  std::vector<std::complex<double>> buf(in.begin(), in.end());
  std::vector<double> out(grid.size());
  int dims[kMaxDim];
  for (int a = 0; a < grid.dim(); ++a) dims[a] = grid.points_per_axis();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r(grid.dim(), dims, reinterpret_cast<fftw_complex*>(buf.data()),
                             out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace varops
