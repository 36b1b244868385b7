#pragma once

#include <complex>
#include <vector>

#include "varops/grid.hpp"

namespace varops {

// Real n-d DFT on the grid's index lattice (FFTW r2c layout: the last axis
// is halved to P/2+1). Plan creation is serialized internally; execution is
// reentrant. FFTW_ESTIMATE plans keep results reproducible across runs.
std::vector<std::complex<double>> real_fft(const Grid& grid, std::span<const double> in);
std::vector<double> real_ifft(const Grid& grid, std::span<const std::complex<double>> in);

std::size_t spectrum_size(const Grid& grid);

}  // namespace varops
