#include "varops/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>

#include "varops/fft.hpp"
#include "varops/io.hpp"
#include "varops/parallel.hpp"

namespace varops {

std::vector<double> sampled_dilation(const Grid& grid, const Kernel& k, double t,
                                     ConvolveStats* stats) {
  if (k.dim() != grid.dim()) throw std::invalid_argument("kernel/grid dimension mismatch");
  const std::int64_t p = grid.points_per_axis();
  const double h = grid.spacing();
  std::vector<double> samples(grid.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto idx = grid.axis_indices(j);
    Point d{};
    for (int a = 0; a < grid.dim(); ++a) {
      const std::int64_t w = idx[a] <= p / 2 ? idx[a] : idx[a] - p;
      d[a] = static_cast<double>(w) * h;
    }
    samples[j] = dilate(k, t, d);
  }
  const double raw_mass = grid.cell_volume() * kahan_sum(samples);
  if (stats) {
    stats->mass_defect = std::abs(1.0 - raw_mass);
    stats->mass_warning = stats->mass_defect > 1e-8;
  }
  if (!(raw_mass > 0.0))
    throw std::domain_error("sampled kernel has nonpositive mass on this grid");
  for (double& s : samples) s /= raw_mass;
  return samples;
}

namespace {

SampledFunction convolve_direct(const SampledFunction& f, std::span<const double> kern) {
  const Grid& g = f.grid();
  const std::int64_t p = g.points_per_axis();
  const int dim = g.dim();
  const std::size_t n = g.size();

  // Precompute per-axis decompositions once; the inner loop reassembles the
  // wrapped difference index from them.
  std::vector<std::array<std::int32_t, kMaxDim>> axes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ai = g.axis_indices(i);
    for (int a = 0; a < dim; ++a) axes[i][a] = static_cast<std::int32_t>(ai[a]);
  }
  std::array<std::size_t, kMaxDim> stride{};
  stride[0] = 1;
  for (int a = 1; a < dim; ++a) stride[a] = stride[a - 1] * static_cast<std::size_t>(p);

  SampledFunction out(g);
  const double cell = g.cell_volume();
  parallel_for(n, [&](std::size_t x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t src = 0;
      for (int a = 0; a < dim; ++a) {
        std::int32_t d = axes[x][a] - axes[j][a];
        if (d < 0) d += static_cast<std::int32_t>(p);
        src += static_cast<std::size_t>(d) * stride[a];
      }
      acc += kern[j] * f[src];
    }
    out[x] = cell * acc;
  });
  return out;
}

SampledFunction convolve_spectral(const SampledFunction& f, std::span<const double> kern) {
  const Grid& g = f.grid();
  auto fs = real_fft(g, f.values());
  const auto ks = real_fft(g, kern);
  const double cell = g.cell_volume();
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] *= ks[i] * cell;
  return SampledFunction(g, real_ifft(g, fs));
}

}  // namespace

SampledFunction convolve(const SampledFunction& f, const Kernel& k, double t,
                         ConvBackend backend, ConvolveStats* stats) {
  const auto kern = sampled_dilation(f.grid(), k, t, stats);
  return backend == ConvBackend::direct ? convolve_direct(f, kern)
                                        : convolve_spectral(f, kern);
}

SampledFunction convolve_verified(const SampledFunction& f, const Kernel& k, double t,
                                  double tol) {
  auto spectral = convolve(f, k, t, ConvBackend::spectral);
  const auto direct = convolve(f, k, t, ConvBackend::direct);
  double sup = 0.0;
  for (std::size_t i = 0; i < spectral.size(); ++i)
    sup = std::max(sup, std::abs(spectral[i] - direct[i]));
  if (sup > tol)
    throw std::runtime_error("convolution backends disagree: sup diff " + std::to_string(sup));
  return spectral;
}

TimeGrid::TimeGrid(std::vector<double> scales, int refinement)
    : scales_(std::move(scales)), refinement_(refinement) {
  if (scales_.empty()) throw std::invalid_argument("time grid needs at least one scale");
  if (refinement_ < 1) throw std::invalid_argument("refinement must be >= 1");
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!(scales_[i] > 0.0) || !std::isfinite(scales_[i]))
      throw std::invalid_argument("scales must be positive and finite");
    if (i > 0 && !(scales_[i] < scales_[i - 1]))
      throw std::invalid_argument("scales must be strictly decreasing");
  }
  // round up to the nearest nested dyadic sub-grid
  int segments = 1;
  while (segments + 1 < refinement_) segments *= 2;
  points_per_interval_ = segments + 1;

  flattened_.clear();
  for (std::size_t i = 0; i + 1 < scales_.size(); ++i) {
    const double ratio = scales_[i + 1] / scales_[i];
    for (int j = 0; j < segments; ++j)
      flattened_.push_back(scales_[i] *
                           std::pow(ratio, static_cast<double>(j) / segments));
  }
  flattened_.push_back(scales_.back());
  for (std::size_t i = 1; i < flattened_.size(); ++i)
    if (!(flattened_[i] < flattened_[i - 1]))
      throw std::invalid_argument("refined scales are not strictly decreasing");
}

TimeGrid TimeGrid::dyadic(int count, int refinement, double first) {
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = first * std::pow(2.0, -i);
  return TimeGrid(std::move(s), refinement);
}

std::pair<int, int> TimeGrid::interval_span(int i) const {
  if (i < 0 || i >= interval_count()) throw std::out_of_range("interval index out of bounds");
  const int first = i * (points_per_interval_ - 1);
  return {first, first + points_per_interval_ - 1};
}

namespace {

constexpr char kFieldMagic[4] = {'V', 'O', 'F', 'C'};
constexpr std::uint32_t kFieldVersion = 1;

std::uint64_t field_key_with_input(const SampledFunction& f, const Kernel& k,
                                   const TimeGrid& times, ConvBackend backend) {
  std::uint64_t h = field_cache_key(f.grid(), k, times, backend);
  for (double v : f.values()) h = fnv1a_double(v, h);
  return h;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t key) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "field-%016llx.bin", static_cast<unsigned long long>(key));
  return dir / buf;
}

bool load_cached_field(const std::filesystem::path& path, std::uint64_t key,
                       const Grid& grid, std::size_t slice_count,
                       std::vector<SampledFunction>& slices) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t file_key = 0;
  std::uint64_t count = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&file_key), sizeof(file_key));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0 || version != kFieldVersion ||
      file_key != key || count != slice_count)
    return false;
  slices.clear();
  slices.reserve(slice_count);
  std::vector<double> buf(grid.size());
  for (std::size_t s = 0; s < slice_count; ++s) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) return false;
    slices.emplace_back(grid, buf);
  }
  return true;
}

void store_cached_field(const std::filesystem::path& path, std::uint64_t key,
                        const std::vector<SampledFunction>& slices) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return;  // cache is best-effort
  out.write(kFieldMagic, 4);
  out.write(reinterpret_cast<const char*>(&kFieldVersion), sizeof(kFieldVersion));
  out.write(reinterpret_cast<const char*>(&key), sizeof(key));
  const std::uint64_t count = slices.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& s : slices)
    out.write(reinterpret_cast<const char*>(s.values().data()),
              static_cast<std::streamsize>(s.size() * sizeof(double)));
}

}  // namespace

std::uint64_t field_cache_key(const Grid& grid, const Kernel& k, const TimeGrid& times,
                              ConvBackend backend) {
  std::uint64_t h = fnv1a(k.name());
  h = fnv1a_double(static_cast<double>(grid.dim()), h);
  h = fnv1a_double(static_cast<double>(grid.points_per_axis()), h);
  h = fnv1a_double(grid.half_width(), h);
  h = fnv1a_double(static_cast<double>(times.refinement()), h);
  for (double t : times.flattened()) h = fnv1a_double(t, h);
  h = fnv1a_double(backend == ConvBackend::direct ? 1.0 : 2.0, h);
  return h;
}

SemigroupField build_field(const SampledFunction& f, const Kernel& k, const TimeGrid& times,
                           const BuildOptions& opts) {
  const auto& scales = times.flattened();
  SemigroupField field{f, times, {}};

  std::optional<std::filesystem::path> cache_file;
  if (opts.cache_dir) {
    const std::uint64_t key = field_key_with_input(f, k, times, opts.backend);
    std::filesystem::create_directories(*opts.cache_dir);
    cache_file = cache_path(*opts.cache_dir, key);
    if (load_cached_field(*cache_file, key, f.grid(), scales.size(), field.slices))
      return field;
  }

  field.slices.assign(scales.size(), SampledFunction(f.grid()));
  auto run = [&](std::size_t j) {
    field.slices[j] = convolve(f, k, scales[j], opts.backend);
  };
  if (opts.parallel) {
    parallel_for(scales.size(), run);
  } else {
    for (std::size_t j = 0; j < scales.size(); ++j) run(j);
  }

  if (cache_file)
    store_cached_field(*cache_file, field_key_with_input(f, k, times, opts.backend),
                       field.slices);
  return field;
}

double interval_range(const SemigroupField& field, std::size_t x, int interval) {
  const auto [first, last] = field.times.interval_span(interval);
  double lo = field.slice_at(first, x);
  double hi = lo;
  for (int j = first + 1; j <= last; ++j) {
    const double v = field.slice_at(j, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace varops
