#include "varops/io.hpp"

#include <cstring>
#include <fstream>

namespace varops {

namespace {

constexpr char kMagic[4] = {'V', 'O', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated function file");
  return v;
}

}  // namespace

void save_function(const SampledFunction& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(f.grid().dim()));
  write_pod(out, static_cast<std::uint32_t>(f.grid().points_per_axis()));
  write_pod(out, f.grid().half_width());
  write_pod(out, static_cast<std::uint64_t>(f.size()));
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SampledFunction load_function(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a function file: " + path.string());
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("unsupported function file version");
  const auto dim = read_pod<std::uint32_t>(in);
  const auto p = read_pod<std::uint32_t>(in);
  const auto l = read_pod<double>(in);
  const auto count = read_pod<std::uint64_t>(in);
  Grid grid(static_cast<int>(dim), static_cast<int>(p), l);
  if (count != grid.size()) throw std::runtime_error("sample count mismatch in function file");
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated function file");
  return SampledFunction(grid, std::move(values));
}

void save_function_csv(const SampledFunction& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  const int dim = f.grid().dim();
  for (int a = 0; a < dim; ++a) out << "x" << a << ",";
  out << "value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = f.grid().coord(i);
    for (int a = 0; a < dim; ++a) out << x[a] << ",";
    out << f[i] << "\n";
  }
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_double(double v, std::uint64_t seed) {
  char buf[sizeof(double)];
  std::memcpy(buf, &v, sizeof(double));
  return fnv1a(std::string_view(buf, sizeof(double)), seed);
}

}  // namespace varops
