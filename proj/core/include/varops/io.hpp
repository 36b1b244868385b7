#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "varops/grid.hpp"

namespace varops {

// Flat little-endian binary: magic "VOSF", format version, header (dim, P, L),
// then the samples. Round-trips exactly.
void save_function(const SampledFunction& f, const std::filesystem::path& path);
SampledFunction load_function(const std::filesystem::path& path);

// CSV export: one row per grid point, coordinates then value.
void save_function_csv(const SampledFunction& f, const std::filesystem::path& path);

// FNV-1a, used for config/cache keys.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a_double(double v, std::uint64_t seed);

}  // namespace varops
