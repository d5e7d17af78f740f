#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "edgeuda/grid.hpp"

namespace edgeuda::io {

// Observer invoked with the path of every file the readers below open.
// Used by tests to prove which files a routine touched.
using ReadObserver = std::function<void(const std::filesystem::path&)>;

// Installs `observer` process-wide until the guard dies; guards nest.
class ScopedReadObserver {
 public:
  explicit ScopedReadObserver(ReadObserver observer);
  ~ScopedReadObserver();
  ScopedReadObserver(const ScopedReadObserver&) = delete;
  ScopedReadObserver& operator=(const ScopedReadObserver&) = delete;

 private:
  ReadObserver previous_;
};

struct Netpbm {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (P5) or 3 (P6)
  int maxval = 0;    // 255 or 65535
  std::vector<std::uint16_t> samples;
};

Netpbm read_netpbm(const std::filesystem::path& path);

// Binary P6, 8-bit.
void write_ppm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> rgb);
// Binary P5, 8-bit.
void write_pgm8(const std::filesystem::path& path, int width, int height,
                std::span<const std::uint8_t> gray);
// Binary P5, 16-bit big-endian samples as netpbm requires.
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 std::span<const std::uint16_t> gray);

// Float image helpers: quantize to 8 bits with round-to-nearest.
void write_rgb(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const LabelMap& labels);
LabelMap read_labels(const std::filesystem::path& path);

void write_edges(const std::filesystem::path& path, const EdgeMap& edges);
EdgeMap read_edges(const std::filesystem::path& path);

// Depth is stored as 16-bit fixed point: sample = round(depth_mm / quantum_mm).
void write_depth(const std::filesystem::path& path, const DepthMap& depth, int quantum_mm);
DepthMap read_depth(const std::filesystem::path& path, int quantum_mm);

// Smallest whole number of millimetres per 16-bit step that represents z_max.
int depth_quantum_mm(double z_max);

}  // namespace edgeuda::io
