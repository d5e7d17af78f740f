#include "edgeuda/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include "edgeuda/error.hpp"

namespace edgeuda::io {
namespace fs = std::filesystem;

namespace {

std::mutex& observer_mutex() {
  static std::mutex m;
  return m;
}

ReadObserver& current_observer() {
  static ReadObserver observer;
  return observer;
}

void notify_read(const fs::path& path) {
  std::lock_guard lock(observer_mutex());
  if (current_observer()) current_observer()(path);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

void write_netpbm(const fs::path& path, const char* magic, int width, int height,
                  int maxval, const char* bytes, std::size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot open for writing", path.string());
  out << magic << '\n' << width << ' ' << height << '\n' << maxval << '\n';
  out.write(bytes, static_cast<std::streamsize>(count));
  if (!out) throw DatasetError("write failed", path.string());
}

std::uint8_t quantize8(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

}  // namespace

ScopedReadObserver::ScopedReadObserver(ReadObserver observer) {
  std::lock_guard lock(observer_mutex());
  previous_ = std::move(current_observer());
  current_observer() = std::move(observer);
}

ScopedReadObserver::~ScopedReadObserver() {
  std::lock_guard lock(observer_mutex());
  current_observer() = std::move(previous_);
}

Netpbm read_netpbm(const fs::path& path) {
  notify_read(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open for reading", path.string());

  Netpbm img;
  const std::string magic = header_token(in);
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw DatasetError("not a binary PGM/PPM file", path.string());
  }
  try {
    img.width = std::stoi(header_token(in));
    img.height = std::stoi(header_token(in));
    img.maxval = std::stoi(header_token(in));
  } catch (const std::exception&) {
    throw DatasetError("malformed netpbm header", path.string());
  }
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535) {
    throw DatasetError("invalid netpbm dimensions", path.string());
  }

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  const std::size_t bytes_per = img.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw DatasetError("truncated netpbm payload", path.string());
  }
  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                         : raw[i];
  }
  return img;
}

void write_ppm(const fs::path& path, int width, int height,
               std::span<const std::uint8_t> rgb) {
  write_netpbm(path, "P6", width, height, 255, reinterpret_cast<const char*>(rgb.data()),
               rgb.size());
}

void write_pgm8(const fs::path& path, int width, int height,
                std::span<const std::uint8_t> gray) {
  write_netpbm(path, "P5", width, height, 255, reinterpret_cast<const char*>(gray.data()),
               gray.size());
}

void write_pgm16(const fs::path& path, int width, int height,
                 std::span<const std::uint16_t> gray) {
  std::vector<char> bytes(gray.size() * 2);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    bytes[2 * i] = static_cast<char>(gray[i] >> 8);
    bytes[2 * i + 1] = static_cast<char>(gray[i] & 0xff);
  }
  write_netpbm(path, "P5", width, height, 65535, bytes.data(), bytes.size());
}

void write_rgb(const fs::path& path, const RgbImage& image) {
  std::vector<std::uint8_t> bytes(image.values.size());
  std::transform(image.values.begin(), image.values.end(), bytes.begin(), quantize8);
  write_ppm(path, image.width, image.height, bytes);
}

RgbImage read_rgb(const fs::path& path) {
  const Netpbm raw = read_netpbm(path);
  if (raw.channels != 3) throw DatasetError("expected an RGB PPM", path.string());
  RgbImage img(raw.height, raw.width);
  const float scale = 1.0f / static_cast<float>(raw.maxval);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) img.values[i] = raw.samples[i] * scale;
  return img;
}

void write_labels(const fs::path& path, const LabelMap& labels) {
  std::vector<std::uint16_t> samples(labels.values.begin(), labels.values.end());
  write_pgm16(path, labels.width, labels.height, samples);
}

LabelMap read_labels(const fs::path& path) {
  const Netpbm raw = read_netpbm(path);
  if (raw.channels != 1) throw DatasetError("expected a label PGM", path.string());
  LabelMap labels(raw.height, raw.width);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    if (raw.samples[i] > 255) throw DatasetError("label id out of range", path.string());
    labels.values[i] = static_cast<std::uint8_t>(raw.samples[i]);
  }
  return labels;
}

void write_edges(const fs::path& path, const EdgeMap& edges) {
  write_pgm8(path, edges.width, edges.height, edges.values);
}

EdgeMap read_edges(const fs::path& path) {
  const Netpbm raw = read_netpbm(path);
  if (raw.channels != 1 || raw.maxval != 255) {
    throw DatasetError("expected an 8-bit edge PGM", path.string());
  }
  EdgeMap edges(raw.height, raw.width);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    edges.values[i] = static_cast<std::uint8_t>(raw.samples[i]);
  }
  return edges;
}

int depth_quantum_mm(double z_max) {
  const double mm = z_max * 1000.0;
  return std::max(1, static_cast<int>(std::ceil(mm / 65535.0)));
}

void write_depth(const fs::path& path, const DepthMap& depth, int quantum_mm) {
  std::vector<std::uint16_t> samples(depth.values.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double q = std::round(static_cast<double>(depth.values[i]) * 1000.0 / quantum_mm);
    samples[i] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
  }
  write_pgm16(path, depth.width, depth.height, samples);
}

DepthMap read_depth(const fs::path& path, int quantum_mm) {
  const Netpbm raw = read_netpbm(path);
  if (raw.channels != 1) throw DatasetError("expected a depth PGM", path.string());
  DepthMap depth(raw.height, raw.width);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    depth.values[i] = static_cast<float>(raw.samples[i] * static_cast<double>(quantum_mm) / 1000.0);
  }
  return depth;
}

}  // namespace edgeuda::io
