#pragma once

#include <filesystem>
#include <string>

#include "edgeuda/nn/params.hpp"

namespace edgeuda::nn {

// Little-endian binary layout:
//   char[8]  magic "EDGEUDA\0"
//   u32      version (1)
//   u32      tensor count
//   per tensor: u32 name length, name bytes, u32 rank (4), u32 dims[4],
//               float32 payload in NCHW order
// Generator tensors are prefixed "gen.", discriminator tensors "disc.".
struct Checkpoint {
  ParamSet generator;
  ParamSet discriminator;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies values from `source` into `layout` after checking names and shapes.
ParamSet conform(const ParamSet& layout, const ParamSet& source, const char* what);

}  // namespace edgeuda::nn
