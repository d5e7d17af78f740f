#include "edgeuda/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "edgeuda/error.hpp"

namespace edgeuda::nn {
namespace {

constexpr char kMagic[8] = {'E', 'D', 'G', 'E', 'U', 'D', 'A', '\0'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_f32(std::string& out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw DatasetError("truncated checkpoint", "<checkpoint>");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  float f32() {
    float v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void append_set(std::string& out, const ParamSet& set, const std::string& prefix) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string name = prefix + set.names[i];
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    const Shape s = set.tensors[i].shape();
    put_u32(out, 4);
    for (int d : {s.n, s.c, s.h, s.w}) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : set.tensors[i].values()) put_f32(out, static_cast<float>(v));
  }
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.generator.size() + ckpt.discriminator.size()));
  append_set(out, ckpt.generator, "gen.");
  append_set(out, ckpt.discriminator, "disc.");
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (std::memcmp(in.take(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
    throw DatasetError("bad checkpoint magic", "<checkpoint>");
  }
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw DatasetError("unsupported checkpoint version " + std::to_string(version),
                       "<checkpoint>");
  }
  Checkpoint ckpt;
  const std::uint32_t count = in.u32();
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint32_t len = in.u32();
    std::string name(in.take(len), len);
    if (in.u32() != 4) throw DatasetError("checkpoint tensor rank must be 4", name);
    Shape s;
    s.n = static_cast<int>(in.u32());
    s.c = static_cast<int>(in.u32());
    s.h = static_cast<int>(in.u32());
    s.w = static_cast<int>(in.u32());
    Tensor value(s);
    for (double& v : value.values()) v = in.f32();
    if (name.rfind("gen.", 0) == 0) {
      ckpt.generator.add(name.substr(4), std::move(value));
    } else if (name.rfind("disc.", 0) == 0) {
      ckpt.discriminator.add(name.substr(5), std::move(value));
    } else {
      throw DatasetError("checkpoint tensor without gen./disc. prefix", name);
    }
  }
  if (!in.done()) throw DatasetError("trailing bytes in checkpoint", "<checkpoint>");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write checkpoint", path.string());
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DatasetError("checkpoint write failed", path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open checkpoint", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_checkpoint(buf.str());
  } catch (const DatasetError& e) {
    throw DatasetError(e.what(), path.string());
  }
}

ParamSet conform(const ParamSet& layout, const ParamSet& source, const char* what) {
  if (layout.names != source.names) {
    throw ConfigError(std::string(what) + ": parameter names do not match the architecture");
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!(layout.tensors[i].shape() == source.tensors[i].shape())) {
      throw ConfigError(std::string(what) + ": shape mismatch for " + layout.names[i] + " (" +
                        source.tensors[i].shape().str() + " vs " +
                        layout.tensors[i].shape().str() + ")");
    }
  }
  return source;
}

}  // namespace edgeuda::nn
