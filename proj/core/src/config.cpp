#include "edgeuda/config.hpp"

#include <fstream>
#include <set>

#include "edgeuda/error.hpp"

namespace edgeuda {
namespace {

using nlohmann::json;

// Reads the keys of one JSON object into existing (default-valued) fields
// and rejects whatever is left over.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + label() + "' must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: wrong type for '" + qualified(key) + "'");
    }
  }

  template <typename F>
  void nested(const char* key, F&& parse) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    ObjectReader sub(*it, qualified(key));
    parse(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("config: unknown key '" + qualified(it.key()) + "'");
      }
    }
  }

 private:
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scene(ObjectReader& r, scenegen::SceneConfig& s) {
  r.read("height", s.height);
  r.read("width", s.width);
  r.read("num_classes", s.num_classes);
  r.read("shapes_min", s.shapes_min);
  r.read("shapes_max", s.shapes_max);
  r.read("depth_min", s.depth_min);
  r.read("depth_max", s.depth_max);
  r.read("class_palette", s.class_palette);
  r.read("color_jitter", s.color_jitter);
  r.read("seed", s.seed);
}

void read_shift(ObjectReader& r, scenegen::DomainShift& s) {
  r.read("brightness_offset", s.brightness_offset);
  r.read("contrast_gain", s.contrast_gain);
  r.read("hue_rotation", s.hue_rotation);
  r.read("noise_stddev", s.noise_stddev);
  r.read("texture_frequency", s.texture_frequency);
}

template <typename F>
auto parse_root(const char* what, F&& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid ") + what + " (" + e.what() + ")");
  }
}

}  // namespace

std::string to_string(EvalHead h) { return h == EvalHead::kSemantic ? "semantic" : "refined"; }

json to_json(const scenegen::SceneConfig& s) {
  return {{"height", s.height},
          {"width", s.width},
          {"num_classes", s.num_classes},
          {"shapes_min", s.shapes_min},
          {"shapes_max", s.shapes_max},
          {"depth_min", s.depth_min},
          {"depth_max", s.depth_max},
          {"class_palette", s.class_palette},
          {"color_jitter", s.color_jitter},
          {"seed", s.seed}};
}

json to_json(const scenegen::DomainShift& s) {
  return {{"brightness_offset", s.brightness_offset},
          {"contrast_gain", s.contrast_gain},
          {"hue_rotation", s.hue_rotation},
          {"noise_stddev", s.noise_stddev},
          {"texture_frequency", s.texture_frequency}};
}

json to_json(const RunConfig& c) {
  return {
      {"scene", to_json(c.scene)},
      {"shift", to_json(c.shift)},
      {"data",
       {{"n_source", c.data.n_source},
        {"n_target", c.data.n_target},
        {"n_target_eval", c.data.n_target_eval}}},
      {"arch",
       {{"encoder_channels", c.arch.encoder_channels},
        {"decoder_channels", c.arch.decoder_channels},
        {"head_channels", c.arch.head_channels},
        {"depth_bins", c.arch.depth_bins},
        {"disc_channels", c.arch.disc_channels},
        {"disc_leaky_slope", c.arch.disc_leaky_slope}}},
      {"optim",
       {{"gen_lr", c.optim.gen_lr},
        {"gen_momentum", c.optim.gen_momentum},
        {"poly_power", c.optim.poly_power},
        {"disc_lr", c.optim.disc_lr},
        {"disc_beta1", c.optim.disc_beta1},
        {"disc_beta2", c.optim.disc_beta2},
        {"disc_eps", c.optim.disc_eps}}},
      {"weights",
       {{"seg", c.weights.seg},
        {"ref", c.weights.ref},
        {"dep", c.weights.dep},
        {"edge", c.weights.edge},
        {"adv", c.weights.adv}}},
      {"selftrain",
       {{"lambda_conf", c.selftrain.lambda_conf},
        {"rounds", c.selftrain.rounds},
        {"epochs_per_round", c.selftrain.epochs_per_round}}},
      {"canny",
       {{"gaussian_sigma", c.canny.gaussian_sigma},
        {"low_threshold", c.canny.low_threshold},
        {"high_threshold", c.canny.high_threshold}}},
      {"train",
       {{"variant", nn::to_string(c.variant)},
        {"epochs", c.epochs},
        {"warmup_fraction", c.warmup_fraction},
        {"batch_size", c.batch_size},
        {"seed", c.seed},
        {"adversarial", c.adversarial},
        {"eval_head", to_string(c.eval_head)}}},
      {"paths", {{"data_dir", c.data_dir}, {"out_dir", c.out_dir}}},
  };
}

scenegen::SceneConfig scene_config_from_json(const json& j) {
  return parse_root("scene config", [&] {
    scenegen::SceneConfig s;
    ObjectReader r(j, "scene");
    read_scene(r, s);
    r.finish();
    return s;
  });
}

scenegen::DomainShift domain_shift_from_json(const json& j) {
  return parse_root("domain shift", [&] {
    scenegen::DomainShift s;
    ObjectReader r(j, "shift");
    read_shift(r, s);
    r.finish();
    return s;
  });
}

RunConfig run_config_from_json(const json& j) {
  return parse_root("run config", [&] {
    RunConfig c;
    ObjectReader root(j, "");
    root.nested("scene", [&](ObjectReader& r) { read_scene(r, c.scene); });
    root.nested("shift", [&](ObjectReader& r) { read_shift(r, c.shift); });
    root.nested("data", [&](ObjectReader& r) {
      r.read("n_source", c.data.n_source);
      r.read("n_target", c.data.n_target);
      r.read("n_target_eval", c.data.n_target_eval);
    });
    root.nested("arch", [&](ObjectReader& r) {
      r.read("encoder_channels", c.arch.encoder_channels);
      r.read("decoder_channels", c.arch.decoder_channels);
      r.read("head_channels", c.arch.head_channels);
      r.read("depth_bins", c.arch.depth_bins);
      r.read("disc_channels", c.arch.disc_channels);
      r.read("disc_leaky_slope", c.arch.disc_leaky_slope);
    });
    root.nested("optim", [&](ObjectReader& r) {
      r.read("gen_lr", c.optim.gen_lr);
      r.read("gen_momentum", c.optim.gen_momentum);
      r.read("poly_power", c.optim.poly_power);
      r.read("disc_lr", c.optim.disc_lr);
      r.read("disc_beta1", c.optim.disc_beta1);
      r.read("disc_beta2", c.optim.disc_beta2);
      r.read("disc_eps", c.optim.disc_eps);
    });
    root.nested("weights", [&](ObjectReader& r) {
      r.read("seg", c.weights.seg);
      r.read("ref", c.weights.ref);
      r.read("dep", c.weights.dep);
      r.read("edge", c.weights.edge);
      r.read("adv", c.weights.adv);
    });
    root.nested("selftrain", [&](ObjectReader& r) {
      r.read("lambda_conf", c.selftrain.lambda_conf);
      r.read("rounds", c.selftrain.rounds);
      r.read("epochs_per_round", c.selftrain.epochs_per_round);
    });
    root.nested("canny", [&](ObjectReader& r) {
      r.read("gaussian_sigma", c.canny.gaussian_sigma);
      r.read("low_threshold", c.canny.low_threshold);
      r.read("high_threshold", c.canny.high_threshold);
    });
    root.nested("train", [&](ObjectReader& r) {
      std::string variant = nn::to_string(c.variant);
      std::string head = to_string(c.eval_head);
      r.read("variant", variant);
      r.read("epochs", c.epochs);
      r.read("warmup_fraction", c.warmup_fraction);
      r.read("batch_size", c.batch_size);
      r.read("seed", c.seed);
      r.read("adversarial", c.adversarial);
      r.read("eval_head", head);
      c.variant = nn::variant_from_string(variant);
      if (head == "semantic") {
        c.eval_head = EvalHead::kSemantic;
      } else if (head == "refined") {
        c.eval_head = EvalHead::kRefined;
      } else {
        throw ConfigError("config: train.eval_head must be 'semantic' or 'refined'");
      }
    });
    root.nested("paths", [&](ObjectReader& r) {
      r.read("data_dir", c.data_dir);
      r.read("out_dir", c.out_dir);
    });
    root.finish();
    c.validate();
    return c;
  });
}

void RunConfig::validate() const {
  scene.validate();
  arch.validate();
  optim.validate();
  weights.validate();
  selftrain.validate();
  canny.validate();
  if (scene.height % nn::SegmentationModel::kTotalStride != 0 ||
      scene.width % nn::SegmentationModel::kTotalStride != 0) {
    throw ConfigError("config: scene height/width must be divisible by 16");
  }
  if (data.n_source < 0 || data.n_target < 0 || data.n_target_eval < 0) {
    throw ConfigError("config: data counts must be non-negative");
  }
  if (epochs < 0) throw ConfigError("config: train.epochs must be >= 0");
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 1.0)) {
    throw ConfigError("config: train.warmup_fraction must be in [0,1]");
  }
  if (batch_size < 1) throw ConfigError("config: train.batch_size must be >= 1");
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config: override '" + ov + "' is not of the form key=value");
    }
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) throw ConfigError("config: malformed override key '" + key + "'");
      if (!node->is_object()) throw ConfigError("config: override '" + key + "' crosses a non-object");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    try {
      in >> j;
    } catch (const json::exception&) {
      throw ConfigError("config: " + path.string() + " is not valid JSON");
    }
  }
  apply_overrides(j, overrides);
  return run_config_from_json(j);
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DatasetError("cannot write config", path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace edgeuda
