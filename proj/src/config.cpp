#include "phasekd/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "phasekd/io.hpp"

namespace phasekd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for " + key + ": '" + value + "'");
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(key, value));
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean value for " + key + ": '" + value + "' (use true/false)");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split(value, ',')) out.push_back(parse_double(key, part));
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const std::string& part : split(value, ',')) out.push_back(parse_u64(key, part));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const std::string& part : split(value, ',')) out.push_back(parse_size(key, part));
  return out;
}

// "1-2,4-5"; "none" for an empty list.
std::vector<std::pair<int, int>> parse_pair_list(const std::string& key, const std::string& value) {
  std::vector<std::pair<int, int>> out;
  if (value == "none") return out;
  for (const std::string& part : split(value, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      throw ConfigError("invalid pair for " + key + ": '" + part + "' (use a-b)");
    }
    out.emplace_back(parse_int(key, trim(part.substr(0, dash))),
                     parse_int(key, trim(part.substr(dash + 1))));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << sep;
    os << items[i];
  }
  return os.str();
}

std::string join_pairs(const std::vector<std::pair<int, int>>& pairs) {
  if (pairs.empty()) return "none";
  std::ostringstream os;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) os << ",";
    os << pairs[i].first << "-" << pairs[i].second;
  }
  return os.str();
}

// Shortest decimal form that round-trips the double.
std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using SectionTable = std::map<std::string, Setter>;

const std::map<std::string, SectionTable>& config_tables() {
  static const std::map<std::string, SectionTable> tables = {
      {"data",
       {
           {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.seed = parse_u64(k, v); }},
           {"n_videos", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.n_videos = parse_size(k, v); }},
           {"n_phases", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.n_phases = parse_size(k, v); }},
           {"raw_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.raw_dim = parse_size(k, v); }},
           {"min_length", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.min_length = parse_size(k, v); }},
           {"max_length", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.max_length = parse_size(k, v); }},
           {"duration_mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.duration_mu = parse_double_list(k, v); }},
           {"duration_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.duration_sigma = parse_double(k, v); }},
           {"skip_prob", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.skip_prob = parse_double(k, v); }},
           {"noise_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.noise_sigma = parse_double(k, v); }},
           {"drift_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.drift_sigma = parse_double(k, v); }},
           {"confusable_pairs", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.confusable_pairs = parse_pair_list(k, v); }},
           {"confusable_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.confusable_scale = parse_double(k, v); }},
           {"n_train", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.n_train = parse_size(k, v); }},
       }},
      {"encoder",
       {
           {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.epochs = parse_size(k, v); }},
           {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.batch_size = parse_size(k, v); }},
           {"optimizer", [](RunConfig& c, const std::string&, const std::string& v) { c.encoder.optimizer = v; }},
           {"learning_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.learning_rate = parse_double(k, v); }},
           {"weight_decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.weight_decay = parse_double(k, v); }},
           {"momentum", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.momentum = parse_double(k, v); }},
           {"hidden_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.hidden_dim = parse_size(k, v); }},
           {"feature_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.feature_dim = parse_size(k, v); }},
           {"proj_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.proj_dim = parse_size(k, v); }},
           {"self_kd", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.self_kd = parse_bool(k, v); }},
           {"similarity", [](RunConfig& c, const std::string&, const std::string& v) { c.encoder.similarity = v; }},
           {"kl_temperature", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.kl_temperature = parse_double(k, v); }},
           {"symmetrize", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.symmetrize = parse_bool(k, v); }},
           {"ema_tau0", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.ema_tau0 = parse_double(k, v); }},
           {"aug_noise_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.aug_noise_sigma = parse_double(k, v); }},
           {"aug_mask_prob", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.aug_mask_prob = parse_double(k, v); }},
           {"aug_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.aug_scale = parse_double(k, v); }},
       }},
      {"decoder",
       {
           {"kind", [](RunConfig& c, const std::string&, const std::string& v) { c.decoder.kind = v; }},
           {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.epochs = parse_size(k, v); }},
           {"optimizer", [](RunConfig& c, const std::string&, const std::string& v) { c.decoder.optimizer = v; }},
           {"learning_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.learning_rate = parse_double(k, v); }},
           {"weight_decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.weight_decay = parse_double(k, v); }},
           {"self_kd", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.self_kd = parse_bool(k, v); }},
           {"lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.lambda = parse_double(k, v); }},
           {"tmse_tau", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.tmse_tau = parse_double(k, v); }},
           {"temperature", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.temperature = parse_double(k, v); }},
           {"teacher_frame_offset", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.teacher_frame_offset = parse_int(k, v); }},
           {"gru_hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.gru_hidden = parse_size(k, v); }},
           {"tcn_stages", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.tcn_stages = parse_size(k, v); }},
           {"tcn_blocks", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.tcn_blocks = parse_size(k, v); }},
           {"tcn_channels", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.tcn_channels = parse_size(k, v); }},
           {"tcn_kernel", [](RunConfig& c, const std::string& k, const std::string& v) { c.decoder.tcn_kernel = parse_size(k, v); }},
       }},
      {"experiment",
       {
           {"seeds", [](RunConfig& c, const std::string& k, const std::string& v) { c.experiment.seeds = parse_u64_list(k, v); }},
           {"k_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.experiment.k_list = parse_size_list(k, v); }},
           {"threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.experiment.threads = parse_size(k, v); }},
       }},
      {"paths",
       {
           {"data", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.data = v; }},
           {"features", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.features = v; }},
           {"encoder_model", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.encoder_model = v; }},
           {"decoder_model", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.decoder_model = v; }},
           {"report", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.report = v; }},
           {"log", [](RunConfig& c, const std::string&, const std::string& v) { c.paths.log = v; }},
       }},
  };
  return tables;
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  const auto& tables = config_tables();
  const SectionTable* current = nullptr;
  std::string section_name;

  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header: " + line);
      section_name = trim(line.substr(1, line.size() - 2));
      auto it = tables.find(section_name);
      if (it == tables.end()) throw ConfigError("unknown config section: [" + section_name + "]");
      current = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + " is not 'key = value': " + line);
    }
    if (current == nullptr) throw ConfigError("key before any [section]: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = current->find(key);
    if (it == current->end()) {
      throw ConfigError("unknown config key: " + section_name + "." + key);
    }
    it->second(config, section_name + "." + key, value);
  }
  validate(config);
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[data]\n";
  os << "seed = " << c.data.seed << "\n";
  os << "n_videos = " << c.data.n_videos << "\n";
  os << "n_phases = " << c.data.n_phases << "\n";
  os << "raw_dim = " << c.data.raw_dim << "\n";
  os << "min_length = " << c.data.min_length << "\n";
  os << "max_length = " << c.data.max_length << "\n";
  os << "duration_mu = " << join(c.data.duration_mu) << "\n";
  os << "duration_sigma = " << fmt(c.data.duration_sigma) << "\n";
  os << "skip_prob = " << fmt(c.data.skip_prob) << "\n";
  os << "noise_sigma = " << fmt(c.data.noise_sigma) << "\n";
  os << "drift_sigma = " << fmt(c.data.drift_sigma) << "\n";
  os << "confusable_pairs = " << join_pairs(c.data.confusable_pairs) << "\n";
  os << "confusable_scale = " << fmt(c.data.confusable_scale) << "\n";
  os << "n_train = " << c.data.n_train << "\n";
  os << "\n[encoder]\n";
  os << "epochs = " << c.encoder.epochs << "\n";
  os << "batch_size = " << c.encoder.batch_size << "\n";
  os << "optimizer = " << c.encoder.optimizer << "\n";
  os << "learning_rate = " << fmt(c.encoder.learning_rate) << "\n";
  os << "weight_decay = " << fmt(c.encoder.weight_decay) << "\n";
  os << "momentum = " << fmt(c.encoder.momentum) << "\n";
  os << "hidden_dim = " << c.encoder.hidden_dim << "\n";
  os << "feature_dim = " << c.encoder.feature_dim << "\n";
  os << "proj_dim = " << c.encoder.proj_dim << "\n";
  os << "self_kd = " << (c.encoder.self_kd ? "true" : "false") << "\n";
  os << "similarity = " << c.encoder.similarity << "\n";
  os << "kl_temperature = " << fmt(c.encoder.kl_temperature) << "\n";
  os << "symmetrize = " << (c.encoder.symmetrize ? "true" : "false") << "\n";
  os << "ema_tau0 = " << fmt(c.encoder.ema_tau0) << "\n";
  os << "aug_noise_sigma = " << fmt(c.encoder.aug_noise_sigma) << "\n";
  os << "aug_mask_prob = " << fmt(c.encoder.aug_mask_prob) << "\n";
  os << "aug_scale = " << fmt(c.encoder.aug_scale) << "\n";
  os << "\n[decoder]\n";
  os << "kind = " << c.decoder.kind << "\n";
  os << "epochs = " << c.decoder.epochs << "\n";
  os << "optimizer = " << c.decoder.optimizer << "\n";
  os << "learning_rate = " << fmt(c.decoder.learning_rate) << "\n";
  os << "weight_decay = " << fmt(c.decoder.weight_decay) << "\n";
  os << "self_kd = " << (c.decoder.self_kd ? "true" : "false") << "\n";
  os << "lambda = " << fmt(c.decoder.lambda) << "\n";
  os << "tmse_tau = " << fmt(c.decoder.tmse_tau) << "\n";
  os << "temperature = " << fmt(c.decoder.temperature) << "\n";
  os << "teacher_frame_offset = " << c.decoder.teacher_frame_offset << "\n";
  os << "gru_hidden = " << c.decoder.gru_hidden << "\n";
  os << "tcn_stages = " << c.decoder.tcn_stages << "\n";
  os << "tcn_blocks = " << c.decoder.tcn_blocks << "\n";
  os << "tcn_channels = " << c.decoder.tcn_channels << "\n";
  os << "tcn_kernel = " << c.decoder.tcn_kernel << "\n";
  os << "\n[experiment]\n";
  os << "seeds = " << join(c.experiment.seeds) << "\n";
  os << "k_list = " << join(c.experiment.k_list) << "\n";
  os << "threads = " << c.experiment.threads << "\n";
  os << "\n[paths]\n";
  os << "data = " << c.paths.data << "\n";
  os << "features = " << c.paths.features << "\n";
  os << "encoder_model = " << c.paths.encoder_model << "\n";
  os << "decoder_model = " << c.paths.decoder_model << "\n";
  os << "report = " << c.paths.report << "\n";
  os << "log = " << c.paths.log << "\n";
  return os.str();
}

void validate(const RunConfig& c) {
  auto config_check = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  config_check(c.data.n_videos >= 2, "data.n_videos must be at least 2");
  config_check(c.data.n_phases >= 2, "data.n_phases must be at least 2");
  config_check(c.data.raw_dim >= 1, "data.raw_dim must be positive");
  config_check(c.data.min_length >= 1 && c.data.min_length <= c.data.max_length,
               "data.min_length/max_length range is invalid");
  config_check(c.data.duration_mu.size() == c.data.n_phases,
               "data.duration_mu needs exactly n_phases entries");
  config_check(c.data.skip_prob >= 0.0 && c.data.skip_prob <= 0.9,
               "data.skip_prob must lie in [0, 0.9]");
  config_check(c.data.noise_sigma >= 0.0, "data.noise_sigma must be nonnegative");
  config_check(c.data.drift_sigma >= 0.0, "data.drift_sigma must be nonnegative");
  config_check(c.data.duration_sigma >= 0.0, "data.duration_sigma must be nonnegative");
  config_check(c.data.confusable_scale > 0.0 && c.data.confusable_scale <= 1.0,
               "data.confusable_scale must lie in (0, 1]");
  for (auto [a, b] : c.data.confusable_pairs) {
    config_check(a >= 0 && b >= 0 && static_cast<std::size_t>(a) < c.data.n_phases &&
                     static_cast<std::size_t>(b) < c.data.n_phases && a != b,
                 "data.confusable_pairs entry (" + std::to_string(a) + ", " + std::to_string(b) +
                     ") is out of range for n_phases");
  }
  config_check(c.data.n_train >= 1 && c.data.n_train < c.data.n_videos,
               "data.n_train must lie in [1, n_videos)");

  config_check(c.encoder.epochs >= 1, "encoder.epochs must be positive");
  config_check(c.encoder.batch_size >= 1, "encoder.batch_size must be positive");
  config_check(c.encoder.optimizer == "sgd" || c.encoder.optimizer == "adam",
               "encoder.optimizer must be sgd or adam, got '" + c.encoder.optimizer + "'");
  config_check(c.encoder.learning_rate > 0.0, "encoder.learning_rate must be positive");
  config_check(c.encoder.weight_decay >= 0.0, "encoder.weight_decay must be nonnegative");
  config_check(c.encoder.momentum >= 0.0 && c.encoder.momentum < 1.0,
               "encoder.momentum must lie in [0, 1)");
  config_check(c.encoder.hidden_dim >= 1 && c.encoder.feature_dim >= 1 && c.encoder.proj_dim >= 1,
               "encoder dimensions must be positive");
  config_check(c.encoder.similarity == "mse" || c.encoder.similarity == "kl",
               "encoder.similarity must be mse or kl, got '" + c.encoder.similarity + "'");
  config_check(c.encoder.kl_temperature > 0.0, "encoder.kl_temperature must be positive");
  config_check(c.encoder.ema_tau0 > 0.0 && c.encoder.ema_tau0 < 1.0,
               "encoder.ema_tau0 must lie in (0, 1)");
  config_check(c.encoder.aug_noise_sigma >= 0.0, "encoder.aug_noise_sigma must be nonnegative");
  config_check(c.encoder.aug_mask_prob >= 0.0 && c.encoder.aug_mask_prob <= 1.0,
               "encoder.aug_mask_prob must lie in [0, 1]");
  config_check(c.encoder.aug_scale >= 0.0 && c.encoder.aug_scale < 1.0,
               "encoder.aug_scale must lie in [0, 1)");

  config_check(c.decoder.kind == "gru" || c.decoder.kind == "tcn",
               "decoder.kind must be gru or tcn, got '" + c.decoder.kind + "'");
  config_check(c.decoder.epochs >= 1, "decoder.epochs must be positive");
  config_check(c.decoder.optimizer == "sgd" || c.decoder.optimizer == "adam",
               "decoder.optimizer must be sgd or adam, got '" + c.decoder.optimizer + "'");
  config_check(c.decoder.learning_rate > 0.0, "decoder.learning_rate must be positive");
  config_check(c.decoder.weight_decay >= 0.0, "decoder.weight_decay must be nonnegative");
  config_check(c.decoder.lambda >= 0.0, "decoder.lambda must be nonnegative");
  config_check(c.decoder.tmse_tau > 0.0, "decoder.tmse_tau must be positive");
  config_check(c.decoder.temperature > 0.0, "decoder.temperature must be positive");
  config_check(c.decoder.teacher_frame_offset == 0 || c.decoder.teacher_frame_offset == 1,
               "decoder.teacher_frame_offset must be 0 or 1");
  config_check(c.decoder.gru_hidden >= 1, "decoder.gru_hidden must be positive");
  config_check(c.decoder.tcn_stages >= 1, "decoder.tcn_stages must be positive");
  config_check(c.decoder.tcn_blocks >= 1, "decoder.tcn_blocks must be positive");
  config_check(c.decoder.tcn_channels >= 1, "decoder.tcn_channels must be positive");
  config_check(c.decoder.tcn_kernel >= 1, "decoder.tcn_kernel must be positive");

  config_check(!c.experiment.seeds.empty(), "experiment.seeds must not be empty");
}

PhaseModelSpec to_phase_model_spec(const DataSection& data) {
  PhaseModelSpec spec;
  spec.num_phases = data.n_phases;
  spec.raw_dim = data.raw_dim;
  spec.duration_mu = data.duration_mu;
  spec.duration_sigma = data.duration_sigma;
  spec.skip_prob = data.skip_prob;
  spec.noise_sigma = data.noise_sigma;
  spec.drift_sigma = data.drift_sigma;
  spec.confusable_pairs = data.confusable_pairs;
  spec.confusable_scale = data.confusable_scale;
  spec.prototype_seed = data.seed;
  return spec;
}

EncoderArch to_encoder_arch(const DataSection& data, const EncoderSection& enc) {
  EncoderArch arch;
  arch.raw_dim = data.raw_dim;
  arch.hidden_dim = enc.hidden_dim;
  arch.feature_dim = enc.feature_dim;
  arch.proj_dim = enc.proj_dim;
  arch.num_classes = data.n_phases;
  return arch;
}

DecoderArch to_decoder_arch(const DecoderSection& dec) {
  DecoderArch arch;
  arch.gru_hidden = dec.gru_hidden;
  arch.tcn_stages = dec.tcn_stages;
  arch.tcn_blocks = dec.tcn_blocks;
  arch.tcn_channels = dec.tcn_channels;
  arch.tcn_kernel = dec.tcn_kernel;
  return arch;
}

AugmentConfig to_augment_config(const EncoderSection& enc) {
  return AugmentConfig{enc.aug_noise_sigma, enc.aug_mask_prob, enc.aug_scale};
}

EncoderLossConfig to_encoder_loss_config(const EncoderSection& enc) {
  EncoderLossConfig cfg;
  cfg.similarity_kind = similarity_from_name(enc.similarity);
  cfg.proj_dim = enc.proj_dim;
  cfg.symmetrize = enc.symmetrize;
  cfg.kl_temperature = enc.kl_temperature;
  return cfg;
}

DecoderLossConfig to_decoder_loss_config(const DecoderSection& dec) {
  DecoderLossConfig cfg;
  cfg.lambda = dec.lambda;
  cfg.tau = dec.tmse_tau;
  cfg.temperature = dec.temperature;
  cfg.teacher_frame_offset = dec.teacher_frame_offset;
  return cfg;
}

OptimizerConfig to_optimizer_config(const EncoderSection& enc) {
  OptimizerConfig cfg;
  cfg.kind = optimizer_from_name(enc.optimizer);
  cfg.learning_rate = enc.learning_rate;
  cfg.weight_decay = enc.weight_decay;
  cfg.momentum = enc.momentum;
  return cfg;
}

OptimizerConfig to_optimizer_config(const DecoderSection& dec) {
  OptimizerConfig cfg;
  cfg.kind = optimizer_from_name(dec.optimizer);
  cfg.learning_rate = dec.learning_rate;
  cfg.weight_decay = dec.weight_decay;
  return cfg;
}

}  // namespace phasekd
