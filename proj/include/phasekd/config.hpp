#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasekd/layers.hpp"
#include "phasekd/losses.hpp"
#include "phasekd/optim.hpp"
#include "phasekd/synth.hpp"

namespace phasekd {

struct DataSection {
  std::uint64_t seed = 1;
  std::size_t n_videos = 80;
  std::size_t n_phases = 7;
  std::size_t raw_dim = 128;
  std::size_t min_length = 150;
  std::size_t max_length = 350;
  std::vector<double> duration_mu = {60, 120, 240, 90, 180, 300, 45};
  double duration_sigma = 0.35;
  double skip_prob = 0.08;
  double noise_sigma = 1.0;
  double drift_sigma = 0.03;
  std::vector<std::pair<int, int>> confusable_pairs = {{1, 2}, {4, 5}};
  double confusable_scale = 0.35;
  std::size_t n_train = 40;
};

struct EncoderSection {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::string optimizer = "sgd";
  double learning_rate = 1e-2;
  double weight_decay = 1e-5;
  double momentum = 0.0;
  std::size_t hidden_dim = 256;
  std::size_t feature_dim = 256;
  std::size_t proj_dim = 64;
  bool self_kd = true;
  std::string similarity = "mse";
  double kl_temperature = 1.0;
  bool symmetrize = false;
  double ema_tau0 = 0.9995;
  double aug_noise_sigma = 0.3;
  double aug_mask_prob = 0.1;
  double aug_scale = 0.1;
};

struct DecoderSection {
  std::string kind = "gru";
  std::size_t epochs = 30;
  std::string optimizer = "adam";
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  bool self_kd = true;
  double lambda = 0.3;
  double tmse_tau = 8.0;
  double temperature = 2.0;
  int teacher_frame_offset = 1;
  std::size_t gru_hidden = 128;
  std::size_t tcn_stages = 2;
  std::size_t tcn_blocks = 8;
  std::size_t tcn_channels = 64;
  std::size_t tcn_kernel = 3;
};

struct ExperimentSection {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<std::size_t> k_list = {5, 10, 20};
  std::size_t threads = 0;  // 0: use PHASEKD_THREADS, else 1
};

struct PathsSection {
  std::string data = "data.pkdv";
  std::string features = "features";  // prefix: <prefix>.train.pkdf / .test.pkdf
  std::string encoder_model = "encoder.pkdw";
  std::string decoder_model = "decoder.pkdw";
  std::string report = "report.txt";
  std::string log = "train.log";
};

struct RunConfig {
  DataSection data;
  EncoderSection encoder;
  DecoderSection decoder;
  ExperimentSection experiment;
  PathsSection paths;
};

/// All defaults; dump_config(default_run_config()) prints every key.
RunConfig default_run_config();

/// Parses the "[section]\nkey = value" text format. Unknown sections or
/// keys, malformed values, and out-of-range settings raise ConfigError
/// naming the offender.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Round-trippable text form listing every key of every section.
std::string dump_config(const RunConfig& config);

void validate(const RunConfig& config);

// Converters into the module-level configuration types.
PhaseModelSpec to_phase_model_spec(const DataSection& data);
EncoderArch to_encoder_arch(const DataSection& data, const EncoderSection& enc);
DecoderArch to_decoder_arch(const DecoderSection& dec);
AugmentConfig to_augment_config(const EncoderSection& enc);
EncoderLossConfig to_encoder_loss_config(const EncoderSection& enc);
DecoderLossConfig to_decoder_loss_config(const DecoderSection& dec);
OptimizerConfig to_optimizer_config(const EncoderSection& enc);
OptimizerConfig to_optimizer_config(const DecoderSection& dec);

}  // namespace phasekd
