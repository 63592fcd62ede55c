#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phasekd/config.hpp"
#include "phasekd/ema.hpp"
#include "phasekd/io.hpp"
#include "phasekd/layers.hpp"
#include "phasekd/losses.hpp"
#include "phasekd/metrics.hpp"
#include "phasekd/optim.hpp"
#include "phasekd/synth.hpp"

namespace phasekd {

/// Loss-term provenance counters; the unlabeled classification counters must
/// stay zero in every run.
struct LossCounters {
  long enc_ce_frames_labeled = 0;
  long enc_ce_frames_unlabeled = 0;
  long enc_sim_frames_labeled = 0;
  long enc_sim_frames_unlabeled = 0;
  long dec_ce_videos_labeled = 0;
  long dec_ce_videos_unlabeled = 0;
  long dec_tmse_videos_labeled = 0;
  long dec_tmse_videos_unlabeled = 0;
};

struct EncoderStepRecord {
  int epoch = 0;
  long step = 0;
  double classification = 0.0;
  double similarity = 0.0;
  double loss = 0.0;
  double batch_accuracy = 0.0;
  double tau = 0.0;  // EMA decay applied after this step
};

struct EncoderEpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

/// Observation points inside one encoder step, in execution order.
struct EncoderStepEvent {
  enum class Point { kBeforeStep, kAfterOptimizerStep, kAfterEmaUpdate };
  Point point;
  long global_step;
  const ParameterSet* teacher;  // null when self-KD is off
  const ParameterSet* student;
};

struct EncoderRunConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  OptimizerConfig optimizer;
  double ema_tau0 = 0.9995;
  EncoderLossConfig loss;
  bool self_kd = true;
  EncoderArch arch;
  AugmentConfig augment;
  std::uint64_t seed = 1;
  std::function<void(const EncoderStepEvent&)> step_observer;  // optional, for tests
};

struct EncoderTrainLog {
  std::vector<EncoderStepRecord> steps;
  std::vector<EncoderEpochRecord> epochs;
  LossCounters counters;
};

struct EncoderTrainResult {
  EncoderModel model;
  EncoderTrainLog log;
};

/// Joint classification + feature-similarity training with an EMA teacher
/// on the cosine decay schedule. With self_kd off this is plain supervised
/// training on single augmented views. The teacher is discarded at the end.
EncoderTrainResult train_encoder(const std::vector<VideoSample>& train_videos,
                                 const EncoderRunConfig& cfg);

/// Evaluation-mode backbone features per frame, no augmentation.
std::vector<FeatureVideo> extract_features(const EncoderModel& model,
                                           const std::vector<VideoSample>& videos);

struct DecoderStepRecord {
  int epoch = 0;
  long step = 0;
  std::uint32_t video_id = 0;
  double classification = 0.0;
  double smoothing = 0.0;  // unweighted truncated-MSE term
  double loss = 0.0;
};

struct DecoderEpochRecord {
  int epoch = 0;
  double mean_classification = 0.0;
  double mean_smoothing = 0.0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;    // final-stage cross-entropy on the test split
  int teacher_epoch = -1;    // teacher used during this epoch; -1 means none
};

struct DecoderRunConfig {
  DecoderKind kind = DecoderKind::kGru;
  std::size_t epochs = 30;
  OptimizerConfig optimizer{OptimizerKind::kAdam, 1e-3, 0.0};
  DecoderLossConfig loss;
  bool self_kd = true;
  DecoderArch arch;
  std::size_t num_classes = 7;
  std::uint64_t seed = 1;
};

struct DecoderTrainLog {
  std::vector<DecoderStepRecord> steps;
  std::vector<DecoderEpochRecord> epochs;
  LossCounters counters;
  /// (epoch, training accuracy) pairs exactly as consumed by teacher
  /// promotion.
  std::vector<std::pair<int, double>> accuracy_history;
  int best_test_epoch = -1;
};

struct DecoderTrainResult {
  std::unique_ptr<Decoder> model;  // restored to the lowest-test-loss epoch
  DecoderTrainLog log;
  std::vector<TeacherState> teacher_history;  // promotions in order
};

/// One full-video sequence per optimizer step; best-epoch teacher promotion
/// at every epoch end; metrics checkpoint at the lowest test loss.
DecoderTrainResult train_decoder(const std::vector<FeatureVideo>& train,
                                 const std::vector<FeatureVideo>& test,
                                 const DecoderRunConfig& cfg);

/// Final-stage argmax predictions per video (evaluation mode, causal).
std::vector<std::vector<int>> predict(const Decoder& model,
                                      const std::vector<FeatureVideo>& videos);

MetricsReport evaluate_predictions(const std::vector<std::vector<int>>& predictions,
                                   const std::vector<FeatureVideo>& videos, int num_classes);

// -- Full pipelines and experiment drivers ----------------------------------

struct PipelineResult {
  MetricsReport test_metrics;
  EncoderTrainLog encoder_log;
  DecoderTrainLog decoder_log;
  std::vector<std::vector<int>> test_predictions;
  std::vector<std::uint32_t> test_video_ids;
};

/// encoder -> features -> decoder -> test metrics, with both self-KD stages
/// individually switchable (the ablation arms).
PipelineResult run_pipeline(const std::vector<VideoSample>& train_videos,
                            const std::vector<VideoSample>& test_videos, const RunConfig& base,
                            bool enc_kd, bool dec_kd, DecoderKind kind, std::uint64_t seed);

// Sub-configs with the pipeline's seed derivation; the grid drivers and
// run_pipeline share these so matching arms are bitwise identical.
EncoderRunConfig make_encoder_run_config(const RunConfig& base, bool enc_kd, std::uint64_t seed);
DecoderRunConfig make_decoder_run_config(const RunConfig& base, bool dec_kd, DecoderKind kind,
                                         std::uint64_t seed);

struct AblationRow {
  DecoderKind kind = DecoderKind::kGru;
  bool enc_kd = false;
  bool dec_kd = false;
  std::vector<MetricsReport> per_seed;
  MetricAggregate accuracy;  // over per-seed mean accuracies
  MetricAggregate f1;
  MetricAggregate jaccard;
  MetricAggregate predicted_segments;
};

struct AblationResult {
  std::vector<AblationRow> rows;  // per kind: (off,off), (on,off), (off,on), (on,on)
  std::vector<std::uint64_t> seeds;
};

/// Invoked once per completed arm (possibly from worker threads; each call
/// sees a distinct arm).
using ArmCallback = std::function<void(std::size_t seed_index, bool enc_kd, DecoderKind kind,
                                       bool dec_kd, const PipelineResult&)>;

/// The progressive self-KD grid: {encoder off/on} x {decoder off/on} per
/// decoder kind, shared seeds and data across arms. Each (seed, encoder arm)
/// trains one encoder that all its decoder arms share.
AblationResult run_ablation_grid(const std::vector<VideoSample>& dataset, const RunConfig& base,
                                 const std::vector<DecoderKind>& kinds, std::size_t threads,
                                 const ArmCallback& on_result = {});

struct ReducedDataRow {
  std::string block;  // "baseline" | "self_kd"
  std::size_t k = 0;
  ExcludeMode mode = ExcludeMode::kDropEntirely;
  MetricsReport metrics;
  LossCounters encoder_counters;
  LossCounters decoder_counters;
};

struct ReducedDataResult {
  std::vector<ReducedDataRow> rows;
};

using RowCallback = std::function<void(const ReducedDataRow&, const PipelineResult&)>;

/// Reduced-training-data grid: full-data baseline and self-KD rows, then
/// per-k rows for baseline drop_entirely, self-KD drop_entirely, and
/// self-KD drop_labels. The same k always removes the same videos.
ReducedDataResult run_reduced_data(const std::vector<VideoSample>& dataset, const RunConfig& base,
                                   const std::vector<std::size_t>& k_list, std::size_t threads,
                                   const RowCallback& on_result = {});

// Stable-field-order log lines (epoch, step, loss terms, accuracy, tau,
// teacher epoch).
std::vector<std::string> format_log_lines(const EncoderTrainLog& log);
std::vector<std::string> format_log_lines(const DecoderTrainLog& log);

std::string format_ablation_table(const AblationResult& result);
std::string format_reduced_data_table(const ReducedDataResult& result);

/// Worker count: explicit configuration wins, else PHASEKD_THREADS, else 1.
std::size_t resolve_thread_count(std::size_t configured);

}  // namespace phasekd
