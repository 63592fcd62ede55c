#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phasekd/tensor.hpp"

namespace phasekd {

/// Generative model of one synthetic procedure class: ordered phases with
/// log-normal durations, optional skipping, per-phase prototype vectors,
/// within-phase random-walk drift, and isotropic frame noise. Confusable
/// pairs pull selected prototypes closer together to create realistic
/// boundary ambiguity.
struct PhaseModel {
  std::size_t num_phases = 7;
  std::size_t raw_dim = 128;
  MatrixRM prototypes;                 // [num_phases x raw_dim]
  std::vector<double> duration_mu;     // median duration per phase, frames
  std::vector<double> duration_sigma;  // log-space spread per phase
  std::vector<double> skip_prob;       // per-phase omission probability
  double noise_sigma = 1.0;
  double drift_sigma = 0.03;
};

struct PhaseModelSpec {
  std::size_t num_phases = 7;
  std::size_t raw_dim = 128;
  std::vector<double> duration_mu = {60, 120, 240, 90, 180, 300, 45};
  double duration_sigma = 0.35;
  double skip_prob = 0.08;
  double noise_sigma = 1.0;
  double drift_sigma = 0.03;
  std::vector<std::pair<int, int>> confusable_pairs = {{1, 2}, {4, 5}};
  double confusable_scale = 0.35;
  std::uint64_t prototype_seed = 1;
};

/// Draws prototypes from a seeded standard normal, applies confusable-pair
/// shrinkage, and expands per-phase lists. Validates the spec.
PhaseModel make_phase_model(const PhaseModelSpec& spec);

struct VideoSample {
  std::uint32_t id = 0;
  MatrixRM frames;          // [L x raw_dim]
  std::vector<int> labels;  // per-frame phase, contiguous runs
  bool labeled = true;      // false after drop_labels exclusion
};

/// Deterministic given (model, seed); per-video RNG streams derive from
/// (seed, video id), so per-video generation order does not matter.
/// Total duration is rescaled into [min_length, max_length].
std::vector<VideoSample> generate_dataset(const PhaseModel& model, std::size_t n_videos,
                                          std::size_t min_length, std::size_t max_length,
                                          std::uint64_t seed);

struct AugmentConfig {
  double noise_sigma = 0.3;  // additive Gaussian noise
  double mask_prob = 0.1;    // random coordinate zeroing
  double scale_delta = 0.1;  // global scaling in [1 - s, 1 + s]
};

/// One stochastic view of a frame: additive noise, coordinate masking, then
/// global scaling. Deterministic given (frame, seed, view_index).
Eigen::RowVectorXd augment(const Eigen::Ref<const Eigen::RowVectorXd>& frame,
                           const AugmentConfig& cfg, std::uint64_t seed, int view_index);

/// First n_train videos by id into train, the rest into test.
std::pair<std::vector<VideoSample>, std::vector<VideoSample>> split(
    const std::vector<VideoSample>& dataset, std::size_t n_train);

enum class ExcludeMode { kDropEntirely, kDropLabels };

ExcludeMode exclude_mode_from_name(const std::string& name);
const char* exclude_mode_name(ExcludeMode mode);

/// Removes k random videos outright, or keeps them but marks them unlabeled
/// so they contribute only self-supervised loss terms.
std::vector<VideoSample> exclude_videos(const std::vector<VideoSample>& train, std::size_t k,
                                        ExcludeMode mode, std::uint64_t seed);

}  // namespace phasekd
