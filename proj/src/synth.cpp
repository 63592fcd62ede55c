#include "phasekd/synth.hpp"

#include <algorithm>
#include <cmath>

#include "phasekd/rng.hpp"

namespace phasekd {

namespace {

constexpr std::uint64_t kPrototypeStream = 0x70726f746fULL;  // "proto"
constexpr std::uint64_t kVideoStream = 0x766964ULL;          // "vid"
constexpr std::uint64_t kExcludeStream = 0x65786cULL;        // "exl"
constexpr std::size_t kMinPhaseFrames = 5;

}  // namespace

PhaseModel make_phase_model(const PhaseModelSpec& spec) {
  if (spec.num_phases < 2) throw ParamError("phase model needs at least 2 phases");
  if (spec.raw_dim == 0) throw ParamError("raw_dim must be positive");
  if (spec.duration_mu.size() != spec.num_phases) {
    throw ParamError("duration_mu needs one entry per phase, got " +
                     std::to_string(spec.duration_mu.size()));
  }
  for (double mu : spec.duration_mu) {
    if (!(mu > 0.0)) throw ParamError("phase durations must be positive");
  }
  if (spec.skip_prob < 0.0 || spec.skip_prob > 0.9) {
    throw ParamError("skip_prob must lie in [0, 0.9]");
  }
  if (spec.noise_sigma < 0.0 || spec.drift_sigma < 0.0 || spec.duration_sigma < 0.0) {
    throw ParamError("noise scales must be nonnegative");
  }
  if (spec.confusable_scale <= 0.0 || spec.confusable_scale > 1.0) {
    throw ParamError("confusable_scale must lie in (0, 1]");
  }

  PhaseModel model;
  model.num_phases = spec.num_phases;
  model.raw_dim = spec.raw_dim;
  model.duration_mu = spec.duration_mu;
  model.duration_sigma.assign(spec.num_phases, spec.duration_sigma);
  model.skip_prob.assign(spec.num_phases, spec.skip_prob);
  model.noise_sigma = spec.noise_sigma;
  model.drift_sigma = spec.drift_sigma;

  Rng rng(derive_seed(spec.prototype_seed, kPrototypeStream));
  model.prototypes.resize(static_cast<Eigen::Index>(spec.num_phases),
                          static_cast<Eigen::Index>(spec.raw_dim));
  for (Eigen::Index p = 0; p < model.prototypes.rows(); ++p)
    for (Eigen::Index d = 0; d < model.prototypes.cols(); ++d) model.prototypes(p, d) = rng.normal();

  for (auto [a, b] : spec.confusable_pairs) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= spec.num_phases ||
        static_cast<std::size_t>(b) >= spec.num_phases || a == b) {
      throw ParamError("confusable pair (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") is not a valid phase pair");
    }
    model.prototypes.row(b) =
        model.prototypes.row(a) +
        spec.confusable_scale * (model.prototypes.row(b) - model.prototypes.row(a));
  }
  return model;
}

std::vector<VideoSample> generate_dataset(const PhaseModel& model, std::size_t n_videos,
                                          std::size_t min_length, std::size_t max_length,
                                          std::uint64_t seed) {
  if (n_videos == 0) throw ParamError("n_videos must be at least 1");
  if (min_length == 0 || min_length > max_length) {
    throw ParamError("length range [" + std::to_string(min_length) + ", " +
                     std::to_string(max_length) + "] is invalid");
  }

  std::vector<VideoSample> videos(n_videos);
  for (std::size_t v = 0; v < n_videos; ++v) {
    VideoSample& video = videos[v];
    video.id = static_cast<std::uint32_t>(v);
    Rng rng(derive_seed(seed, kVideoStream, v));

    // Surviving phases, left-to-right order; at least 2 must remain.
    std::vector<std::size_t> phases;
    for (int attempt = 0; attempt < 64 && phases.size() < 2; ++attempt) {
      phases.clear();
      for (std::size_t c = 0; c < model.num_phases; ++c) {
        if (rng.uniform() >= model.skip_prob[c]) phases.push_back(c);
      }
    }
    if (phases.size() < 2) {
      phases.clear();
      for (std::size_t c = 0; c < model.num_phases; ++c) phases.push_back(c);
    }

    std::vector<std::size_t> durations(phases.size());
    double total = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const std::size_t c = phases[i];
      const double frames =
          std::exp(std::log(model.duration_mu[c]) + model.duration_sigma[c] * rng.normal());
      durations[i] = std::max<std::size_t>(kMinPhaseFrames, static_cast<std::size_t>(std::llround(frames)));
      total += static_cast<double>(durations[i]);
    }
    double rescale = 1.0;
    if (total < static_cast<double>(min_length)) rescale = static_cast<double>(min_length) / total;
    if (total > static_cast<double>(max_length)) rescale = static_cast<double>(max_length) / total;
    std::size_t length = 0;
    for (std::size_t& d : durations) {
      d = std::max<std::size_t>(kMinPhaseFrames,
                                static_cast<std::size_t>(std::llround(static_cast<double>(d) * rescale)));
      length += d;
    }

    video.frames.resize(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(model.raw_dim));
    video.labels.resize(length);
    Eigen::Index frame = 0;
    Eigen::RowVectorXd drift(static_cast<Eigen::Index>(model.raw_dim));
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const std::size_t c = phases[i];
      drift.setZero();  // random walk restarts at each phase boundary
      for (std::size_t f = 0; f < durations[i]; ++f, ++frame) {
        for (Eigen::Index d = 0; d < drift.size(); ++d) drift(d) += model.drift_sigma * rng.normal();
        for (Eigen::Index d = 0; d < drift.size(); ++d) {
          video.frames(frame, d) = model.prototypes(static_cast<Eigen::Index>(c), d) + drift(d) +
                                   model.noise_sigma * rng.normal();
        }
        video.labels[static_cast<std::size_t>(frame)] = static_cast<int>(c);
      }
    }
  }
  return videos;
}

Eigen::RowVectorXd augment(const Eigen::Ref<const Eigen::RowVectorXd>& frame,
                           const AugmentConfig& cfg, std::uint64_t seed, int view_index) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(view_index) + 1));
  Eigen::RowVectorXd out = frame;
  for (Eigen::Index d = 0; d < out.size(); ++d) out(d) += cfg.noise_sigma * rng.normal();
  for (Eigen::Index d = 0; d < out.size(); ++d) {
    if (rng.uniform() < cfg.mask_prob) out(d) = 0.0;
  }
  out *= rng.uniform(1.0 - cfg.scale_delta, 1.0 + cfg.scale_delta);
  return out;
}

std::pair<std::vector<VideoSample>, std::vector<VideoSample>> split(
    const std::vector<VideoSample>& dataset, std::size_t n_train) {
  if (n_train >= dataset.size()) {
    throw ParamError("n_train " + std::to_string(n_train) + " must be smaller than the dataset (" +
                     std::to_string(dataset.size()) + " videos)");
  }
  std::vector<VideoSample> sorted = dataset;
  std::sort(sorted.begin(), sorted.end(),
            [](const VideoSample& a, const VideoSample& b) { return a.id < b.id; });
  std::vector<VideoSample> train(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<VideoSample> test(sorted.begin() + static_cast<std::ptrdiff_t>(n_train), sorted.end());
  return {std::move(train), std::move(test)};
}

ExcludeMode exclude_mode_from_name(const std::string& name) {
  if (name == "drop_entirely") return ExcludeMode::kDropEntirely;
  if (name == "drop_labels") return ExcludeMode::kDropLabels;
  throw ParamError("unknown exclusion mode: " + name);
}

const char* exclude_mode_name(ExcludeMode mode) {
  return mode == ExcludeMode::kDropEntirely ? "drop_entirely" : "drop_labels";
}

std::vector<VideoSample> exclude_videos(const std::vector<VideoSample>& train, std::size_t k,
                                        ExcludeMode mode, std::uint64_t seed) {
  if (k >= train.size()) {
    throw ParamError("cannot exclude " + std::to_string(k) + " of " + std::to_string(train.size()) +
                     " training videos");
  }
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, kExcludeStream));
  rng.shuffle(order);

  std::vector<bool> excluded(train.size(), false);
  for (std::size_t i = 0; i < k; ++i) excluded[order[i]] = true;

  std::vector<VideoSample> out;
  out.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (excluded[i] && mode == ExcludeMode::kDropEntirely) continue;
    VideoSample v = train[i];
    if (excluded[i]) v.labeled = false;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace phasekd
