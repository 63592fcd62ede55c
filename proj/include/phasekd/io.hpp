#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasekd/synth.hpp"

namespace phasekd {

// "PKDV" dataset container: magic, version u32, n_videos u32; per video
// id u32, L u64, raw_dim u64, labels as u16[L], frames as f64[L * raw_dim]
// row-major. All little-endian.
void save_dataset(std::ostream& os, const std::vector<VideoSample>& videos);
std::vector<VideoSample> load_dataset(std::istream& is);
void save_dataset_file(const std::string& path, const std::vector<VideoSample>& videos);
std::vector<VideoSample> load_dataset_file(const std::string& path);

/// Per-frame features of one video plus the labels joined from the dataset.
struct FeatureVideo {
  std::uint32_t id = 0;
  MatrixRM features;  // [L x feature_dim]
  std::vector<int> labels;
  bool labeled = true;
};

// "PKDF" feature container: magic, version u32, n_videos u32; per video
// id u32, L u64, feature_dim u64, f64[L * feature_dim] row-major. Labels are
// not stored; they live in the dataset file.
void save_features(std::ostream& os, const std::vector<FeatureVideo>& videos);
std::vector<FeatureVideo> load_features(std::istream& is);
void save_features_file(const std::string& path, const std::vector<FeatureVideo>& videos);
std::vector<FeatureVideo> load_features_file(const std::string& path);

/// Joins labels and labeled flags from dataset videos onto loaded features
/// by video id. Every feature video must have a dataset counterpart with
/// the same length.
void attach_labels(std::vector<FeatureVideo>& features, const std::vector<VideoSample>& dataset);

/// Prediction text format: one line per video, "video_id,l0 l1 l2 ...".
struct PredictionFile {
  std::vector<std::uint32_t> video_ids;
  std::vector<std::vector<int>> labels;
};

void save_predictions(std::ostream& os, const PredictionFile& predictions);
PredictionFile load_predictions(std::istream& is);
void save_predictions_file(const std::string& path, const PredictionFile& predictions);
PredictionFile load_predictions_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace phasekd
