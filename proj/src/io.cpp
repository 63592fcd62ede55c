#include "phasekd/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "phasekd/io_binary.hpp"

namespace phasekd {

namespace {
constexpr char kDatasetMagic[4] = {'P', 'K', 'D', 'V'};
constexpr char kFeatureMagic[4] = {'P', 'K', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

}  // namespace

void save_dataset(std::ostream& os, const std::vector<VideoSample>& videos) {
  write_magic(os, kDatasetMagic);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(videos.size()));
  for (const VideoSample& v : videos) {
    write_u32(os, v.id);
    write_u64(os, static_cast<std::uint64_t>(v.frames.rows()));
    write_u64(os, static_cast<std::uint64_t>(v.frames.cols()));
    for (int label : v.labels) write_u16(os, static_cast<std::uint16_t>(label));
    for (Eigen::Index r = 0; r < v.frames.rows(); ++r)
      for (Eigen::Index c = 0; c < v.frames.cols(); ++c) write_f64(os, v.frames(r, c));
  }
}

std::vector<VideoSample> load_dataset(std::istream& is) {
  expect_magic(is, kDatasetMagic, "PKDV");
  expect_version(is, kVersion, "PKDV");
  const std::uint32_t count = read_u32(is, "video count");
  std::vector<VideoSample> videos(count);
  for (std::uint32_t v = 0; v < count; ++v) {
    VideoSample& video = videos[v];
    video.id = read_u32(is, "video id");
    const std::uint64_t length = read_u64(is, "video length");
    const std::uint64_t raw_dim = read_u64(is, "raw_dim");
    video.labels.resize(length);
    for (std::uint64_t i = 0; i < length; ++i) video.labels[i] = read_u16(is, "label");
    video.frames.resize(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(raw_dim));
    for (Eigen::Index r = 0; r < video.frames.rows(); ++r)
      for (Eigen::Index c = 0; c < video.frames.cols(); ++c) video.frames(r, c) = read_f64(is, "frame value");
  }
  return videos;
}

void save_dataset_file(const std::string& path, const std::vector<VideoSample>& videos) {
  auto os = open_out(path);
  save_dataset(os, videos);
  if (!os) throw IoError("write failed for " + path);
}

std::vector<VideoSample> load_dataset_file(const std::string& path) {
  auto is = open_in(path);
  return load_dataset(is);
}

void save_features(std::ostream& os, const std::vector<FeatureVideo>& videos) {
  write_magic(os, kFeatureMagic);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(videos.size()));
  for (const FeatureVideo& v : videos) {
    write_u32(os, v.id);
    write_u64(os, static_cast<std::uint64_t>(v.features.rows()));
    write_u64(os, static_cast<std::uint64_t>(v.features.cols()));
    for (Eigen::Index r = 0; r < v.features.rows(); ++r)
      for (Eigen::Index c = 0; c < v.features.cols(); ++c) write_f64(os, v.features(r, c));
  }
}

std::vector<FeatureVideo> load_features(std::istream& is) {
  expect_magic(is, kFeatureMagic, "PKDF");
  expect_version(is, kVersion, "PKDF");
  const std::uint32_t count = read_u32(is, "video count");
  std::vector<FeatureVideo> videos(count);
  for (std::uint32_t v = 0; v < count; ++v) {
    FeatureVideo& video = videos[v];
    video.id = read_u32(is, "video id");
    const std::uint64_t length = read_u64(is, "video length");
    const std::uint64_t dim = read_u64(is, "feature_dim");
    video.features.resize(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < video.features.rows(); ++r)
      for (Eigen::Index c = 0; c < video.features.cols(); ++c) video.features(r, c) = read_f64(is, "feature");
  }
  return videos;
}

void save_features_file(const std::string& path, const std::vector<FeatureVideo>& videos) {
  auto os = open_out(path);
  save_features(os, videos);
  if (!os) throw IoError("write failed for " + path);
}

std::vector<FeatureVideo> load_features_file(const std::string& path) {
  auto is = open_in(path);
  return load_features(is);
}

void attach_labels(std::vector<FeatureVideo>& features, const std::vector<VideoSample>& dataset) {
  std::unordered_map<std::uint32_t, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;
  for (FeatureVideo& f : features) {
    auto it = by_id.find(f.id);
    if (it == by_id.end()) throw StructuralError("no dataset video with id " + std::to_string(f.id));
    const VideoSample& v = *it->second;
    if (static_cast<Eigen::Index>(v.labels.size()) != f.features.rows()) {
      throw StructuralError("length mismatch for video " + std::to_string(f.id) + ": " +
                            std::to_string(v.labels.size()) + " labels vs " +
                            std::to_string(f.features.rows()) + " feature rows");
    }
    f.labels = v.labels;
    f.labeled = v.labeled;
  }
}

void save_predictions(std::ostream& os, const PredictionFile& predictions) {
  for (std::size_t v = 0; v < predictions.video_ids.size(); ++v) {
    os << predictions.video_ids[v] << ",";
    const std::vector<int>& labels = predictions.labels[v];
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) os << ' ';
      os << labels[i];
    }
    os << '\n';
  }
}

PredictionFile load_predictions(std::istream& is) {
  PredictionFile out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw IoError("prediction line missing 'video_id,': " + line);
    out.video_ids.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(0, comma))));
    std::istringstream rest(line.substr(comma + 1));
    std::vector<int> labels;
    int label;
    while (rest >> label) labels.push_back(label);
    if (labels.empty()) throw IoError("prediction line has no labels: " + line);
    out.labels.push_back(std::move(labels));
  }
  return out;
}

void save_predictions_file(const std::string& path, const PredictionFile& predictions) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  save_predictions(os, predictions);
  if (!os) throw IoError("write failed for " + path);
}

PredictionFile load_predictions_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return load_predictions(is);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << content;
  if (!os) throw IoError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace phasekd
