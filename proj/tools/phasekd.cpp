// phasekd: synthetic phase-video generation, two-stage self-distillation
// training, evaluation, and experiment drivers.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "phasekd/config.hpp"
#include "phasekd/io.hpp"
#include "phasekd/metrics.hpp"
#include "phasekd/rng.hpp"
#include "phasekd/trainer.hpp"

namespace fs = std::filesystem;
using namespace phasekd;

namespace {

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return default_run_config();
  return load_run_config(path);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ostringstream os;
  for (const std::string& line : lines) os << line << "\n";
  write_text_file(path, os.str());
}

std::string features_path(const std::string& prefix, const char* split_name) {
  return prefix + "." + split_name + ".pkdf";
}

void write_timeline(const std::string& path, const std::vector<std::uint32_t>& ids,
                    const std::vector<std::vector<int>>& predictions,
                    const std::map<std::uint32_t, const VideoSample*>& gt_by_id) {
  std::ostringstream os;
  os << "video_id frame gt pred\n";
  for (std::size_t v = 0; v < ids.size(); ++v) {
    const VideoSample* gt = gt_by_id.at(ids[v]);
    for (std::size_t f = 0; f < predictions[v].size(); ++f) {
      os << ids[v] << " " << f << " " << gt->labels[f] << " " << predictions[v][f] << "\n";
    }
  }
  write_text_file(path, os.str());
}

int cmd_config(const std::string& out_path) {
  const std::string text = dump_config(default_run_config());
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cout << "wrote defaults to " << out_path << "\n";
  }
  return 0;
}

int cmd_gen_data(const std::string& config_path, std::string out_path) {
  RunConfig config = load_config_or_default(config_path);
  if (out_path.empty()) out_path = config.paths.data;

  PhaseModel model = make_phase_model(to_phase_model_spec(config.data));
  std::vector<VideoSample> videos = generate_dataset(model, config.data.n_videos,
                                                     config.data.min_length, config.data.max_length,
                                                     config.data.seed);
  save_dataset_file(out_path, videos);

  std::size_t total_frames = 0;
  std::vector<std::size_t> histogram(config.data.n_phases, 0);
  for (const VideoSample& v : videos) {
    total_frames += v.labels.size();
    for (int label : v.labels) ++histogram[static_cast<std::size_t>(label)];
  }
  std::cout << "wrote " << out_path << ": " << videos.size() << " videos, " << total_frames
            << " frames, " << config.data.n_phases << " phases\n";
  std::cout << "phase histogram:";
  for (std::size_t c = 0; c < histogram.size(); ++c) std::cout << " " << c << ":" << histogram[c];
  std::cout << "\n";
  return 0;
}

int cmd_train_encoder(const std::string& config_path, std::string data_path,
                      std::string model_path, std::string features_prefix, bool no_self_kd,
                      std::string log_path, std::optional<std::uint64_t> seed) {
  RunConfig config = load_config_or_default(config_path);
  if (data_path.empty()) data_path = config.paths.data;
  if (model_path.empty()) model_path = config.paths.encoder_model;
  if (features_prefix.empty()) features_prefix = config.paths.features;
  if (log_path.empty()) log_path = config.paths.log;

  std::vector<VideoSample> dataset = load_dataset_file(data_path);
  auto [train_videos, test_videos] = split(dataset, config.data.n_train);

  const std::uint64_t run_seed = seed.value_or(config.data.seed);
  EncoderRunConfig enc_cfg = make_encoder_run_config(config, !no_self_kd && config.encoder.self_kd,
                                                     run_seed);
  EncoderTrainResult result = train_encoder(train_videos, enc_cfg);

  result.model.params().save_file(model_path);
  save_features_file(features_path(features_prefix, "train"),
                     extract_features(result.model, train_videos));
  save_features_file(features_path(features_prefix, "test"),
                     extract_features(result.model, test_videos));
  write_lines(log_path, format_log_lines(result.log));

  std::cout << "encoder parameters: " << result.model.parameter_count() << "\n";
  std::cout << "train accuracy: " << format_percent(result.log.epochs.back().train_accuracy)
            << "\n";
  std::cout << "wrote " << model_path << ", " << features_path(features_prefix, "train") << ", "
            << features_path(features_prefix, "test") << ", " << log_path << "\n";
  return 0;
}

int cmd_train_decoder(const std::string& config_path, std::string features_prefix,
                      std::string data_path, const std::string& decoder_kind,
                      std::string model_path, std::string report_path,
                      std::optional<double> lambda_override, bool no_self_kd,
                      std::string log_path, std::optional<std::uint64_t> seed) {
  RunConfig config = load_config_or_default(config_path);
  if (features_prefix.empty()) features_prefix = config.paths.features;
  if (data_path.empty()) data_path = config.paths.data;
  if (model_path.empty()) model_path = config.paths.decoder_model;
  if (report_path.empty()) report_path = config.paths.report;
  if (log_path.empty()) log_path = config.paths.log;
  if (!decoder_kind.empty()) config.decoder.kind = decoder_kind;
  if (lambda_override) config.decoder.lambda = *lambda_override;
  validate(config);

  std::vector<VideoSample> dataset = load_dataset_file(data_path);
  std::vector<FeatureVideo> train_features =
      load_features_file(features_path(features_prefix, "train"));
  std::vector<FeatureVideo> test_features =
      load_features_file(features_path(features_prefix, "test"));
  attach_labels(train_features, dataset);
  attach_labels(test_features, dataset);

  const std::uint64_t run_seed = seed.value_or(config.data.seed);
  DecoderRunConfig dec_cfg =
      make_decoder_run_config(config, !no_self_kd && config.decoder.self_kd,
                              decoder_kind_from_name(config.decoder.kind), run_seed);
  DecoderTrainResult result = train_decoder(train_features, test_features, dec_cfg);

  result.model->params().save_file(model_path);
  std::vector<std::vector<int>> predictions = predict(*result.model, test_features);
  MetricsReport report = evaluate_predictions(predictions, test_features,
                                              static_cast<int>(config.data.n_phases));
  write_text_file(report_path, format_report(report));
  write_lines(log_path, format_log_lines(result.log));

  std::cout << "decoder parameters: " << result.model->parameter_count() << "\n";
  std::cout << "best epoch by test loss: " << result.log.best_test_epoch << "\n";
  std::cout << "test accuracy: " << format_percent(report.accuracy.mean) << "+-"
            << format_percent(report.accuracy.std_dev) << "\n";
  std::cout << "wrote " << model_path << ", " << report_path << ", " << log_path << "\n";
  return 0;
}

std::map<std::uint32_t, std::vector<int>> labels_by_id_from_file(const std::string& path) {
  std::map<std::uint32_t, std::vector<int>> out;
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  char magic[4] = {};
  probe.read(magic, 4);
  probe.close();
  if (std::string(magic, 4) == "PKDV") {
    for (const VideoSample& v : load_dataset_file(path)) out[v.id] = v.labels;
  } else {
    PredictionFile gt = load_predictions_file(path);
    for (std::size_t i = 0; i < gt.video_ids.size(); ++i) out[gt.video_ids[i]] = gt.labels[i];
  }
  return out;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& report_path) {
  PredictionFile predictions = load_predictions_file(pred_path);
  std::map<std::uint32_t, std::vector<int>> gt = labels_by_id_from_file(gt_path);

  int num_classes = 0;
  for (const auto& [id, labels] : gt) {
    for (int c : labels) num_classes = std::max(num_classes, c + 1);
  }
  for (const std::vector<int>& labels : predictions.labels) {
    for (int c : labels) num_classes = std::max(num_classes, c + 1);
  }

  std::vector<VideoMetrics> per_video;
  for (std::size_t i = 0; i < predictions.video_ids.size(); ++i) {
    auto it = gt.find(predictions.video_ids[i]);
    if (it == gt.end()) {
      throw StructuralError("no ground truth for video " + std::to_string(predictions.video_ids[i]));
    }
    VideoMetrics m = frame_metrics(predictions.labels[i], it->second, num_classes);
    m.video_id = predictions.video_ids[i];
    per_video.push_back(m);
  }
  MetricsReport report = aggregate(per_video);
  const std::string text = format_report(report);
  if (!report_path.empty()) write_text_file(report_path, text);
  std::cout << text;
  return 0;
}

int cmd_ablate(const std::string& config_path, std::string data_path, std::string out_dir,
               const std::string& seeds_csv, bool export_timeline) {
  RunConfig config = load_config_or_default(config_path);
  if (data_path.empty()) data_path = config.paths.data;
  if (!seeds_csv.empty()) {
    config.experiment.seeds.clear();
    std::stringstream ss(seeds_csv);
    std::string item;
    while (std::getline(ss, item, ',')) config.experiment.seeds.push_back(std::stoull(item));
    validate(config);
  }
  if (out_dir.empty()) out_dir = "ablation";
  fs::create_directories(out_dir);

  std::vector<VideoSample> dataset = load_dataset_file(data_path);
  std::map<std::uint32_t, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;

  const std::vector<DecoderKind> kinds = {DecoderKind::kGru, DecoderKind::kTcn};
  ArmCallback sink = [&](std::size_t seed_index, bool enc, DecoderKind kind, bool dec,
                         const PipelineResult& r) {
    std::ostringstream tag;
    tag << decoder_kind_name(kind) << "_enc" << (enc ? 1 : 0) << "_dec" << (dec ? 1 : 0) << "_seed"
        << config.experiment.seeds[seed_index];
    write_lines(out_dir + "/encoder_" + tag.str() + ".log", format_log_lines(r.encoder_log));
    write_lines(out_dir + "/decoder_" + tag.str() + ".log", format_log_lines(r.decoder_log));
    write_text_file(out_dir + "/report_" + tag.str() + ".txt", format_report(r.test_metrics));
    if (export_timeline) {
      write_timeline(out_dir + "/timeline_" + tag.str() + ".txt", r.test_video_ids,
                     r.test_predictions, by_id);
    }
  };

  AblationResult result = run_ablation_grid(dataset, config, kinds,
                                            resolve_thread_count(config.experiment.threads), sink);
  const std::string table = format_ablation_table(result);
  write_text_file(out_dir + "/ablation_table.txt", table);
  std::cout << table;
  std::cout << "wrote " << out_dir << "/ablation_table.txt (" << result.rows.size() << " rows)\n";
  return 0;
}

int cmd_reduced_data(const std::string& config_path, std::string data_path, std::string out_dir,
                     const std::string& k_csv, bool export_timeline) {
  RunConfig config = load_config_or_default(config_path);
  if (data_path.empty()) data_path = config.paths.data;
  std::vector<std::size_t> k_list = config.experiment.k_list;
  if (!k_csv.empty()) {
    k_list.clear();
    std::stringstream ss(k_csv);
    std::string item;
    while (std::getline(ss, item, ',')) k_list.push_back(std::stoul(item));
  }
  for (std::size_t k : k_list) {
    if (k >= config.data.n_train) throw ConfigError("k=" + std::to_string(k) + " >= n_train");
  }
  if (out_dir.empty()) out_dir = "reduced_data";
  fs::create_directories(out_dir);

  std::vector<VideoSample> dataset = load_dataset_file(data_path);
  std::map<std::uint32_t, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;

  RowCallback sink = [&](const ReducedDataRow& row, const PipelineResult& r) {
    std::ostringstream tag;
    tag << row.block << "_k" << row.k << "_" << exclude_mode_name(row.mode);
    write_lines(out_dir + "/encoder_" + tag.str() + ".log", format_log_lines(r.encoder_log));
    write_lines(out_dir + "/decoder_" + tag.str() + ".log", format_log_lines(r.decoder_log));
    write_text_file(out_dir + "/report_" + tag.str() + ".txt", format_report(r.test_metrics));
    if (export_timeline) {
      write_timeline(out_dir + "/timeline_" + tag.str() + ".txt", r.test_video_ids,
                     r.test_predictions, by_id);
    }
  };

  ReducedDataResult result = run_reduced_data(dataset, config, k_list,
                                              resolve_thread_count(config.experiment.threads), sink);
  const std::string table = format_reduced_data_table(result);
  write_text_file(out_dir + "/reduced_data_table.txt", table);
  std::cout << table;
  std::cout << "wrote " << out_dir << "/reduced_data_table.txt (" << result.rows.size()
            << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage self-distillation toolkit for temporal phase recognition"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, model_path, features, report_path, log_path;
  std::string decoder_kind, seeds_csv, k_csv, out_dir, pred_path, gt_path;
  bool dump_defaults = false, no_self_kd = false, export_timeline = false;
  std::optional<double> lambda_override;
  std::optional<std::uint64_t> seed_override;

  CLI::App* config_cmd = app.add_subcommand("config", "inspect configuration defaults");
  config_cmd->add_flag("--dump-defaults", dump_defaults, "print every key with its default");
  config_cmd->add_option("--out", out_path, "write the defaults to a file");

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic phase-video dataset");
  gen->add_option("--config", config_path, "run configuration file");
  gen->add_option("--out", out_path, "output dataset path (.pkdv)");

  CLI::App* tenc = app.add_subcommand("train-encoder", "train the frame encoder");
  tenc->add_option("--config", config_path);
  tenc->add_option("--data", data_path, "dataset file (.pkdv)");
  tenc->add_option("--out-model", model_path, "weights output (.pkdw)");
  tenc->add_option("--features-out", features, "feature file prefix");
  tenc->add_flag("--no-self-kd", no_self_kd, "baseline arm: plain supervised training");
  tenc->add_option("--log", log_path, "training log path");
  tenc->add_option("--seed", seed_override, "override the run seed");

  CLI::App* tdec = app.add_subcommand("train-decoder", "train a temporal decoder on features");
  tdec->add_option("--config", config_path);
  tdec->add_option("--features", features, "feature file prefix from train-encoder");
  tdec->add_option("--data", data_path, "dataset file for labels (.pkdv)");
  tdec->add_option("--decoder", decoder_kind, "gru or tcn")
      ->check(CLI::IsMember({"gru", "tcn", ""}));
  tdec->add_option("--out-model", model_path);
  tdec->add_option("--report", report_path, "metrics report output");
  tdec->add_option("--lambda", lambda_override, "smoothing loss weight");
  tdec->add_flag("--no-self-kd", no_self_kd, "baseline arm: no teacher, no smoothing");
  tdec->add_option("--log", log_path);
  tdec->add_option("--seed", seed_override);

  CLI::App* eval = app.add_subcommand("evaluate", "score a prediction file");
  eval->add_option("--pred", pred_path, "prediction file")->required();
  eval->add_option("--gt", gt_path, "ground truth (.pkdv dataset or prediction-format file)")
      ->required();
  eval->add_option("--report", report_path, "metrics report output");

  CLI::App* ablate = app.add_subcommand("ablate", "run the 4-arm self-KD grid per decoder kind");
  ablate->add_option("--config", config_path);
  ablate->add_option("--data", data_path);
  ablate->add_option("--out-dir", out_dir, "directory for tables, reports, and logs");
  ablate->add_option("--seeds", seeds_csv, "comma-separated seed list");
  ablate->add_flag("--export-timeline", export_timeline, "write per-frame (gt, pred) rows");

  CLI::App* reduced = app.add_subcommand("reduced-data", "run the reduced-training-data grid");
  reduced->add_option("--config", config_path);
  reduced->add_option("--data", data_path);
  reduced->add_option("--out-dir", out_dir);
  reduced->add_option("--k", k_csv, "comma-separated excluded-video counts");
  reduced->add_flag("--export-timeline", export_timeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (config_cmd->parsed()) return cmd_config(out_path);
    if (gen->parsed()) return cmd_gen_data(config_path, out_path);
    if (tenc->parsed()) {
      return cmd_train_encoder(config_path, data_path, model_path, features, no_self_kd, log_path,
                               seed_override);
    }
    if (tdec->parsed()) {
      return cmd_train_decoder(config_path, features, data_path, decoder_kind, model_path,
                               report_path, lambda_override, no_self_kd, log_path, seed_override);
    }
    if (eval->parsed()) return cmd_evaluate(pred_path, gt_path, report_path);
    if (ablate->parsed()) {
      return cmd_ablate(config_path, data_path, out_dir, seeds_csv, export_timeline);
    }
    if (reduced->parsed()) {
      return cmd_reduced_data(config_path, data_path, out_dir, k_csv, export_timeline);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
