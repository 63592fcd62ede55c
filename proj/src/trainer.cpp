#include "phasekd/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "phasekd/grad_check.hpp"
#include "phasekd/ops.hpp"
#include "phasekd/rng.hpp"

namespace phasekd {

namespace {

constexpr std::uint64_t kEncoderInitStream = 0x656e63ULL;    // "enc"
constexpr std::uint64_t kDecoderInitStream = 0x646563ULL;    // "dec"
constexpr std::uint64_t kShuffleStream = 0x736866ULL;        // "shf"
constexpr std::uint64_t kAugmentStream = 0x617567ULL;        // "aug"
constexpr std::uint64_t kPipelineEncStream = 0x70656eULL;    // "pen"
constexpr std::uint64_t kPipelineDecStream = 0x706465ULL;    // "pde"
constexpr std::uint64_t kExclusionStream = 0x6578636cULL;    // "excl"

Tensor tensor_from_matrix(const MatrixRM& m) {
  ArrayX flat(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat(r * m.cols() + c) = m(r, c);
  return Tensor::from_array({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                            std::move(flat));
}

}  // namespace

EncoderTrainResult train_encoder(const std::vector<VideoSample>& train_videos,
                                 const EncoderRunConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (video index, frame index)
  bool any_labeled = false;
  for (std::size_t v = 0; v < train_videos.size(); ++v) {
    for (Eigen::Index f = 0; f < train_videos[v].frames.rows(); ++f) {
      frames.emplace_back(v, static_cast<std::size_t>(f));
    }
    any_labeled = any_labeled || train_videos[v].labeled;
  }
  if (frames.empty()) throw ConfigError("encoder training set is empty");
  if (!any_labeled && !cfg.self_kd) {
    throw ConfigError("encoder training without self-KD needs labeled videos");
  }

  const std::size_t steps_per_epoch = (frames.size() + cfg.batch_size - 1) / cfg.batch_size;
  const EmaSchedule schedule{cfg.ema_tau0, cfg.epochs * steps_per_epoch};

  EncoderModel model(cfg.arch, derive_seed(cfg.seed, kEncoderInitStream));
  std::optional<EncoderModel> teacher;
  if (cfg.self_kd) {
    teacher.emplace(cfg.arch, derive_seed(cfg.seed, kEncoderInitStream));
    teacher->params().load_values(model.params());
    teacher->params().set_requires_grad(false);
  }
  Optimizer optimizer(cfg.optimizer);

  EncoderTrainResult result{std::move(model), {}};
  EncoderModel& student = result.model;
  EncoderTrainLog& log = result.log;

  auto notify = [&](EncoderStepEvent::Point point, long step) {
    if (!cfg.step_observer) return;
    cfg.step_observer(EncoderStepEvent{point, step, teacher ? &teacher->params() : nullptr,
                                       &student.params()});
  };

  const Eigen::Index raw_dim = static_cast<Eigen::Index>(cfg.arch.raw_dim);
  long global_step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream, epoch));
    std::vector<std::size_t> order(frames.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t batch = std::min(cfg.batch_size, order.size() - begin);
      MatrixRM view1(static_cast<Eigen::Index>(batch), raw_dim);
      MatrixRM view2;
      if (cfg.self_kd) view2.resize(static_cast<Eigen::Index>(batch), raw_dim);
      std::vector<int> labels(batch);
      std::vector<bool> labeled(batch);
      std::size_t labeled_count = 0;
      for (std::size_t i = 0; i < batch; ++i) {
        const auto [v, f] = frames[order[begin + i]];
        const auto frame = train_videos[v].frames.row(static_cast<Eigen::Index>(f));
        const std::uint64_t sample_seed =
            derive_seed(cfg.seed, kAugmentStream, static_cast<std::uint64_t>(global_step) * cfg.batch_size + i);
        view1.row(static_cast<Eigen::Index>(i)) = augment(frame, cfg.augment, sample_seed, 0);
        if (cfg.self_kd) view2.row(static_cast<Eigen::Index>(i)) = augment(frame, cfg.augment, sample_seed, 1);
        labels[i] = train_videos[v].labels[f];
        labeled[i] = train_videos[v].labeled;
        labeled_count += labeled[i] ? 1 : 0;
      }

      notify(EncoderStepEvent::Point::kBeforeStep, global_step);

      Tensor input1 = tensor_from_matrix(view1);
      EncoderModel::Output out1 = student.forward(input1);

      EncoderStepRecord record;
      record.epoch = static_cast<int>(epoch);
      record.step = global_step;
      record.batch_accuracy = [&] {
        const std::vector<int> pred = argmax_rows(out1.logits);
        long correct = 0;
        long total = 0;
        for (std::size_t i = 0; i < batch; ++i) {
          if (!labeled[i]) continue;
          ++total;
          correct += pred[i] == labels[i] ? 1 : 0;
        }
        return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
      }();

      Tensor total_loss;
      if (cfg.self_kd) {
        Tensor teacher_proj;
        {
          NoGradGuard guard;
          teacher_proj = teacher->forward(tensor_from_matrix(view2)).projection;
        }
        Tensor similarity;
        if (cfg.loss.symmetrize) {
          Tensor student_proj2 = student.forward(tensor_from_matrix(view2)).projection;
          Tensor teacher_proj1;
          {
            NoGradGuard guard;
            teacher_proj1 = teacher->forward(input1).projection;
          }
          auto term = [&](const Tensor& zs, const Tensor& zt) {
            return cfg.loss.similarity_kind == SimilarityKind::kMse
                       ? feature_similarity_mse(zs, zt)
                       : feature_similarity_kl(zs, zt, cfg.loss.kl_temperature);
          };
          Tensor classification = cross_entropy(out1.logits, labels, labeled);
          similarity = scale(add(term(out1.projection, teacher_proj),
                                 term(student_proj2, teacher_proj1)),
                             0.5);
          total_loss = add(classification, similarity);
          record.classification = classification.item();
          record.similarity = similarity.item();
        } else {
          EncoderLossTerms terms = encoder_self_kd_loss(out1.logits, labels, labeled,
                                                        out1.projection, teacher_proj, cfg.loss);
          total_loss = terms.total;
          record.classification = terms.classification.item();
          record.similarity = terms.similarity.item();
        }
        log.counters.enc_sim_frames_labeled += static_cast<long>(labeled_count);
        log.counters.enc_sim_frames_unlabeled += static_cast<long>(batch - labeled_count);
      } else {
        total_loss = cross_entropy(out1.logits, labels, labeled);
        record.classification = total_loss.item();
      }
      log.counters.enc_ce_frames_labeled += static_cast<long>(labeled_count);
      record.loss = total_loss.item();
      epoch_loss += record.loss;

      Optimizer::zero_grads(student.params());
      if (total_loss.requires_grad()) {
        backward(total_loss);
        optimizer.step(student.params());
      } else {
        Tape::active().clear();
      }
      notify(EncoderStepEvent::Point::kAfterOptimizerStep, global_step);

      if (cfg.self_kd) {
        record.tau = schedule.value(static_cast<std::size_t>(global_step));
        ema_update(teacher->params(), student.params(), record.tau);
      }
      notify(EncoderStepEvent::Point::kAfterEmaUpdate, global_step);

      log.steps.push_back(record);
      ++global_step;
    }

    // Evaluation-mode training accuracy over labeled videos.
    double accuracy = 0.0;
    {
      NoGradGuard guard;
      long correct = 0, total = 0;
      for (const VideoSample& v : train_videos) {
        if (!v.labeled) continue;
        const std::vector<int> pred = argmax_rows(student.forward(tensor_from_matrix(v.frames)).logits);
        for (std::size_t i = 0; i < pred.size(); ++i) {
          ++total;
          correct += pred[i] == v.labels[i] ? 1 : 0;
        }
      }
      accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    }
    log.epochs.push_back({static_cast<int>(epoch), epoch_loss / static_cast<double>(steps_per_epoch),
                          accuracy});
  }
  return result;
}

std::vector<FeatureVideo> extract_features(const EncoderModel& model,
                                           const std::vector<VideoSample>& videos) {
  NoGradGuard guard;
  std::vector<FeatureVideo> out;
  out.reserve(videos.size());
  for (const VideoSample& v : videos) {
    EncoderModel::Output features = model.forward(tensor_from_matrix(v.frames));
    FeatureVideo fv;
    fv.id = v.id;
    fv.labels = v.labels;
    fv.labeled = v.labeled;
    const Eigen::Index length = v.frames.rows();
    const Eigen::Index dim = static_cast<Eigen::Index>(model.arch().feature_dim);
    fv.features.resize(length, dim);
    for (Eigen::Index r = 0; r < length; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) fv.features(r, c) = features.features.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    out.push_back(std::move(fv));
  }
  return out;
}

DecoderTrainResult train_decoder(const std::vector<FeatureVideo>& train,
                                 const std::vector<FeatureVideo>& test,
                                 const DecoderRunConfig& cfg) {
  if (train.empty()) throw ConfigError("decoder training set is empty");
  const std::size_t feature_dim = static_cast<std::size_t>(train.front().features.cols());

  auto model = make_decoder(cfg.kind, feature_dim, cfg.num_classes, cfg.arch,
                            derive_seed(cfg.seed, kDecoderInitStream));
  auto teacher_model = model->clone_architecture(derive_seed(cfg.seed, kDecoderInitStream));
  teacher_model->params().set_requires_grad(false);

  std::vector<Tensor> train_inputs;
  train_inputs.reserve(train.size());
  for (const FeatureVideo& v : train) train_inputs.push_back(tensor_from_matrix(v.features));
  std::vector<Tensor> test_inputs;
  test_inputs.reserve(test.size());
  for (const FeatureVideo& v : test) test_inputs.push_back(tensor_from_matrix(v.features));

  Optimizer optimizer(cfg.optimizer);
  DecoderTrainResult result;
  DecoderTrainLog& log = result.log;

  std::vector<EpochRecord> history;
  std::optional<TeacherState> teacher;
  std::unordered_map<std::uint32_t, std::vector<Tensor>> teacher_cache;

  double best_test_loss = std::numeric_limits<double>::infinity();
  ParameterSet best_snapshot;
  int best_epoch = -1;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream, epoch));
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng.shuffle(order);

    const int teacher_epoch = teacher ? teacher->source_epoch : -1;
    double epoch_ce = 0.0, epoch_smooth = 0.0, epoch_loss = 0.0;
    long step_in_epoch = 0;
    for (std::size_t idx : order) {
      const FeatureVideo& video = train[idx];
      std::vector<Tensor> stages = model->forward(train_inputs[idx]);

      std::optional<std::vector<Tensor>> teacher_stages;
      const bool use_teacher = cfg.self_kd && teacher.has_value() && cfg.loss.lambda > 0.0;
      if (use_teacher) {
        auto it = teacher_cache.find(video.id);
        if (it == teacher_cache.end()) {
          NoGradGuard guard;
          std::vector<Tensor> t_stages = teacher_model->forward(train_inputs[idx]);
          for (Tensor& t : t_stages) t = t.detach();
          it = teacher_cache.emplace(video.id, std::move(t_stages)).first;
        }
        teacher_stages = it->second;
      }

      DecoderLossTerms terms =
          decoder_self_kd_loss(stages, video.labels, video.labeled, teacher_stages, cfg.loss);

      Optimizer::zero_grads(model->params());
      if (terms.total.requires_grad()) {
        backward(terms.total);
        optimizer.step(model->params());
      } else {
        Tape::active().clear();
      }

      DecoderStepRecord record;
      record.epoch = static_cast<int>(epoch);
      record.step = step_in_epoch++;
      record.video_id = video.id;
      record.classification = terms.classification.item();
      record.smoothing = terms.smoothing.item();
      record.loss = terms.total.item();
      log.steps.push_back(record);
      epoch_ce += record.classification;
      epoch_smooth += record.smoothing;
      epoch_loss += record.loss;

      if (video.labeled) {
        ++log.counters.dec_ce_videos_labeled;
      }
      if (use_teacher) {
        if (video.labeled) {
          ++log.counters.dec_tmse_videos_labeled;
        } else {
          ++log.counters.dec_tmse_videos_unlabeled;
        }
      }
    }

    // Evaluation-mode accuracy on labeled training videos and test loss.
    double train_accuracy = 0.0;
    double test_loss = 0.0;
    {
      NoGradGuard guard;
      long correct = 0, total = 0;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (!train[i].labeled) continue;
        std::vector<Tensor> stages = model->forward(train_inputs[i]);
        const std::vector<int> pred = argmax_rows(stages.back());
        for (std::size_t f = 0; f < pred.size(); ++f) {
          ++total;
          correct += pred[f] == train[i].labels[f] ? 1 : 0;
        }
      }
      train_accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        std::vector<Tensor> stages = model->forward(test_inputs[i]);
        test_loss += cross_entropy(stages.back(), test[i].labels).item();
      }
      if (!test.empty()) test_loss /= static_cast<double>(test.size());
    }

    history.push_back({static_cast<int>(epoch), train_accuracy, snapshot(model->params())});
    log.accuracy_history.emplace_back(static_cast<int>(epoch), train_accuracy);

    if (test_loss < best_test_loss) {
      best_test_loss = test_loss;
      best_snapshot = history.back().snapshot.deep_copy();
      best_epoch = static_cast<int>(epoch);
    }

    const double steps = static_cast<double>(train.size());
    log.epochs.push_back({static_cast<int>(epoch), epoch_ce / steps, epoch_smooth / steps,
                          epoch_loss / steps, train_accuracy, test_loss, teacher_epoch});

    if (cfg.self_kd && cfg.loss.lambda > 0.0) {
      std::optional<TeacherState> promoted = maybe_promote_teacher(history);
      if (promoted && (!teacher || teacher->source_epoch != promoted->source_epoch)) {
        teacher_model->params().load_values(promoted->params);
        teacher_cache.clear();
        result.teacher_history.push_back(
            {promoted->params.deep_copy(), promoted->source_epoch, promoted->selection_accuracy});
      }
      teacher = std::move(promoted);
    }
  }

  if (best_epoch >= 0) model->params().load_values(best_snapshot);
  log.best_test_epoch = best_epoch;
  result.model = std::move(model);
  return result;
}

std::vector<std::vector<int>> predict(const Decoder& model,
                                      const std::vector<FeatureVideo>& videos) {
  NoGradGuard guard;
  std::vector<std::vector<int>> out;
  out.reserve(videos.size());
  for (const FeatureVideo& v : videos) {
    out.push_back(argmax_rows(model.forward(tensor_from_matrix(v.features)).back()));
  }
  return out;
}

MetricsReport evaluate_predictions(const std::vector<std::vector<int>>& predictions,
                                   const std::vector<FeatureVideo>& videos, int num_classes) {
  if (predictions.size() != videos.size()) {
    throw ShapeError("evaluate_predictions: " + std::to_string(predictions.size()) +
                     " prediction sequences for " + std::to_string(videos.size()) + " videos");
  }
  std::vector<VideoMetrics> per_video;
  per_video.reserve(videos.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    VideoMetrics m = frame_metrics(predictions[i], videos[i].labels, num_classes);
    m.video_id = videos[i].id;
    per_video.push_back(m);
  }
  return aggregate(per_video);
}

EncoderRunConfig make_encoder_run_config(const RunConfig& base, bool enc_kd, std::uint64_t seed) {
  EncoderRunConfig enc_cfg;
  enc_cfg.epochs = base.encoder.epochs;
  enc_cfg.batch_size = base.encoder.batch_size;
  enc_cfg.optimizer = to_optimizer_config(base.encoder);
  enc_cfg.ema_tau0 = base.encoder.ema_tau0;
  enc_cfg.loss = to_encoder_loss_config(base.encoder);
  enc_cfg.self_kd = enc_kd;
  enc_cfg.arch = to_encoder_arch(base.data, base.encoder);
  enc_cfg.augment = to_augment_config(base.encoder);
  enc_cfg.seed = derive_seed(seed, kPipelineEncStream);
  return enc_cfg;
}

DecoderRunConfig make_decoder_run_config(const RunConfig& base, bool dec_kd, DecoderKind kind,
                                         std::uint64_t seed) {
  DecoderRunConfig dec_cfg;
  dec_cfg.kind = kind;
  dec_cfg.epochs = base.decoder.epochs;
  dec_cfg.optimizer = to_optimizer_config(base.decoder);
  dec_cfg.loss = to_decoder_loss_config(base.decoder);
  dec_cfg.self_kd = dec_kd;
  dec_cfg.arch = to_decoder_arch(base.decoder);
  dec_cfg.num_classes = base.data.n_phases;
  dec_cfg.seed = derive_seed(seed, kPipelineDecStream);
  return dec_cfg;
}

namespace {

PipelineResult finish_pipeline(EncoderTrainLog encoder_log,
                               const std::vector<FeatureVideo>& train_features,
                               const std::vector<FeatureVideo>& test_features,
                               const DecoderRunConfig& dec_cfg, int num_classes) {
  DecoderTrainResult decoder = train_decoder(train_features, test_features, dec_cfg);
  PipelineResult result;
  result.test_predictions = predict(*decoder.model, test_features);
  result.test_metrics = evaluate_predictions(result.test_predictions, test_features, num_classes);
  result.encoder_log = std::move(encoder_log);
  result.decoder_log = std::move(decoder.log);
  for (const FeatureVideo& v : test_features) result.test_video_ids.push_back(v.id);
  return result;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<VideoSample>& train_videos,
                            const std::vector<VideoSample>& test_videos, const RunConfig& base,
                            bool enc_kd, bool dec_kd, DecoderKind kind, std::uint64_t seed) {
  EncoderTrainResult encoder = train_encoder(train_videos, make_encoder_run_config(base, enc_kd, seed));
  std::vector<FeatureVideo> train_features = extract_features(encoder.model, train_videos);
  std::vector<FeatureVideo> test_features = extract_features(encoder.model, test_videos);
  return finish_pipeline(std::move(encoder.log), train_features, test_features,
                         make_decoder_run_config(base, dec_kd, kind, seed),
                         static_cast<int>(base.data.n_phases));
}

namespace {

void run_jobs(std::vector<std::function<void()>>& jobs, std::size_t threads) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, jobs.size()));
  if (workers <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        jobs[i]();
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

MetricAggregate over_seeds(const std::vector<MetricsReport>& reports,
                           double (*getter)(const MetricsReport&)) {
  const double n = static_cast<double>(reports.size());
  double mean = 0.0;
  for (const MetricsReport& r : reports) mean += getter(r);
  mean /= n;
  double var = 0.0;
  for (const MetricsReport& r : reports) {
    const double d = getter(r) - mean;
    var += d * d;
  }
  return {mean, std::sqrt(var / n)};
}

}  // namespace

AblationResult run_ablation_grid(const std::vector<VideoSample>& dataset, const RunConfig& base,
                                 const std::vector<DecoderKind>& kinds, std::size_t threads,
                                 const ArmCallback& on_result) {
  auto [train_videos, test_videos] = split(dataset, base.data.n_train);
  const std::vector<std::uint64_t>& seeds = base.experiment.seeds;

  // results[seed][enc][kind][dec]
  std::vector<std::vector<std::vector<std::vector<MetricsReport>>>> results(
      seeds.size(),
      std::vector<std::vector<std::vector<MetricsReport>>>(
          2, std::vector<std::vector<MetricsReport>>(kinds.size(),
                                                     std::vector<MetricsReport>(2))));

  std::vector<std::function<void()>> jobs;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (int enc = 0; enc < 2; ++enc) {
      jobs.push_back([&, s, enc]() {
        // One encoder per (seed, enc arm); all decoder arms share it.
        EncoderTrainResult encoder =
            train_encoder(train_videos, make_encoder_run_config(base, enc == 1, seeds[s]));
        std::vector<FeatureVideo> train_features = extract_features(encoder.model, train_videos);
        std::vector<FeatureVideo> test_features = extract_features(encoder.model, test_videos);
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          for (int dec = 0; dec < 2; ++dec) {
            PipelineResult r = finish_pipeline(
                encoder.log, train_features, test_features,
                make_decoder_run_config(base, dec == 1, kinds[k], seeds[s]),
                static_cast<int>(base.data.n_phases));
            if (on_result) on_result(s, enc == 1, kinds[k], dec == 1, r);
            results[s][static_cast<std::size_t>(enc)][k][static_cast<std::size_t>(dec)] =
                std::move(r.test_metrics);
          }
        }
      });
    }
  }
  run_jobs(jobs, threads);

  AblationResult out;
  out.seeds = seeds;
  const std::pair<int, int> arms[4] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (const auto& [enc, dec] : arms) {
      AblationRow row;
      row.kind = kinds[k];
      row.enc_kd = enc == 1;
      row.dec_kd = dec == 1;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        row.per_seed.push_back(results[s][static_cast<std::size_t>(enc)][k][static_cast<std::size_t>(dec)]);
      }
      row.accuracy = over_seeds(row.per_seed, [](const MetricsReport& r) { return r.accuracy.mean; });
      row.f1 = over_seeds(row.per_seed, [](const MetricsReport& r) { return r.f1.mean; });
      row.jaccard = over_seeds(row.per_seed, [](const MetricsReport& r) { return r.jaccard.mean; });
      row.predicted_segments =
          over_seeds(row.per_seed, [](const MetricsReport& r) { return r.predicted_segments.mean; });
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

ReducedDataResult run_reduced_data(const std::vector<VideoSample>& dataset, const RunConfig& base,
                                   const std::vector<std::size_t>& k_list, std::size_t threads,
                                   const RowCallback& on_result) {
  auto [train_videos, test_videos] = split(dataset, base.data.n_train);
  const std::uint64_t seed = base.experiment.seeds.front();
  const DecoderKind kind = decoder_kind_from_name(base.decoder.kind);

  struct Spec {
    std::string block;
    std::size_t k;
    ExcludeMode mode;
    bool self_kd;
  };
  std::vector<Spec> specs;
  specs.push_back({"baseline", 0, ExcludeMode::kDropEntirely, false});
  specs.push_back({"self_kd", 0, ExcludeMode::kDropEntirely, true});
  for (std::size_t k : k_list) specs.push_back({"baseline", k, ExcludeMode::kDropEntirely, false});
  for (std::size_t k : k_list) specs.push_back({"self_kd", k, ExcludeMode::kDropEntirely, true});
  for (std::size_t k : k_list) specs.push_back({"self_kd", k, ExcludeMode::kDropLabels, true});

  ReducedDataResult out;
  out.rows.resize(specs.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    jobs.push_back([&, i]() {
      const Spec& spec = specs[i];
      // The same k removes the same videos in every arm.
      std::vector<VideoSample> reduced =
          spec.k == 0 ? train_videos
                      : exclude_videos(train_videos, spec.k, spec.mode,
                                       derive_seed(seed, kExclusionStream, spec.k));
      PipelineResult r =
          run_pipeline(reduced, test_videos, base, spec.self_kd, spec.self_kd, kind, seed);
      ReducedDataRow row;
      row.block = spec.block;
      row.k = spec.k;
      row.mode = spec.mode;
      row.metrics = r.test_metrics;
      row.encoder_counters = r.encoder_log.counters;
      row.decoder_counters = r.decoder_log.counters;
      if (on_result) on_result(row, r);
      out.rows[i] = std::move(row);
    });
  }
  run_jobs(jobs, threads);
  return out;
}

std::vector<std::string> format_log_lines(const EncoderTrainLog& log) {
  std::vector<std::string> lines;
  lines.reserve(log.steps.size() + log.epochs.size());
  char buf[256];
  for (const EncoderStepRecord& s : log.steps) {
    std::snprintf(buf, sizeof(buf),
                  "stage=encoder epoch=%d step=%ld ce=%.9g sim=%.9g tmse=0 loss=%.9g acc=%.6f "
                  "tau=%.9g teacher_epoch=-1",
                  s.epoch, s.step, s.classification, s.similarity, s.loss, s.batch_accuracy, s.tau);
    lines.emplace_back(buf);
  }
  for (const EncoderEpochRecord& e : log.epochs) {
    std::snprintf(buf, sizeof(buf), "stage=encoder_epoch epoch=%d mean_loss=%.9g train_acc=%.6f",
                  e.epoch, e.mean_loss, e.train_accuracy);
    lines.emplace_back(buf);
  }
  return lines;
}

std::vector<std::string> format_log_lines(const DecoderTrainLog& log) {
  std::vector<std::string> lines;
  lines.reserve(log.steps.size() + log.epochs.size());
  char buf[256];
  for (const DecoderStepRecord& s : log.steps) {
    std::snprintf(buf, sizeof(buf),
                  "stage=decoder epoch=%d step=%ld video=%u ce=%.9g tmse=%.9g loss=%.9g",
                  s.epoch, s.step, s.video_id, s.classification, s.smoothing, s.loss);
    lines.emplace_back(buf);
  }
  for (const DecoderEpochRecord& e : log.epochs) {
    std::snprintf(buf, sizeof(buf),
                  "stage=decoder_epoch epoch=%d ce=%.9g tmse=%.9g loss=%.9g train_acc=%.6f "
                  "test_loss=%.9g teacher_epoch=%d",
                  e.epoch, e.mean_classification, e.mean_smoothing, e.mean_loss, e.train_accuracy,
                  e.test_loss, e.teacher_epoch);
    lines.emplace_back(buf);
  }
  return lines;
}

std::string format_ablation_table(const AblationResult& result) {
  std::ostringstream os;
  os << "# self-KD ablation grid; mean +- std over " << result.seeds.size() << " seeds\n";
  os << "decoder enc_kd dec_kd accuracy f1 jaccard pred_segments\n";
  for (const AblationRow& row : result.rows) {
    os << decoder_kind_name(row.kind) << " " << (row.enc_kd ? "on" : "off") << " "
       << (row.dec_kd ? "on" : "off") << " " << format_percent(row.accuracy.mean) << "+-"
       << format_percent(row.accuracy.std_dev) << " " << format_percent(row.f1.mean) << "+-"
       << format_percent(row.f1.std_dev) << " " << format_percent(row.jaccard.mean) << "+-"
       << format_percent(row.jaccard.std_dev) << " ";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f+-%.2f", row.predicted_segments.mean,
                  row.predicted_segments.std_dev);
    os << buf << "\n";
  }
  return os.str();
}

std::string format_reduced_data_table(const ReducedDataResult& result) {
  std::ostringstream os;
  os << "# reduced training data grid\n";
  os << "block k mode accuracy f1 jaccard enc_ce_unlabeled enc_sim_unlabeled dec_ce_unlabeled "
        "dec_tmse_unlabeled\n";
  for (const ReducedDataRow& row : result.rows) {
    os << row.block << " " << row.k << " " << exclude_mode_name(row.mode) << " "
       << format_percent(row.metrics.accuracy.mean) << "+-"
       << format_percent(row.metrics.accuracy.std_dev) << " "
       << format_percent(row.metrics.f1.mean) << "+-" << format_percent(row.metrics.f1.std_dev)
       << " " << format_percent(row.metrics.jaccard.mean) << "+-"
       << format_percent(row.metrics.jaccard.std_dev) << " "
       << row.encoder_counters.enc_ce_frames_unlabeled << " "
       << row.encoder_counters.enc_sim_frames_unlabeled << " "
       << row.decoder_counters.dec_ce_videos_unlabeled << " "
       << row.decoder_counters.dec_tmse_videos_unlabeled << "\n";
  }
  return os.str();
}

std::size_t resolve_thread_count(std::size_t configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("PHASEKD_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

}  // namespace phasekd
