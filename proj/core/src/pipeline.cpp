// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "json.hpp"

#include "mots/error.hpp"
#include "mots/io.hpp"
#include "mots/merging.hpp"
#include "mots/rng.hpp"
#include "mots/short_tracker.hpp"
#include "mots/triplets.hpp"

namespace mots {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

[[noreturn]] void key_error(const std::string& key, const std::string& why) {
  throw ValidationError("config: key '" + key + "' " + why);
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) key_error(key, "must be a string");
  return v.get<std::string>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) key_error(key, "must be a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) key_error(key, "must be an integer");
  return v.get<long long>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) key_error(key, "must be a boolean");
  return v.get<bool>();
}

double unit_interval(const json& v, const std::string& key) {
  const double d = as_double(v, key);
  if (d < 0.0 || d > 1.0) key_error(key, "must be in [0, 1]");
  return d;
}

void write_histogram_pair(const fs::path& dir, const std::string& stem,
                          const std::vector<double>& values) {
  const Histogram hist = build_histogram(values, 40, -1.0, 1.0);
  std::string data = "# histogram v1\n";
  const double step = (hist.hi - hist.lo) / static_cast<double>(hist.bins.size());
  for (std::size_t i = 0; i < hist.bins.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof(line), "%.6f %.6f %zu\n", hist.lo + step * static_cast<double>(i),
                  hist.lo + step * static_cast<double>(i + 1), hist.bins[i]);
    data += line;
  }
  atomic_write_text((dir / (stem + ".txt")).string(), data);
  atomic_write_text((dir / (stem + "_chart.txt")).string(), render_histogram(hist, 60));
}

std::vector<TripletSample> filter_origin(const std::vector<TripletSample>& samples,
                                         TripletOrigin origin) {
  std::vector<TripletSample> out;
  for (const auto& s : samples) {
    if (s.origin == origin) out.push_back(s);
  }
  return out;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config: top level must be an object");

  PipelineConfig c;
  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "detection_paths") {
      if (!v.is_array() || v.empty()) key_error(key, "must be a non-empty array of strings");
      for (const auto& el : v) {
        if (!el.is_string() || el.get<std::string>().empty()) {
          key_error(key, "must hold non-empty strings");
        }
        c.detection_paths.push_back(el.get<std::string>());
      }
    } else if (key == "embeddings_path") {
      c.embeddings_path = as_string(v, key);
    } else if (key == "flows_dir") {
      c.flows_dir = as_string(v, key);
    } else if (key == "gt_labels_path") {
      c.gt_labels_path = as_string(v, key);
    } else if (key == "output_dir") {
      c.output_dir = as_string(v, key);
    } else if (key == "video_id") {
      const auto n = as_int(v, key);
      if (n < 0) key_error(key, "must be non-negative");
      c.video_id = static_cast<int>(n);
    } else if (key == "iom_threshold") {
      c.iom_threshold = unit_interval(v, key);
    } else if (key == "theta_t") {
      const auto n = as_int(v, key);
      if (n < 0) key_error(key, "must be non-negative");
      c.theta_t = static_cast<int>(n);
    } else if (key == "min_samples") {
      const auto n = as_int(v, key);
      if (n < 1) key_error(key, "must be at least 1");
      c.min_samples = static_cast<std::size_t>(n);
    } else if (key == "fallback_theta_short") {
      c.fallback_theta_short = unit_interval(v, key);
    } else if (key == "fallback_theta_long") {
      c.fallback_theta_long = unit_interval(v, key);
    } else if (key == "intra_triplets") {
      const auto n = as_int(v, key);
      if (n < 0) key_error(key, "must be non-negative");
      c.intra_triplets = static_cast<int>(n);
    } else if (key == "inter_triplets") {
      const auto n = as_int(v, key);
      if (n < 0) key_error(key, "must be non-negative");
      c.inter_triplets = static_cast<int>(n);
    } else if (key == "batch_size") {
      const auto n = as_int(v, key);
      if (n < 2 || n % 2 != 0) key_error(key, "must be a positive even number");
      c.batch_size = static_cast<int>(n);
    } else if (key == "retry_budget") {
      const auto n = as_int(v, key);
      if (n < 1) key_error(key, "must be at least 1");
      c.retry_budget = static_cast<int>(n);
    } else if (key == "seed") {
      if (v.is_number_unsigned()) {
        c.seed = v.get<std::uint64_t>();
      } else {
        const auto n = as_int(v, key);
        if (n < 0) key_error(key, "must be non-negative");
        c.seed = static_cast<std::uint64_t>(n);
      }
    } else if (key == "identity_flow_fallback") {
      c.identity_flow_fallback = as_bool(v, key);
    } else if (key == "normalize_centroids") {
      c.normalize_centroids = as_bool(v, key);
    } else if (key == "otsu_thresholds") {
      c.otsu_thresholds = as_bool(v, key);
    } else if (key == "reuse_smaller_pool") {
      c.reuse_smaller_pool = as_bool(v, key);
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }

  if (c.detection_paths.empty()) throw ValidationError("config: missing key 'detection_paths'");
  if (c.embeddings_path.empty()) throw ValidationError("config: missing key 'embeddings_path'");
  if (c.output_dir.empty()) throw ValidationError("config: missing key 'output_dir'");
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_config(buf.str());
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  PipelineResult result;
  result.thresholds.theta_t = config.theta_t;
  result.thresholds.theta_app_short = config.fallback_theta_short;
  result.thresholds.theta_app_long = config.fallback_theta_long;

  if (config.detection_paths.empty()) throw ValidationError("pipeline: no detection paths");
  if (config.output_dir.empty()) throw ValidationError("pipeline: output_dir is empty");
  const fs::path out(config.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("pipeline: cannot create " + out.string() + ": " + ec.message());

  auto warn = [&result, log](std::string message) {
    if (log) *log << "warning: " << message << '\n';
    result.warnings.push_back(std::move(message));
  };
  auto info = [log](const std::string& message) {
    if (log) *log << message << '\n';
  };
  auto last = std::chrono::steady_clock::now();
  auto mark = [&result, &last](const char* name) {
    const auto now = std::chrono::steady_clock::now();
    result.timings.push_back({name, std::chrono::duration<double>(now - last).count()});
    last = now;
  };

  const char* stage = "load";
  try {
    // Load.
    std::vector<Detection> detections;
    for (std::size_t s = 0; s < config.detection_paths.size(); ++s) {
      auto part = read_detections(config.detection_paths[s], static_cast<int>(s));
      detections.insert(detections.end(), part.begin(), part.end());
    }
    EmbeddingStore store = read_embeddings(config.embeddings_path);
    const std::map<int, FlowField> flows = read_flow_dir(config.flows_dir);
    std::vector<GtLabel> labels;
    if (!config.gt_labels_path.empty()) labels = read_gt_labels(config.gt_labels_path);
    info("[load] " + std::to_string(detections.size()) + " detections, " +
         std::to_string(store.size()) + " embeddings, " + std::to_string(flows.size()) +
         " flow fields");
    mark(stage);

    stage = "fuse";
    FusionConfig fusion_config;
    fusion_config.iom_threshold = config.iom_threshold;
    const std::vector<Detection> fused = fuse_detections(detections, fusion_config);
    write_detections((out / "fused.txt").string(), fused);
    result.fused_observations = fused.size();
    info("[fuse] " + std::to_string(detections.size()) + " -> " + std::to_string(fused.size()) +
         " observations");
    mark(stage);

    stage = "theta_short";
    ThresholdConfig threshold_config;
    threshold_config.min_samples = config.min_samples;
    threshold_config.fallback_theta_short = config.fallback_theta_short;
    threshold_config.fallback_theta_long = config.fallback_theta_long;
    threshold_config.long_method = config.otsu_thresholds ? LongThresholdMethod::kOtsu
                                                          : LongThresholdMethod::kGaussianCrossing;
    const SimilaritySampleSet intra_frame = collect_intra_frame_similarities(fused, store);
    try {
      result.thresholds.theta_app_short = estimate_theta_short(intra_frame, threshold_config);
    } catch (const EstimationError& e) {
      result.theta_short_fallback = true;
      result.thresholds.theta_app_short = config.fallback_theta_short;
      warn(std::string(e.what()) + "; falling back to theta_app_short = " +
           fmt6(config.fallback_theta_short));
    }
    write_histogram_pair(out, "hist_intra_frame", intra_frame.values);
    info("[theta_short] " + fmt6(result.thresholds.theta_app_short) +
         (result.theta_short_fallback ? " (fallback)" : " (estimated)") + " from " +
         std::to_string(intra_frame.values.size()) + " co-frame pairs");
    mark(stage);

    stage = "manifest_intra";
    std::set<std::pair<int, std::int64_t>> observation_keys;
    std::vector<ObsRef> observations;
    for (const auto& d : fused) {
      if (observation_keys.insert({d.frame_id, d.object_key}).second) {
        observations.push_back({d.frame_id, d.object_key});
      }
    }
    std::vector<Tracklet> gt_tracklets;
    if (!labels.empty()) {
      gt_tracklets = tracklets_from_labels(labels, observation_keys);
    } else {
      warn("no ground-truth labels; manifests carry target triplets only");
    }
    SamplerConfig sampler_config;
    sampler_config.video_id = config.video_id;
    sampler_config.retry_budget = config.retry_budget;
    const std::uint64_t intra_seed = Rng::derive_seed(config.seed, 1);
    const std::uint64_t inter_seed = Rng::derive_seed(config.seed, 2);
    const std::uint64_t batch_seed = Rng::derive_seed(config.seed, 3);
    std::vector<TripletSample> intra_samples;
    try {
      intra_samples = sample_intra_frame(observations, gt_tracklets, config.intra_triplets,
                                         intra_seed, sampler_config);
    } catch (const SamplingError& e) {
      if (!gt_tracklets.empty()) {
        warn(std::string(e.what()) + "; retrying with target triplets only");
        try {
          intra_samples = sample_intra_frame(observations, {}, config.intra_triplets, intra_seed,
                                             sampler_config);
        } catch (const SamplingError& e2) {
          warn(std::string(e2.what()) + "; intra-frame manifest left empty");
        }
      } else {
        warn(std::string(e.what()) + "; intra-frame manifest left empty");
      }
    }
    write_manifest((out / "manifest_intra.txt").string(), intra_samples, intra_seed);
    info("[manifest_intra] " + std::to_string(intra_samples.size()) + " triplets");
    mark(stage);

    stage = "track";
    ShortTrackOptions track_options;
    track_options.theta_short = result.thresholds.theta_app_short;
    track_options.identity_flow_fallback = config.identity_flow_fallback;
    const std::vector<Tracklet> tracklets = track_video(fused, flows, store, track_options);
    write_tracklets((out / "tracklets.txt").string(), tracklets);
    result.tracklets = tracklets.size();
    info("[track] " + std::to_string(tracklets.size()) + " tracklets");
    mark(stage);

    stage = "theta_long";
    const SimilaritySampleSet within = collect_intra_tracklet_similarities(tracklets, store);
    try {
      result.thresholds.theta_app_long =
          estimate_theta_long(intra_frame, within, threshold_config);
    } catch (const EstimationError& e) {
      result.theta_long_fallback = true;
      result.thresholds.theta_app_long = config.fallback_theta_long;
      warn(std::string(e.what()) + "; falling back to theta_app_long = " +
           fmt6(config.fallback_theta_long));
    }
    write_histogram_pair(out, "hist_intra_tracklet", within.values);
    std::string thresholds_text;
    thresholds_text += "theta_app_short " + fmt6(result.thresholds.theta_app_short) +
                       (result.theta_short_fallback ? " fallback\n" : " estimated\n");
    thresholds_text += "theta_app_long " + fmt6(result.thresholds.theta_app_long) +
                       (result.theta_long_fallback ? " fallback\n" : " estimated\n");
    thresholds_text += "theta_t " + std::to_string(config.theta_t) + "\n";
    atomic_write_text((out / "thresholds.txt").string(), thresholds_text);
    info("[theta_long] " + fmt6(result.thresholds.theta_app_long) +
         (result.theta_long_fallback ? " (fallback)" : " (estimated)") + " from " +
         std::to_string(within.values.size()) + " within-tracklet pairs");
    mark(stage);

    stage = "manifest_inter";
    std::vector<TripletSample> inter_samples;
    try {
      inter_samples =
          sample_inter_tracklet(tracklets, config.inter_triplets, inter_seed, sampler_config);
    } catch (const SamplingError& e) {
      warn(std::string(e.what()) + "; inter-tracklet manifest left empty");
    }
    write_manifest((out / "manifest_inter.txt").string(), inter_samples, inter_seed);
    info("[manifest_inter] " + std::to_string(inter_samples.size()) + " triplets");
    mark(stage);

    stage = "batch_plans";
    const auto train_pool = filter_origin(intra_samples, TripletOrigin::kTrainGt);
    const auto target_intra = filter_origin(intra_samples, TripletOrigin::kTargetIntra);
    if (train_pool.empty() || target_intra.empty()) {
      warn("skipping intra-frame batch plan: needs both labeled and target triplets");
    } else {
      const BatchPlan plan = plan_batches(train_pool, target_intra, config.batch_size,
                                          Rng::derive_seed(batch_seed, 0),
                                          config.reuse_smaller_pool);
      write_batch_plan((out / "batches_intra.txt").string(), plan, config.seed);
      info("[batch_plans] intra: " + std::to_string(plan.batches()) + " batches");
    }
    if (train_pool.empty() || inter_samples.empty()) {
      warn("skipping inter-tracklet batch plan: needs both labeled and target triplets");
    } else {
      const BatchPlan plan = plan_batches(train_pool, inter_samples, config.batch_size,
                                          Rng::derive_seed(batch_seed, 1),
                                          config.reuse_smaller_pool);
      write_batch_plan((out / "batches_inter.txt").string(), plan, config.seed);
      info("[batch_plans] inter: " + std::to_string(plan.batches()) + " batches");
    }
    mark(stage);

    stage = "merge";
    const CostMatrix long_matrix = build_long_matrix(tracklets, config.theta_t, store);
    ClusterOptions cluster_options;
    cluster_options.cut = 1.0 - result.thresholds.theta_app_long;
    cluster_options.theta_t = config.theta_t;
    cluster_options.normalize_centroids = config.normalize_centroids;
    const ClusterResult clustered =
        cluster_tracklets(long_matrix, tracklets, store, cluster_options);
    atomic_write_text((out / "merge_log.txt").string(), format_merge_log(clustered.log));
    const std::vector<FinalTrack> finals = relabel_tracks(tracklets, clustered.clusters);
    result.final_tracks = finals.size();
    info("[merge] " + std::to_string(tracklets.size()) + " tracklets -> " +
         std::to_string(finals.size()) + " tracks in " + std::to_string(clustered.log.size()) +
         " merges");
    mark(stage);

    stage = "write_result";
    TrackOutputs outputs = materialize_tracks(finals, fused);
    write_mots((out / "result.txt").string(), std::move(outputs.lines));
    write_assignments((out / "assignments.txt").string(), outputs.assignments);
    info("[write_result] " + std::to_string(outputs.assignments.size()) +
         " assigned observations");
    mark(stage);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(stage) + ": " + e.what());
  } catch (const EstimationError& e) {
    throw EstimationError(std::string(stage) + ": " + e.what());
  } catch (const SamplingError& e) {
    throw SamplingError(std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(stage) + ": " + e.what());
  }
  return result;
}

}  // namespace mots
