// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Exit codes: 0 success, 2 bad input (flags, file
// contents, config), 3 internal or I/O failure.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mots/error.hpp"
#include "mots/evaluation.hpp"
#include "mots/fusion.hpp"
#include "mots/io.hpp"
#include "mots/merging.hpp"
#include "mots/pipeline.hpp"
#include "mots/rng.hpp"
#include "mots/short_tracker.hpp"
#include "mots/stats.hpp"
#include "mots/synth.hpp"
#include "mots/triplets.hpp"
#include "mots/version.hpp"

namespace {

using namespace mots;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<Detection> read_detection_sources(const std::vector<std::string>& paths) {
  std::vector<Detection> all;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto part = read_detections(paths[i], static_cast<int>(i));
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

std::vector<ObsRef> unique_observations(const std::vector<Detection>& detections,
                                        std::set<std::pair<int, std::int64_t>>* keys_out) {
  std::set<std::pair<int, std::int64_t>> keys;
  std::vector<ObsRef> observations;
  for (const auto& d : detections) {
    if (keys.insert({d.frame_id, d.object_key}).second) {
      observations.push_back({d.frame_id, d.object_key});
    }
  }
  if (keys_out) *keys_out = std::move(keys);
  return observations;
}

struct FuseOpts {
  std::vector<std::string> detections;
  double iom_threshold = 0.5;
  std::string out;
};

void run_fuse(const FuseOpts& o) {
  const auto all = read_detection_sources(o.detections);
  FusionConfig config;
  config.iom_threshold = o.iom_threshold;
  const auto fused = fuse_detections(all, config);
  write_detections(o.out, fused);
  std::cout << all.size() << " detections -> " << fused.size() << " fused\n";
}

struct TrackOpts {
  std::string fused;
  std::string embeddings;
  std::string flows_dir;
  std::string out;
  double theta_short = 0.5;
  bool identity_flow_fallback = false;
};

void run_track(const TrackOpts& o) {
  const auto fused = read_detections(o.fused, 0);
  const auto store = read_embeddings(o.embeddings);
  const auto flows = read_flow_dir(o.flows_dir);
  ShortTrackOptions options;
  options.theta_short = o.theta_short;
  options.identity_flow_fallback = o.identity_flow_fallback;
  const auto tracklets = track_video(fused, flows, store, options);
  write_tracklets(o.out, tracklets);
  std::cout << fused.size() << " observations -> " << tracklets.size() << " tracklets\n";
}

struct ThresholdsOpts {
  std::vector<std::string> fused;
  std::vector<std::string> tracklets;
  std::vector<std::string> embeddings;
  std::size_t min_samples = 30;
  double fallback_short = 0.5;
  double fallback_long = 0.6;
  bool otsu = false;
  int theta_t = 15;
  std::string out;
};

// Pools similarity samples over any number of videos; pass the flags once
// per video, lists aligned by position.
void run_thresholds(const ThresholdsOpts& o) {
  if (o.fused.size() != o.embeddings.size() || o.tracklets.size() != o.embeddings.size()) {
    throw ValidationError("--fused, --tracklets, and --embeddings must repeat once per video");
  }
  SimilaritySampleSet negatives;
  negatives.kind = SampleKind::kIntraFrameNegative;
  SimilaritySampleSet positives;
  positives.kind = SampleKind::kIntraTrackletPositive;
  for (std::size_t i = 0; i < o.embeddings.size(); ++i) {
    const auto store = read_embeddings(o.embeddings[i]);
    const auto fused = read_detections(o.fused[i], 0);
    const auto neg = collect_intra_frame_similarities(fused, store);
    negatives.values.insert(negatives.values.end(), neg.values.begin(), neg.values.end());
    const auto tracklets = read_tracklets(o.tracklets[i]);
    const auto pos = collect_intra_tracklet_similarities(tracklets, store);
    positives.values.insert(positives.values.end(), pos.values.begin(), pos.values.end());
  }

  ThresholdConfig config;
  config.min_samples = o.min_samples;
  config.fallback_theta_short = o.fallback_short;
  config.fallback_theta_long = o.fallback_long;
  config.long_method =
      o.otsu ? LongThresholdMethod::kOtsu : LongThresholdMethod::kGaussianCrossing;

  double theta_short = o.fallback_short;
  bool short_fallback = false;
  try {
    theta_short = estimate_theta_short(negatives, config);
  } catch (const EstimationError& e) {
    short_fallback = true;
    std::cerr << "warning: " << e.what() << "; using fallback\n";
  }
  double theta_long = o.fallback_long;
  bool long_fallback = false;
  try {
    theta_long = estimate_theta_long(negatives, positives, config);
  } catch (const EstimationError& e) {
    long_fallback = true;
    std::cerr << "warning: " << e.what() << "; using fallback\n";
  }

  std::string text;
  text += "theta_app_short " + fmt6(theta_short) + (short_fallback ? " fallback\n" : " estimated\n");
  text += "theta_app_long " + fmt6(theta_long) + (long_fallback ? " fallback\n" : " estimated\n");
  text += "theta_t " + std::to_string(o.theta_t) + "\n";
  if (!o.out.empty()) atomic_write_text(o.out, text);
  std::cout << text;
}

struct TripletsOpts {
  std::string mode;
  std::string fused;
  std::string gt_labels;
  std::string tracklets;
  std::string out;
  std::string plan_out;
  int count = 1000;
  std::uint64_t seed = 1;
  int video_id = 0;
  int retry_budget = 100;
  int batch_size = 32;
  bool reuse_smaller_pool = false;
};

void run_triplets(const TripletsOpts& o) {
  SamplerConfig config;
  config.video_id = o.video_id;
  config.retry_budget = o.retry_budget;

  std::vector<TripletSample> samples;
  if (o.mode == "intra") {
    if (o.fused.empty()) throw ValidationError("intra mode needs --fused");
    std::set<std::pair<int, std::int64_t>> keys;
    const auto observations = unique_observations(read_detections(o.fused, 0), &keys);
    std::vector<Tracklet> gt_tracklets;
    if (!o.gt_labels.empty()) {
      gt_tracklets = tracklets_from_labels(read_gt_labels(o.gt_labels), keys);
    }
    samples = sample_intra_frame(observations, gt_tracklets, o.count, o.seed, config);
  } else {
    if (o.tracklets.empty()) throw ValidationError("inter mode needs --tracklets");
    if (!o.plan_out.empty()) {
      throw ValidationError(
          "batch plans need the labeled pool; plan from an intra-frame manifest");
    }
    samples = sample_inter_tracklet(read_tracklets(o.tracklets), o.count, o.seed, config);
  }
  write_manifest(o.out, samples, o.seed);
  std::cout << samples.size() << " triplets\n";

  if (!o.plan_out.empty()) {
    std::vector<TripletSample> train;
    std::vector<TripletSample> target;
    for (const auto& s : samples) {
      (s.origin == TripletOrigin::kTrainGt ? train : target).push_back(s);
    }
    if (train.empty() || target.empty()) {
      throw ValidationError("batch plan needs both labeled and target triplets; pass --gt-labels");
    }
    const auto plan = plan_batches(train, target, o.batch_size, Rng::derive_seed(o.seed, 3),
                                   o.reuse_smaller_pool);
    write_batch_plan(o.plan_out, plan, o.seed);
    std::cout << plan.batches() << " batches of " << o.batch_size << "\n";
  }
}

struct MergeOpts {
  std::string fused;
  std::string tracklets;
  std::string embeddings;
  std::string out_dir;
  double theta_long = 0.6;
  int theta_t = 15;
  bool normalize_centroids = false;
};

void run_merge(const MergeOpts& o) {
  const auto fused = read_detections(o.fused, 0);
  const auto tracklets = read_tracklets(o.tracklets);
  const auto store = read_embeddings(o.embeddings);

  const auto matrix = build_long_matrix(tracklets, o.theta_t, store);
  ClusterOptions options;
  options.cut = 1.0 - o.theta_long;
  options.theta_t = o.theta_t;
  options.normalize_centroids = o.normalize_centroids;
  const auto clustered = cluster_tracklets(matrix, tracklets, store, options);
  const auto finals = relabel_tracks(tracklets, clustered.clusters);
  auto outputs = materialize_tracks(finals, fused);

  const std::filesystem::path out(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error("cannot create " + out.string() + ": " + ec.message());
  atomic_write_text((out / "merge_log.txt").string(), format_merge_log(clustered.log));
  write_mots((out / "result.txt").string(), std::move(outputs.lines));
  write_assignments((out / "assignments.txt").string(), outputs.assignments);
  std::cout << tracklets.size() << " tracklets -> " << finals.size() << " tracks in "
            << clustered.log.size() << " merges\n";
}

struct EvalOpts {
  std::string assignments;
  std::string gt_labels;
  std::string out;
};

void run_eval(const EvalOpts& o) {
  const auto report =
      evaluate_association(read_assignments(o.assignments), read_gt_labels(o.gt_labels));
  std::string text;
  text += "id_switches " + std::to_string(report.id_switches) + "\n";
  text += "identity_f1 " + fmt6(report.identity_f1) + "\n";
  text += "track_purity " + fmt6(report.track_purity) + "\n";
  text += "constraint_violations " + std::to_string(report.constraint_violations) + "\n";
  if (!o.out.empty()) atomic_write_text(o.out, text);
  std::cout << text;
}

struct SynthOpts {
  ScenarioConfig config;
  std::string out_dir;
  std::string emit_config;
};

void run_synth(const SynthOpts& o) {
  const auto scenario = generate_scenario(o.config);
  export_scenario(scenario, o.out_dir);
  std::cout << o.config.num_identities << " identities, " << o.config.num_frames << " frames, "
            << scenario.detections.size() << " detections\n";

  if (o.emit_config.empty()) return;
  // Ready-to-run pipeline config pointing at the exported files.
  nlohmann::json j;
  const std::filesystem::path dir(o.out_dir);
  std::vector<std::string> detection_paths;
  for (int s = 0; s < o.config.num_sources; ++s) {
    detection_paths.push_back((dir / ("detections_" + std::to_string(s) + ".txt")).string());
  }
  j["detection_paths"] = detection_paths;
  j["embeddings_path"] = (dir / "embeddings.remb").string();
  j["flows_dir"] = (dir / "flows").string();
  j["gt_labels_path"] = (dir / "gt_labels.txt").string();
  j["output_dir"] = (dir / "pipeline").string();
  j["seed"] = o.config.seed;
  atomic_write_text(o.emit_config, j.dump(2) + "\n");
}

struct PipelineOpts {
  std::string config;
  bool quiet = false;
};

void run_pipeline_cmd(const PipelineOpts& o) {
  const auto config = load_pipeline_config(o.config);
  const auto result = run_pipeline(config, o.quiet ? nullptr : &std::cout);
  std::cout << "fused_observations " << result.fused_observations << "\n";
  std::cout << "tracklets " << result.tracklets << "\n";
  std::cout << "final_tracks " << result.final_tracks << "\n";
  std::cout << "theta_app_short " << fmt6(result.thresholds.theta_app_short)
            << (result.theta_short_fallback ? " fallback" : " estimated") << "\n";
  std::cout << "theta_app_long " << fmt6(result.thresholds.theta_app_long)
            << (result.theta_long_fallback ? " fallback" : " estimated") << "\n";
  std::cout << "warnings " << result.warnings.size() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-object tracking-and-segmentation refinement toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FuseOpts fuse_opts;
  auto* fuse = app.add_subcommand("fuse", "Merge per-source detections frame by frame");
  fuse->add_option("--detections", fuse_opts.detections,
                   "Detection file, once per source; order fixes source priority")
      ->required();
  fuse->add_option("--iom-threshold", fuse_opts.iom_threshold,
                   "Suppress overlaps at or above this intersection-over-smaller-mask")
      ->check(CLI::Range(0.0, 1.0));
  fuse->add_option("--out", fuse_opts.out, "Fused detections file")->required();
  fuse->callback([&] { run_fuse(fuse_opts); });

  TrackOpts track_opts;
  auto* track = app.add_subcommand("track", "Link fused detections into short tracklets");
  track->add_option("--fused", track_opts.fused, "Fused detections file")->required();
  track->add_option("--embeddings", track_opts.embeddings, "Embeddings file")->required();
  track->add_option("--flows-dir", track_opts.flows_dir, "Directory of <t>_<t+1>.rflw files");
  track->add_option("--theta-short", track_opts.theta_short,
                    "Appearance gate for frame-to-frame links");
  track->add_flag("--identity-flow-fallback", track_opts.identity_flow_fallback,
                  "Treat missing flow files as zero motion");
  track->add_option("--out", track_opts.out, "Tracklets file")->required();
  track->callback([&] { run_track(track_opts); });

  ThresholdsOpts thr_opts;
  auto* thresholds =
      app.add_subcommand("thresholds", "Estimate appearance gates from similarity statistics");
  thresholds->add_option("--fused", thr_opts.fused, "Fused detections, once per video")
      ->required();
  thresholds->add_option("--tracklets", thr_opts.tracklets, "Tracklets, once per video")
      ->required();
  thresholds->add_option("--embeddings", thr_opts.embeddings, "Embeddings, once per video")
      ->required();
  thresholds->add_option("--min-samples", thr_opts.min_samples,
                         "Fewest samples an estimate may rest on");
  thresholds->add_option("--fallback-short", thr_opts.fallback_short,
                         "theta_app_short when estimation degrades")
      ->check(CLI::Range(0.0, 1.0));
  thresholds->add_option("--fallback-long", thr_opts.fallback_long,
                         "theta_app_long when estimation degrades")
      ->check(CLI::Range(0.0, 1.0));
  thresholds->add_flag("--otsu", thr_opts.otsu,
                       "Split positives from negatives by histogram variance instead of "
                       "fitted density crossing");
  thresholds->add_option("--theta-t", thr_opts.theta_t, "Temporal gap gate to record");
  thresholds->add_option("--out", thr_opts.out, "Thresholds file (stdout only if omitted)");
  thresholds->callback([&] { run_thresholds(thr_opts); });

  TripletsOpts trip_opts;
  auto* triplets = app.add_subcommand("triplets", "Sample training triplet manifests");
  triplets->add_option("--mode", trip_opts.mode, "intra: co-frame negatives; inter: cross-tracklet")
      ->required()
      ->check(CLI::IsMember({"intra", "inter"}));
  triplets->add_option("--fused", trip_opts.fused, "Fused detections (intra mode)");
  triplets->add_option("--gt-labels", trip_opts.gt_labels,
                       "Ground-truth labels enabling the labeled half (intra mode)");
  triplets->add_option("--tracklets", trip_opts.tracklets, "Tracklets file (inter mode)");
  triplets->add_option("--count", trip_opts.count, "Triplets to sample")
      ->check(CLI::NonNegativeNumber);
  triplets->add_option("--seed", trip_opts.seed, "Sampling seed");
  triplets->add_option("--video-id", trip_opts.video_id, "Video id stamped into the manifest");
  triplets->add_option("--retry-budget", trip_opts.retry_budget,
                       "Resample attempts per triplet before giving up")
      ->check(CLI::PositiveNumber);
  triplets->add_option("--out", trip_opts.out, "Manifest file")->required();
  triplets->add_option("--plan-out", trip_opts.plan_out, "Also write a batch plan here");
  triplets->add_option("--batch-size", trip_opts.batch_size, "Triplets per batch (even)");
  triplets->add_flag("--reuse-smaller-pool", trip_opts.reuse_smaller_pool,
                     "Stretch the smaller pool by drawing with replacement");
  triplets->callback([&] { run_triplets(trip_opts); });

  MergeOpts merge_opts;
  auto* merge = app.add_subcommand("merge", "Merge tracklets into final tracks");
  merge->add_option("--fused", merge_opts.fused, "Fused detections file (mask source)")
      ->required();
  merge->add_option("--tracklets", merge_opts.tracklets, "Tracklets file")->required();
  merge->add_option("--embeddings", merge_opts.embeddings, "Embeddings file")->required();
  merge->add_option("--theta-long", merge_opts.theta_long, "Appearance gate for merging")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  merge->add_option("--theta-t", merge_opts.theta_t, "Largest mergeable frame gap")
      ->check(CLI::NonNegativeNumber);
  merge->add_flag("--normalize-centroids", merge_opts.normalize_centroids,
                  "Normalize embeddings before averaging into cluster centroids");
  merge->add_option("--out-dir", merge_opts.out_dir,
                    "Directory for result.txt, assignments.txt, merge_log.txt")
      ->required();
  merge->callback([&] { run_merge(merge_opts); });

  EvalOpts eval_opts;
  auto* eval = app.add_subcommand("eval", "Score assignments against ground-truth labels");
  eval->add_option("--assignments", eval_opts.assignments, "Assignments file")->required();
  eval->add_option("--gt-labels", eval_opts.gt_labels, "Ground-truth labels file")->required();
  eval->add_option("--out", eval_opts.out, "Also write the report here");
  eval->callback([&] { run_eval(eval_opts); });

  SynthOpts synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic video");
  synth->add_option("--out-dir", synth_opts.out_dir, "Directory for the exported files")
      ->required();
  synth->add_option("--num-identities", synth_opts.config.num_identities)
      ->check(CLI::PositiveNumber);
  synth->add_option("--num-frames", synth_opts.config.num_frames)->check(CLI::PositiveNumber);
  synth->add_option("--frame-height", synth_opts.config.frame_height)
      ->check(CLI::PositiveNumber);
  synth->add_option("--frame-width", synth_opts.config.frame_width)->check(CLI::PositiveNumber);
  synth->add_option("--embedding-dim", synth_opts.config.embedding_dim)
      ->check(CLI::PositiveNumber);
  synth->add_option("--sigma-within", synth_opts.config.sigma_within,
                    "Per-observation embedding noise");
  synth->add_option("--sigma-between", synth_opts.config.sigma_between,
                    "Largest |cos| between identity means");
  synth->add_option("--misdetection-rate", synth_opts.config.misdetection_rate)
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--false-positive-rate", synth_opts.config.false_positive_rate)
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--occlusion-events", synth_opts.config.occlusion_events)
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_opts.config.seed);
  synth->add_option("--class-id", synth_opts.config.class_id);
  synth->add_option("--num-sources", synth_opts.config.num_sources)
      ->check(CLI::PositiveNumber);
  synth->add_option("--emit-config", synth_opts.emit_config,
                    "Write a ready pipeline config JSON here");
  synth->callback([&] { run_synth(synth_opts); });

  PipelineOpts pipe_opts;
  auto* pipeline = app.add_subcommand("pipeline", "Run the full refinement pipeline");
  pipeline->add_option("--config", pipe_opts.config, "Pipeline config JSON")->required();
  pipeline->add_flag("--quiet", pipe_opts.quiet, "Suppress per-stage progress");
  pipeline->callback([&] { run_pipeline_cmd(pipe_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
