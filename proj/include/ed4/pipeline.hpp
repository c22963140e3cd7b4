#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ed4/advscm.hpp"
#include "ed4/clockmix.hpp"
#include "ed4/config.hpp"
#include "ed4/image.hpp"
#include "ed4/random.hpp"
#include "ed4/shuffle.hpp"

namespace ed4 {

struct ManifestRecord {
  std::string id;
  std::filesystem::path path;  // resolved against the manifest's directory
  int label = kRealLabel;
  std::optional<FaceCenter> center;  // in original image pixels
};

// JSONL, one {"id", "path", "label", "center"?} object per line. Blank lines
// are skipped. Errors name the offending line.
std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path);

// A record whose image has been decoded and resized to image_size.
struct LoadedRecord {
  ManifestRecord record;
  Image pixels;
  FaceCenter center;  // in resized pixels
};

LoadedRecord load_record(const ManifestRecord& record, int image_size);

struct ShuffleViews {
  Image random_view;  // I_s1
  GridPermutation random_permutation;
  Image adversarial_view;  // I_s2
  GridPermutation adversarial_permutation;
};

struct AugmentedSample {
  std::string id;
  Image pixels;
  int label = kRealLabel;
  std::optional<double> soft_label;  // set in soft label mode
  bool mixed = false;
  std::vector<std::string> provenance;  // source ids, base image first
  std::vector<int> provenance_labels;
  MixRecipe recipe;  // sources == provenance; no angles when passed through
  std::optional<ShuffleViews> views;
};

// Augments one mini-batch. Each slot draws from derive_stream(seed, id), in
// this order: mix decision (p_mix), source count, partners (uniform without
// replacement from the rest of the batch), recipe, then shuffle views.
// Results do not depend on config.threads. `scorer` supplies I_s2 when views
// are requested; it must be given whenever config.shuffle_views is set.
std::vector<AugmentedSample> augment_batch(std::span<const LoadedRecord> batch,
                                           const AugConfig& config,
                                           const ScorerModel* scorer = nullptr);

using WarningSink = std::function<void(const std::string&)>;

struct AugmentRun {
  std::vector<AugmentedSample> samples;
  std::size_t skipped = 0;
};

// Loads, batches (config.batch_size, manifest order) and augments. Unreadable
// images are skipped with a warning; a batch in which every image fails
// raises DataError.
AugmentRun augment_records(std::span<const ManifestRecord> records, const AugConfig& config,
                           const WarningSink& warn);

// Writes images/<index>_<id>.png (and views/ when present) under
// config.output_dir plus manifest.jsonl; returns the manifest path.
std::filesystem::path emit_outputs(std::span<const AugmentedSample> samples,
                                   const AugConfig& config);

// One line of an emitted manifest.
struct OutputRecord {
  std::string id;
  std::filesystem::path path;  // resolved against the manifest's directory
  int label = kRealLabel;
  std::optional<double> soft_label;
  bool mixed = false;
  std::vector<std::string> provenance;
  std::vector<int> provenance_labels;
  MixRecipe recipe;
};

std::vector<OutputRecord> load_output_manifest(const std::filesystem::path& path);

// Re-executes a recorded recipe. `sources` maps id -> resized source image.
Image replay_sample(const OutputRecord& record, const std::map<std::string, Image>& sources);

}  // namespace ed4
