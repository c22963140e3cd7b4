#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ed4/advscm.hpp"
#include "ed4/clockmix.hpp"

namespace ed4 {

enum class LabelMode { kHard, kSoft };

std::string to_string(LabelMode mode);
LabelMode parse_label_mode(std::string_view text);

// Every knob of a batch augmentation run. Keys accepted by set() and by the
// config file are the field names below.
struct AugConfig {
  std::uint64_t seed = 0;
  std::vector<int> mix_counts{1, 2, 3, 4};
  double angle_min = 45.0;
  double angle_max = 315.0;
  double min_sector = 30.0;
  int max_recipe_retries = 1000;
  bool shared_base = true;
  double p_mix = 0.5;
  LabelMode label_mode = LabelMode::kHard;
  std::vector<int> granularities{2, 4, 8};
  double epsilon = 0.0002;
  int batch_size = 32;
  std::string output_dir = "out";
  int image_size = 256;
  int threads = 1;
  bool shuffle_views = false;
  Exploration exploration = Exploration::kNone;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  // Assigns one key from its textual value. Throws ConfigError for unknown
  // keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  RecipeSampling recipe_sampling() const;
};

// Reads a flat `key = value` file (TOML-compatible subset: `#` comments,
// quoted or bare strings, numbers, booleans, `[a, b]` integer lists) on top
// of `base`. Missing file -> IoError; bad line -> ConfigError with line number.
AugConfig load_config_file(const std::filesystem::path& path, AugConfig base = {});

std::vector<int> parse_int_list(std::string_view text);

}  // namespace ed4
