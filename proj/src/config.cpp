#include "ed4/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string value = unquote(text);
  T out{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError("invalid value '" + value + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string value = unquote(text);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + std::string(key));
}

Exploration parse_exploration(std::string_view text) {
  const std::string value = unquote(text);
  if (value == "none") return Exploration::kNone;
  if (value == "proportional") return Exploration::kProportional;
  throw ConfigError("exploration must be 'none' or 'proportional', got '" + value + "'");
}

}  // namespace

std::string to_string(LabelMode mode) { return mode == LabelMode::kHard ? "hard" : "soft"; }

LabelMode parse_label_mode(std::string_view text) {
  const std::string value = unquote(text);
  if (value == "hard") return LabelMode::kHard;
  if (value == "soft") return LabelMode::kSoft;
  throw ConfigError("label mode must be 'hard' or 'soft', got '" + value + "'");
}

std::vector<int> parse_int_list(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<int> out;
  while (!trim(s).empty()) {
    const auto comma = s.find(',');
    const std::string_view item = trim(s.substr(0, comma));
    out.push_back(parse_number<int>("list", item));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

void AugConfig::set(std::string_view key, std::string_view value) {
  if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "mix_counts") mix_counts = parse_int_list(value);
  else if (key == "angle_min") angle_min = parse_number<double>(key, value);
  else if (key == "angle_max") angle_max = parse_number<double>(key, value);
  else if (key == "min_sector") min_sector = parse_number<double>(key, value);
  else if (key == "max_recipe_retries") max_recipe_retries = parse_number<int>(key, value);
  else if (key == "shared_base") shared_base = parse_bool(key, value);
  else if (key == "p_mix") p_mix = parse_number<double>(key, value);
  else if (key == "label_mode") label_mode = parse_label_mode(value);
  else if (key == "granularities") granularities = parse_int_list(value);
  else if (key == "epsilon") epsilon = parse_number<double>(key, value);
  else if (key == "batch_size") batch_size = parse_number<int>(key, value);
  else if (key == "output_dir") output_dir = unquote(value);
  else if (key == "image_size") image_size = parse_number<int>(key, value);
  else if (key == "threads") threads = parse_number<int>(key, value);
  else if (key == "shuffle_views") shuffle_views = parse_bool(key, value);
  else if (key == "exploration") exploration = parse_exploration(value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void AugConfig::validate() const {
  if (mix_counts.empty()) throw ConfigError("mix_counts must not be empty");
  for (int n : mix_counts) {
    if (n < 1 || n > 4) throw ConfigError("mix_counts entries must be in {1, 2, 3, 4}");
  }
  if (!(angle_min > 0.0 && angle_max < 360.0 && angle_min < angle_max)) {
    throw ConfigError("angle range must satisfy 0 < angle_min < angle_max < 360");
  }
  if (!(min_sector >= 0.0)) throw ConfigError("min_sector must be >= 0");
  if (max_recipe_retries < 1) throw ConfigError("max_recipe_retries must be >= 1");
  if (!(p_mix >= 0.0 && p_mix <= 1.0)) throw ConfigError("p_mix must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (image_size < 1) throw ConfigError("image_size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (granularities.empty()) throw ConfigError("granularities must not be empty");
  for (int g : granularities) {
    if (g < 1 || image_size % g != 0) {
      throw ConfigError("granularity " + std::to_string(g) + " does not divide image_size " +
                        std::to_string(image_size));
    }
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RecipeSampling AugConfig::recipe_sampling() const {
  return RecipeSampling{angle_min, angle_max, min_sector, max_recipe_retries, shared_base};
}

AugConfig load_config_file(const std::filesystem::path& path, AugConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    // Comments start at a '#' outside quotes; values here never contain one.
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty() || view.front() == '[' ) {
      // Blank line or TOML table header; the file is flat.
      if (!view.empty() && view.back() != ']') {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed line");
      }
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(view.substr(0, eq)));
    std::replace(key.begin(), key.end(), '-', '_');
    try {
      base.set(key, trim(view.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

}  // namespace ed4
