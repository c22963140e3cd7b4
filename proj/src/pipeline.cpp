#include "ed4/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ed4/assignment.hpp"
#include "ed4/error.hpp"
#include "ed4/image_io.hpp"
#include "ed4/parallel.hpp"

namespace ed4 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void line_error(const fs::path& path, int line_no, const std::string& msg) {
  throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

std::ifstream open_for_reading(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// Reads every non-blank line as a JSON object; fn(object, line_no).
template <typename Fn>
void for_each_json_line(const fs::path& path, Fn&& fn) {
  std::ifstream in = open_for_reading(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!object.is_object()) line_error(path, line_no, "expected a JSON object");
    try {
      fn(object, line_no);
    } catch (const json::exception& e) {
      line_error(path, line_no, e.what());
    } catch (const DomainError& e) {
      line_error(path, line_no, e.what());
    }
  }
}

int read_label(const json& object, const fs::path& path, int line_no) {
  if (!object.contains("label")) line_error(path, line_no, "missing \"label\"");
  const json& label = object.at("label");
  if (!label.is_number_integer() || (label.get<long long>() != kRealLabel &&
                                     label.get<long long>() != kFakeLabel)) {
    line_error(path, line_no, "label must be 0 or 1, got " + label.dump());
  }
  return label.get<int>();
}

std::string read_string(const json& object, const char* key, const fs::path& path,
                        int line_no) {
  if (!object.contains(key) || !object.at(key).is_string()) {
    line_error(path, line_no, std::string("missing or non-string \"") + key + "\"");
  }
  std::string value = object.at(key).get<std::string>();
  if (value.empty()) line_error(path, line_no, std::string("empty \"") + key + "\"");
  return value;
}

std::optional<FaceCenter> read_center(const json& object, const fs::path& path, int line_no) {
  if (!object.contains("center") || object.at("center").is_null()) return std::nullopt;
  const json& c = object.at("center");
  if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
    line_error(path, line_no, "center must be [x, y] with integer pixel coordinates");
  }
  return FaceCenter{c[0].get<int>(), c[1].get<int>()};
}

fs::path resolve(const fs::path& base_dir, const std::string& text) {
  fs::path p(text);
  return p.is_absolute() ? p : base_dir / p;
}

// Maps a pixel index from an axis of length `from` to one of length `to`,
// matching pixel centres.
int rescale_coordinate(int value, int from, int to) {
  if (from == to) return value;
  const double mapped = (static_cast<double>(value) + 0.5) * to / from - 0.5;
  const long long rounded = std::llround(mapped);
  return static_cast<int>(std::clamp<long long>(rounded, 0, to - 1));
}

std::string sanitize(const std::string& id) {
  std::string out;
  out.reserve(std::min<std::size_t>(id.size(), 64));
  for (char c : id) {
    if (out.size() == 64) break;
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

std::string sample_stem(std::size_t index, const std::string& id) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%06zu", index);
  return std::string(prefix) + "_" + sanitize(id);
}

json recipe_json(const MixRecipe& recipe) {
  json r;
  r["angles"] = recipe.sweep_angles;
  r["base"] = recipe.rho_base;
  r["sources"] = recipe.source_ids;
  r["center"] = json::array({recipe.center.delta_x, recipe.center.delta_y});
  if (!recipe.step_bases.empty()) r["step_bases"] = recipe.step_bases;
  return r;
}

MixRecipe recipe_from_json(const json& r) {
  MixRecipe recipe;
  recipe.sweep_angles = r.at("angles").get<std::vector<double>>();
  recipe.rho_base = r.at("base").get<double>();
  recipe.source_ids = r.at("sources").get<std::vector<std::string>>();
  const json& c = r.at("center");
  recipe.center = FaceCenter{c.at(0).get<int>(), c.at(1).get<int>()};
  if (r.contains("step_bases")) recipe.step_bases = r.at("step_bases").get<std::vector<double>>();
  return recipe;
}

ShuffleViews make_views(const Image& pixels, RandomStream& rng, const AugConfig& config,
                        const ScorerModel& scorer) {
  ShuffleResult s1 = random_shuffle(rng, pixels, config.granularities);
  const int g = s1.permutation.granularity();
  const AssignmentMatrix m_hat = hungarian_assign(scorer.score(pixels, s1.image, g));
  GridPermutation adversarial = permutation_from_matrix(m_hat);
  Image s2 = apply_permutation(pixels, adversarial);
  return ShuffleViews{std::move(s1.image), std::move(s1.permutation), std::move(s2),
                      std::move(adversarial)};
}

}  // namespace

std::vector<ManifestRecord> load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("manifest not found: " + path.string());
  const fs::path base_dir = path.parent_path();
  std::vector<ManifestRecord> records;
  std::set<std::string> seen;
  for_each_json_line(path, [&](const json& object, int line_no) {
    ManifestRecord record;
    record.id = read_string(object, "id", path, line_no);
    record.path = resolve(base_dir, read_string(object, "path", path, line_no));
    record.label = read_label(object, path, line_no);
    record.center = read_center(object, path, line_no);
    if (!seen.insert(record.id).second) {
      line_error(path, line_no, "duplicate id \"" + record.id + "\"");
    }
    records.push_back(std::move(record));
  });
  return records;
}

LoadedRecord load_record(const ManifestRecord& record, int image_size) {
  if (image_size < 1) throw ConfigError("image_size must be >= 1");
  Image original = read_image(record.path);
  const ImageGrid source_grid{original.height(), original.width()};
  FaceCenter center{image_size / 2, image_size / 2};
  if (record.center) {
    try {
      validate_center(source_grid, *record.center);
    } catch (const DomainError& e) {
      throw DataError("record \"" + record.id + "\": " + e.what());
    }
    center = FaceCenter{rescale_coordinate(record.center->delta_x, source_grid.width, image_size),
                        rescale_coordinate(record.center->delta_y, source_grid.height, image_size)};
  }
  return LoadedRecord{record, resize_bilinear(original, image_size, image_size), center};
}

std::vector<AugmentedSample> augment_batch(std::span<const LoadedRecord> batch,
                                           const AugConfig& config, const ScorerModel* scorer) {
  config.validate();
  if (config.shuffle_views && scorer == nullptr) {
    throw ConfigError("shuffle views need a scorer");
  }
  for (const LoadedRecord& item : batch) {
    if (item.pixels.height() != config.image_size || item.pixels.width() != config.image_size) {
      throw DomainError("record \"" + item.record.id + "\" is not " +
                        std::to_string(config.image_size) + " pixels square");
    }
  }
  const RecipeSampling sampling = config.recipe_sampling();
  std::vector<AugmentedSample> out(batch.size());

  parallel_for(batch.size(), config.threads, [&](std::size_t slot) {
    const LoadedRecord& self = batch[slot];
    RandomStream rng = derive_stream(config.seed, self.record.id);
    AugmentedSample& sample = out[slot];
    sample.id = self.record.id;

    std::vector<std::size_t> sources{slot};
    if (rng.bernoulli(config.p_mix)) {
      const int drawn = config.mix_counts[rng.below(config.mix_counts.size())];
      const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(drawn), batch.size());
      std::vector<std::size_t> others;
      others.reserve(batch.size() - 1);
      for (std::size_t j = 0; j < batch.size(); ++j) {
        if (j != slot) others.push_back(j);
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t pick = k + rng.below(others.size() - k);
        std::swap(others[k], others[pick]);
        sources.push_back(others[k]);
      }
    }

    std::vector<int> labels;
    for (std::size_t idx : sources) {
      sample.provenance.push_back(batch[idx].record.id);
      labels.push_back(batch[idx].record.label);
    }
    sample.provenance_labels = labels;

    if (sources.size() > 1) {
      sample.recipe = sample_recipe(rng, static_cast<int>(sources.size()), sampling);
      sample.recipe.source_ids = sample.provenance;
      sample.recipe.center = self.center;
      std::vector<const Image*> images;
      for (std::size_t idx : sources) images.push_back(&batch[idx].pixels);
      sample.pixels = clockmix_pixels(images, sample.recipe);
      sample.mixed = true;
    } else {
      sample.recipe.source_ids = sample.provenance;
      sample.recipe.center = self.center;
      sample.pixels = self.pixels;
    }

    sample.label = mix_label_hard(labels);
    if (config.label_mode == LabelMode::kSoft) {
      sample.soft_label = mix_label_soft_n(labels, sample.recipe.sweep_angles);
    }
    if (config.shuffle_views) sample.views = make_views(sample.pixels, rng, config, *scorer);
  });
  return out;
}

AugmentRun augment_records(std::span<const ManifestRecord> records, const AugConfig& config,
                           const WarningSink& warn) {
  config.validate();
  std::unique_ptr<ReferenceScorer> scorer;
  if (config.shuffle_views) {
    scorer = std::make_unique<ReferenceScorer>(config.granularities,
                                               stable_hash(config.seed, "scorer"));
  }
  AugmentRun run;
  const std::size_t k = static_cast<std::size_t>(config.batch_size);
  for (std::size_t start = 0; start < records.size(); start += k) {
    const std::size_t count = std::min(k, records.size() - start);
    std::vector<std::optional<LoadedRecord>> loaded(count);
    std::vector<std::string> failures(count);
    parallel_for(count, config.threads, [&](std::size_t i) {
      try {
        loaded[i] = load_record(records[start + i], config.image_size);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    });
    std::vector<LoadedRecord> batch;
    for (std::size_t i = 0; i < count; ++i) {
      if (loaded[i]) {
        batch.push_back(std::move(*loaded[i]));
      } else {
        ++run.skipped;
        if (warn) warn("skipping \"" + records[start + i].id + "\": " + failures[i]);
      }
    }
    if (batch.empty()) {
      throw DataError("every image in batch starting at record " + std::to_string(start) +
                      " failed to load");
    }
    std::vector<AugmentedSample> samples = augment_batch(batch, config, scorer.get());
    std::move(samples.begin(), samples.end(), std::back_inserter(run.samples));
  }
  return run;
}

fs::path emit_outputs(std::span<const AugmentedSample> samples, const AugConfig& config) {
  const fs::path root(config.output_dir);
  std::error_code ec;
  fs::create_directories(root / "images", ec);
  if (ec) throw IoError("cannot create " + (root / "images").string() + ": " + ec.message());

  std::vector<std::string> stems(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) stems[i] = sample_stem(i, samples[i].id);

  parallel_for(samples.size(), config.threads, [&](std::size_t i) {
    write_png(root / "images" / (stems[i] + ".png"), samples[i].pixels);
    if (samples[i].views) {
      write_png(root / "views" / (stems[i] + "_s1.png"), samples[i].views->random_view);
      write_png(root / "views" / (stems[i] + "_s2.png"), samples[i].views->adversarial_view);
    }
  });

  std::ostringstream text;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const AugmentedSample& s = samples[i];
    json line;
    line["id"] = s.id;
    line["path"] = "images/" + stems[i] + ".png";
    line["label"] = s.label;
    if (s.soft_label) line["soft_label"] = *s.soft_label;
    line["mixed"] = s.mixed;
    line["provenance"] = s.provenance;
    line["provenance_labels"] = s.provenance_labels;
    line["recipe"] = recipe_json(s.recipe);
    if (s.views) {
      line["views"] = {
          {"s1", "views/" + stems[i] + "_s1.png"},
          {"s1_granularity", s.views->random_permutation.granularity()},
          {"s1_permutation", s.views->random_permutation.mapping()},
          {"s2", "views/" + stems[i] + "_s2.png"},
          {"s2_granularity", s.views->adversarial_permutation.granularity()},
          {"s2_permutation", s.views->adversarial_permutation.mapping()},
      };
    }
    text << line.dump() << '\n';
  }

  const fs::path manifest = root / "manifest.jsonl";
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + manifest.string());
  out << text.str();
  out.close();
  if (!out) throw IoError("failed writing " + manifest.string());
  return manifest;
}

std::vector<OutputRecord> load_output_manifest(const fs::path& path) {
  const fs::path base_dir = path.parent_path();
  std::vector<OutputRecord> records;
  for_each_json_line(path, [&](const json& object, int line_no) {
    OutputRecord r;
    r.id = read_string(object, "id", path, line_no);
    r.path = resolve(base_dir, read_string(object, "path", path, line_no));
    r.label = read_label(object, path, line_no);
    if (object.contains("soft_label")) r.soft_label = object.at("soft_label").get<double>();
    r.mixed = object.value("mixed", false);
    r.provenance = object.at("provenance").get<std::vector<std::string>>();
    r.provenance_labels = object.at("provenance_labels").get<std::vector<int>>();
    r.recipe = recipe_from_json(object.at("recipe"));
    r.recipe.validate(r.recipe.source_ids.size());
    records.push_back(std::move(r));
  });
  return records;
}

Image replay_sample(const OutputRecord& record, const std::map<std::string, Image>& sources) {
  std::vector<const Image*> images;
  for (const std::string& id : record.recipe.source_ids) {
    const auto it = sources.find(id);
    if (it == sources.end()) {
      throw DataError("replay of \"" + record.id + "\" needs source \"" + id + "\"");
    }
    images.push_back(&it->second);
  }
  if (images.empty()) throw DataError("record \"" + record.id + "\" has no sources");
  if (images.size() == 1) return *images.front();
  return clockmix_pixels(images, record.recipe);
}

}  // namespace ed4
