#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ed4/adv_demo.hpp"
#include "ed4/clockmix.hpp"
#include "ed4/config.hpp"
#include "ed4/error.hpp"
#include "ed4/image_io.hpp"
#include "ed4/parallel.hpp"
#include "ed4/pipeline.hpp"
#include "ed4/shuffle.hpp"
#include "ed4/verify.hpp"

namespace ed4 {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

int exit_code_for(const Error& e) {
  const std::string_view category = e.category();
  if (category == "config") return kExitConfig;
  if (category == "io") return kExitIo;
  return kExitData;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flag values kept as text and applied through AugConfig::set, so flags and
// config files share one parser.
struct ConfigFlags {
  std::optional<std::string> config_file;
  std::map<std::string, std::string> values;
  std::optional<std::string> seed;

  void bind(CLI::App& cmd, const std::string& flag, const std::string& key,
            const std::string& help) {
    cmd.add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

void bind_seed(CLI::App& cmd, ConfigFlags& flags) {
  cmd.add_option_function<std::string>(
      "--seed", [&flags](const std::string& v) { flags.seed = v; },
      "Master seed (ED4_SEED overrides it)");
}

// Resolves the seed from --seed and ED4_SEED. Returns nullopt if neither is set.
std::optional<std::string> resolve_seed(const ConfigFlags& flags, std::ostream& err) {
  const char* env = std::getenv("ED4_SEED");
  if (env != nullptr && *env != '\0') {
    if (flags.seed) {
      err << "warning: ED4_SEED=" << env << " overrides --seed " << *flags.seed << '\n';
    }
    return std::string(env);
  }
  return flags.seed;
}

AugConfig build_config(const ConfigFlags& flags, std::ostream& err) {
  AugConfig config;
  if (flags.config_file) config = load_config_file(*flags.config_file, config);
  for (const auto& [key, value] : flags.values) config.set(key, value);
  if (const auto seed = resolve_seed(flags, err)) config.set("seed", *seed);
  config.validate();
  return config;
}

void bind_augment_flags(CLI::App& cmd, ConfigFlags& flags) {
  cmd.add_option("--config", flags.config_file, "key = value config file")->check(
      CLI::ExistingFile);
  bind_seed(cmd, flags);
  flags.bind(cmd, "--out", "output_dir", "Output directory");
  flags.bind(cmd, "--p-mix", "p_mix", "Probability of mixing a sample");
  flags.bind(cmd, "--mix-counts", "mix_counts", "Allowed source counts, e.g. 1,2,3,4");
  flags.bind(cmd, "--angle-min", "angle_min", "Smallest sweep angle in degrees");
  flags.bind(cmd, "--angle-max", "angle_max", "Largest sweep angle in degrees");
  flags.bind(cmd, "--min-sector", "min_sector", "Minimum gap between sweep angles");
  flags.bind(cmd, "--granularities", "granularities", "Shuffle grid sizes, e.g. 2,4,8");
  flags.bind(cmd, "--label-mode", "label_mode", "hard or soft");
  flags.bind(cmd, "--batch-size", "batch_size", "Mini-batch size K");
  flags.bind(cmd, "--epsilon", "epsilon", "Generator learning rate");
  flags.bind(cmd, "--size", "image_size", "Side length images are resized to");
  flags.bind(cmd, "--threads", "threads", "Worker threads");
  flags.bind(cmd, "--shuffle-views", "shuffle_views", "Emit shuffled views (true/false)");
}

int cmd_augment(const std::string& manifest, const ConfigFlags& flags, std::ostream& out,
                std::ostream& err) {
  const AugConfig config = build_config(flags, err);
  const auto start = Clock::now();
  const std::vector<ManifestRecord> records = load_manifest(manifest);
  const AugmentRun run =
      augment_records(records, config, [&err](const std::string& msg) { err << "warning: " << msg << '\n'; });
  const std::filesystem::path written = emit_outputs(run.samples, config);

  int real = 0, fake = 0, mixed = 0;
  for (const AugmentedSample& s : run.samples) {
    (s.label == kFakeLabel ? fake : real) += 1;
    mixed += s.mixed ? 1 : 0;
  }
  json summary{{"manifest", written.string()}, {"samples", run.samples.size()},
               {"skipped", run.skipped},       {"real", real},
               {"fake", fake},                 {"mixed", mixed},
               {"seconds", seconds_since(start)}};
  out << summary.dump() << '\n';
  return kExitOk;
}

int cmd_shuffle(const std::string& manifest, const ConfigFlags& flags, std::ostream& out,
                std::ostream& err) {
  const AugConfig config = build_config(flags, err);
  const std::vector<ManifestRecord> records = load_manifest(manifest);
  const std::filesystem::path root(config.output_dir);
  std::vector<std::optional<ShuffleResult>> results(records.size());
  std::vector<std::string> failures(records.size());
  std::vector<std::string> names(records.size());
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    try {
      const LoadedRecord loaded = load_record(records[i], config.image_size);
      RandomStream rng = derive_stream(config.seed, records[i].id);
      results[i] = random_shuffle(rng, loaded.pixels, config.granularities);
      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "%06zu", i);
      names[i] = std::string("shuffled/") + prefix + ".png";
      write_png(root / names[i], results[i]->image);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });
  std::ofstream manifest_out(root / "shuffle.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest_out) throw IoError("cannot write " + (root / "shuffle.jsonl").string());
  std::size_t written = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!results[i]) {
      err << "warning: skipping \"" << records[i].id << "\": " << failures[i] << '\n';
      continue;
    }
    json line{{"id", records[i].id},
              {"path", names[i]},
              {"granularity", results[i]->permutation.granularity()},
              {"permutation", results[i]->permutation.mapping()}};
    manifest_out << line.dump() << '\n';
    ++written;
  }
  if (written == 0 && !records.empty()) throw DataError("no image could be shuffled");
  out << json{{"manifest", (root / "shuffle.jsonl").string()}, {"samples", written}}.dump()
      << '\n';
  return kExitOk;
}

struct DemoFlags {
  std::optional<std::string> manifest;
  std::optional<int> rounds, seeds, batch_size, size, threads;
  std::optional<double> epsilon;
  std::optional<std::string> granularities, exploration;
};

int cmd_adv_demo(const DemoFlags& flags, const ConfigFlags& seed_flags, std::ostream& out,
                 std::ostream& err) {
  AdvDemoSettings settings;
  if (const auto seed = resolve_seed(seed_flags, err)) {
    AugConfig tmp;
    tmp.set("seed", *seed);
    settings.seed = tmp.seed;
  }
  if (flags.rounds) settings.rounds = *flags.rounds;
  if (flags.seeds) settings.seeds = *flags.seeds;
  if (flags.batch_size) settings.batch_size = *flags.batch_size;
  if (flags.size) settings.image_size = *flags.size;
  if (flags.threads) settings.threads = *flags.threads;
  if (flags.epsilon) settings.epsilon = *flags.epsilon;
  if (flags.granularities) settings.granularities = parse_int_list(*flags.granularities);
  if (flags.exploration) {
    AugConfig tmp;
    tmp.set("exploration", *flags.exploration);
    settings.exploration = tmp.exploration;
  }
  if (settings.rounds < 0) throw ConfigError("--rounds must be >= 0");
  if (settings.seeds < 1) throw ConfigError("--seeds must be >= 1");
  if (settings.batch_size < 1) throw ConfigError("--batch-size must be >= 1");
  if (settings.threads < 1) throw ConfigError("--threads must be >= 1");
  if (!(settings.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
  if (settings.granularities.empty()) throw ConfigError("--granularities must not be empty");
  for (int g : settings.granularities) {
    if (g < 1 || settings.image_size % g != 0) {
      throw ConfigError("granularity " + std::to_string(g) + " does not divide --size " +
                        std::to_string(settings.image_size));
    }
  }

  std::vector<Image> images;
  if (flags.manifest) {
    for (const ManifestRecord& r : load_manifest(*flags.manifest)) {
      images.push_back(load_record(r, settings.image_size).pixels);
    }
    if (images.empty()) throw DataError("manifest " + *flags.manifest + " has no records");
  }

  out << "seed,round,D,p,grad_norm,D_random\n";
  if (settings.rounds == 0) return kExitOk;
  char line[256];
  const AdvDemoSummary summary = run_adv_demo(settings, images, [&](const AdvDemoRow& row) {
    std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g,%.9g,%.9g\n", row.seed_index, row.round,
                  row.distance, row.p, row.grad_norm, row.random_distance);
    out << line;
  });
  double adv = 0.0, rnd = 0.0;
  for (double v : summary.adversarial_mean) adv += v;
  for (double v : summary.random_mean) rnd += v;
  adv /= static_cast<double>(summary.adversarial_mean.size());
  rnd /= static_cast<double>(summary.random_mean.size());
  std::snprintf(line, sizeof line,
                "# adversarial_mean_D=%.9g random_mean_D=%.9g wins=%d/%d result=%s\n", adv, rnd,
                summary.wins, settings.seeds, adv > rnd ? "adversarial>random" : "adversarial<=random");
  out << line;
  return kExitOk;
}

int cmd_verify(const std::string& filter, std::ostream& out) {
  const std::vector<std::string>& names = verify_suite_names();
  bool matched = filter.empty();
  for (const std::string& n : names) matched = matched || n.find(filter) != std::string::npos;
  if (!matched) throw ConfigError("no suite matches filter '" + filter + "'");

  out << "suites:";
  for (const std::string& n : names) out << ' ' << n;
  out << '\n';
  const std::vector<CheckResult> results = run_verify(filter);
  std::size_t failed = 0;
  for (const CheckResult& r : results) {
    char row[512];
    std::snprintf(row, sizeof row, "%-11s %-4s %-46s %s\n", r.suite.c_str(),
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    out << row;
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

// Runs `op` on `threads` workers for roughly `seconds`; returns ops per second.
template <typename Op>
double measure(int threads, double seconds, Op&& op) {
  std::atomic<bool> stop{false};
  std::atomic<long long> total{0};
  const auto start = Clock::now();
  auto worker = [&] {
    long long done = 0;
    while (!stop.load(std::memory_order_relaxed)) {
      op();
      ++done;
    }
    total += done;
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  std::thread timer([&] {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    stop = true;
  });
  worker();
  timer.join();
  for (auto& t : pool) t.join();
  return static_cast<double>(total.load()) / seconds_since(start);
}

int cmd_bench(int size, int threads, double seconds, std::ostream& out) {
  if (size < 8) throw ConfigError("--size must be >= 8");
  if (threads < 1) throw ConfigError("--threads must be >= 1");
  if (!(seconds > 0.0)) throw ConfigError("--seconds must be positive");
  RandomStream rng(1);
  Image a(size, size), b(size, size);
  for (auto& v : a.data()) v = static_cast<std::uint8_t>(rng.below(256));
  for (auto& v : b.data()) v = static_cast<std::uint8_t>(rng.below(256));
  const LabeledImage la{a, kRealLabel, {}};
  const LabeledImage lb{b, kFakeLabel, {}};
  const FaceCenter center{size / 2, size / 2};
  const int g = size % 8 == 0 ? 8 : 1;
  const GridPermutation perm = random_permutation(rng, g);

  struct Case {
    const char* name;
    std::function<void()> op;
  };
  std::atomic<std::size_t> sink{0};
  const Case cases[] = {
      {"clockmix_pair",
       [&] { sink += clockmix_pair(la, lb, 200.0, 37.0, center).pixels.data()[0]; }},
      {"apply_permutation", [&] { sink += apply_permutation(a, perm).data()[0]; }},
  };
  out << "op,size,threads,ops_per_sec\n";
  for (const Case& c : cases) {
    char row[128];
    std::snprintf(row, sizeof row, "%s,%d,1,%.1f\n", c.name, size, measure(1, seconds, c.op));
    out << row;
    std::snprintf(row, sizeof row, "%s,%d,%d,%.1f\n", c.name, size, threads,
                  measure(threads, seconds, c.op));
    out << row;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ClockMix augmentation and adversarial spatial consistency tools", "ed4"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  ConfigFlags augment_flags;
  std::string augment_manifest;
  CLI::App* augment = app.add_subcommand("augment", "Augment a manifest-described dataset");
  augment->add_option("--manifest", augment_manifest, "Input JSONL manifest")->required();
  bind_augment_flags(*augment, augment_flags);

  ConfigFlags shuffle_flags;
  std::string shuffle_manifest;
  CLI::App* shuffle = app.add_subcommand("shuffle", "Randomly patch-shuffle every image");
  shuffle->add_option("--manifest", shuffle_manifest, "Input JSONL manifest")->required();
  shuffle->add_option("--config", shuffle_flags.config_file, "key = value config file")
      ->check(CLI::ExistingFile);
  bind_seed(*shuffle, shuffle_flags);
  shuffle_flags.bind(*shuffle, "--out", "output_dir", "Output directory");
  shuffle_flags.bind(*shuffle, "--granularities", "granularities", "Grid sizes, e.g. 2,4,8");
  shuffle_flags.bind(*shuffle, "--size", "image_size", "Side length images are resized to");
  shuffle_flags.bind(*shuffle, "--threads", "threads", "Worker threads");

  DemoFlags demo;
  ConfigFlags demo_seed;
  CLI::App* adv = app.add_subcommand("adv-demo", "Toy adversarial spatial-consistency run");
  adv->add_option("--manifest", demo.manifest, "Use these images instead of toy ones");
  bind_seed(*adv, demo_seed);
  adv->add_option("--rounds", demo.rounds, "Rounds per seed (default 200)");
  adv->add_option("--seeds", demo.seeds, "Independent seeds (default 1)");
  adv->add_option("--batch-size", demo.batch_size, "Images per round, K (default 8)");
  adv->add_option("--epsilon", demo.epsilon, "Generator learning rate (default 20)");
  adv->add_option("--granularities", demo.granularities, "Grid sizes (default 2)");
  adv->add_option("--size", demo.size, "Image side length (default 32)");
  adv->add_option("--threads", demo.threads, "Worker threads");
  adv->add_option("--exploration", demo.exploration, "proportional (default) or none");

  std::string filter;
  CLI::App* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--filter", filter, "Only suites whose name contains this");

  int bench_size = 256;
  int bench_threads = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
  double bench_seconds = 0.5;
  CLI::App* bench = app.add_subcommand("bench", "Throughput of the image kernels");
  bench->add_option("--size", bench_size, "Image side length")->capture_default_str();
  bench->add_option("--threads", bench_threads, "Parallel worker count")->capture_default_str();
  bench->add_option("--seconds", bench_seconds, "Time per measurement")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[config]: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*augment) return cmd_augment(augment_manifest, augment_flags, out, err);
    if (*shuffle) return cmd_shuffle(shuffle_manifest, shuffle_flags, out, err);
    if (*adv) return cmd_adv_demo(demo, demo_seed, out, err);
    if (*verify) return cmd_verify(filter, out);
    if (*bench) return cmd_bench(bench_size, bench_threads, bench_seconds, out);
  } catch (const Error& e) {
    err << "error[" << e.category() << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ed4
