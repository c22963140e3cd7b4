#include <gtest/gtest.h>

#include <fstream>

#include "ed4/config.hpp"
#include "ed4/error.hpp"
#include "test_support.hpp"

using namespace ed4;

TEST(AugConfig, DefaultsAreValid) {
  const AugConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.mix_counts, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(c.granularities, (std::vector<int>{2, 4, 8}));
  EXPECT_EQ(c.batch_size, 32);
  EXPECT_EQ(c.image_size, 256);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.0002);
  EXPECT_DOUBLE_EQ(c.p_mix, 0.5);
  EXPECT_DOUBLE_EQ(c.angle_min, 45.0);
  EXPECT_DOUBLE_EQ(c.angle_max, 315.0);
  EXPECT_DOUBLE_EQ(c.min_sector, 30.0);
  EXPECT_EQ(c.label_mode, LabelMode::kHard);
}

TEST(AugConfig, SetParsesEachKey) {
  AugConfig c;
  c.set("seed", "18446744073709551615");
  c.set("mix_counts", "[2, 3]");
  c.set("p_mix", "0.25");
  c.set("label_mode", "\"soft\"");
  c.set("granularities", "2,4");
  c.set("shuffle_views", "true");
  c.set("output_dir", "'some dir'");
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.mix_counts, (std::vector<int>{2, 3}));
  EXPECT_DOUBLE_EQ(c.p_mix, 0.25);
  EXPECT_EQ(c.label_mode, LabelMode::kSoft);
  EXPECT_EQ(c.granularities, (std::vector<int>{2, 4}));
  EXPECT_TRUE(c.shuffle_views);
  EXPECT_EQ(c.output_dir, "some dir");
}

TEST(AugConfig, RejectsBadValues) {
  AugConfig c;
  EXPECT_THROW(c.set("nonsense", "1"), ConfigError);
  EXPECT_THROW(c.set("p_mix", "abc"), ConfigError);
  EXPECT_THROW(c.set("label_mode", "medium"), ConfigError);
  AugConfig bad;
  bad.p_mix = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugConfig{};
  bad.mix_counts = {5};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugConfig{};
  bad.angle_min = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugConfig{};
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugConfig{};
  bad.image_size = 100;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(LoadConfigFile, ReadsFlatKeys) {
  ed4::testing::TempDir dir;
  const auto path = dir.path() / "aug.toml";
  std::ofstream(path) << "# run settings\n"
                         "seed = 11\n"
                         "p-mix = 0.9   # almost always\n"
                         "mix_counts = [1, 4]\n"
                         "\n"
                         "label_mode = \"soft\"\n";
  const AugConfig c = load_config_file(path);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_DOUBLE_EQ(c.p_mix, 0.9);
  EXPECT_EQ(c.mix_counts, (std::vector<int>{1, 4}));
  EXPECT_EQ(c.label_mode, LabelMode::kSoft);
}

TEST(LoadConfigFile, ErrorsNameTheLine) {
  ed4::testing::TempDir dir;
  const auto path = dir.path() / "bad.toml";
  std::ofstream(path) << "seed = 1\nthis line has no equals\n";
  try {
    load_config_file(path);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config_file(dir.path() / "missing.toml"), IoError);
}
