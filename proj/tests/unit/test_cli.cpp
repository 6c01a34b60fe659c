#include "fixtures.hpp"
#include "rose2/cli.hpp"
#include "rose2/eval.hpp"
#include "rose2/synth.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace rose2 {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("rose2_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path synth(const std::string& name, std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.rows = 1;
    spec.cols = 2;
    save_synth(generate(spec), spec, root_ / name);
    return root_ / name;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SegmentWritesOutputs) {
  const fs::path map = synth("m", 1);
  ASSERT_EQ(run({"segment", (map / "map.yaml").string(), "--out", (root_ / "out").string(), "--debug-dumps"}), 0)
      << err_.str();
  for (const char* f : {"clean_map.pgm", "clean_map.yaml", "lines.svg", "floorplan.json", "segmented.png",
                        "timing.json", "config.toml", "debug/spectrum.png", "debug/histogram.csv",
                        "debug/arrangement.json", "debug/graph.json"}) {
    EXPECT_TRUE(fs::exists(root_ / "out" / f)) << f;
  }
  const auto plan = nlohmann::json::parse(slurp(root_ / "out" / "floorplan.json"));
  EXPECT_GE(plan["rooms"].size(), 2u);
  const LabelGrid seg = load_labels(root_ / "out" / "segmented.png");
  EXPECT_TRUE(test::is_partition(load_map(map / "map.yaml"), seg));
}

TEST_F(CliTest, MissingMetadataIsInputError) {
  EXPECT_EQ(run({"segment", (root_ / "nope.yaml").string(), "--out", (root_ / "out").string()}), 1);
  EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(CliTest, BlankMapIsPipelineError) {
  save_map(test::blank(64, 64, kFree), root_ / "blank.yaml");
  EXPECT_EQ(run({"segment", (root_ / "blank.yaml").string(), "--out", (root_ / "out").string()}), 2);
  EXPECT_NE(err_.str().find("rose"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"segment"}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  const fs::path map = synth("m", 1);
  EXPECT_EQ(run({"segment", (map / "map.yaml").string(), "--out", (root_ / "o").string(), "--set", "rose.nope=1"}),
            1);
  EXPECT_EQ(run({"segment", (map / "map.yaml").string(), "--out", (root_ / "o").string(), "--set", "hough.votes=x"}),
            1);
}

TEST_F(CliTest, EvaluateIdentical) {
  const fs::path map = synth("m", 2);
  ASSERT_EQ(run({"evaluate", (map / "gt.png").string(), (map / "gt.png").string()}), 0) << err_.str();
  const auto j = nlohmann::json::parse(out_.str());
  EXPECT_DOUBLE_EQ(j["map"]["precision"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["map"]["recall"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["map"]["mean_iou"].get<double>(), 100.0);
}

TEST_F(CliTest, EvaluateMatchesLibrary) {
  std::mt19937_64 rng(3);
  const LabelGrid a = test::random_labels(rng, 30, 20, 4), b = test::random_labels(rng, 30, 20, 3);
  save_labels(a, root_ / "a.png");
  save_labels(b, root_ / "b.png");
  ASSERT_EQ(run({"evaluate", (root_ / "a.png").string(), (root_ / "b.png").string(), "--out",
                 (root_ / "m.json").string()}),
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(root_ / "m.json")), to_json(evaluate(a, b)));
}

TEST_F(CliTest, EvaluateDimensionMismatch) {
  save_labels(LabelGrid::Ones(10, 10), root_ / "a.png");
  save_labels(LabelGrid::Ones(10, 12), root_ / "b.png");
  EXPECT_EQ(run({"evaluate", (root_ / "a.png").string(), (root_ / "b.png").string()}), 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_F(CliTest, BatchThreeMaps) {
  nlohmann::json manifest = {{"maps", nlohmann::json::array()}};
  for (int i = 1; i <= 3; ++i) {
    synth("m" + std::to_string(i), static_cast<std::uint64_t>(i));
    manifest["maps"].push_back({{"name", "m" + std::to_string(i)},
                                {"map", "m" + std::to_string(i) + "/map.yaml"},
                                {"gt", "m" + std::to_string(i) + "/gt.png"}});
  }
  std::ofstream(root_ / "manifest.json") << manifest.dump();
  ASSERT_EQ(run({"batch", (root_ / "manifest.json").string(), "--out", (root_ / "out").string(), "--threads", "2"}),
            0)
      << err_.str();
  const std::string csv = slurp(root_ / "out" / "summary.csv");
  const auto rows = lines_of(csv);
  ASSERT_EQ(rows.size(), 1u + 12u + 4u);
  EXPECT_EQ(rows[0], "map,method,status,precision,recall,iou,segmented_rooms,gt_rooms,error");
  EXPECT_EQ(rows[1].rfind("m1,rose2,ok,", 0), 0u);
  EXPECT_EQ(rows[13].rfind("ALL,rose2,aggregate(n=3),", 0), 0u);
  EXPECT_TRUE(fs::exists(root_ / "out" / "config.toml"));
  // Thread count does not change the report.
  ASSERT_EQ(run({"batch", (root_ / "manifest.json").string(), "--out", (root_ / "out1").string(), "--threads", "1"}),
            0);
  EXPECT_EQ(slurp(root_ / "out1" / "summary.csv"), csv);
}

TEST_F(CliTest, BatchEmptyManifest) {
  std::ofstream(root_ / "manifest.json") << R"({"maps": []})";
  ASSERT_EQ(run({"batch", (root_ / "manifest.json").string(), "--out", (root_ / "out").string()}), 0);
  EXPECT_EQ(lines_of(slurp(root_ / "out" / "summary.csv")).size(), 1u);
}

TEST_F(CliTest, BatchCorruptMapFailsRowsOnly) {
  synth("good", 1);
  fs::create_directories(root_ / "bad");
  std::ofstream(root_ / "bad" / "map.yaml") << "image: map.pgm\nresolution: 0.05\norigin: [0, 0, 0]\n";
  std::ofstream(root_ / "bad" / "map.pgm") << "P5\n10 10\n255\nshort";
  const nlohmann::json manifest = {
      {"methods", {"rose2", "dist"}},
      {"maps",
       {{{"name", "bad"}, {"map", "bad/map.yaml"}, {"gt", "good/gt.png"}},
        {{"name", "good"}, {"map", "good/map.yaml"}, {"gt", "good/gt.png"}}}}};
  std::ofstream(root_ / "manifest.json") << manifest.dump();
  ASSERT_EQ(run({"batch", (root_ / "manifest.json").string(), "--out", (root_ / "out").string()}), 0);
  const auto rows = lines_of(slurp(root_ / "out" / "summary.csv"));
  ASSERT_EQ(rows.size(), 1u + 4u + 2u);
  EXPECT_EQ(rows[1].rfind("bad,rose2,failed,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("bad,dist,failed,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("good,rose2,ok,", 0), 0u);
  EXPECT_EQ(rows[5].rfind("ALL,rose2,aggregate(n=1),", 0), 0u);
}

TEST_F(CliTest, BatchUnknownMethod) {
  std::ofstream(root_ / "manifest.json") << R"({"methods": ["magic"], "maps": []})";
  EXPECT_EQ(run({"batch", (root_ / "manifest.json").string(), "--out", (root_ / "out").string()}), 1);
}

TEST_F(CliTest, SynthCommand) {
  std::ofstream(root_ / "spec.json") << R"({"rows": 1, "cols": 2, "clutter_density": 0.05})";
  ASSERT_EQ(run({"synth", (root_ / "spec.json").string(), "--out", (root_ / "s").string(), "--seed", "5"}), 0)
      << err_.str();
  const auto spec = nlohmann::json::parse(slurp(root_ / "s" / "spec.json")).get<SynthSpec>();
  EXPECT_EQ(spec.seed, 5u);
  EXPECT_EQ(spec.cols, 2);
  EXPECT_TRUE(fs::exists(root_ / "s" / "gt.png"));
  std::ofstream(root_ / "bad.json") << R"({"coverage": 3})";
  EXPECT_EQ(run({"synth", (root_ / "bad.json").string(), "--out", (root_ / "t").string()}), 1);
}

TEST(Config, TomlRoundTrip) {
  Config c;
  c.pipeline.rose.min_prominence = 0.33;
  c.pipeline.walls.hough.seed = 42;
  c.baselines.room_max_m2 = 55.5;
  const Config back = parse_config(to_toml(c));
  EXPECT_EQ(to_toml(back), to_toml(c));
  EXPECT_DOUBLE_EQ(back.pipeline.rose.min_prominence, 0.33);
  EXPECT_EQ(back.pipeline.walls.hough.seed, 42u);
}

TEST(Config, OverridesAndErrors) {
  Config c;
  apply_override(c, "rooms.min_component_nodes=25");
  EXPECT_EQ(c.pipeline.rooms.min_component_nodes, 25);
  EXPECT_THROW(apply_override(c, "rooms.min_component_nodes"), InputError);
  EXPECT_THROW(apply_override(c, "nosuch.key=1"), InputError);
  EXPECT_THROW(parse_config("[rose]\nbogus = 1\n"), InputError);
  const Config partial = parse_config("[hough]\nvotes = 30  # stricter\n");
  EXPECT_EQ(partial.pipeline.walls.hough.votes, 30);
  EXPECT_EQ(partial.pipeline.walls.hough.min_len, HoughParams{}.min_len);
}

}  // namespace
}  // namespace rose2
