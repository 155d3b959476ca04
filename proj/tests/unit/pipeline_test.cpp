#include <gtest/gtest.h>

#include "fixture.hpp"
#include "json.hpp"
#include "perspective/manifest.hpp"

using namespace persp;
using nlohmann::json;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, RecordsHashesAndFailure) {
  auto dir = fixture::scratch("manifest");
  write_file_atomic(dir / "in.txt", "abc");
  Manifest m("unit");
  m.set_base(dir);
  m.add_input(dir / "in.txt");
  m.set_seed(9);
  auto ok = json::parse(m.to_json(false));
  EXPECT_EQ(ok["status"], "OK");
  EXPECT_EQ(ok["seed"], 9);
  EXPECT_EQ(ok["inputs"][0]["path"], "in.txt");
  EXPECT_EQ(ok["inputs"][0]["sha256"], sha256_hex("abc"));
  EXPECT_FALSE(ok.contains("started_at"));
  m.fail("train", "boom");
  m.write(dir / "manifest.json");
  auto failed = json::parse(fixture::slurp(dir / "manifest.json"));
  EXPECT_EQ(failed["status"], "FAILED");
  EXPECT_EQ(failed["failure"]["stage"], "train");
  EXPECT_TRUE(failed.contains("started_at"));
}

TEST(RunConfig, JsonRoundTripAndRelativePaths) {
  auto rc = RunConfig::from_json(R"({"annotations": "a.csv", "texts": "t.jsonl",
    "partition": {"mode": "natural"}, "split": {"train_fraction": 0.85, "seed": 4},
    "augment": {"enabled": true, "factor": 5, "delete_threshold": 0.9},
    "classifier": {"epochs": 10}})", "/data");
  EXPECT_EQ(rc.annotations, std::filesystem::path("/data/a.csv"));
  EXPECT_EQ(rc.partition_mode, PartitionMode::kNatural);
  EXPECT_DOUBLE_EQ(rc.split.train_fraction, 0.85);
  ASSERT_TRUE(rc.augment.has_value());
  EXPECT_EQ(rc.augment->factor, 5u);
  EXPECT_EQ(rc.hyperparams.epochs, 10u);
  auto again = RunConfig::from_json(rc.to_json());
  EXPECT_EQ(again.to_json(), rc.to_json());
}

TEST(RunConfig, RejectsMissingAnnotations) {
  EXPECT_THROW(RunConfig::from_json("{}"), Error);
  EXPECT_THROW(RunConfig::from_json("not json"), Error);
}

TEST(Pipeline, NaturalModeUsesAnnotatorGroups) {
  auto dir = fixture::scratch("natural");
  auto fx = fixture::synthetic(dir, {.items = 200});
  fx.config.partition_mode = PartitionMode::kNatural;
  auto r = full_pipeline(fx.config);
  EXPECT_EQ(r.partition.groups, fx.data.planted.groups);
  ASSERT_TRUE(r.natural_average.has_value());
  EXPECT_DOUBLE_EQ(*r.natural_average, r.average_p);
  EXPECT_EQ(r.overall.size(), 4u);
  EXPECT_EQ(r.overall.back().source, "inclusive");
  EXPECT_TRUE(std::filesystem::exists(fx.config.output_dir / "manifest.json"));
  EXPECT_FALSE(render_summary(fx.config.output_dir).empty());
}

TEST(Pipeline, AugmentedRunWritesAugmentedTrainingSets) {
  auto dir = fixture::scratch("augment");
  auto fx = fixture::synthetic(dir, {.items = 200, .noise = 0.1});
  fx.config.augment = AugmentPolicy{3, 1.0};
  full_pipeline(fx.config);
  EXPECT_TRUE(std::filesystem::exists(fx.config.output_dir / "augmented_baseline.csv"));
}

TEST(Pipeline, MissingInputNamesTheStageAndMarksManifestFailed) {
  auto dir = fixture::scratch("missing");
  RunConfig rc;
  rc.annotations = dir / "absent.csv";
  rc.output_dir = dir / "run";
  try {
    full_pipeline(rc);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
  auto m = json::parse(fixture::slurp(rc.output_dir / "manifest.json"));
  EXPECT_EQ(m["status"], "FAILED");
  EXPECT_EQ(m["failure"]["stage"], "ingest");
}

TEST(Pipeline, ImportModeNeedsEveryRole) {
  auto dir = fixture::scratch("import");
  auto fx = fixture::synthetic(dir, {.items = 200});
  fx.config.classifier = ClassifierKind::kImport;
  EXPECT_THROW(full_pipeline(fx.config), StageError);
}

TEST(Pipeline, RerunIsByteIdentical) {
  auto dir = fixture::scratch("rerun");
  auto fx = fixture::synthetic(dir, {.items = 200});
  full_pipeline(fx.config);
  auto first = fixture::snapshot(fx.config.output_dir);
  full_pipeline(fx.config);
  auto second = fixture::snapshot(fx.config.output_dir);
  first["manifest.json"] = fixture::without_timestamps(first["manifest.json"]);
  second["manifest.json"] = fixture::without_timestamps(second["manifest.json"]);
  EXPECT_EQ(first, second);
}
