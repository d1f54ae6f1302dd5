#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "labelforge/cli.hpp"
#include "labelforge/dataset_io.hpp"
#include "labelforge/review.hpp"
#include "support.hpp"

using namespace labelforge;
using labelforge::testing::fixture;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int rc = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  return {rc, out.str(), err.str()};
}

/// Pipeline config plus temp locations for cache and manifests.
class CliFixture : public ::testing::Test {
 protected:
  std::vector<std::string> with_globals(std::vector<std::string> args) const {
    std::vector<std::string> full = {"--config", fixture("pipeline.json"), "--cache", tmp.file("cache.jsonl"),
                                     "--work-dir", tmp.file("work")};
    full.insert(full.end(), args.begin(), args.end());
    return full;
  }
  Outcome lf(std::vector<std::string> args) const { return run(with_globals(std::move(args))); }

  void sample_and_screen() {
    ASSERT_EQ(lf({"sample", "--rmhd", fixture("rmhd/rmhd.csv"), "-o", tmp.file("s.jsonl")}).rc, 0);
    ASSERT_EQ(lf({"screen", "-i", tmp.file("s.jsonl"), "-o", tmp.file("sc.jsonl"), "--queue", tmp.file("q.json")}).rc, 0);
  }

  labelforge::testing::TempDir tmp;
};

}  // namespace

TEST(Cli, VersionAndUsageErrors) {
  auto r = run({"--version"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_EQ(r.out, std::string(cli::kVersion) + "\n");
  r = run({"frobnicate"});
  EXPECT_EQ(r.rc, 1);
  EXPECT_TRUE(r.err.starts_with("labelforge: error: user: "));
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(run({"merge"}).rc, 1);  // required options missing
}

TEST_F(CliFixture, MissingInputIsAnIoError) {
  const auto r = lf({"evaluate", "-i", tmp.file("absent.jsonl"), "--model", "stub-a", "-o", tmp.file("e.json")});
  EXPECT_EQ(r.rc, 2);
  EXPECT_TRUE(r.err.starts_with("labelforge: error: io: ")) << r.err;
  EXPECT_EQ(run({"--config", tmp.file("nope.json"), "merge", "--dreaddit", "a", "--depseverity", "b", "-o", "c"}).rc, 2);
}

TEST_F(CliFixture, ConfigErrorsAreUserErrors) {
  write_file_atomic(tmp.file("bad.json"), R"({"providers":[{"provider":"stub"}],"colour":"blue"})");
  const auto r = run({"--config", tmp.file("bad.json"), "sample", "--rmhd", fixture("rmhd/rmhd.csv"), "-o", tmp.file("x")});
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST_F(CliFixture, UnreachableProviderExitsWithProviderCode) {
  const nlohmann::json config = {
      {"providers",
       {{{"provider", "openai"},
         {"model_id", "remote"},
         {"base_url", "http://127.0.0.1:9/v1"},
         {"api_key_env", "LABELFORGE_TEST_KEY"},
         {"timeout_ms", 500},
         {"retry", {{"max_attempts", 1}}}}}},
      {"disorders", {"depression", "anxiety", "adhd", "eating_disorder", "ptsd", "suicide"}},
      {"sample", {{"initial", 2}, {"final", 1}, {"control", 1}}},
      {"reproducible", true}};
  write_file_atomic(tmp.file("remote.json"), config.dump());
  ::setenv("LABELFORGE_TEST_KEY", "dummy", 1);
  const std::vector<std::string> globals = {"--config", tmp.file("remote.json"), "--cache", tmp.file("c.jsonl"),
                                            "--work-dir", tmp.file("w")};
  auto args = globals;
  for (const char* a : {"sample", "--rmhd"}) args.push_back(a);
  args.push_back(fixture("rmhd/rmhd.csv"));
  args.push_back("-o");
  args.push_back(tmp.file("s.jsonl"));
  ASSERT_EQ(run(args).rc, 0);
  args = globals;
  for (const auto& a : std::vector<std::string>{"screen", "-i", tmp.file("s.jsonl"), "-o", tmp.file("sc.jsonl"),
                                                "--queue", tmp.file("q.json")}) {
    args.push_back(a);
  }
  const auto r = run(args);
  EXPECT_EQ(r.rc, 3) << r.err;
  EXPECT_TRUE(r.err.starts_with("labelforge: error: provider: ")) << r.err;

  ::unsetenv("LABELFORGE_TEST_KEY");
  const auto no_key = run(args);
  EXPECT_EQ(no_key.rc, 1) << no_key.err;
  EXPECT_NE(no_key.err.find("LABELFORGE_TEST_KEY"), std::string::npos) << no_key.err;
}

TEST_F(CliFixture, DryRunWritesNothing) {
  const auto r = lf({"--dry-run", "merge", "--dreaddit", fixture("dd/dreaddit.csv"), "--depseverity",
                     fixture("dd/depseverity.csv"), "-o", tmp.file("m.jsonl")});
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("depression+ stress+ 62"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(tmp.file("m.jsonl")));
  EXPECT_FALSE(fs::exists(tmp.file("m.jsonl.meta.json")));
}

TEST_F(CliFixture, FinalizeRefusesPendingQueueThenAutoKeeps) {
  sample_and_screen();
  const auto queue = load_review_queue(tmp.file("q.json"));
  ASSERT_GT(queue.pending_count(), 0u);
  auto r = lf({"finalize", "-i", tmp.file("sc.jsonl"), "--queue", tmp.file("q.json"), "-o", tmp.file("f.jsonl")});
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.err.find("pending"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp.file("f.jsonl")));

  r = lf({"finalize", "-i", tmp.file("sc.jsonl"), "--queue", tmp.file("q.json"), "-o", tmp.file("f.jsonl"),
          "--auto-keep-all"});
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(load_review_queue(tmp.file("q.json")).pending_count(), 0u);
  EXPECT_EQ(load_dataset(tmp.file("f.jsonl")).size(), 6u * 50u + 50u);
}

TEST_F(CliFixture, FinalizeShortfallSuggestsTopUp) {
  sample_and_screen();
  auto queue = load_review_queue(tmp.file("q.json"));
  for (const auto& item : queue.items()) {
    queue.decide(item.post_id, Decision::remove, "t");
  }
  save_review_queue(queue, tmp.file("q.json"));
  const auto r = lf({"finalize", "-i", tmp.file("sc.jsonl"), "--queue", tmp.file("q.json"), "-o", tmp.file("f.jsonl")});
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.err.find("top-up"), std::string::npos) << r.err;

  // Topping up the sample adds fresh posts only.
  const auto before = load_dataset(tmp.file("s.jsonl"));
  const auto t = lf({"sample", "--top-up", "-i", tmp.file("s.jsonl"), "--rmhd", fixture("rmhd/rmhd.csv"),
                     "--per-disorder", "5", "--groups", "ptsd", "-o", tmp.file("s2.jsonl")});
  ASSERT_EQ(t.rc, 0) << t.err;
  const auto after = load_dataset(tmp.file("s2.jsonl"));
  EXPECT_EQ(after.size(), before.size() + 5);
  for (const auto& p : before.posts()) EXPECT_TRUE(after.has_post(p.id));
}

TEST(Cli, EndToEndDeterminism) {
  double seconds = 0;
  const auto v = checks::end_to_end_determinism(seconds);
  EXPECT_TRUE(v.pass) << v.detail;
}
