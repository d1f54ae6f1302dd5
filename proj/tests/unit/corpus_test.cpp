#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "labelforge/analysis.hpp"
#include "labelforge/corpus.hpp"
#include "labelforge/error.hpp"
#include "labelforge/registry.hpp"
#include "support.hpp"

using namespace labelforge;
using labelforge::testing::fixture;

namespace {

Dataset rmhd_fixture() {
  auto load = load_rmhd(fixture("rmhd/rmhd.csv"));
  return rmhd_dataset(std::move(load.posts), Registry::builtin());
}

std::map<std::string, std::size_t> group_counts(const Dataset& d, GroupKey key) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : d.posts()) counts[group_of(p, key)]++;
  return counts;
}

}  // namespace

TEST(Severity, SpellingsAndBinarization) {
  EXPECT_EQ(severity_from_string("Minimum"), Severity::minimal);
  EXPECT_EQ(severity_from_string(" minimal "), Severity::minimal);
  EXPECT_EQ(severity_from_string("SEVERE"), Severity::severe);
  EXPECT_FALSE(severity_from_string("extreme"));
  EXPECT_EQ(binarize_severity(Severity::minimal), LabelState::negative);
  EXPECT_EQ(binarize_severity(Severity::mild), LabelState::positive);
  EXPECT_EQ(binarize_severity(Severity::moderate), LabelState::positive);
  EXPECT_EQ(binarize_severity(Severity::severe), LabelState::positive);
}

TEST(Merge, JoinKeyIgnoresCaseAndWhitespace) {
  EXPECT_EQ(normalize_for_join("  Hello\t World \n"), "hello world");
  EXPECT_EQ(join_key("Hello  world"), join_key("hello world "));
  EXPECT_NE(join_key("hello world"), join_key("hello, world"));
}

TEST(Merge, FixtureMatchesGeneratorExpectations) {
  std::ifstream in(fixture("dd/expected.json"));
  const auto expected = nlohmann::json::parse(in);
  const auto dreaddit = load_dreaddit(fixture("dd/dreaddit.csv"));
  const auto depseverity = load_depseverity(fixture("dd/depseverity.csv"));
  EXPECT_EQ(dreaddit.records.size(), expected["dreaddit_rows"].get<std::size_t>());
  EXPECT_EQ(depseverity.records.size(), expected["depseverity_rows"].get<std::size_t>());
  const auto merged = merge_depseverity_dreaddit(dreaddit.records, depseverity.records);
  EXPECT_EQ(merged.dataset.size(), expected["posts"].get<std::size_t>());
  EXPECT_EQ(merged.stats.duplicate_conflicts, expected["duplicate_conflicts"].get<std::size_t>());
  EXPECT_DOUBLE_EQ(merged.stats.join_rate, 1.0);
  const auto labels = resolve_labels(merged.dataset, LabelSource{}, {"depression", "stress"});
  const auto t = contingency(labels, "depression", "stress");
  EXPECT_EQ(t.a, expected["cells"]["a"].get<std::uint64_t>());
  EXPECT_EQ(t.b, expected["cells"]["b"].get<std::uint64_t>());
  EXPECT_EQ(t.c, expected["cells"]["c"].get<std::uint64_t>());
  EXPECT_EQ(t.d, expected["cells"]["d"].get<std::uint64_t>());
}

TEST(Merge, FirstOccurrenceWinsAndJoinRateIsEnforced) {
  auto record = [](std::string text, LabelState stress) {
    DreadditRecord r;
    r.post.text = std::move(text);
    r.stress = stress;
    return r;
  };
  auto severity = [](std::string text, Severity s) {
    DepSeverityRecord r;
    r.post.text = std::move(text);
    r.severity = s;
    return r;
  };
  const std::vector<DreadditRecord> dd = {record("Same text", LabelState::positive),
                                          record("same  TEXT", LabelState::negative),
                                          record("other", LabelState::negative)};
  const std::vector<DepSeverityRecord> ds = {severity("same text", Severity::mild), severity("other", Severity::minimal)};
  const auto merged = merge_depseverity_dreaddit(dd, ds);
  ASSERT_EQ(merged.dataset.size(), 2u);
  const auto& first = merged.dataset.posts().front();
  EXPECT_EQ(merged.dataset.truth(first.id)->labels.get("stress"), LabelState::positive);
  EXPECT_EQ(merged.dataset.truth(first.id)->labels.get("depression"), LabelState::positive);
  EXPECT_EQ(merged.stats.duplicate_conflicts, 1u);

  const std::vector<DepSeverityRecord> poor = {severity("same text", Severity::mild), severity("nowhere", Severity::mild),
                                               severity("missing", Severity::mild)};
  EXPECT_THROW(merge_depseverity_dreaddit(dd, poor), UserError);
}

TEST(Rmhd, LoaderKeepsKnownSubredditsOnly) {
  const auto d = rmhd_fixture();
  EXPECT_EQ(d.size(), 700u);
  const auto counts = group_counts(d, GroupKey::origin_disorder);
  EXPECT_EQ(counts.at("control"), 100u);
  for (const auto& id : {"adhd", "anxiety", "depression", "eating_disorder", "ptsd", "suicide"}) {
    EXPECT_EQ(counts.at(id), 100u) << id;
  }
}

TEST(Sampling, DeterministicPerSeedAndExact) {
  const auto d = rmhd_fixture();
  RmhdSampleOptions options;
  options.per_disorder = 40;
  options.control = 12;
  options.seed = 11;
  const auto a = sample_rmhd(d, Registry::builtin(), options);
  const auto b = sample_rmhd(d, Registry::builtin(), options);
  EXPECT_EQ(a, b);
  const auto counts = group_counts(a, GroupKey::origin_disorder);
  EXPECT_EQ(counts.at("control"), 12u);
  EXPECT_EQ(counts.at("ptsd"), 40u);
  options.seed = 12;
  EXPECT_NE(sample_rmhd(d, Registry::builtin(), options), a);

  // Output keeps the source order.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < d.posts().size(); ++i) position[d.posts()[i].id] = i;
  for (std::size_t i = 1; i < a.posts().size(); ++i) {
    EXPECT_LT(position[a.posts()[i - 1].id], position[a.posts()[i].id]);
  }
}

TEST(Sampling, ControlsSplitEvenlyRemainderToSortedFirst) {
  const auto d = rmhd_fixture();
  const auto ids = sample_controls(d, 12, 3);
  ASSERT_EQ(ids.size(), 12u);
  std::map<std::string, std::size_t> per;
  for (const auto& id : ids) per[*d.post(id).origin_subreddit]++;
  const std::map<std::string, std::size_t> want = {
      {"conspiracy", 3}, {"jokes", 3}, {"legaladvice", 2}, {"personalfinance", 2}, {"teaching", 2}};
  EXPECT_EQ(per, want);
}

TEST(Sampling, ShortfallNamesTheGroup) {
  const auto d = rmhd_fixture();
  try {
    sample_per_group(d, GroupKey::origin_disorder, 101, 1, {"adhd"});
    FAIL() << "expected a shortfall";
  } catch (const UserError& e) {
    EXPECT_NE(std::string(e.what()).find("adhd"), std::string::npos);
  }
}

TEST(Sampling, TopUpDrawsOnlyFreshPostsFromRequestedGroups) {
  const auto d = rmhd_fixture();
  RmhdSampleOptions options;
  options.per_disorder = 90;
  options.control = 0;
  options.seed = 5;
  const auto first = sample_rmhd(d, Registry::builtin(), options);
  RmhdSampleOptions top_up;
  top_up.per_disorder = 10;
  top_up.control = 0;
  top_up.seed = 6;
  top_up.groups = {"depression"};
  for (const auto& p : first.posts()) top_up.exclude.insert(p.id);
  const auto fresh = sample_rmhd(d, Registry::builtin(), top_up);
  ASSERT_EQ(fresh.size(), 10u);
  for (const auto& p : fresh.posts()) {
    EXPECT_EQ(p.origin_disorder, "depression");
    EXPECT_FALSE(first.has_post(p.id));
  }
  top_up.per_disorder = 11;
  EXPECT_THROW(sample_rmhd(d, Registry::builtin(), top_up), UserError);
  top_up.groups = {"bipolar"};
  EXPECT_THROW(sample_rmhd(d, Registry::builtin(), top_up), UserError);
}
