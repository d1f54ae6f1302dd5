#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "labelforge/csv.hpp"
#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/labels.hpp"
#include "labelforge/random.hpp"
#include "labelforge/registry.hpp"
#include "labelforge/vote.hpp"

using namespace labelforge;

TEST(Hash, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(digest_prefix_u64(sha256("abc")), 0xba7816bf8f01cfeaULL);
}

TEST(Random, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(42, "a"), derive_seed(42, "a"));
  EXPECT_NE(derive_seed(42, "a"), derive_seed(42, "b"));
  EXPECT_NE(derive_seed(42, "a"), derive_seed(43, "a"));
}

TEST(Random, SampleIndicesDistinctSortedInRange) {
  Rng rng(5);
  for (std::size_t k : {0u, 1u, 17u, 100u}) {
    auto picked = sample_indices(rng, 100, k);
    ASSERT_EQ(picked.size(), k);
    EXPECT_TRUE(std::is_sorted(picked.begin(), picked.end()));
    EXPECT_EQ(std::set<std::size_t>(picked.begin(), picked.end()).size(), k);
    for (auto i : picked) EXPECT_LT(i, 100u);
  }
}

TEST(Random, UniformBelowCoversRange) {
  Rng rng(9);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) seen[uniform_below(rng, 7)]++;
  for (int count : seen) EXPECT_NEAR(count, 1000, 150);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_unit(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Registry, BuiltinOrderAndAliases) {
  const auto& r = Registry::builtin();
  const std::vector<std::string> want = {"depression", "stress", "anxiety", "adhd", "eating_disorder", "ptsd", "suicide"};
  EXPECT_EQ(r.ids(), want);
  EXPECT_EQ(r.at("suicide").adjective, "Suicidal");
  EXPECT_EQ(r.lookup_alias("depressed"), "depression");
  EXPECT_EQ(r.lookup_alias("post-traumatic stress disorder"), "ptsd");
  EXPECT_FALSE(r.lookup_alias("bipolar disorder"));
  EXPECT_EQ(r.in_registry_order({"ptsd", "depression", "ptsd"}), (std::vector<std::string>{"depression", "ptsd"}));
  EXPECT_THROW(r.at("schizophrenia"), UserError);
}

TEST(Registry, ParseRejectsBadTables) {
  EXPECT_THROW(Registry::parse("a\tA\tAa\na\tB\tBb\n", ""), UserError);
  EXPECT_THROW(Registry::parse("a\tA\tAa\n", "x\tmissing\n"), UserError);
  EXPECT_THROW(Registry::parse("a\tA\tAa\nb\tB\tBb\n", "same\ta\nsame\tb\n"), UserError);
  const auto ok = Registry::parse("a\tAlpha\tAlphic\n", "al\ta\n");
  EXPECT_EQ(ok.lookup_alias("al"), "a");
  EXPECT_EQ(ok.lookup_alias("alphic"), "a");
}

TEST(Labels, VectorBasics) {
  auto v = LabelVector::filled({"a", "b"}, LabelState::negative);
  EXPECT_TRUE(v.covers({"a", "b"}));
  EXPECT_FALSE(v.covers({"a", "c"}));
  EXPECT_EQ(v.get("c"), LabelState::unknown);
  v.set("b", LabelState::unknown);
  EXPECT_FALSE(v.covers({"b"}));
  EXPECT_EQ(v.restricted({"a"}).entries().size(), 1u);
  EXPECT_THROW(prompt_kind_from_string("multi"), UserError);
  EXPECT_EQ(prompt_kind_from_string("multi_label_2"), PromptKind::multi_label_2);
}

TEST(Csv, QuotedFieldsAndDelimiterDetection) {
  std::istringstream comma("id,text\n1,\"a, \"\"quoted\"\"\nline\"\n2,plain\n");
  const auto t = DelimitedTable::read(comma);
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.rows()[0].fields[1], "a, \"quoted\"\nline");
  EXPECT_EQ(t.rows()[1].line, 4u);
  EXPECT_EQ(t.require_column("text"), 1u);
  EXPECT_THROW(t.require_column("label"), UserError);

  std::istringstream tab("id\ttext\n1\ta,b\n");
  const auto u = DelimitedTable::read(tab);
  EXPECT_EQ(u.rows()[0].fields[1], "a,b");
}

namespace {
LabelVector lv(std::initializer_list<int> bits) {
  const std::vector<std::string> ids = {"a", "b", "c"};
  LabelVector v;
  std::size_t i = 0;
  for (int b : bits) v.set(ids[i++], b ? LabelState::positive : LabelState::negative);
  return v;
}
}  // namespace

TEST(Vote, MajorityAndTies) {
  const std::vector<LabelVector> three = {lv({1, 0, 1}), lv({1, 1, 0}), lv({0, 0, 0})};
  EXPECT_EQ(majority_vote(three), lv({1, 0, 0}));
  const std::vector<LabelVector> two = {lv({1, 0, 0}), lv({0, 0, 1})};
  EXPECT_EQ(majority_vote(two), lv({1, 0, 1}));  // a tie counts as positive
}

TEST(Vote, OrderDoesNotMatter) {
  std::vector<LabelVector> votes = {lv({1, 0, 1}), lv({0, 1, 1}), lv({0, 0, 1}), lv({1, 1, 0})};
  const auto want = majority_vote(votes);
  std::sort(votes.begin(), votes.end(), [](const LabelVector& x, const LabelVector& y) {
    return x.entries() < y.entries();
  });
  do {
    EXPECT_EQ(majority_vote(votes), want);
  } while (std::next_permutation(votes.begin(), votes.end(), [](const LabelVector& x, const LabelVector& y) {
    return x.entries() < y.entries();
  }));
}

TEST(Vote, RejectsMismatchedInputs) {
  const std::vector<LabelVector> one = {lv({1, 0, 1})};
  EXPECT_THROW(majority_vote(one), UserError);
  LabelVector short_vec;
  short_vec.set("a", LabelState::positive);
  const std::vector<LabelVector> mixed = {lv({1, 0, 1}), short_vec};
  EXPECT_THROW(majority_vote(mixed), UserError);
}
