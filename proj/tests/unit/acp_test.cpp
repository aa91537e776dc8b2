#include <gtest/gtest.h>

#include "sks/acp/policy.hpp"
#include "sks/core/errors.hpp"
#include "support/example_policy.hpp"
#include "support/random_policy.hpp"

namespace sks::acp {
namespace {

const Uid bob = example_policy::user("Bob");

TEST(AcpParse, LocationRuleWithThreeWayOr) {
  const auto p = parse_policy("<Δ> :: <B=mom OR B=dad OR B=brother>", bob, example_policy::directory());
  ASSERT_EQ(p.rules.size(), 1u);
  const auto& r = p.rules[0];
  EXPECT_EQ(r.objects, ObjectExpr::leaf(ObjectAtom{ObjectAtom::Kind::location, "", 0}));
  ASSERT_EQ(r.spec.op, SpecExpr::Op::any_of);
  ASSERT_EQ(r.spec.children.size(), 3u);
  EXPECT_EQ(r.spec.children[2].atom.kind, SpecAtom::Kind::originator_user);
  EXPECT_EQ(r.spec.children[2].atom.user, example_policy::user("brother"));
}

TEST(AcpParse, LabelRuleWithNestedBoolean) {
  const auto p = parse_policy("<α=LinkedIn> :: <(ρ=2 AND γ=LinkedIn) OR S=CallCensor>", bob);
  const auto& s = p.rules.at(0).spec;
  ASSERT_EQ(s.op, SpecExpr::Op::any_of);
  ASSERT_EQ(s.children[0].op, SpecExpr::Op::all_of);
  EXPECT_EQ(s.children[0].children[0].atom.hops, 2u);
  EXPECT_EQ(s.children[0].children[1].atom.text, "LinkedIn");
  EXPECT_EQ(s.children[1].atom.kind, SpecAtom::Kind::application);
}

TEST(AcpParse, AsciiKeywordsMatchGreek) {
  const auto dir = example_policy::directory();
  EXPECT_EQ(parse_policy("<alpha=Skype AND chi=0.2> :: <rho=2 AND gamma=Skype AND y=0.2>", bob, dir),
            parse_policy("<α=Skype AND χ=0.2> :: <ρ=2 AND γ=Skype AND y=0.2>", bob, dir));
}

TEST(AcpParse, FullExampleRoundTrips) {
  const auto dir = example_policy::directory();
  const auto p = parse_policy(example_policy::kBobPolicy, bob, dir);
  EXPECT_EQ(p.rules.size(), 5u);
  EXPECT_EQ(p.blacklist.size(), 3u);
  EXPECT_EQ(parse_policy(to_text(p, dir), bob, dir), p);
  EXPECT_EQ(to_text(p, dir), example_policy::kBobPolicy);
  const auto q = parse_policy(example_policy::kCompanionPolicy, bob, dir);
  EXPECT_EQ(parse_policy(to_text(q, dir), bob, dir), q);
}

TEST(AcpParse, ErrorsCarryLineNumbers) {
  auto line_of = [](const char* text) {
    try {
      parse_policy(text, bob);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("<*> :: <*>\n<α=x> :: <ρ=>\n"), 2u);
  EXPECT_EQ(line_of("# comment\n\n<Q=1> :: <*>\n"), 3u);
  EXPECT_EQ(line_of("<*> :: <B=nobody>\n"), 1u);
  EXPECT_EQ(line_of("<*> :: <ρ=1 AND>\n"), 1u);
  EXPECT_EQ(line_of("---\n<*> :: <*>\n"), 2u);  // rules after the separator
  EXPECT_EQ(line_of("---\n<blacklist> :: <S=CallCensor>\n"), 2u);
  EXPECT_EQ(line_of("<*> :: <y=1.5>\n"), 1u);
}

TEST(AcpEvaluate, EmptyPolicyGrantsOnlyTheOwner) {
  const auto p = parse_policy("", bob);
  EXPECT_TRUE(p.rules.empty());
  RequestContext ctx;
  ctx.originator_user = example_policy::user("Carol");
  ctx.social_distance = 1;
  EXPECT_FALSE(evaluate(p, ctx, DataRequest::edges("LinkedIn")).granted);
  ctx.originator_user = bob;
  EXPECT_TRUE(evaluate(p, ctx, DataRequest::edges("LinkedIn")).granted);
}

TEST(AcpEvaluate, ScriptedExampleSuite) {
  const auto dir = example_policy::directory();
  const auto g = example_policy::bob_graph();
  const auto main = parse_policy(example_policy::kBobPolicy, bob, dir);
  const auto companion = parse_policy(example_policy::kCompanionPolicy, bob, dir);
  for (const auto& c : example_policy::cases()) {
    const auto v = evaluate(c.companion ? companion : main, example_policy::context(c, g), c.data);
    EXPECT_EQ(v.granted, c.granted) << c.what;
    EXPECT_EQ(v.stage, c.stage) << c.what;
    EXPECT_EQ(v.rule, c.rule) << c.what;
    EXPECT_DOUBLE_EQ(v.weight_floor, c.floor) << c.what;
  }
}

TEST(AcpEvaluate, PermissivePolicy) {
  const auto p = AccessPolicy::permissive(bob);
  const auto g = example_policy::bob_graph();
  for (const auto& c : example_policy::cases()) EXPECT_TRUE(evaluate(p, example_policy::context(c, g), c.data).granted) << c.what;
}

class RandomPolicies : public ::testing::Test {
 protected:
  static constexpr int kPolicies = 1000;
  static constexpr int kContexts = 8;
};

TEST_F(RandomPolicies, BlacklistDominates) {
  Rng r(2024);
  for (int i = 0; i < kPolicies; ++i) {
    auto p = gen::policy(r);
    for (int j = 0; j < kContexts; ++j) {
      auto c = gen::context(r);
      const auto data = gen::data_request(r);
      p.blacklist.push_back(SpecAtom{SpecAtom::Kind::originator_user, 0, "", 0, c.ctx.originator_user, {}, {}});
      const auto v = evaluate(p, c.ctx, data);
      ASSERT_FALSE(v.granted);
      ASSERT_EQ(v.stage, Stage::blacklist);
      p.blacklist.pop_back();
    }
  }
}

TEST_F(RandomPolicies, AddingRulesOrBlacklistEntriesIsMonotone) {
  Rng r(7);
  for (int i = 0; i < kPolicies; ++i) {
    const auto p = gen::policy(r);
    auto wider = p;
    wider.rules.insert(wider.rules.begin() + static_cast<std::ptrdiff_t>(r.below(p.rules.size() + 1)), gen::rule(r));
    auto stricter = p;
    stricter.blacklist.push_back(gen::blacklist_entry(r));
    for (int j = 0; j < kContexts; ++j) {
      const auto c = gen::context(r);
      const auto data = gen::data_request(r);
      const bool before = evaluate(p, c.ctx, data).granted;
      if (before) {
        ASSERT_TRUE(evaluate(wider, c.ctx, data).granted) << to_text(wider, gen::directory());
      } else {
        ASSERT_FALSE(evaluate(stricter, c.ctx, data).granted) << to_text(stricter, gen::directory());
      }
      ASSERT_EQ(evaluate(p, c.ctx, data).granted, before);  // pure
    }
  }
}

TEST_F(RandomPolicies, TextRoundTripsExactly) {
  Rng r(99);
  const auto dir = gen::directory();
  for (int i = 0; i < kPolicies; ++i) {
    const auto p = gen::policy(r);
    const auto text = to_text(p, dir);
    const auto back = parse_policy(text, p.owner, dir);
    ASSERT_EQ(back, p) << text;
    for (int j = 0; j < kContexts; ++j) {
      const auto c = gen::context(r);
      const auto data = gen::data_request(r);
      const auto a = evaluate(p, c.ctx, data), b = evaluate(back, c.ctx, data);
      ASSERT_EQ(a.granted, b.granted) << text;
      ASSERT_EQ(a.weight_floor, b.weight_floor) << text;
    }
  }
}

}  // namespace
}  // namespace sks::acp
