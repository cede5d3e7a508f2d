#include <gtest/gtest.h>

#include "fthlab/function.hpp"
#include "fthlab/group.hpp"
#include "oracles.hpp"

using namespace fthlab;

TEST(Group, TrivialGroup) {
  auto g = make_group("C1");
  EXPECT_EQ(g->order(), 1u);
  EXPECT_EQ(g->mul(0, 0), 0u);
  EXPECT_TRUE(validate_group(*g).ok());
}

TEST(Group, CyclicTable) {
  auto g = make_group("C6");
  for (Element i = 0; i < 6; ++i) {
    for (Element j = 0; j < 6; ++j) EXPECT_EQ(g->mul(i, j), (i + j) % 6);
  }
}

TEST(Group, C2xC3IsomorphicToC6) {
  auto a = make_group("C2xC3");
  auto b = make_group("C6");
  EXPECT_TRUE(oracle::isomorphic(*a, *b));
  EXPECT_TRUE(oracle::commutative(*a));
  auto orders = oracle::element_orders(*a);
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  EXPECT_EQ(orders, (std::vector<std::size_t>{1, 2, 3, 6}));
  EXPECT_FALSE(oracle::isomorphic(*make_group("S3"), *b));
}

TEST(Group, ElementOrderMatchesOracle) {
  for (const char* spec : {"C12", "D6", "S4", "Q8", "C2xS3"}) {
    auto g = make_group(spec);
    const auto ref = oracle::element_orders(*g);
    for (Element a = 0; a < g->order(); ++a) EXPECT_EQ(g->element_order(a), ref[a]) << spec << " " << a;
  }
}

TEST(Group, ProductWithTrivialIsIsomorphic) {
  auto g = make_group("S3");
  auto p = group_product(*make_group("C1"), *g);
  EXPECT_TRUE(oracle::isomorphic(*p, *g));
}

TEST(Group, KleinFourGroup) {
  auto v = group_product(*make_group("C2"), *make_group("C2"));
  EXPECT_EQ(v->order(), 4u);
  auto orders = oracle::element_orders(*v);
  for (Element a = 1; a < 4; ++a) EXPECT_EQ(orders[a], 2u);
}

TEST(Group, C2xS3Nonabelian) {
  auto g = group_product(*make_group("C2"), *make_group("S3"));
  EXPECT_EQ(g->order(), 12u);
  EXPECT_FALSE(oracle::commutative(*g));
  EXPECT_FALSE(g->is_abelian());
}

TEST(Group, AbelianFlagMatchesScan) {
  for (const char* spec : {"C7", "D3", "D4", "S3", "Q8", "C2xC4", "D1", "D2"}) {
    auto g = make_group(spec);
    EXPECT_EQ(g->is_abelian(), oracle::commutative(*g)) << spec;
  }
}

TEST(Group, Orders) {
  EXPECT_EQ(make_group("D4")->order(), 8u);
  EXPECT_EQ(make_group("S4")->order(), 24u);
  EXPECT_EQ(make_group("Q8")->order(), 8u);
  EXPECT_EQ(make_group("S5", 120)->order(), 120u);
  EXPECT_EQ(make_group("C2xC3xC2")->order(), 12u);
}

TEST(Group, SpecErrors) {
  EXPECT_THROW(make_group("Z6"), SpecError);
  EXPECT_THROW(make_group("C0"), SpecError);
  EXPECT_THROW(make_group("S6"), SpecError);
  EXPECT_THROW(make_group("S5"), SpecError);  // 120 > default cap
  EXPECT_THROW(make_group("C65"), SpecError);
  EXPECT_THROW(make_group("C4x"), SpecError);
  EXPECT_THROW(make_group(""), SpecError);
  EXPECT_THROW(make_group("C2xC2xC2xC2xC2xC2xC2"), SpecError);
}

TEST(Group, ValidateBuiltins) {
  for (const char* spec : {"C1", "C2", "C5", "C12", "D3", "D4", "D6", "S3", "S4", "Q8", "C2xC4", "C2xS3", "D12",
                           "C3xQ8"}) {
    auto g = make_group(spec);
    auto rep = validate_group(*g);
    EXPECT_TRUE(rep.ok()) << spec;
    EXPECT_EQ(rep.triples_checked, g->order() * g->order() * g->order()) << spec;
  }
}

TEST(Group, D4TripleCount) {
  auto rep = validate_group(*make_group("D4"));
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.triples_checked, 512u);  // 64 * 8
}

TEST(Group, ValidateCatchesBrokenTable) {
  // C2 shape with mul[1][1] forced to 1
  FiniteGroup bad("broken", {0, 1, 1, 1}, {"e", "a"});
  auto rep = validate_group(bad);
  EXPECT_FALSE(rep.ok());
  bool saw_inverse = false, saw_assoc = false;
  for (const auto& v : rep.violations) {
    saw_inverse |= v.kind == GroupViolation::Kind::inverse;
    saw_assoc |= v.kind == GroupViolation::Kind::associativity;
  }
  EXPECT_TRUE(saw_inverse);
  // (a a) a = a and a (a a) = a: associativity holds in this table
  EXPECT_FALSE(saw_assoc);

  // a non-associative table: x*y = x - y mod 3 has no identity and fails associativity
  std::vector<Element> t(9);
  for (Element x = 0; x < 3; ++x) {
    for (Element y = 0; y < 3; ++y) t[x * 3 + y] = (x + 3 - y) % 3;
  }
  auto rep2 = validate_group(FiniteGroup("sub", t, {"0", "1", "2"}));
  bool assoc = false, unit = false;
  for (const auto& v : rep2.violations) {
    assoc |= v.kind == GroupViolation::Kind::associativity;
    unit |= v.kind == GroupViolation::Kind::unit;
  }
  EXPECT_TRUE(assoc);
  EXPECT_TRUE(unit);
}

TEST(Group, Labels) {
  auto q = make_group("Q8");
  EXPECT_EQ(q->label(0), "1");
  auto i = *q->find_label("i"), j = *q->find_label("j"), k = *q->find_label("k");
  EXPECT_EQ(q->mul(i, j), k);
  EXPECT_EQ(q->mul(j, i), *q->find_label("-k"));
  EXPECT_EQ(q->mul(i, i), *q->find_label("-1"));
  auto s3 = make_group("S3");
  EXPECT_EQ(s3->label(0), "012");
  auto d = make_group("D3");
  EXPECT_EQ(d->label(0), "r0");
  auto p = make_group("C2xC3");
  EXPECT_EQ(p->label(5), "(1,2)");
}

TEST(Group, GeneratorsGenerate) {
  for (const char* spec : {"C6", "D4", "S3", "S4", "Q8", "C2xS3", "C2xC4"}) {
    auto g = make_group(spec);
    std::vector<bool> seen(g->order(), false);
    std::vector<Element> frontier{0};
    seen[0] = true;
    while (!frontier.empty()) {
      Element x = frontier.back();
      frontier.pop_back();
      for (Element a : g->generators()) {
        Element y = g->mul(x, a);
        if (!seen[y]) {
          seen[y] = true;
          frontier.push_back(y);
        }
      }
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) << spec;
  }
}

TEST(Translate, DeltaLeft) {
  auto g = make_group("S3");
  for (Element a = 0; a < g->order(); ++a) {
    auto r = translate(GroupFunction::delta(g, 0), a, Side::left);
    EXPECT_EQ(r.values(), GroupFunction::delta(g, g->inv(a)).values());
  }
}

TEST(Translate, ConstantRight) {
  auto g = make_group("D4");
  auto one = GroupFunction::constant(g, 1.0);
  for (Element a = 0; a < g->order(); ++a) EXPECT_EQ(translate(one, a, Side::right).values(), one.values());
}

TEST(Translate, C4Example) {
  auto g = make_group("C4");
  GroupFunction phi(g);
  for (Element x = 0; x < 4; ++x) phi[x] = double(x + 1);
  auto r = translate(phi, 1, Side::left);
  EXPECT_EQ(r[0], Complex(2.0));
  EXPECT_EQ(r[1], Complex(3.0));
  EXPECT_EQ(r[2], Complex(4.0));
  EXPECT_EQ(r[3], Complex(1.0));
}

TEST(Translate, Composition) {
  for (const char* spec : {"C12", "S3", "D4", "Q8", "C2xS3"}) {
    auto g = make_group(spec);
    Rng rng(3);
    auto phi = GroupFunction::random(g, rng);
    for (Element a = 0; a < g->order(); ++a) {
      for (Element b = 0; b < g->order(); ++b) {
        auto lhs = translate(translate(phi, b, Side::left), a, Side::left);
        auto rhs = translate(phi, g->mul(b, a), Side::left);
        ASSERT_EQ(lhs.values(), rhs.values()) << spec;
      }
    }
  }
}

TEST(Translate, RightDefinition) {
  auto g = make_group("S3");
  Rng rng(4);
  auto phi = GroupFunction::random(g, rng);
  for (Element a = 0; a < 6; ++a) {
    auto r = translate(phi, a, Side::right);
    for (Element x = 0; x < 6; ++x) EXPECT_EQ(r[x], phi[g->mul(x, a)]);
  }
}

TEST(Invert, Examples) {
  auto g = make_group("C3");
  GroupFunction phi(g, Eigen::Vector3cd(1.0, 2.0, 3.0));
  auto r = invert_fn(phi);
  EXPECT_EQ(r[0], Complex(1.0));
  EXPECT_EQ(r[1], Complex(3.0));
  EXPECT_EQ(r[2], Complex(2.0));
  auto s = make_group("S3");
  for (Element a = 0; a < 6; ++a) {
    EXPECT_EQ(invert_fn(GroupFunction::delta(s, a)).values(), GroupFunction::delta(s, s->inv(a)).values());
  }
  Rng rng(5);
  auto f = GroupFunction::random(s, rng);
  EXPECT_EQ(invert_fn(invert_fn(f)).values(), f.values());
}

TEST(GroupFunction, RejectsBadInput) {
  auto g = make_group("C3");
  EXPECT_THROW(GroupFunction(g, Eigen::VectorXcd::Zero(2)), SpecError);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
  v[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(GroupFunction(g, v), SpecError);
  auto h = make_group("C4");
  EXPECT_THROW(GroupFunction(g) + GroupFunction(h), GroupMismatch);
}
