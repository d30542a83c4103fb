#include <gtest/gtest.h>

#include <gtw/gtw.hpp>

using namespace gtw;

namespace {

std::vector<Poset> small_posets(int max_n) {
  std::vector<Poset> out;
  for (int n = 1; n <= max_n; ++n)
    for (const auto& p : enumerate_posets(n)) out.push_back(p);
  return out;
}

// Implication straight from the Kripke clause.
Mask kripke_imp(const Poset& p, Mask a, Mask b) {
  Mask r = 0;
  for (int x = 0; x < p.size(); ++x)
    if (subset_of(p.up(x) & a, b)) r |= bit(x);
  return r;
}

ElemSet elems(int n, std::initializer_list<int> xs) {
  ElemSet s(n);
  for (int x : xs) s.insert(x);
  return s;
}

}  // namespace

TEST(UpAlgebra, PointIsTwoElementBoolean) {
  auto a = up_algebra(Poset::discrete(1));
  ASSERT_EQ(a.size(), 2);
  EXPECT_EQ(a.labels(), (std::vector<Mask>{0, 1}));
  EXPECT_EQ(a.imp(a.top(), a.bottom()), a.bottom());
  EXPECT_EQ(a.imp(a.bottom(), a.bottom()), a.top());
}

TEST(UpAlgebra, TwoChainImplication) {
  auto a = up_algebra(Poset::chain(2));
  const int empty = a.index_of_label(0b00), one = a.index_of_label(0b10), all = a.index_of_label(0b11);
  EXPECT_EQ(a.imp(one, empty), empty);
  EXPECT_EQ(a.imp(one, one), all);
  EXPECT_TRUE(a.leq(empty, one) && a.leq(one, all));
}

TEST(UpAlgebra, AntichainIsClassical) {
  const Poset p = Poset::discrete(2);
  auto a = up_algebra(p);
  ASSERT_EQ(a.size(), 4);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      EXPECT_EQ(a.labels()[a.imp(x, y)], (p.all() & ~a.labels()[x]) | a.labels()[y]);
}

TEST(UpAlgebra, OperationsMatchSetOperations) {
  for (const auto& p : small_posets(4)) {
    auto a = up_algebra(p);
    const auto& l = a.labels();
    for (int x = 0; x < a.size(); ++x)
      for (int y = 0; y < a.size(); ++y) {
        EXPECT_EQ(l[a.meet(x, y)], l[x] & l[y]);
        EXPECT_EQ(l[a.join(x, y)], l[x] | l[y]);
        EXPECT_EQ(l[a.imp(x, y)], kripke_imp(p, l[x], l[y]));
      }
  }
}

TEST(FinHA, ResiduationIsChecked) {
  auto a = up_algebra(Poset::chain(2));
  auto imp = a.imp_table();
  imp[0] = a.bottom();  // ⊥ → ⊥ must be ⊤
  EXPECT_THROW(FinHA::from_tables(static_cast<const FinDL&>(a), imp), AlgebraError);
}

TEST(FinHA, ImplicationFromLatticeMatches) {
  for (const auto& p : small_posets(3)) {
    auto a = up_algebra(p);
    auto b = FinHA::from_lattice(static_cast<const FinDL&>(a));
    EXPECT_EQ(a.imp_table(), b.imp_table());
  }
}

TEST(FinDL, NonDistributiveRejected) {
  // the diamond M3: 0 < a, b, c < 1
  const int n = 5;
  std::vector<int> meet(n * n), join(n * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y) meet[x * n + y] = join[x * n + y] = x;
      else if (x == 0 || y == 0) meet[x * n + y] = 0, join[x * n + y] = x + y;
      else if (x == 4 || y == 4) meet[x * n + y] = x == 4 ? y : x, join[x * n + y] = 4;
      else meet[x * n + y] = 0, join[x * n + y] = 4;
    }
  EXPECT_THROW(FinDL::from_tables(n, meet, join, 4, 0), AlgebraError);
}

TEST(PrimeFilters, TwoElementBoolean) {
  auto a = up_algebra(Poset::discrete(1));
  auto s = prime_filters(a);
  ASSERT_EQ(s.size(), 1);
  EXPECT_EQ(s.filters[0], elems(2, {a.top()}));
}

TEST(PrimeFilters, ThreeChain) {
  auto a = up_algebra(Poset::chain(2));
  auto s = prime_filters(a);
  const int one = a.index_of_label(0b10), all = a.index_of_label(0b11);
  ASSERT_EQ(s.size(), 2);
  std::vector<ElemSet> expect{elems(3, {all}), elems(3, {one, all})};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(s.filters, expect);
}

TEST(PrimeFilters, FourElementBoolean) {
  auto s = prime_filters(up_algebra(Poset::discrete(2)));
  ASSERT_EQ(s.size(), 2);
  EXPECT_FALSE(s.order.leq(0, 1));
  EXPECT_FALSE(s.order.leq(1, 0));
}

TEST(PrimeFilters, ScanAgreesWithJoinIrreducibles) {
  for (const auto& p : small_posets(4)) {
    auto a = up_algebra(p);
    if (a.size() > 16) continue;
    auto by_scan = prime_filters_by_scan(a);
    std::sort(by_scan.begin(), by_scan.end());
    EXPECT_EQ(by_scan, prime_filters(a).filters);
    for (const auto& f : by_scan) EXPECT_TRUE(is_prime_filter(a, f));
  }
}

TEST(PrimeFilters, SizeGuard) {
  Caps caps;
  caps.max_algebra = 4;
  EXPECT_THROW(prime_filters(up_algebra(Poset::discrete(3)), caps), SizeGuard);
}

TEST(Eta, Point) {
  const Poset p = Poset::discrete(1);
  auto a = up_algebra(p);
  auto s = prime_filters(a);
  EXPECT_EQ(eta(p, a, s), (StateMap{0}));
}

TEST(Eta, TwoChain) {
  const Poset p = Poset::chain(2);
  auto a = up_algebra(p);
  auto s = prime_filters(a);
  auto e = eta(p, a, s);
  const int one = a.index_of_label(0b10), all = a.index_of_label(0b11);
  EXPECT_EQ(s.filters[e[0]], elems(3, {all}));
  EXPECT_EQ(s.filters[e[1]], elems(3, {one, all}));
  EXPECT_TRUE(s.order.leq(e[0], e[1]));
}

TEST(Eta, IsAnOrderIsomorphism) {
  for (const auto& p : small_posets(4)) {
    auto a = up_algebra(p);
    auto s = prime_filters(a);
    auto e = eta(p, a, s);
    ASSERT_EQ(s.size(), p.size());
    EXPECT_TRUE(is_surjective(e, s.size()));
    EXPECT_TRUE(is_order_embedding(e, p, s.order));
  }
}

TEST(Theta, BottomAndTop) {
  auto a = up_algebra(Poset::chain(2));
  auto s = prime_filters(a);
  auto t = theta(a, s);
  EXPECT_EQ(t[a.bottom()], 0u);
  EXPECT_EQ(t[a.top()], s.order.all());
}

TEST(Theta, ThreeChainMiddle) {
  auto a = up_algebra(Poset::chain(2));
  auto s = prime_filters(a);
  const int one = a.index_of_label(0b10);
  const Mask t = theta(a, s)[one];
  ASSERT_EQ(std::popcount(t), 1);
  EXPECT_TRUE(s.filters[std::countr_zero(t)].contains(one));
}

TEST(Theta, LatticeIsomorphismOntoUpsets) {
  for (const auto& p : small_posets(4)) {
    auto a = up_algebra(p);
    auto s = prime_filters(a);
    auto t = theta(a, s);
    std::vector<Mask> image(t.begin(), t.end());
    std::sort(image.begin(), image.end());
    EXPECT_EQ(image, upsets(s.order));
    for (int x = 0; x < a.size(); ++x)
      for (int y = 0; y < a.size(); ++y) {
        EXPECT_EQ(t[a.meet(x, y)], t[x] & t[y]);
        EXPECT_EQ(t[a.join(x, y)], t[x] | t[y]);
        EXPECT_EQ(t[a.imp(x, y)], kripke_imp(s.order, t[x], t[y]));
      }
  }
}

TEST(ClosedOpen, ThetaImagesAreBoth) {
  auto a = up_algebra(Poset::chain(2));
  auto s = prime_filters(a);
  auto t = theta(a, s);
  for (Mask d : t) {
    EXPECT_TRUE(is_closed_upset(d, t, s));
    EXPECT_TRUE(is_open_upset(d, t));
  }
}

TEST(ClosedOpen, EmptyUpset) {
  auto a = up_algebra(Poset::discrete(2));
  auto s = prime_filters(a);
  auto t = theta(a, s);
  EXPECT_TRUE(is_open_upset(0, t));
  EXPECT_TRUE(is_closed_upset(0, t, s));
}

TEST(ClosedOpen, EveryUpsetOfAFiniteDual) {
  for (const auto& p : small_posets(4)) {
    auto a = up_algebra(p);
    auto s = prime_filters(a);
    auto t = theta(a, s);
    for (Mask d : upsets(s.order)) {
      EXPECT_TRUE(is_closed_upset(d, t, s));
      EXPECT_TRUE(is_open_upset(d, t));
    }
  }
}

TEST(Filters, Predicates) {
  auto a = up_algebra(Poset::discrete(2));
  EXPECT_FALSE(is_filter(a, ElemSet(4)));                // empty
  EXPECT_TRUE(is_filter(a, ElemSet::full(4)));           // improper
  EXPECT_FALSE(is_prime_filter(a, ElemSet::full(4)));    // contains bottom
  EXPECT_TRUE(is_prime_filter(a, principal_filter(a, a.index_of_label(0b01))));
  EXPECT_FALSE(is_prime_filter(a, principal_filter(a, a.top())));  // ⊤ = {0} ∨ {1}
}
