#include <catch2/catch_amalgamated.hpp>

#include "almostlocal/wreath.hpp"

using namespace almostlocal;

namespace {

PermGroup c2_in_sym4() { return PermGroup::generated_by(4, {parse_cycles("(1 3)(2 4)", 4)}); }

}  // namespace

TEST_CASE("iterated wreath orders") {
  PermGroup C2 = construct_group("cyclic(2)");
  CHECK(iterated_order(C2, 4, 0) == 1);
  CHECK(iterated_order(C2, 4, 2) == 32);
  CHECK(iterated_order(C2, 2, 3) == 128);
  CHECK(iterated_order(construct_group("cyclic(3)"), 3, 2) == 81);
  CHECK_THROWS_AS(iterated_order(C2, 4, -1), domain_error);

  // literal cross-check at levels <= 2 when the closure is enumerable
  PermGroup C2b = c2_in_sym4();
  PermGroup W2 = families::wreath_imprimitive(C2b, C2b, 1000000);
  CHECK(BigInt(W2.order()) == iterated_order(C2b, 4, 2));
  PermGroup D = construct_group("cyclic(2)");
  PermGroup W2small = families::wreath_imprimitive(D, D, 1000000);
  CHECK(BigInt(W2small.order()) == iterated_order(D, 2, 2));
}

TEST_CASE("haar measures") {
  WreathContext ctx(4, c2_in_sym4(), construct_group("cyclic(4)"));
  MeasureReport m0 = haar_measures(ctx, 0);
  CHECK(m0.mu_U == BigRational(1, 2));
  CHECK(m0.mu_K == BigRational(2));
  CHECK(m0.diverges);
  MeasureReport m1 = haar_measures(ctx, 1);
  CHECK(m1.mu_U == BigRational(1, 32));
  CHECK(m1.mu_K == BigRational(8));
  CHECK(rational_to_string(m1.mu_K) == "8/1");

  // index-one case: K_n collapses to U_n, so mu_K = mu(U_n) = 1/|W_n(D)|
  WreathContext flat(4, construct_group("cyclic(4)"), construct_group("cyclic(4)"));
  for (int n = 0; n <= 3; ++n) {
    MeasureReport f = haar_measures(flat, n);
    CHECK(f.mu_K == BigRational(1, iterated_order(flat.D, 4, n)));
    CHECK(!f.diverges);
  }
}

TEST_CASE("measure formula against the literal wreath product") {
  PermGroup C2 = c2_in_sym4();
  PermGroup C4 = construct_group("cyclic(4)");
  WreathContext ctx(4, C2, C4);
  for (int n = 0; n <= 1; ++n) {
    MeasureReport m = haar_measures(ctx, n);
    BigRational lhs = m.mu_K * BigRational(iterated_order(C2, 4, n + 1));
    CHECK(lhs == BigRational(literal_wreath_kernel_order(C4, n)));
  }
}

TEST_CASE("divergence matches measure growth") {
  std::vector<std::pair<PermGroup, PermGroup>> corpus;
  corpus.emplace_back(c2_in_sym4(), construct_group("cyclic(4)"));
  corpus.emplace_back(construct_group("cyclic(4)"), construct_group("cyclic(4)"));
  corpus.emplace_back(construct_group("cyclic(4)"), construct_group("dihedral(4)"));
  corpus.emplace_back(construct_group("cyclic(4)"), construct_group("sym(4)"));
  corpus.emplace_back(construct_group("alt(4)"), construct_group("sym(4)"));
  corpus.emplace_back(construct_group("trivial(3)"), construct_group("cyclic(3)"));
  corpus.emplace_back(construct_group("cyclic(3)"), construct_group("sym(3)"));
  corpus.emplace_back(construct_group("cyclic(5)"), construct_group("dihedral(5)"));
  corpus.emplace_back(construct_group("agl_sq(1,5)"), construct_group("agl(1,5)"));
  corpus.emplace_back(construct_group("dihedral(6)"), construct_group("sym(6)"));
  for (const auto& [D, Dp] : corpus) {
    WreathContext ctx(D.degree(), D, Dp);
    MeasureReport prev = haar_measures(ctx, 1);
    bool grows = true;
    for (int n = 2; n <= 6; ++n) {
      MeasureReport cur = haar_measures(ctx, n);
      grows = grows && cur.mu_K > prev.mu_K;
      prev = cur;
    }
    CHECK(haar_measures(ctx, 0).diverges == grows);
  }
}

TEST_CASE("lattice obstruction") {
  SECTION("C2 inside C4 with four blocks") {
    WreathContext ctx(4, c2_in_sym4(), construct_group("cyclic(4)"));
    CHECK(lattice_obstruction(ctx));
  }
  SECTION("affine stabilizers at q = 5") {
    PermGroup F = construct_group("agl_sq(1,5)");
    PermGroup Fp = construct_group("agl(1,5)");
    WreathContext ctx(5, F, Fp);
    CHECK(is_essential(F, Fp));
    CHECK(Fp.order() == 20);
    CHECK(lattice_obstruction(ctx));  // 20 < 2^5
  }
  SECTION("essentiality failures block the criterion") {
    PermGroup D = construct_group("gens(4, (1 2))");
    PermGroup Dp = construct_group("gens(4, (1 2), (3 4))");
    WreathContext ctx(4, D, Dp);
    CHECK(!lattice_obstruction(ctx));
  }
}

TEST_CASE("obstruction search over stabilizer intervals") {
  SECTION("PSL/PGL over F5") {
    GroupPair P(construct_group("psl2(5)"), construct_group("pgl2(5)"));
    ObstructionSearch s = obstruction_for_pair(P, 6);
    REQUIRE(s.found);
    CHECK(s.Dp->order() == 20);
    CHECK(is_essential(P.F().point_stabilizer(6), *s.Dp));
  }
  SECTION("identical pairs never obstruct") {
    GroupPair P(construct_group("alt(5)"), construct_group("alt(5)"));
    CHECK(!obstruction_for_pair(P, 1).found);
  }
  SECTION("affine pair inside its own degree") {
    GroupPair P(construct_group("agl_sq(1,5)"), construct_group("agl(1,5)"));
    ObstructionSearch s = obstruction_for_pair(P, 1);
    REQUIRE(s.found);
    CHECK(s.Dp->order() == 4);  // C4 = F'_a with F_a = C2: 4 < 2^4
  }
  SECTION("intransitive F is rejected") {
    GroupPair P(construct_group("gens(4, (1 2))"), construct_group("gens(4, (1 2))"));
    CHECK_THROWS_AS(obstruction_for_pair(P, 1), domain_error);
  }
}
