#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "almostlocal/families.hpp"
#include "almostlocal/perm_group.hpp"

using namespace almostlocal;

TEST_CASE("cycle notation round trip") {
  Perm p = parse_cycles("(1 2 3)(4 5)", 6);
  CHECK(p(1) == 2);
  CHECK(p(3) == 1);
  CHECK(p(4) == 5);
  CHECK(p(6) == 6);
  CHECK(p.to_cycles() == "(1 2 3)(4 5)");
  CHECK(parse_cycles("id", 4).is_identity());
  CHECK(parse_cycles("(1,2)", 4).to_cycles() == "(1 2)");
  CHECK_THROWS_AS(parse_cycles("(1 2", 4), domain_error);
  CHECK_THROWS_AS(parse_cycles("(1 7)", 4), domain_error);
  CHECK_THROWS_AS(parse_cycles("x", 4), domain_error);
}

TEST_CASE("group family orders") {
  CHECK(construct_group("cyclic(5)").order() == 5);
  CHECK(construct_group("dihedral(5)").order() == 10);
  CHECK(construct_group("sym(4)").order() == 24);
  CHECK(construct_group("alt(5)").order() == 60);
  CHECK(construct_group("young(2,1,1)").order() == 2);
  CHECK(construct_group("agl(1,5)").order() == 20);
  CHECK(construct_group("agl_sq(1,5)").order() == 10);
  CHECK_THROWS_AS(construct_group("nosuch(3)"), domain_error);
  CHECK_THROWS_AS(construct_group("psl2(6)"), domain_error);
  CHECK_THROWS_AS(construct_group("gens(4, (1 2 3]"), domain_error);
}

TEST_CASE("projective groups over small fields") {
  PermGroup psl5 = construct_group("psl2(5)");
  CHECK(psl5.degree() == 6);
  CHECK(psl5.order() == 60);
  PermGroup pgl5 = construct_group("pgl2(5)");
  CHECK(pgl5.order() == 120);
  CHECK(psl5.is_subgroup_of(pgl5));
  PermGroup psl9 = construct_group("psl2(9)");
  CHECK(psl9.degree() == 10);
  CHECK(psl9.order() == 360);
  PermGroup pgl9 = construct_group("pgl2(9)");
  CHECK(pgl9.order() == 720);
  CHECK(psl9.is_subgroup_of(pgl9));
  CHECK(construct_group("psl2(4)").order() == 60);
  CHECK(construct_group("pgl2(7)").order() == 336);
  CHECK(construct_group("pgl2(8)").order() == 504);
}

TEST_CASE("ex_alt families") {
  PermGroup G = construct_group("ex_alt(8)");
  PermGroup expected = construct_group("gens(8, (1 2 3 4)(5 6 7 8), (1 5)(2 6)(3 7)(4 8))");
  CHECK(G == expected);
  CHECK(G.order() == 8);
  CHECK(orbit_data(G).simply_transitive);
  CHECK(G.is_subgroup_of(construct_group("alt(8)")));
  CHECK(construct_group("ex_alt(5)").order() == 5);
}

TEST_CASE("paper KKprime construction") {
  PermGroup Kp = construct_group("paper_KKprime(3,2)");
  CHECK(Kp.degree() == 6);
  CHECK(Kp.order() == 6);
  PermGroup K = families::kkprime_alpha(3, 2);
  CHECK(K.order() == 3);
  CHECK(K.acts_freely());
  CHECK(K.is_subgroup_of(construct_group("alt(6)")));
  CHECK(!Kp.is_subgroup_of(construct_group("alt(6)")));
  CHECK(intersection(Kp, construct_group("alt(6)")) == K);
}

TEST_CASE("orbit data") {
  OrbitData c5 = orbit_data(construct_group("cyclic(5)"));
  CHECK(c5.transitive);
  CHECK(c5.free);
  CHECK(c5.simply_transitive);

  OrbitData t = orbit_data(construct_group("gens(4, (1 2))"));
  CHECK(t.orbits == std::vector<std::vector<int>>{{1, 2}, {3}, {4}});
  CHECK(!t.transitive);

  OrbitData d5 = orbit_data(construct_group("dihedral(5)"));
  CHECK(d5.transitive);
  CHECK(!d5.free);
  CHECK(!d5.simply_transitive);
}

TEST_CASE("point stabilizers") {
  CHECK(construct_group("sym(4)").point_stabilizer(1).order() == 6);
  PermGroup pgl5 = construct_group("pgl2(5)");
  PermGroup stab = pgl5.point_stabilizer(6);  // infinity is the last point
  CHECK(stab.order() == 20);
  CHECK(construct_group("cyclic(5)").point_stabilizer(1).order() == 1);
  CHECK(construct_group("dihedral(5)").point_stabilizer(2).order() == 2);
  CHECK_THROWS_AS(construct_group("sym(4)").point_stabilizer(5), domain_error);
}

TEST_CASE("orbit stabilizer identity on a corpus") {
  for (const char* spec : {"cyclic(6)", "dihedral(4)", "sym(4)", "alt(5)", "psl2(5)",
                           "agl(1,7)", "young(3,2)", "ex_alt(8)", "paper_KKprime(3,2)",
                           "wreath_imprimitive(cyclic(2), 3)"}) {
    PermGroup G = construct_group(spec);
    for (int a = 1; a <= G.degree(); ++a)
      CHECK(static_cast<long>(G.orbit(a).size()) * G.point_stabilizer(a).order() == G.order());
  }
}

TEST_CASE("subgroup functors") {
  SECTION("alt(5) derived stabilizer closure is alt(5)") {
    PermGroup A5 = construct_group("alt(5)");
    SubgroupFunctors f = subgroup_functors(A5, A5);
    CHECK(f.derived_stab_closure == A5);
  }
  SECTION("dihedral(4) inside sym(4) has full mixed closure") {
    PermGroup D4 = construct_group("dihedral(4)");
    PermGroup S4 = construct_group("sym(4)");
    SubgroupFunctors f = subgroup_functors(D4, S4);
    CHECK(f.mixed_closure == S4);
    CHECK(f.derived_stab_closure == construct_group("alt(4)"));
  }
  SECTION("young closure of <(1 2)> in degree 4") {
    PermGroup F = construct_group("gens(4, (1 2))");
    SubgroupFunctors f = subgroup_functors(F, F);
    REQUIRE(f.young.has_value());
    CHECK(f.young->order() == 2);
  }
  SECTION("functor normality and young transitivity on a corpus") {
    std::vector<std::pair<const char*, const char*>> corpus = {
        {"cyclic(4)", "sym(4)"},      {"dihedral(4)", "sym(4)"},
        {"alt(4)", "sym(4)"},         {"cyclic(5)", "alt(5)"},
        {"dihedral(5)", "alt(5)"},    {"agl_sq(1,5)", "agl(1,5)"},
        {"cyclic(6)", "sym(6)"},      {"sym(3)", "sym(3)"},
        {"gens(4, (1 2))", "gens(4, (1 2))"},
        {"gens(4, (1 2))", "gens(4, (1 2), (3 4))"},
        {"young(2,2)", "young(2,2)"}, {"cyclic(7)", "dihedral(7)"},
        {"ex_alt(8)", "alt(8)"},      {"psl2(5)", "pgl2(5)"},
        {"trivial(4)", "gens(4, (1 2)(3 4))"},
        {"cyclic(3)", "sym(3)"},      {"alt(5)", "sym(5)"},
        {"dihedral(6)", "sym(6)"},    {"agl(1,5)", "sym(5)"},
        {"wreath_imprimitive(cyclic(2), 2)", "sym(4)"}};
    for (const auto& [fs, fps] : corpus) {
      PermGroup F = construct_group(fs);
      PermGroup Fp = construct_group(fps);
      SubgroupFunctors f = subgroup_functors(F, Fp);
      CHECK(normalizer(F, f.F_plus).order() == F.order());
      CHECK(normalizer(Fp, f.derived_stab_closure).order() == Fp.order());
      CHECK(F.is_subgroup_of(*f.young));
      CHECK((f.young->order() == families::sym(F.degree()).order()) == F.transitive());
      // mixed closure is the set product of the derived closure with F+
      std::set<Perm> prod;
      for (const Perm& x : f.derived_stab_closure.elements())
        for (const Perm& y : f.F_plus.elements()) prod.insert(x * y);
      CHECK(prod.size() == static_cast<size_t>(f.mixed_closure.order()));
      for (const Perm& p : prod) CHECK(f.mixed_closure.contains(p));
    }
  }
  SECTION("containment violation is rejected") {
    CHECK_THROWS_AS(subgroup_functors(construct_group("sym(4)"), construct_group("alt(4)")),
                    domain_error);
  }
}

TEST_CASE("normalizers") {
  PermGroup G = construct_group("wreath_imprimitive(cyclic(2), 3)");
  CHECK(G.order() == 24);
  PermGroup C6 = construct_group("cyclic(6)");
  CHECK(C6.is_subgroup_of(G));
  CHECK(normalizer(G, C6) == C6);
  CHECK(normalizer(G, PermGroup::trivial(6)) == G);
  PermGroup S4 = construct_group("sym(4)");
  PermGroup N = normalizer(S4, construct_group("cyclic(4)"));
  CHECK(N == construct_group("dihedral(4)"));
  CHECK(N.order() == 8);
}

TEST_CASE("product sets") {
  PermGroup A5 = construct_group("alt(5)");
  PermGroup S5 = construct_group("sym(5)");
  PermGroup AGL = construct_group("agl(1,5)");
  CHECK(intersection_order(A5, AGL) == 10);
  CHECK(product_set_equals(A5, AGL, S5));
  PermGroup S3 = construct_group("sym(3)");
  CHECK(product_set_equals(S3, S3, S3));
  CHECK_THROWS_AS(product_set_equals(A5, construct_group("sym(4)"), S5), domain_error);

  // formula agrees with the literal set product on random subgroup pairs
  std::mt19937_64 rng(2024);
  std::vector<PermGroup> subs = all_subgroups(construct_group("sym(4)"));
  PermGroup S4 = construct_group("sym(4)");
  for (int trial = 0; trial < 20; ++trial) {
    const PermGroup& H = subs[rng() % subs.size()];
    const PermGroup& K = subs[rng() % subs.size()];
    std::set<Perm> prod;
    for (const Perm& h : H.elements())
      for (const Perm& k : K.elements()) prod.insert(h * k);
    bool literal = prod.size() == static_cast<size_t>(S4.order());
    CHECK(product_set_equals(H, K, S4) == literal);
  }
}

TEST_CASE("essential subgroups") {
  PermGroup C4 = construct_group("cyclic(4)");
  PermGroup C2 = construct_group("gens(4, (1 3)(2 4))");
  CHECK(C2.is_subgroup_of(C4));
  CHECK(is_essential(C2, C4));

  PermGroup D = construct_group("gens(4, (1 2))");
  PermGroup Dp = construct_group("gens(4, (1 2), (3 4))");
  CHECK(!is_essential(D, Dp));

  PermGroup F5sq = construct_group("agl_sq(1,5)");
  PermGroup F5 = construct_group("agl(1,5)");
  CHECK(is_essential(F5sq, F5));

  // prime-order criterion matches the literal cyclic-subgroup test
  for (const char* spec : {"cyclic(12)", "dihedral(6)", "sym(4)", "agl(1,5)",
                           "wreath_imprimitive(cyclic(2), 3)", "young(4,2)"}) {
    PermGroup G = construct_group(spec);
    REQUIRE(G.order() <= 48);
    for (const PermGroup& H : all_subgroups(G)) {
      bool literal = true;
      for (const Perm& g : G.elements()) {
        if (g.is_identity()) continue;
        PermGroup cyc = PermGroup::generated_by(G.degree(), {g});
        if (intersection_order(cyc, H) == 1) {
          literal = false;
          break;
        }
      }
      CHECK(is_essential(H, G) == literal);
    }
  }
}

TEST_CASE("subgroup enumeration") {
  CHECK(all_subgroups(construct_group("sym(4)")).size() == 30);
  CHECK(all_subgroups(construct_group("alt(5)")).size() == 59);
  CHECK(all_subgroups(construct_group("cyclic(6)")).size() == 4);
}

TEST_CASE("minimal nontrivial action degrees") {
  CHECK(!min_nontrivial_action_degree(construct_group("alt(5)"), 4).has_value());
  CHECK(min_nontrivial_action_degree(construct_group("sym(4)"), 4) == 2);
  CHECK(min_nontrivial_action_degree(construct_group("cyclic(6)"), 3) == 2);
  CHECK_THROWS_AS(min_nontrivial_action_degree(construct_group("sym(4)"), 1), domain_error);
}
