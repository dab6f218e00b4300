#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "almostlocal/commensurate.hpp"
#include "almostlocal/gff.hpp"
#include "almostlocal/simplicity.hpp"
#include "almostlocal/word_metric.hpp"

using namespace almostlocal;

namespace {

Vertex v(std::initializer_list<int> letters) { return Vertex::from_letters(letters); }

GroupPair pair_d4_sym4() {
  return GroupPair(construct_group("dihedral(4)"), construct_group("sym(4)"));
}
GroupPair pair_c5_alt5() {
  return GroupPair(construct_group("cyclic(5)"), construct_group("alt(5)"));
}
GroupPair pair_alt4_sym4() {
  return GroupPair(construct_group("alt(4)"), construct_group("sym(4)"));
}

// one singularity (1 2 3) at v0, inside (D4, Sym(4))
Portrait one_singularity(const GroupPair& P) {
  return star_element(P, Vertex::root(), parse_cycles("(1 2 3)", 4));
}

}  // namespace

TEST_CASE("group pair validation") {
  CHECK_NOTHROW(pair_d4_sym4());
  CHECK_THROWS_AS(GroupPair(construct_group("sym(4)"), construct_group("alt(4)")), domain_error);
  // F' escaping the Young closure of F is rejected
  CHECK_THROWS_AS(GroupPair(construct_group("gens(4, (1 2))"), construct_group("sym(4)")),
                  domain_error);
  CHECK_NOTHROW(GroupPair(construct_group("gens(4, (1 2))"), construct_group("gens(4, (1 2))")));
}

TEST_CASE("membership reports") {
  GroupPair P = pair_d4_sym4();
  SECTION("identity") {
    MembershipReport r = membership_report(P, Portrait::identity(4));
    CHECK(r.in_UF);
    CHECK(r.in_GFFp);
    CHECK(r.type_preserving);
    CHECK(r.orbit_compatible);
    CHECK(r.singularities.empty());
  }
  SECTION("one singularity at v0") {
    Portrait g = one_singularity(P);
    MembershipReport r = membership_report(P, g);
    CHECK(!r.in_UF);
    CHECK(r.in_GFFp);
    CHECK(r.singularities == std::set<Vertex>{Vertex::root()});
  }
  SECTION("a tail outside F means infinitely many singularities") {
    Perm rho = parse_cycles("(1 2 3)", 4);
    CompleteSubtree star = complete_hull(4, {Vertex::root(), Vertex::v1()}, {Vertex::root()});
    std::map<Vertex, Perm> internal{{Vertex::root(), rho}};
    std::map<Vertex, Perm> tails;
    for (const Vertex& x : star.leaves()) {
      int a = x.last_letter();
      if (a == 1)
        tails.emplace(x, rho);  // (1 2 3)(1) = 2 = rho(1), compatible but outside D4
      else
        tails.emplace(x, *smallest_mapping(P.F(), a, rho(a)));
    }
    Portrait g = Portrait::validate(4, star.internal(), Vertex::root(), internal, tails);
    MembershipReport r = membership_report(P, g);
    CHECK(!r.in_GFFp);
    CHECK(!r.in_UF);
  }
  SECTION("parity classes for an index-two pair") {
    GroupPair Q = pair_alt4_sym4();
    Portrait g = star_element(Q, Vertex::root(), parse_cycles("(1 2)", 4));
    MembershipReport r = membership_report(Q, g);
    REQUIRE(r.in_G0.has_value());
    CHECK(!*r.in_G0);  // one singularity in V_0
    CHECK(*r.in_G1);
  }
}

TEST_CASE("singularity reports") {
  GroupPair P = pair_d4_sym4();
  SECTION("identity has empty diagram") {
    SingularityReport r = singularity_report(P, Portrait::identity(4));
    CHECK(r.N == 0);
    CHECK(r.S.empty());
    CHECK(r.Tminus.internal().empty());
  }
  SECTION("one singularity gives the star") {
    SingularityReport r = singularity_report(P, one_singularity(P));
    CHECK(r.S == std::set<Vertex>{Vertex::root()});
    CHECK(r.Tminus.internal() == std::set<Vertex>{Vertex::root()});
    CHECK(r.N == 1);
  }
  SECTION("minimality by exhaustion at radius 2") {
    Portrait g = one_singularity(P);
    // all internal sets drawn from the radius-2 ball giving a complete
    // subtree through e0 and g^-1(e0) with F-action outside
    std::vector<Vertex> pool = ball(Vertex::root(), 2, 4);
    long best = 1 << 20;
    for (long mask = 0; mask < (1L << pool.size()); ++mask) {
      std::set<Vertex> internal;
      for (size_t i = 0; i < pool.size(); ++i)
        if (mask & (1L << i)) internal.insert(pool[i]);
      try {
        CompleteSubtree T = CompleteSubtree::from_internal(4, internal);
        if (!T.contains(g.apply_inverse(Vertex::root())) ||
            !T.contains(g.apply_inverse(Vertex::v1())))
          continue;
        bool outside_ok = true;
        for (const Vertex& u : ball(Vertex::root(), 3, 4))
          if (!T.is_internal(u) && !P.F().contains(g.local(u))) outside_ok = false;
        if (outside_ok) best = std::min(best, static_cast<long>(internal.size()));
      } catch (const domain_error&) {
        continue;
      }
    }
    CHECK(best == singularity_report(P, g).N);
  }
  SECTION("translations have N = 1") {
    Portrait h2 = Portrait::constant(parse_cycles("(1 2)(3 4)", 4), Vertex::v1());
    SingularityReport r = singularity_report(P, h2);
    CHECK(r.S.empty());
    CHECK(r.N == 1);
    CHECK(r.Tminus.internal() == std::set<Vertex>{Vertex::root()});
  }
  SECTION("sigma singularities against an intermediate subgroup") {
    GroupPair Q = pair_alt4_sym4();
    Portrait g = star_element(Q, Vertex::root(), parse_cycles("(1 2)", 4));
    SingularityReport r = singularity_report(Q, g, construct_group("alt(4)"));
    CHECK(r.Sigma == std::set<Vertex>{Vertex::root()});
  }
}

TEST_CASE("extend_local") {
  GroupPair P = pair_d4_sym4();
  SECTION("star element at v0") {
    Portrait g = one_singularity(P);
    CHECK(g.apply(Vertex::root()).is_root());
    CHECK(g.local(Vertex::root()) == parse_cycles("(1 2 3)", 4));
    CHECK(singular_vertices(P, g) == std::set<Vertex>{Vertex::root()});
    CHECK(tails_in(P.F(), g));
    CHECK(g.apply(v({3})) == v({1}));
  }
  SECTION("identity data gives the identity") {
    CHECK(extend_local(P, Vertex::root(), 0, {{Vertex::root(), Perm::identity(4)}},
                       Vertex::root())
              .is_identity());
  }
  SECTION("data inside F gives U(F)") {
    Portrait g = star_element(P, v({2, 1}), parse_cycles("(1 3)", 4));
    CHECK(is_in_UF(P, g));
  }
  SECTION("radius one ball") {
    Perm rho = parse_cycles("(2 3)", 4);
    std::map<Vertex, Perm> data;
    for (const Vertex& w : ball(Vertex::v1(), 1, 4)) {
      if (w == Vertex::v1()) {
        data.emplace(w, rho);
        continue;
      }
      int c = w.is_root() ? 1 : w.last_letter();
      data.emplace(w, *smallest_mapping(P.Fp(), c, rho(c)));
    }
    Portrait g = extend_local(P, Vertex::v1(), 1, data, Vertex::v1());
    CHECK(g.local(Vertex::v1()) == rho);
    for (const Vertex& w : ball(Vertex::v1(), 1, 4)) CHECK(g.local(w) == data.at(w));
    for (const Vertex& s : singular_vertices(P, g))
      CHECK(distance(s, Vertex::v1()) <= 1);
  }
  SECTION("datum outside F' is rejected") {
    GroupPair Q(construct_group("cyclic(4)"), construct_group("cyclic(4)"));
    CHECK_THROWS_AS(star_element(Q, Vertex::root(), parse_cycles("(1 2)", 4)), domain_error);
  }
}

TEST_CASE("KU decomposition") {
  GroupPair P = pair_d4_sym4();
  std::mt19937_64 rng(51);
  SECTION("U(F) elements stay whole") {
    Portrait g = Portrait::constant(parse_cycles("(1 3)", 4), v({2}));
    KUDecomposition d = decompose_KU(P, g);
    CHECK(d.parts.empty());
    CHECK(d.gamma == g);
  }
  SECTION("single singularity peels in one step") {
    KUDecomposition d = decompose_KU(P, one_singularity(P));
    CHECK(d.parts.size() == 1);
    CHECK(is_in_UF(P, d.gamma));
  }
  SECTION("random elements re-multiply") {
    for (int trial = 0; trial < 40; ++trial) {
      Portrait g = random_gff_element(P, rng);
      KUDecomposition d = decompose_KU(P, g);
      CHECK(d.parts.size() <= singular_vertices(P, g).size());
    }
  }
  SECTION("two disjoint singularities") {
    Portrait a = one_singularity(P);
    Portrait b = star_element(P, v({2, 1}), parse_cycles("(2 4 3)", 4));
    KUDecomposition d = decompose_KU(P, a * b);
    CHECK(d.parts.size() <= 2);
  }
}

TEST_CASE("gamma certificates") {
  GroupPair P = pair_d4_sym4();
  CommutatorTable table(P);
  SECTION("identity expression is empty") {
    GammaCertificate c = gamma_uf(P, table, Perm::identity(4), Vertex::root());
    CHECK(c.witness.empty());
    CHECK(c.gamma.is_identity());
  }
  SECTION("alternating local action at v0") {
    GammaCertificate c = gamma_uf(P, table, parse_cycles("(1 3 2)", 4), Vertex::root());
    CHECK(c.gamma.local(Vertex::root()) == parse_cycles("(1 3 2)", 4));
    CHECK(c.gamma.apply(Vertex::root()).is_root());
  }
  SECTION("3-cycles in alt(5) fixing a point") {
    GroupPair Q = pair_c5_alt5();
    CommutatorTable tq(Q);
    GammaCertificate c = gamma_uf(Q, tq, parse_cycles("(2 3 4)", 5), v({3}));
    CHECK(c.gamma.local(v({3})) == parse_cycles("(2 3 4)", 5));
  }
  SECTION("elements outside the derived closure are rejected") {
    CHECK_THROWS_AS(gamma_uf(P, table, parse_cycles("(1 2)", 4), Vertex::root()),
                    domain_error);
  }
}

TEST_CASE("reduce_simple") {
  std::mt19937_64 rng(53);
  SECTION("residual in U(F)* for (D4, Sym(4))") {
    GroupPair P = pair_d4_sym4();
    Portrait g = one_singularity(P);
    SimplicityCertificate c = reduce_simple(P, g);
    CHECK(c.steps.size() == 1);
    CHECK(is_in_UF(P, c.residual));
    for (int trial = 0; trial < 10; ++trial) {
      Portrait h = random_type_preserving(P, rng);
      SimplicityCertificate sc = reduce_simple(P, h);
      CHECK(sc.steps.size() <= singular_vertices(P, h).size());
    }
  }
  SECTION("hypotheses are checked") {
    GroupPair Q = pair_alt4_sym4();  // mixed closure is Alt(4), not Sym(4)
    CHECK_THROWS_AS(reduce_simple(Q, Portrait::identity(4)), domain_error);
  }
  SECTION("(C5, Alt(5)) reduces elements with several singularities") {
    GroupPair P = pair_c5_alt5();
    std::mt19937_64 r2(54);
    int done = 0;
    while (done < 3) {
      Portrait g = random_type_preserving(P, r2, {.max_factors = 4, .vertex_radius = 1});
      if (singular_vertices(P, g).size() < 2) continue;
      SimplicityCertificate c = reduce_simple(P, g);
      CHECK(is_in_UF(P, c.residual));
      ++done;
    }
  }
}

TEST_CASE("two-singular elements and sigma reduction") {
  GroupPair P = pair_alt4_sym4();
  PermGroup A4 = construct_group("alt(4)");
  SECTION("prescribed sigma set") {
    Portrait gamma = make_two_singular(P, A4, Vertex::root(), v({1, 2}));
    SingularityReport r = singularity_report(P, gamma, A4);
    CHECK(r.Sigma == std::set<Vertex>{Vertex::root(), v({1, 2})});
  }
  SECTION("odd distance is rejected") {
    CHECK_THROWS_AS(make_two_singular(P, A4, Vertex::root(), Vertex::v1()), domain_error);
  }
  SECTION("sigma reduction empties sigma") {
    Portrait gamma = make_two_singular(P, A4, Vertex::root(), v({1, 2}));
    SigmaReduction red = sigma_reduce(P, A4, gamma);
    CHECK(singularity_report(P, red.residual, A4).Sigma.empty());
    CHECK(red.steps.size() == 1);
    SigmaReduction triv = sigma_reduce(P, A4, Portrait::identity(4));
    CHECK(triv.steps.empty());
    CHECK(triv.residual.is_identity());
  }
  SECTION("random even-parity elements reduce") {
    std::mt19937_64 rng(55);
    int done = 0;
    while (done < 8) {
      Portrait g = random_gff_element(P, rng, {.max_factors = 4, .vertex_radius = 1});
      if (!g.type_preserving()) continue;
      int odd[2] = {0, 0};
      for (const auto& [u, s] : g.internal_perms())
        if (!A4.contains(s)) odd[u.parity()] ^= 1;
      if (odd[0] || odd[1]) continue;
      SigmaReduction red = sigma_reduce(P, A4, g);
      CHECK(internals_in(A4, red.residual));
      ++done;
    }
  }
}

TEST_CASE("symmetric difference law for singularity parity classes") {
  GroupPair P = pair_alt4_sym4();
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 100; ++trial) {
    Portrait g = random_type_preserving(P, rng, {.max_factors = 3, .vertex_radius = 2});
    Portrait h = random_type_preserving(P, rng, {.max_factors = 3, .vertex_radius = 2});
    SingularityReport rg = singularity_report(P, g);
    SingularityReport rh = singularity_report(P, h);
    SingularityReport rgh = singularity_report(P, g * h);
    Portrait hi = h.inverse();
    for (int i = 0; i < 2; ++i) {
      const std::set<Vertex>& Sg = i == 0 ? rg.S0 : rg.S1;
      const std::set<Vertex>& Sh = i == 0 ? rh.S0 : rh.S1;
      const std::set<Vertex>& Sgh = i == 0 ? rgh.S0 : rgh.S1;
      std::set<Vertex> expect = Sh;
      for (const Vertex& u : Sg) {
        Vertex w = hi.apply(u);
        if (expect.count(w))
          expect.erase(w);
        else
          expect.insert(w);
      }
      CHECK(Sgh == expect);
    }
  }
}

TEST_CASE("parity classes close under products and inverses") {
  GroupPair P = pair_alt4_sym4();
  std::mt19937_64 rng(58);
  auto even_classes = [&](const Portrait& g) {
    SingularityReport r = singularity_report(P, g);
    return std::make_pair(r.S0.size() % 2 == 0, r.S1.size() % 2 == 0);
  };
  int seen = 0;
  while (seen < 40) {
    Portrait g = random_type_preserving(P, rng, {.max_factors = 3, .vertex_radius = 1});
    Portrait h = random_type_preserving(P, rng, {.max_factors = 3, .vertex_radius = 1});
    if (even_classes(g) != std::make_pair(true, true)) continue;
    if (even_classes(h) != std::make_pair(true, true)) continue;
    CHECK(even_classes(g * h) == std::make_pair(true, true));
    CHECK(even_classes(g.inverse()) == std::make_pair(true, true));
    ++seen;
  }
}

TEST_CASE("N is a length function") {
  GroupPair P = pair_d4_sym4();
  std::mt19937_64 rng(59);
  CHECK(length_N(P, Portrait::identity(4)) == 0);
  for (int trial = 0; trial < 60; ++trial) {
    Portrait g = random_gff_element(P, rng, {.max_factors = 3, .vertex_radius = 2});
    Portrait h = random_gff_element(P, rng, {.max_factors = 3, .vertex_radius = 2});
    long ng = length_N(P, g);
    CHECK(length_N(P, g.inverse()) == ng);
    CHECK(length_N(P, g * h) <= ng + length_N(P, h));
  }
}

TEST_CASE("word decomposition") {
  GroupPair P = pair_d4_sym4();
  TranslationSystem sys(P);
  SECTION("translation system is a bijection") {
    std::set<int> targets;
    for (int i = 2; i <= 4; ++i) {
      CHECK(sys.sigma(i)(1) == i);
      targets.insert(sys.sigma(i).inverse()(1));
      CHECK(sys.index_for_branch(sys.sigma(i).inverse()(1)) == i);
    }
    CHECK(targets == std::set<int>{2, 3, 4});
  }
  SECTION("identity gives the empty word") {
    CHECK(word_decompose(P, sys, Portrait::identity(4)).letters.empty());
  }
  SECTION("a translation is one letter") {
    GenWord w = word_decompose(P, sys, sys.h(2));
    CHECK(w.letters.size() == 1);
    CHECK(w.letters[0].kind == GenLetter::Kind::Translation);
  }
  SECTION("one singularity stays within the bound") {
    GenWord w = word_decompose(P, sys, one_singularity(P));
    CHECK(w.letters.size() <= 24);  // (3d-2) N + 3d + 2 at d = 4, N = 1
  }
  SECTION("random elements in several contexts") {
    std::mt19937_64 rng(61);
    for (const auto& [fs, fps] :
         std::vector<std::pair<const char*, const char*>>{{"dihedral(4)", "sym(4)"},
                                                          {"cyclic(5)", "alt(5)"},
                                                          {"cyclic(3)", "sym(3)"}}) {
      GroupPair Q(construct_group(fs), construct_group(fps));
      TranslationSystem qsys(Q);
      for (int trial = 0; trial < 12; ++trial) {
        Portrait g = random_gff_element(Q, rng, {.max_factors = 3, .vertex_radius = 2});
        GenWord w = word_decompose(Q, qsys, g);  // internal re-multiplication + bounds
        long n = length_N(Q, g);
        long d = Q.degree();
        CHECK(static_cast<long>(w.letters.size()) <= (3 * d - 2) * n + 3 * d + 2);
      }
    }
  }
  SECTION("intransitive F is rejected") {
    GroupPair Q(construct_group("gens(4, (1 2))"), construct_group("gens(4, (1 2))"));
    CHECK_THROWS_AS(TranslationSystem(Q), domain_error);
  }
}

TEST_CASE("coset family M_v") {
  GroupPair P = pair_c5_alt5();
  SECTION("transitive F fills every coset") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 100; ++trial) {
      Vertex u = random_vertex(rng, 5, 6);
      CosetMv mv = coset_M(P, u);
      REQUIRE(mv.nonempty);
      CHECK(is_in_Mv(P, *mv.witness, u));
    }
  }
  SECTION("v0 carries the identity witness") {
    CosetMv mv = coset_M(P, Vertex::root());
    REQUIRE(mv.nonempty);
    CHECK(mv.witness->is_identity());
  }
  SECTION("orbit gaps empty the coset") {
    GroupPair Q(construct_group("gens(4, (1 2))"), construct_group("gens(4, (1 2))"));
    CHECK(!coset_M(Q, v({3})).nonempty);
    CHECK(coset_M(Q, v({2})).nonempty);
  }
}

TEST_CASE("commensuration counts") {
  GroupPair P = pair_d4_sym4();
  CHECK(symdiff_M(P, Portrait::identity(4)) == 0);
  CHECK(symdiff_M_oracle(P, Portrait::identity(4)) == 0);
  Portrait g = one_singularity(P);
  CHECK(symdiff_M(P, g) == 2);
  CHECK(symdiff_M_oracle(P, g) == 2);
  Portrait h2 = Portrait::constant(parse_cycles("(1 2)(3 4)", 4), Vertex::v1());
  CHECK(symdiff_M(P, h2) == 2);
  CHECK(symdiff_M_oracle(P, h2) == 2);
}

TEST_CASE("cocompact reduction") {
  GroupPair Fpair(construct_group("agl_sq(1,5)"), construct_group("agl(1,5)"));
  GroupPair Hpair(construct_group("alt(5)"), construct_group("sym(5)"));
  SECTION("U(H) elements reduce trivially") {
    Portrait g = star_element(Hpair, Vertex::root(), parse_cycles("(1 2 3)", 5));
    REQUIRE(is_in_UF(Hpair, g));
    CocompactReduction r = cocompact_reduce(Fpair, Hpair, g);
    CHECK(r.gamma.is_identity());
    CHECK(r.k == g);
  }
  SECTION("one H-singularity peels") {
    // odd local action at "2", fixing the color toward e0 so v0 stays put
    Portrait g = star_element(Hpair, v({2}), parse_cycles("(1 3)", 5));
    REQUIRE(g.apply(Vertex::root()).is_root());
    CocompactReduction r = cocompact_reduce(Fpair, Hpair, g);
    CHECK(is_in_UF(Hpair, r.k));
    CHECK(is_in_GFFp(Fpair, r.gamma));
  }
  SECTION("two H-singularities peel") {
    Portrait g = star_element(Hpair, v({2}), parse_cycles("(1 3)", 5)) *
                 star_element(Hpair, v({3, 1}), parse_cycles("(4 5)", 5));
    REQUIRE(g.apply(Vertex::root()).is_root());
    CocompactReduction r = cocompact_reduce(Fpair, Hpair, g);
    CHECK(is_in_UF(Hpair, r.k));
  }
  SECTION("product hypothesis is checked") {
    GroupPair small(construct_group("cyclic(5)"), construct_group("cyclic(5)"));
    CHECK_THROWS_AS(cocompact_reduce(small, Hpair, Portrait::identity(5)), domain_error);
  }
}

TEST_CASE("conjugation commensurates pointwise stabilizers") {
  GroupPair P = pair_d4_sym4();
  SECTION("U(F) elements with trivial diagram") {
    Portrait g = Portrait::constant(parse_cycles("(1 3)", 4), Vertex::root());
    CHECK(conjugation_commensuration_check(P, g, 20));
  }
  SECTION("one singularity") {
    CHECK(conjugation_commensuration_check(P, one_singularity(P), 50));
  }
  SECTION("negative control: moved subtree is detected") {
    Portrait g = one_singularity(P);
    CompleteSubtree T = singular_subtree(P, g);
    // a sample twisting inside T(g) must be rejected by the validator
    Portrait bad = star_element(P, Vertex::root(), parse_cycles("(2 3 4)", 4));
    CHECK(!fixes_pointwise(bad, T.vertices()));
  }
}
