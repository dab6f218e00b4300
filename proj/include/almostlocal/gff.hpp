#pragma once

#include <random>

#include "families.hpp"
#include "portrait.hpp"

namespace almostlocal {

// A validated context (d, F, F') with F <= F' <= F-hat, plus the derived
// subgroup data. Immutable after construction.
class GroupPair {
public:
  GroupPair(PermGroup F, PermGroup Fp) : F_(std::move(F)), Fp_(std::move(Fp)) {
    if (F_.degree() != Fp_.degree()) throw domain_error("group pair degree mismatch");
    if (F_.degree() < 3) throw domain_error("group pair needs degree >= 3");
    if (!F_.is_subgroup_of(Fp_)) throw domain_error("standing assumption fails: F is not inside F'");
    if (!inside_young_closure(F_, Fp_))
      throw domain_error("standing assumption fails: F' does not stabilize the F-orbits");
    functors_ = subgroup_functors(F_, Fp_);
  }

  int degree() const { return F_.degree(); }
  const PermGroup& F() const { return F_; }
  const PermGroup& Fp() const { return Fp_; }
  const SubgroupFunctors& functors() const { return functors_; }

private:
  PermGroup F_;
  PermGroup Fp_;
  SubgroupFunctors functors_;
};

// ---------------------------------------------------------------------------
// membership and singularities

struct MembershipReport {
  bool in_UF = false;
  bool in_GFFp = false;
  bool type_preserving = false;
  bool orbit_compatible = false;
  std::optional<bool> in_G0;  // meaningful when (F':F) = 2 and type-preserving
  std::optional<bool> in_G1;
  std::set<Vertex> singularities;  // defined when in_GFFp
};

// S(g): vertices whose local permutation escapes F. Requires tails in F.
inline std::set<Vertex> singular_vertices(const GroupPair& P, const Portrait& g) {
  std::set<Vertex> S;
  for (const auto& [v, s] : g.internal_perms())
    if (!P.F().contains(s)) S.insert(v);
  return S;
}

inline bool tails_in(const PermGroup& G, const Portrait& g) {
  for (const auto& [v, s] : g.tail_perms())
    if (!G.contains(s)) return false;
  return true;
}

inline bool internals_in(const PermGroup& G, const Portrait& g) {
  for (const auto& [v, s] : g.internal_perms())
    if (!G.contains(s)) return false;
  return true;
}

inline bool is_in_UF(const GroupPair& P, const Portrait& g) {
  return internals_in(P.F(), g) && tails_in(P.F(), g);
}

inline bool is_in_GFFp(const GroupPair& P, const Portrait& g) {
  return internals_in(P.Fp(), g) && tails_in(P.F(), g);
}

inline MembershipReport membership_report(const GroupPair& P, const Portrait& g) {
  if (g.degree() != P.degree()) throw domain_error("membership_report: degree mismatch");
  MembershipReport r;
  r.in_UF = is_in_UF(P, g);
  r.in_GFFp = is_in_GFFp(P, g);
  r.type_preserving = g.type_preserving();
  r.orbit_compatible = true;
  for (const auto& [v, s] : g.internal_perms())
    if (!stabilizes_orbits(P.F(), s)) r.orbit_compatible = false;
  for (const auto& [v, s] : g.tail_perms())
    if (!stabilizes_orbits(P.F(), s)) r.orbit_compatible = false;
  if (r.in_GFFp) {
    if (!r.orbit_compatible)
      throw domain_error("element of G(F,F') fails to stabilize the F-orbits");
    r.singularities = singular_vertices(P, g);
    if (P.Fp().order() == 2 * P.F().order() && r.type_preserving) {
      int odd[2] = {0, 0};
      for (const Vertex& v : r.singularities) odd[v.parity()] ^= 1;
      r.in_G0 = odd[0] == 0;
      r.in_G1 = odd[1] == 0;
    }
  }
  return r;
}

struct SingularityReport {
  std::set<Vertex> S;
  std::set<Vertex> S0, S1;           // split by vertex parity
  std::set<Vertex> Sigma;            // w.r.t. an intermediate F'', when given
  CompleteSubtree Tminus;            // minimal subtree carrying e0, g^-1(e0), S
  long N = 0;                        // internal vertex count of Tminus
};

inline void require_in_gffp(const GroupPair& P, const Portrait& g, const char* who) {
  if (g.degree() != P.degree()) throw domain_error(std::string(who) + ": degree mismatch");
  for (const auto& [v, s] : g.internal_perms())
    if (!P.Fp().contains(s))
      throw domain_error(std::string(who) + ": local permutation at " + v.to_literal() +
                         " is outside F'");
  for (const auto& [v, s] : g.tail_perms())
    if (!P.F().contains(s))
      throw domain_error(std::string(who) + ": tail at " + v.to_literal() + " is outside F");
}

inline SingularityReport singularity_report(const GroupPair& P, const Portrait& g,
                                            const std::optional<PermGroup>& Fpp = {}) {
  require_in_gffp(P, g, "singularity_report");
  SingularityReport r{.S = {}, .S0 = {}, .S1 = {}, .Sigma = {},
                      .Tminus = CompleteSubtree::edge_e0(P.degree())};
  r.S = singular_vertices(P, g);
  for (const Vertex& v : r.S) (v.parity() == 0 ? r.S0 : r.S1).insert(v);
  if (Fpp) {
    if (!Fpp->is_subgroup_of(P.Fp()) || !P.F().is_subgroup_of(*Fpp))
      throw domain_error("singularity_report: F'' must sit between F and F'");
    for (const auto& [v, s] : g.internal_perms())
      if (!Fpp->contains(s)) r.Sigma.insert(v);
  }
  std::set<Vertex> points{Vertex::root(), Vertex::v1(), g.apply_inverse(Vertex::root()),
                          g.apply_inverse(Vertex::v1())};
  points.insert(r.S.begin(), r.S.end());
  r.Tminus = complete_hull(P.degree(), points, r.S);
  r.N = static_cast<long>(r.Tminus.internal().size());
  for (const Vertex& v : r.S)
    if (!r.Tminus.is_internal(v)) throw domain_error("singularity escaped the minimal subtree");
  return r;
}

inline long length_N(const GroupPair& P, const Portrait& g) {
  return singularity_report(P, g).N;
}

// T(g): the minimal complete subtree (containing e0) outside whose internal
// vertices g acts locally like F.
inline CompleteSubtree singular_subtree(const GroupPair& P, const Portrait& g) {
  std::set<Vertex> S = singular_vertices(P, g);
  std::set<Vertex> points{Vertex::root(), Vertex::v1()};
  points.insert(S.begin(), S.end());
  return complete_hull(P.degree(), points, S);
}

// ---------------------------------------------------------------------------
// the extension lemma

// The unique automorphism all of whose local permutations are the identity,
// sending v0 to x (word concatenation with reduction). Lies in U(F) for
// every F.
inline Portrait plain_translation(int degree, const Vertex& x) {
  return Portrait::constant(Perm::identity(degree), x);
}

// An element of U(F) mapping u to w, with all local permutations trivial.
inline Portrait uf_moving(int degree, const Vertex& u, const Vertex& w) {
  return plain_translation(degree, w) * plain_translation(degree, u).inverse();
}

// Extends local data on the ball B(v,n) to an element of G(F,F') acting
// like F outside B(v,n): beyond each sphere vertex x and direction a, the
// local permutation is the lexicographically smallest element of F routing
// a to data(x)(a).
inline Portrait extend_local(const GroupPair& P, const Vertex& v, int n,
                             const std::map<Vertex, Perm>& data, const Vertex& image_of_v) {
  const int d = P.degree();
  std::vector<Vertex> ball_vertices = ball(v, n, d);
  if (data.size() != ball_vertices.size())
    throw domain_error("extend_local: data must cover exactly the ball B(v,n)");
  for (const Vertex& w : ball_vertices) {
    auto it = data.find(w);
    if (it == data.end())
      throw domain_error("extend_local: missing local permutation at " + w.to_literal());
    if (!P.Fp().contains(it->second))
      throw domain_error("extend_local: datum at " + w.to_literal() + " is outside F'");
  }
  std::set<Vertex> points{Vertex::root(), Vertex::v1()};
  std::set<Vertex> forced;
  for (const Vertex& w : ball_vertices) forced.insert(w);
  for (const Vertex& w : ball(v, n + 1, d)) points.insert(w);
  CompleteSubtree base = complete_hull(d, points, forced);

  std::map<std::pair<Vertex, int>, Perm> routing;
  auto sigma_outside = [&](const Vertex& w) -> Perm {
    auto geo = geodesic(v, w);
    const Vertex& x = geo[n];
    const Vertex& next = geo[n + 1];
    int a = next.length() > x.length() ? next.last_letter() : x.last_letter();
    auto key = std::make_pair(x, a);
    auto it = routing.find(key);
    if (it != routing.end()) return it->second;
    auto s = smallest_mapping(P.F(), a, data.at(x)(a));
    if (!s)
      throw domain_error("extend_local: no element of F routes color " + std::to_string(a));
    routing.emplace(key, *s);
    return *s;
  };
  std::map<Vertex, Perm> internal, tails;
  for (const Vertex& w : base.internal())
    internal.emplace(w, distance(v, w) <= n ? data.at(w) : sigma_outside(w));
  for (const Vertex& w : base.leaves())
    tails.emplace(w, distance(v, w) <= n ? data.at(w) : sigma_outside(w));
  return Portrait::from_local_data(d, base.internal(), v, image_of_v, internal, tails);
}

// An element of K_{0,F'}(v): fixes v, local permutation rho there, locally
// F elsewhere.
inline Portrait star_element(const GroupPair& P, const Vertex& v, const Perm& rho) {
  return extend_local(P, v, 0, {{v, rho}}, v);
}

// ---------------------------------------------------------------------------
// the K*U decomposition

struct KUDecomposition {
  Portrait gamma;  // in U(F)
  std::vector<std::pair<Vertex, Portrait>> parts;  // each in K_{0,F'}(v_i)
};

inline Portrait word_product(int degree, const std::vector<Portrait>& factors) {
  Portrait p = Portrait::identity(degree);
  for (const Portrait& f : factors) p = p * f;
  return p;
}

// g = gamma g_1 ... g_k with gamma in U(F) and g_i in K_{0,F'}(v_i),
// following the singularity-peeling induction.
inline KUDecomposition decompose_KU(const GroupPair& P, const Portrait& g) {
  require_in_gffp(P, g, "decompose_KU");
  const int d = P.degree();
  KUDecomposition out{Portrait::identity(d), {}};
  Portrait cur = g;
  Portrait gamma_acc = Portrait::identity(d);  // product of the gamma_1^-1 prefixes
  std::vector<std::pair<Vertex, Portrait>> parts_rev;
  size_t guard = singular_vertices(P, cur).size();
  for (;;) {
    std::set<Vertex> S = singular_vertices(P, cur);
    if (S.empty()) break;
    Vertex v = *S.begin();
    Portrait gamma1 = uf_moving(d, cur.apply(v), v);
    Portrait moved = gamma1 * cur;               // fixes v
    Portrait gv = star_element(P, v, moved.local(v));
    parts_rev.emplace_back(v, gv);
    cur = moved * gv.inverse();                  // fixes the star around v
    gamma_acc = gamma_acc * gamma1.inverse();
    size_t now = singular_vertices(P, cur).size();
    if (now >= guard) throw domain_error("decompose_KU failed to remove a singularity");
    guard = now;
  }
  out.gamma = gamma_acc * cur;
  out.parts.assign(parts_rev.rbegin(), parts_rev.rend());
  // re-multiplication check
  std::vector<Portrait> factors{out.gamma};
  for (const auto& [v, part] : out.parts) factors.push_back(part);
  if (word_product(d, factors) != g) throw domain_error("decompose_KU re-multiplication failed");
  if (!is_in_UF(P, out.gamma)) throw domain_error("decompose_KU gamma escaped U(F)");
  for (const auto& [v, part] : out.parts) {
    if (part.apply(v) != v) throw domain_error("decompose_KU part does not fix its vertex");
    std::set<Vertex> ps = singular_vertices(P, part);
    ps.erase(v);
    if (!ps.empty()) throw domain_error("decompose_KU part has stray singularities");
  }
  return out;
}

// ---------------------------------------------------------------------------
// deterministic random elements

// Random element of F mapping a to b (uniform over the matching coset).
inline std::optional<Perm> random_mapping(const PermGroup& F, int a, int b,
                                          std::mt19937_64& rng) {
  std::vector<Perm> hits;
  for (const Perm& s : F.elements())
    if (s(a) == b) hits.push_back(s);
  if (hits.empty()) return std::nullopt;
  return hits[rng() % hits.size()];
}

inline Perm random_element(const PermGroup& G, std::mt19937_64& rng) {
  return G.elements()[rng() % G.elements().size()];
}

inline Vertex random_vertex(std::mt19937_64& rng, int degree, int max_len) {
  int len = static_cast<int>(rng() % (max_len + 1));
  std::vector<int> letters;
  int prev = 0;
  for (int i = 0; i < len; ++i) {
    int a;
    do {
      a = static_cast<int>(rng() % degree) + 1;
    } while (a == prev);
    letters.push_back(a);
    prev = a;
  }
  return Vertex::from_letters(letters);
}

struct SampleOptions {
  int max_factors = 6;
  int vertex_radius = 2;
};

// Random element of G(F,F'): a product of constant automorphisms over F
// and star twists with F'-data, all chosen through the supplied generator.
inline Portrait random_gff_element(const GroupPair& P, std::mt19937_64& rng,
                                   const SampleOptions& opt = {}) {
  const int d = P.degree();
  int k = 1 + static_cast<int>(rng() % opt.max_factors);
  Portrait g = Portrait::identity(d);
  for (int i = 0; i < k; ++i) {
    if (rng() % 2) {
      g = g * Portrait::constant(random_element(P.F(), rng),
                                 random_vertex(rng, d, opt.vertex_radius));
    } else {
      Vertex v = random_vertex(rng, d, opt.vertex_radius);
      g = g * star_element(P, v, random_element(P.Fp(), rng));
    }
  }
  return g;
}

inline Portrait random_type_preserving(const GroupPair& P, std::mt19937_64& rng,
                                       const SampleOptions& opt = {}) {
  for (;;) {
    Portrait g = random_gff_element(P, rng, opt);
    if (g.type_preserving()) return g;
  }
}

// ---------------------------------------------------------------------------
// conjugation commensuration sampling (g U_T g^-1 = U_{g(T)})

// Random element of U(F) fixing T pointwise: identity on T, stabilizer
// values on the leaves, free F-values one step beyond.
inline Portrait random_uf_fixing(const GroupPair& P, const CompleteSubtree& T,
                                 std::mt19937_64& rng) {
  const int d = P.degree();
  std::set<Vertex> forced = T.internal();
  for (const Vertex& x : T.leaves()) forced.insert(x);
  std::set<Vertex> points{Vertex::root(), Vertex::v1()};
  for (const Vertex& x : T.vertices()) points.insert(x);
  CompleteSubtree base = complete_hull(d, points, forced);
  std::map<Vertex, Perm> internal, tails;
  for (const Vertex& w : base.internal()) {
    if (T.is_internal(w)) {
      internal.emplace(w, Perm::identity(d));
    } else {
      // leaf of T: must fix the color toward its T-neighbor
      int c = 0;
      for (int a = 1; a <= d; ++a)
        if (T.is_internal(w.neighbor(a))) c = a;
      if (c == 0) c = w.toward_e0_color();  // T = e0
      internal.emplace(w, random_element(P.F().point_stabilizer(c), rng));
    }
  }
  for (const Vertex& y : base.leaves()) {
    Vertex n;
    for (int a = 1; a <= d; ++a)
      if (base.is_internal(y.neighbor(a))) n = y.neighbor(a);
    int col = (n.length() < y.length()) ? y.last_letter() : n.last_letter();
    auto s = random_mapping(P.F(), col, internal.at(n)(col), rng);
    if (!s) throw domain_error("random_uf_fixing: no routing element in F");
    tails.emplace(y, *s);
  }
  Vertex anchor = *T.vertices().begin();
  return Portrait::from_local_data(d, base.internal(), anchor, anchor, internal, tails);
}

inline bool fixes_pointwise(const Portrait& g, const std::set<Vertex>& vs) {
  for (const Vertex& v : vs)
    if (g.apply(v) != v) return false;
  return true;
}

// Samples `trials` elements u of U(F) fixing T(g) pointwise and checks that
// g u g^-1 stays in U(F) and fixes g(T(g)).
inline bool conjugation_commensuration_check(const GroupPair& P, const Portrait& g,
                                             int trials, uint64_t seed = 12345) {
  require_in_gffp(P, g, "conjugation_commensuration_check");
  std::mt19937_64 rng(seed);
  CompleteSubtree T = singular_subtree(P, g);
  std::set<Vertex> image;
  for (const Vertex& v : T.vertices()) image.insert(g.apply(v));
  Portrait gi = g.inverse();
  for (int t = 0; t < trials; ++t) {
    Portrait u = random_uf_fixing(P, T, rng);
    if (!is_in_UF(P, u) || !fixes_pointwise(u, T.vertices()))
      throw domain_error("sampled element does not fix T(g)");
    Portrait c = g * u * gi;
    if (!is_in_UF(P, c) || !fixes_pointwise(c, image)) return false;
  }
  return true;
}

}  // namespace almostlocal
