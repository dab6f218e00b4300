#pragma once

#include "gff.hpp"

namespace almostlocal {

// ---------------------------------------------------------------------------
// the commensurated coset family M_v

struct CosetMv {
  bool nonempty = false;
  std::optional<Portrait> witness;
};

// M_v is nonempty iff the color of the edge from v toward e0 lies in the
// F-orbit of 1; the witness is the constant automorphism over the smallest
// routing permutation, carrying L(v0) onto L(v).
inline CosetMv coset_M(const GroupPair& P, const Vertex& v) {
  CosetMv out;
  int color = v.toward_e0_color();
  auto s = smallest_mapping(P.F(), 1, color);
  if (!s) return out;
  out.nonempty = true;
  out.witness = Portrait::constant(*s, v);
  return out;
}

// Literal membership test for M_v: x carries L(v0) onto L(v) and acts
// locally like F everywhere on L(v0).
inline bool is_in_Mv(const GroupPair& P, const Portrait& x, const Vertex& v) {
  if (x.apply(Vertex::root()) != v) return false;
  if (x.apply(Vertex::v1()) != v.neighbor(v.toward_e0_color())) return false;
  auto in_L0 = [](const Vertex& w) { return !w.has_prefix(Vertex::v1()); };
  for (const auto& [w, s] : x.internal_perms())
    if (in_L0(w) && !P.F().contains(s)) return false;
  for (const auto& [w, s] : x.tail_perms())
    if (in_L0(w) && !P.F().contains(s)) return false;
  return true;
}

// #(gM triangle M) = 2 N(g), computed from the diagram of g.
inline long symdiff_M(const GroupPair& P, const Portrait& g) {
  if (!P.F().transitive()) throw domain_error("symdiff_M: F must be transitive");
  return 2 * length_N(P, g);
}

// Independent oracle: counts displaced cosets literally, testing
// g*witness(v) against M_{g(v)} for every v in a ball that covers the
// diagram with margin.
inline long symdiff_M_oracle(const GroupPair& P, const Portrait& g) {
  if (!P.F().transitive()) throw domain_error("symdiff_M_oracle: F must be transitive");
  auto displaced = [&](const Portrait& x) {
    SingularityReport rep = singularity_report(P, x);
    long count = 0;
    for (const Vertex& v : ball(Vertex::root(), rep.Tminus.depth() + 2, P.degree())) {
      CosetMv mv = coset_M(P, v);
      if (!mv.nonempty) throw domain_error("symdiff_M_oracle: empty coset under transitive F");
      if (!is_in_Mv(P, x * *mv.witness, x.apply(v))) ++count;
    }
    return count;
  };
  return displaced(g) + displaced(g.inverse());
}

// ---------------------------------------------------------------------------
// cocompact reduction across an inclusion G(F,F') <= G(H,H')

struct CocompactReduction {
  Portrait gamma;  // in G(F,F'), fixes v0
  Portrait k;      // = g * gamma, in U(H), fixes v0
};

// Writes g in G(H,H')_{v0} as k * gamma^-1 with k in U(H)_{v0} and gamma in
// G(F,F')_{v0}, by peeling H-singularities with F'-corrections. Requires
// F <= H, F' <= H' and H' = H F'.
inline CocompactReduction cocompact_reduce(const GroupPair& Fpair, const GroupPair& Hpair,
                                           const Portrait& g) {
  if (Fpair.degree() != Hpair.degree()) throw domain_error("cocompact_reduce: degree mismatch");
  if (!Fpair.F().is_subgroup_of(Hpair.F()) || !Fpair.Fp().is_subgroup_of(Hpair.Fp()))
    throw domain_error("cocompact_reduce: pairs are not nested");
  if (!product_set_equals(Hpair.F(), Fpair.Fp(), Hpair.Fp()))
    throw domain_error("cocompact_reduce: H' = H F' fails");
  require_in_gffp(Hpair, g, "cocompact_reduce");
  if (!g.apply(Vertex::root()).is_root())
    throw domain_error("cocompact_reduce: element must fix v0");

  auto h_singular = [&](const Portrait& x) {
    std::set<Vertex> S;
    for (const auto& [v, s] : x.internal_perms())
      if (!Hpair.F().contains(s)) S.insert(v);
    return S;
  };
  Portrait cur = g;
  Portrait gamma = Portrait::identity(Fpair.degree());
  size_t guard = h_singular(cur).size() + 1;
  for (;;) {
    std::set<Vertex> S = h_singular(cur);
    if (S.empty()) break;
    if (S.size() >= guard) throw domain_error("cocompact_reduce failed to peel a singularity");
    guard = S.size();
    Vertex v = *S.begin();
    int a = v.toward_e0_color();
    std::optional<Perm> fix;
    for (const Perm& s : Fpair.Fp().elements())
      if (s.fixes(a) && Hpair.F().contains(cur.local(v) * s)) {
        fix = s;
        break;
      }
    if (!fix)
      throw domain_error("cocompact_reduce: no correcting element in F'_a (H' = H F' fails?)");
    Portrait step = star_element(Fpair, v, *fix);
    cur = cur * step;
    gamma = gamma * step;
  }
  CocompactReduction out{gamma, cur};
  if (g * out.gamma != out.k) throw domain_error("cocompact_reduce re-multiplication failed");
  if (!is_in_UF(Hpair, out.k) || !out.k.apply(Vertex::root()).is_root())
    throw domain_error("cocompact_reduce residual escaped U(H)_{v0}");
  if (!is_in_GFFp(Fpair, out.gamma) || !out.gamma.apply(Vertex::root()).is_root())
    throw domain_error("cocompact_reduce gamma escaped G(F,F')_{v0}");
  return out;
}

}  // namespace almostlocal
