#pragma once

#include "gff.hpp"

namespace almostlocal {

// One commutator factor [alpha, beta] with alpha, beta in F' fixing the
// common point a; realized by portraits fixing the color-a edge at some
// vertex.
struct CommutatorFactor {
  Perm alpha, beta;
  int fixed_point = 0;
};

using CommutatorExpr = std::vector<CommutatorFactor>;

// Expressions of elements of <[F'_a, F'_a]> as short products of
// commutators of point-stabilizer pairs, found by breadth-first search over
// the distinct single-commutator values.
class CommutatorTable {
public:
  CommutatorTable(const GroupPair& P, int max_factors = 3) {
    const PermGroup& Fp = P.Fp();
    long pairs = 0;
    for (int a = 1; a <= P.degree(); ++a) {
      long s = Fp.point_stabilizer(a).order();
      pairs += s * s;
    }
    if (pairs > 2000000) throw domain_error("commutator table too large for this pair");
    std::map<Perm, CommutatorFactor> pool;
    for (int a = 1; a <= P.degree(); ++a) {
      PermGroup Sa = Fp.point_stabilizer(a);
      for (const Perm& x : Sa.elements())
        for (const Perm& y : Sa.elements()) {
          Perm c = x * y * x.inverse() * y.inverse();
          if (!pool.count(c)) pool.emplace(c, CommutatorFactor{x, y, a});
        }
    }
    exprs_.emplace(Perm::identity(P.degree()), CommutatorExpr{});
    std::vector<Perm> frontier{Perm::identity(P.degree())};
    for (int depth = 0; depth < max_factors && !frontier.empty(); ++depth) {
      std::vector<Perm> next;
      for (const Perm& e : frontier)
        for (const auto& [c, w] : pool) {
          Perm r = e * c;
          if (exprs_.count(r)) continue;
          CommutatorExpr expr = exprs_.at(e);
          expr.push_back(w);
          exprs_.emplace(r, std::move(expr));
          next.push_back(r);
        }
      frontier = std::move(next);
    }
  }

  bool covers(const Perm& rho) const { return exprs_.count(rho) != 0; }

  const CommutatorExpr& expression(const Perm& rho) const {
    auto it = exprs_.find(rho);
    if (it == exprs_.end())
      throw domain_error(
          "no short commutator expression: element outside <[F'_a,F'_a]> or bound too small");
    return it->second;
  }

private:
  std::map<Perm, CommutatorExpr> exprs_;
};

// A certified element gamma of N(F,F') fixing `at`: the witness records the
// commutator factors [g_k, h_k], each pair fixing the color-a_k edge at
// `at` pointwise; their ordered product re-multiplies to gamma.
struct GammaCertificate {
  Vertex at;
  Perm rho;
  Portrait gamma;
  std::vector<std::pair<Portrait, Portrait>> witness;
  std::vector<int> edge_colors;
};

inline void verify_gamma_certificate(const GroupPair& P, const GammaCertificate& cert) {
  const int d = P.degree();
  Portrait prod = Portrait::identity(d);
  for (size_t k = 0; k < cert.witness.size(); ++k) {
    const auto& [gk, hk] = cert.witness[k];
    Vertex other = cert.at.neighbor(cert.edge_colors[k]);
    for (const Portrait* p : {&gk, &hk}) {
      if (p->apply(cert.at) != cert.at || p->apply(other) != other)
        throw domain_error("certificate witness does not fix its named edge");
      if (!is_in_GFFp(P, *p)) throw domain_error("certificate witness escapes G(F,F')");
    }
    prod = prod * (gk * hk * gk.inverse() * hk.inverse());
  }
  if (prod != cert.gamma) throw domain_error("certificate product does not equal gamma");
  if (cert.gamma.local(cert.at) != cert.rho)
    throw domain_error("certificate gamma has the wrong local permutation");
  for (const auto& [w, s] : cert.gamma.internal_perms())
    if (w != cert.at && !P.F().contains(s))
      throw domain_error("certificate gamma acts outside F away from its vertex");
  if (!tails_in(P.F(), cert.gamma))
    throw domain_error("certificate gamma has tails outside F");
}

// Realizes rho in <[F'_a,F'_a]> as gamma in N(F,F') with sigma(gamma,v) =
// rho and local action in F elsewhere, with a re-verifiable witness.
inline GammaCertificate gamma_uf(const GroupPair& P, const CommutatorTable& table,
                                 const Perm& rho, const Vertex& v) {
  GammaCertificate cert{v, rho, Portrait::identity(P.degree()), {}, {}};
  for (const CommutatorFactor& f : table.expression(rho)) {
    Portrait gk = star_element(P, v, f.alpha);
    Portrait hk = star_element(P, v, f.beta);
    cert.witness.emplace_back(gk, hk);
    cert.edge_colors.push_back(f.fixed_point);
    cert.gamma = cert.gamma * (gk * hk * gk.inverse() * hk.inverse());
  }
  verify_gamma_certificate(P, cert);
  return cert;
}

// The constructive content of the simplicity theorem for pairs with
// F' = <[F'_a,F'_a] union F_a>: a chain of certified gamma steps driving a
// type-preserving element into U(F)*.
struct SimplicityCertificate {
  std::vector<GammaCertificate> steps;
  Portrait residual;  // = gamma_m ... gamma_1 * g, in U(F)*
};

inline SimplicityCertificate reduce_simple(const GroupPair& P, const Portrait& g,
                                           int max_commutators = 3) {
  require_in_gffp(P, g, "reduce_simple");
  if (!P.F().transitive()) throw domain_error("reduce_simple: F must be transitive");
  if (!(P.functors().mixed_closure == P.Fp()))
    throw domain_error("reduce_simple: F' is not generated by [F'_a,F'_a] and F_a");
  if (!g.type_preserving()) throw domain_error("reduce_simple: element is not type-preserving");
  CommutatorTable table(P, max_commutators);
  const PermGroup& D = P.functors().derived_stab_closure;
  SimplicityCertificate out{{}, g};
  Portrait cur = g;
  for (;;) {
    std::set<Vertex> S = singular_vertices(P, cur);
    if (S.empty()) break;
    Vertex v = *S.begin();
    Perm target = cur.local(v);
    std::optional<Perm> rho;
    for (const Perm& r : D.elements())
      if (P.F().contains(r * target)) {
        rho = r;
        break;
      }
    if (!rho) throw domain_error("reduce_simple: no correcting element in <[F'_a,F'_a]>");
    GammaCertificate cert = gamma_uf(P, table, *rho, cur.apply(v));
    cur = cert.gamma * cur;
    if (singular_vertices(P, cur).size() != S.size() - 1)
      throw domain_error("reduce_simple failed to remove a singularity");
    out.steps.push_back(std::move(cert));
  }
  out.residual = cur;
  if (!is_in_UF(P, out.residual) || !out.residual.type_preserving())
    throw domain_error("reduce_simple residual is not in U(F)*");
  Portrait check = g;
  for (const GammaCertificate& c : out.steps) check = c.gamma * check;
  if (check != out.residual) throw domain_error("reduce_simple re-multiplication failed");
  return out;
}

// ---------------------------------------------------------------------------
// the index-two machinery: elements with prescribed Sigma-singularities

inline void require_index_two(const GroupPair& P, const PermGroup& Fpp) {
  if (!P.F().is_subgroup_of(Fpp) || !Fpp.is_subgroup_of(P.Fp()))
    throw domain_error("F'' must sit between F and F'");
  if (P.Fp().order() != 2 * Fpp.order())
    throw domain_error("F'' must have index two in F'");
}

// gamma = [g2, g1] with Sigma(gamma) = {v, w}, for v != w at even distance.
inline Portrait make_two_singular(const GroupPair& P, const PermGroup& Fpp, const Vertex& v,
                                  const Vertex& w) {
  require_index_two(P, Fpp);
  if (v == w) throw domain_error("make_two_singular: vertices must differ");
  if (distance(v, w) % 2 != 0)
    throw domain_error("make_two_singular: vertices must be at even distance");
  std::optional<Perm> rho;
  for (const Perm& s : P.Fp().elements())
    if (!Fpp.contains(s)) {
      rho = s;
      break;
    }
  if (!rho) throw domain_error("make_two_singular: F'' equals F'");
  Portrait g1 = star_element(P, v, *rho);           // fixes v, Sigma = {v}
  Portrait g2 = uf_moving(P.degree(), v, g1.apply_inverse(w));
  Portrait gamma = g2 * g1 * g2.inverse() * g1.inverse();
  SingularityReport rep = singularity_report(P, gamma, Fpp);
  if (rep.Sigma != std::set<Vertex>{v, w})
    throw domain_error("make_two_singular produced the wrong Sigma set");
  return gamma;
}

// The Sigma-reduction loop: cancels Sigma-singularities in pairs, leaving a
// residual in G(F,F'')*. Requires |Sigma_0| and |Sigma_1| both even.
struct SigmaReduction {
  std::vector<Portrait> steps;  // the gamma factors, in application order
  Portrait residual;            // = gamma_m ... gamma_1 * g
};

inline SigmaReduction sigma_reduce(const GroupPair& P, const PermGroup& Fpp,
                                   const Portrait& g) {
  require_index_two(P, Fpp);
  require_in_gffp(P, g, "sigma_reduce");
  if (!g.type_preserving()) throw domain_error("sigma_reduce: element is not type-preserving");
  auto sigma_parity = [&](const Portrait& x, int par) {
    int n = 0;
    for (const auto& [u, s] : x.internal_perms())
      if (u.parity() == par && !Fpp.contains(s)) ++n;
    return n;
  };
  if (sigma_parity(g, 0) % 2 || sigma_parity(g, 1) % 2)
    throw domain_error("sigma_reduce: Sigma-parity classes must have even cardinality");
  SigmaReduction out{{}, g};
  Portrait cur = g;
  for (;;) {
    SingularityReport rep = singularity_report(P, cur, Fpp);
    if (rep.Sigma.empty()) break;
    std::optional<std::pair<Vertex, Vertex>> pick;
    for (auto i = rep.Sigma.begin(); i != rep.Sigma.end() && !pick; ++i)
      for (auto j = std::next(i); j != rep.Sigma.end() && !pick; ++j)
        if (i->parity() == j->parity()) pick = std::make_pair(*i, *j);
    if (!pick) throw domain_error("sigma_reduce: no even-distance pair available");
    Portrait gamma =
        make_two_singular(P, Fpp, cur.apply(pick->first), cur.apply(pick->second));
    cur = gamma * cur;
    SingularityReport after = singularity_report(P, cur, Fpp);
    std::set<Vertex> expected = rep.Sigma;
    expected.erase(pick->first);
    expected.erase(pick->second);
    if (after.Sigma != expected)
      throw domain_error("sigma_reduce step did not cancel the chosen pair");
    out.steps.push_back(std::move(gamma));
  }
  out.residual = cur;
  if (!internals_in(Fpp, out.residual) || !tails_in(P.F(), out.residual) ||
      !out.residual.type_preserving())
    throw domain_error("sigma_reduce residual is not in G(F,F'')*");
  Portrait check = g;
  for (const Portrait& s : out.steps) check = s * check;
  if (check != out.residual) throw domain_error("sigma_reduce re-multiplication failed");
  return out;
}

}  // namespace almostlocal
