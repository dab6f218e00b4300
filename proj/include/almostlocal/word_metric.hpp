#pragma once

#include <functional>

#include "gff.hpp"

namespace almostlocal {

// Fixed translations h_i = constant(sigma_i, v1), sigma_i in F with
// sigma_i(1) = i. The family is chosen so that i -> sigma_i^{-1}(1) is a
// bijection of {2..d}: h_i carries L(v1) onto L(v1.i) and, dually, h_i
// carries the branch at color sigma_i^{-1}(1) of v0 onto L(v0), which the
// branch recursions below need. Such a system always exists (the pair
// counts m(i,j) = #{sigma : sigma(1)=i, sigma(j)=1} form a matrix with
// constant positive line sums); we take the lexicographically smallest
// completable assignment.
class TranslationSystem {
public:
  explicit TranslationSystem(const GroupPair& P) : degree_(P.degree()) {
    if (!P.F().transitive()) throw domain_error("translation system needs F transitive");
    const int d = degree_;
    std::vector<std::vector<bool>> adj(d + 1, std::vector<bool>(d + 1, false));
    for (const Perm& s : P.F().elements())
      if (s(1) != 1) adj[s(1)][s.inverse()(1)] = true;
    std::vector<bool> used(d + 1, false);
    sigma_.assign(d + 1, Perm::identity(d));
    branch_index_.assign(d + 1, 0);
    for (int i = 2; i <= d; ++i) {
      bool done = false;
      for (const Perm& s : P.F().elements()) {
        if (s(1) != i) continue;
        int j = s.inverse()(1);
        if (used[j]) continue;
        used[j] = true;
        if (completable(adj, used, i + 1)) {
          sigma_[i] = s;
          branch_index_[j] = i;
          done = true;
          break;
        }
        used[j] = false;
      }
      if (!done) throw domain_error("translation system assignment failed");
    }
  }

  int degree() const { return degree_; }
  const Perm& sigma(int i) const { return sigma_[i]; }
  Portrait h(int i) const { return Portrait::constant(sigma_[i], Vertex::v1()); }
  // The generator index i with sigma_i^{-1}(1) = j.
  int index_for_branch(int j) const { return branch_index_[j]; }

private:
  // Can rows from..d still be matched into the unused columns?
  bool completable(const std::vector<std::vector<bool>>& adj, std::vector<bool> used,
                   int from) const {
    const int d = degree_;
    std::vector<int> match(d + 1, 0);
    for (int j = 2; j <= d; ++j)
      if (used[j]) match[j] = -1;
    std::function<bool(int, std::vector<bool>&)> augment = [&](int i,
                                                               std::vector<bool>& seen) {
      for (int j = 2; j <= d; ++j) {
        if (!adj[i][j] || match[j] == -1 || seen[j]) continue;
        seen[j] = true;
        if (match[j] == 0 || augment(match[j], seen)) {
          match[j] = i;
          return true;
        }
      }
      return false;
    };
    for (int i = from; i <= d; ++i) {
      std::vector<bool> seen(d + 1, false);
      if (!augment(i, seen)) return false;
    }
    return true;
  }

  int degree_;
  std::vector<Perm> sigma_;
  std::vector<int> branch_index_;
};

// ---------------------------------------------------------------------------
// generating word letters

struct GenLetter {
  enum class Kind { Translation, Local };
  Kind kind;
  int index = 0;     // translation index i in 2..d
  int exponent = 1;  // +-1, translations only
  Vertex at;         // v0 or v1, local letters only
  Portrait element;
};

struct GenWord {
  int degree;
  std::vector<GenLetter> letters;

  Portrait product() const {
    Portrait p = Portrait::identity(degree);
    for (const GenLetter& l : letters) p = p * l.element;
    return p;
  }
};

// Validates the structural invariants of a generating word.
inline void check_genword(const GroupPair& P, const GenWord& w) {
  for (const GenLetter& l : w.letters) {
    if (l.kind == GenLetter::Kind::Local) {
      if (!(l.at == Vertex::root() || l.at == Vertex::v1()))
        throw domain_error("local letter is not based at v0 or v1");
      if (l.element.apply(l.at) != l.at) throw domain_error("local letter moves its vertex");
      std::set<Vertex> S = singular_vertices(P, l.element);
      S.erase(l.at);
      if (!S.empty() || !tails_in(P.F(), l.element) || !internals_in(P.Fp(), l.element))
        throw domain_error("local letter is not in K_{0,F'}(v)");
    } else {
      if (!is_in_UF(P, l.element)) throw domain_error("translation letter escapes U(F)");
    }
  }
}

// ---------------------------------------------------------------------------
// branch restriction surgery

// The element acting like g on the half-tree of words prefixed by x and
// trivially elsewhere. Requires g to fix x and its parent.
inline Portrait restrict_to_branch(const Portrait& g, const Vertex& x) {
  const int d = g.degree();
  if (x.is_root()) throw domain_error("restrict_to_branch: x must differ from v0");
  if (g.apply(x) != x || g.apply(x.parent()) != x.parent())
    throw domain_error("restrict_to_branch: g must fix the branch boundary");
  std::set<Vertex> points{Vertex::root(), Vertex::v1(), x};
  std::set<Vertex> forced = g.base().internal();
  forced.insert(x.parent());
  for (const Vertex& w : g.base().vertices()) points.insert(w);
  CompleteSubtree T = complete_hull(d, points, forced);
  std::map<Vertex, Perm> internal, tails;
  for (const Vertex& w : T.internal())
    internal.emplace(w, w.has_prefix(x) ? g.local(w) : Perm::identity(d));
  for (const Vertex& y : T.leaves())
    tails.emplace(y, y.has_prefix(x) ? g.local(y) : Perm::identity(d));
  return Portrait::from_local_data(d, T.internal(), x, x, internal, tails);
}

// ---------------------------------------------------------------------------
// the word decomposition

namespace detail {

struct WordContext {
  const GroupPair& P;
  const TranslationSystem& sys;

  GenLetter translation(int i, int exp) const {
    Portrait e = sys.h(i);
    if (exp < 0) e = e.inverse();
    return GenLetter{GenLetter::Kind::Translation, i, exp, Vertex::root(), std::move(e)};
  }

  GenLetter local(const Vertex& at, const Portrait& e) const {
    return GenLetter{GenLetter::Kind::Local, 0, 1, at, e};
  }

  // kills sigma(g, v) with a star element at v whose outward routing is
  // lexicographically smallest in F (identity toward e0)
  Portrait killer(const Vertex& v, const Perm& s) const {
    return star_element(P, v, s.inverse());
  }

  void append(std::vector<GenLetter>& out, const std::vector<GenLetter>& tail) const {
    out.insert(out.end(), tail.begin(), tail.end());
  }

  // g fixing L(v0) pointwise
  std::vector<GenLetter> word_fix_L0(const Portrait& g, long n_bound) const {
    std::vector<GenLetter> out;
    if (g.is_identity()) return out;
    long n = length_N(P, g);
    if (n > n_bound) throw domain_error("word recursion failed to shrink the diagram");
    if (n == 0) {
      out.push_back(local(Vertex::v1(), g));
      return out;
    }
    Portrait u = killer(Vertex::v1(), g.local(Vertex::v1()));
    Portrait gp = u * g;  // fixes star(v1) and L(v0)
    out.push_back(local(Vertex::v1(), u.inverse()));
    Portrait rebuilt = Portrait::identity(P.degree());
    for (int i = 2; i <= P.degree(); ++i) {
      Portrait gi = restrict_to_branch(gp, Vertex::v1().neighbor(i));
      if (gi.is_identity()) continue;
      rebuilt = rebuilt * gi;
      Portrait h = sys.h(i);
      Portrait gip = h.inverse() * gi * h;  // fixes L(v0) again, smaller diagram
      out.push_back(translation(i, +1));
      append(out, word_fix_L0(gip, n - 1));
      out.push_back(translation(i, -1));
    }
    if (rebuilt != gp) throw domain_error("branch split lost part of the element");
    return out;
  }

  // g fixing L(v1) pointwise
  std::vector<GenLetter> word_fix_L1(const Portrait& g, long n_bound) const {
    std::vector<GenLetter> out;
    if (g.is_identity()) return out;
    long n = length_N(P, g);
    if (n > n_bound) throw domain_error("word recursion failed to shrink the diagram");
    if (n == 0) {
      out.push_back(local(Vertex::root(), g));
      return out;
    }
    Portrait u = killer(Vertex::root(), g.local(Vertex::root()));
    Portrait gp = u * g;  // fixes star(v0) and L(v1)
    out.push_back(local(Vertex::root(), u.inverse()));
    Portrait rebuilt = Portrait::identity(P.degree());
    for (int j = 2; j <= P.degree(); ++j) {
      Portrait gj = restrict_to_branch(gp, Vertex::root().neighbor(j));
      if (gj.is_identity()) continue;
      rebuilt = rebuilt * gj;
      int i = sys.index_for_branch(j);  // h_i carries this branch onto L(v0)
      Portrait h = sys.h(i);
      Portrait gjp = h * gj * h.inverse();  // fixes L(v1) again, smaller diagram
      out.push_back(translation(i, -1));
      append(out, word_fix_L1(gjp, n - 1));
      out.push_back(translation(i, +1));
    }
    if (rebuilt != gp) throw domain_error("branch split lost part of the element");
    return out;
  }

  // g fixing v1
  std::vector<GenLetter> word_fix_v1(const Portrait& g) const {
    std::vector<GenLetter> out;
    if (g.is_identity()) return out;
    Portrait u = killer(Vertex::v1(), g.local(Vertex::v1()));
    Portrait gp = u * g;  // fixes the star around v1
    out.push_back(local(Vertex::v1(), u.inverse()));
    Portrait g0 = restrict_to_branch(gp, Vertex::v1());  // acts on L(v1) only
    Portrait g1 = gp * g0.inverse();                     // acts on L(v0) only
    long n = length_N(P, gp);
    append(out, word_fix_L0(g0, n));
    append(out, word_fix_L1(g1, n));
    return out;
  }

  // gamma in U(F), peeled along the geodesic of gamma(v1)
  std::vector<GenLetter> word_uf(const Portrait& gamma) const {
    std::vector<GenLetter> out;
    Portrait cur = gamma;
    for (;;) {
      Vertex w = cur.apply(Vertex::v1());
      if (w == Vertex::v1()) {
        if (!cur.is_identity()) out.push_back(local(Vertex::v1(), cur));
        return out;
      }
      if (w.has_prefix(Vertex::v1())) {
        int i = w.letter(1);
        out.push_back(translation(i, +1));
        cur = sys.h(i).inverse() * cur;
      } else {
        out.push_back(translation(2, -1));
        cur = sys.h(2) * cur;
      }
    }
  }
};

}  // namespace detail

// Writes g as a word in the translations h_i and the subgroups K_{0,F'}(v0),
// K_{0,F'}(v1), with N(g) <= length <= (3d-2) N(g) + 3d + 2.
inline GenWord word_decompose(const GroupPair& P, const TranslationSystem& sys,
                              const Portrait& g) {
  require_in_gffp(P, g, "word_decompose");
  detail::WordContext ctx{P, sys};
  GenWord w{P.degree(), {}};
  if (is_in_UF(P, g)) {
    w.letters = ctx.word_uf(g);
  } else if (!g.is_identity()) {
    Vertex target = g.apply(Vertex::v1());
    Portrait gamma = target == Vertex::v1()
                         ? Portrait::identity(P.degree())
                         : plain_translation(P.degree(), target) *
                               plain_translation(P.degree(), Vertex::v1());
    Portrait gp = gamma.inverse() * g;  // fixes v1
    w.letters = ctx.word_uf(gamma);
    ctx.append(w.letters, ctx.word_fix_v1(gp));
  }
  check_genword(P, w);
  if (w.product() != g) throw domain_error("word_decompose re-multiplication failed");
  long n = length_N(P, g);
  long len = static_cast<long>(w.letters.size());
  long d = P.degree();
  if (len < n || len > (3 * d - 2) * n + 3 * d + 2)
    throw domain_error("word_decompose length bound violated");
  return w;
}

}  // namespace almostlocal
