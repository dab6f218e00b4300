#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "perm.hpp"

namespace almostlocal {

// Default caps for fully enumerated groups. Every example in scope fits;
// both can be raised by callers that know what they are doing.
inline constexpr int kMaxDegree = 16;
inline constexpr long kMaxOrder = 40320;

// A finite permutation group on {1..d}, stored fully enumerated as a sorted
// element list. All predicates are exhaustive checks over that list.
class PermGroup {
public:
  PermGroup() = default;

  static PermGroup generated_by(int degree, std::vector<Perm> gens,
                                long max_order = kMaxOrder) {
    // scratch products (e.g. graph subgroups of G x Sym(m)) may exceed the
    // public degree cap enforced by the group families
    if (degree < 1 || degree > 2 * kMaxDegree)
      throw domain_error("degree out of supported range");
    for (const Perm& g : gens)
      if (g.degree() != degree) throw domain_error("generator degree mismatch");
    PermGroup G;
    G.degree_ = degree;
    G.gens_ = gens;
    std::set<Perm> closure;
    closure.insert(Perm::identity(degree));
    std::vector<Perm> frontier(closure.begin(), closure.end());
    while (!frontier.empty()) {
      std::vector<Perm> next;
      for (const Perm& x : frontier) {
        for (const Perm& g : gens) {
          Perm y = g * x;
          if (closure.insert(y).second) next.push_back(y);
        }
        if (static_cast<long>(closure.size()) > max_order)
          throw domain_error("group order exceeds enumeration cap");
      }
      frontier = std::move(next);
    }
    G.elems_.assign(closure.begin(), closure.end());
    return G;
  }

  static PermGroup trivial(int degree) { return generated_by(degree, {}); }

  // Wraps an element list that is already a subgroup; no closure is run.
  static PermGroup from_closed_elements(int degree, std::vector<Perm> elems) {
    PermGroup G;
    G.degree_ = degree;
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    G.elems_ = std::move(elems);
    return G;
  }

  int degree() const { return degree_; }
  long order() const { return static_cast<long>(elems_.size()); }
  const std::vector<Perm>& elements() const { return elems_; }
  const std::vector<Perm>& generators() const { return gens_; }

  bool contains(const Perm& p) const {
    return std::binary_search(elems_.begin(), elems_.end(), p);
  }

  bool is_subgroup_of(const PermGroup& G) const {
    if (degree_ != G.degree_) return false;
    for (const Perm& p : elems_)
      if (!G.contains(p)) return false;
    return true;
  }

  friend bool operator==(const PermGroup& a, const PermGroup& b) {
    return a.degree_ == b.degree_ && a.elems_ == b.elems_;
  }
  friend bool operator!=(const PermGroup& a, const PermGroup& b) { return !(a == b); }
  friend bool operator<(const PermGroup& a, const PermGroup& b) { return a.elems_ < b.elems_; }

  std::vector<int> orbit(int a) const {
    std::vector<bool> seen(degree_ + 1, false);
    std::vector<int> out{a};
    seen[a] = true;
    for (size_t i = 0; i < out.size(); ++i)
      for (const Perm& g : gens_.empty() ? elems_ : gens_) {
        int b = g(out[i]);
        if (!seen[b]) {
          seen[b] = true;
          out.push_back(b);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Orbits sorted by smallest point.
  std::vector<std::vector<int>> orbits() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> done(degree_ + 1, false);
    for (int a = 1; a <= degree_; ++a) {
      if (done[a]) continue;
      auto orb = orbit(a);
      for (int b : orb) done[b] = true;
      out.push_back(std::move(orb));
    }
    return out;
  }

  bool transitive() const { return static_cast<int>(orbit(1).size()) == degree_; }

  PermGroup point_stabilizer(int a) const {
    if (a < 1 || a > degree_) throw domain_error("point out of range 1..d");
    std::vector<Perm> fix;
    for (const Perm& g : elems_)
      if (g.fixes(a)) fix.push_back(g);
    PermGroup H;
    H.degree_ = degree_;
    H.gens_ = fix;
    H.elems_ = std::move(fix);
    return H;
  }

  // Free action: only the identity fixes a point.
  bool acts_freely() const {
    for (const Perm& g : elems_) {
      if (g.is_identity()) continue;
      for (int a = 1; a <= degree_; ++a)
        if (g.fixes(a)) return false;
    }
    return true;
  }

  bool simply_transitive() const { return transitive() && order() == degree_; }

private:
  int degree_ = 0;
  std::vector<Perm> gens_;
  std::vector<Perm> elems_;
};

struct OrbitData {
  std::vector<std::vector<int>> orbits;
  bool transitive = false;
  bool free = false;
  bool simply_transitive = false;
};

inline OrbitData orbit_data(const PermGroup& G) {
  OrbitData r;
  r.orbits = G.orbits();
  r.transitive = r.orbits.size() == 1;
  r.free = G.acts_freely();
  r.simply_transitive = r.transitive && r.free;
  return r;
}

// N_G(H) = {g in G : g H g^-1 = H}, by exhaustive check. Conjugating the
// generators of H suffices: conjugation is injective and |gHg^-1| = |H|.
inline PermGroup normalizer(const PermGroup& G, const PermGroup& H) {
  if (!H.is_subgroup_of(G)) throw domain_error("normalizer: H is not a subgroup of G");
  std::vector<Perm> gens = H.generators().empty() ? H.elements() : H.generators();
  std::vector<Perm> out;
  for (const Perm& g : G.elements()) {
    Perm gi = g.inverse();
    bool ok = true;
    for (const Perm& h : gens)
      if (!H.contains(g * h * gi)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(g);
  }
  return PermGroup::from_closed_elements(G.degree(), std::move(out));
}

inline PermGroup intersection(const PermGroup& A, const PermGroup& B) {
  if (A.degree() != B.degree()) throw domain_error("intersection: degree mismatch");
  std::vector<Perm> both;
  for (const Perm& p : A.elements())
    if (B.contains(p)) both.push_back(p);
  return PermGroup::from_closed_elements(A.degree(), std::move(both));
}

inline long intersection_order(const PermGroup& A, const PermGroup& B) {
  long n = 0;
  for (const Perm& p : A.elements())
    if (B.contains(p)) ++n;
  return n;
}

// Whether the set {h f : h in H, f in Fp} is all of Hp, decided through
// |H Fp| = |H||Fp| / |H n Fp|.
inline bool product_set_equals(const PermGroup& H, const PermGroup& Fp, const PermGroup& Hp) {
  if (H.degree() != Fp.degree() || H.degree() != Hp.degree())
    throw domain_error("product_set_equals: degree mismatch");
  if (!H.is_subgroup_of(Hp) || !Fp.is_subgroup_of(Hp))
    throw domain_error("product_set_equals: factors not inside Hp");
  long inter = intersection_order(H, Fp);
  return H.order() * Fp.order() == Hp.order() * inter;
}

// D is essential in Dp iff D contains every element of prime order of Dp
// (for finite groups this matches meeting every nontrivial subgroup).
inline bool is_essential(const PermGroup& D, const PermGroup& Dp) {
  if (!D.is_subgroup_of(Dp)) throw domain_error("is_essential: D is not a subgroup of Dp");
  for (const Perm& g : Dp.elements()) {
    int n = g.order();
    if (n < 2) continue;
    bool prime = true;
    for (int q = 2; q * q <= n; ++q)
      if (n % q == 0) {
        prime = false;
        break;
      }
    if (prime && !D.contains(g)) return false;
  }
  return true;
}

// All subgroups of G, deduplicated by element set. Seeds are closures of
// all <= 2-element subsets; the fixpoint pass closes <H, g> for every found
// H and g outside it, so every subgroup is reached. Double cosets HgH give
// the same closure and are skipped.
inline std::vector<PermGroup> all_subgroups(const PermGroup& G) {
  std::set<std::vector<Perm>> seen;
  std::vector<PermGroup> out;
  auto add = [&](const PermGroup& H) {
    if (seen.insert(H.elements()).second) {
      out.push_back(H);
      return true;
    }
    return false;
  };
  add(PermGroup::trivial(G.degree()));
  for (const Perm& g : G.elements())
    add(PermGroup::generated_by(G.degree(), {g}));
  for (size_t i = 0; i < G.elements().size(); ++i)
    for (size_t j = i + 1; j < G.elements().size(); ++j)
      add(PermGroup::generated_by(G.degree(), {G.elements()[i], G.elements()[j]}));
  for (size_t i = 0; i < out.size(); ++i) {
    PermGroup H = out[i];
    if (H.order() == G.order()) continue;
    std::set<Perm> skip(H.elements().begin(), H.elements().end());
    for (const Perm& g : G.elements()) {
      if (skip.count(g)) continue;
      std::vector<Perm> gens = H.elements();
      gens.push_back(g);
      add(PermGroup::generated_by(G.degree(), gens));
      for (const Perm& h1 : H.elements()) skip.insert(h1 * g);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PermGroup& a, const PermGroup& b) {
              return a.order() != b.order() ? a.order() < b.order() : a < b;
            });
  return out;
}

// Memoized subgroup enumeration keyed by the element set; scan rows hit the
// same overgroups repeatedly.
inline const std::vector<PermGroup>& all_subgroups_cached(const PermGroup& G) {
  static std::map<std::pair<int, std::vector<Perm>>, std::vector<PermGroup>> cache;
  static std::mutex lock;
  std::lock_guard<std::mutex> guard(lock);
  auto key = std::make_pair(G.degree(), G.elements());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, all_subgroups(G)).first;
  return it->second;
}

// Subgroups H with A <= H <= B.
inline std::vector<PermGroup> subgroups_between(const PermGroup& A, const PermGroup& B) {
  if (!A.is_subgroup_of(B)) throw domain_error("subgroups_between: A is not inside B");
  std::set<std::vector<Perm>> seen;
  std::vector<PermGroup> out;
  auto add = [&](const PermGroup& H) {
    if (seen.insert(H.elements()).second) out.push_back(H);
  };
  add(PermGroup::generated_by(B.degree(), A.elements()));
  for (size_t i = 0; i < out.size(); ++i) {
    PermGroup H = out[i];
    if (H.order() == B.order()) continue;
    std::set<Perm> skip(H.elements().begin(), H.elements().end());
    for (const Perm& g : B.elements()) {
      if (skip.count(g)) continue;
      std::vector<Perm> gens = H.elements();
      gens.push_back(g);
      add(PermGroup::generated_by(B.degree(), gens));
      for (const Perm& h1 : H.elements()) skip.insert(h1 * g);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PermGroup& a, const PermGroup& b) {
              return a.order() != b.order() ? a.order() < b.order() : a < b;
            });
  return out;
}

// All subgroups of index two: preimages of the hyperplanes of the
// elementary abelian quotient G / <squares>.
inline std::vector<PermGroup> index_two_subgroups(const PermGroup& G) {
  std::set<Perm> square_values;
  for (const Perm& g : G.elements()) square_values.insert(g * g);
  std::vector<Perm> kgens;
  PermGroup K = PermGroup::trivial(G.degree());
  for (const Perm& s : square_values) {
    if (K.contains(s)) continue;
    kgens.push_back(s);
    K = PermGroup::generated_by(G.degree(), kgens);
  }
  if (K.order() == G.order()) return {};
  // coset basis of the F2-vector space G/K
  std::vector<Perm> basis;
  std::vector<Perm> span = K.elements();
  std::sort(span.begin(), span.end());
  auto in_span = [&](const Perm& g) { return std::binary_search(span.begin(), span.end(), g); };
  for (const Perm& g : G.elements()) {
    if (in_span(g)) continue;
    basis.push_back(g);
    std::vector<Perm> bigger = span;
    for (const Perm& s : span) bigger.push_back(s * g);
    std::sort(bigger.begin(), bigger.end());
    span = std::move(bigger);
    if (span.size() == static_cast<size_t>(G.order())) break;
  }
  int t = static_cast<int>(basis.size());
  std::vector<PermGroup> out;
  for (unsigned mask = 1; mask < (1u << t); ++mask) {
    std::vector<Perm> elems;
    for (unsigned sub = 0; sub < (1u << t); ++sub) {
      if (__builtin_popcount(sub & mask) % 2) continue;
      Perm rep = Perm::identity(G.degree());
      for (int i = 0; i < t; ++i)
        if (sub & (1u << i)) rep = rep * basis[i];
      for (const Perm& s : K.elements()) elems.push_back(s * rep);
    }
    out.push_back(PermGroup::from_closed_elements(G.degree(), std::move(elems)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Perm> small_generating_set(const PermGroup& G);

namespace detail {

// Whether G has a transitive action on m points, decided by a search over
// generator images: the assignment g_i -> x_i extends to a homomorphism
// exactly when the graph subgroup <(g_i, x_i)> of G x Sym(m) has order |G|.
inline bool has_transitive_action(const PermGroup& G, const std::vector<Perm>& gens, int m,
                                  const std::vector<Perm>& sym_m) {
  if (G.order() % m != 0) return false;
  const int d = G.degree();
  std::vector<std::vector<Perm>> choices;
  long combos = 1;
  for (const Perm& g : gens) {
    std::vector<Perm> opts;
    for (const Perm& x : sym_m)
      if (g.order() % x.order() == 0) opts.push_back(x);
    combos *= static_cast<long>(opts.size());
    if (combos > 300000) throw domain_error("action search space too large");
    choices.push_back(std::move(opts));
  }
  std::vector<size_t> pick(gens.size(), 0);
  auto graph_gen = [&](const Perm& g, const Perm& x) {
    std::vector<uint8_t> img(d + m);
    for (int a = 1; a <= d; ++a) img[a - 1] = static_cast<uint8_t>(g(a));
    for (int b = 1; b <= m; ++b) img[d + b - 1] = static_cast<uint8_t>(d + x(b));
    return Perm::from_images(img);
  };
  for (;;) {
    std::vector<Perm> images;
    for (size_t i = 0; i < gens.size(); ++i) images.push_back(choices[i][pick[i]]);
    PermGroup image = PermGroup::generated_by(m, images);
    if (image.transitive()) {
      std::vector<Perm> graph_gens;
      for (size_t i = 0; i < gens.size(); ++i)
        graph_gens.push_back(graph_gen(gens[i], images[i]));
      long cap = G.order() * image.order() + 1;
      PermGroup graph = PermGroup::generated_by(d + m, graph_gens, cap);
      if (graph.order() == G.order()) return true;
    }
    size_t i = 0;
    while (i < gens.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == gens.size()) return false;
  }
}

}  // namespace detail

// Smallest m with 2 <= m <= k such that G has a subgroup of index m
// (equivalently a transitive action on m points); nullopt if none. Small
// groups go through the exhaustive subgroup list; larger ones through the
// generator-image search.
inline std::optional<long> min_nontrivial_action_degree(const PermGroup& G, int k) {
  if (k < 2) throw domain_error("min_nontrivial_action_degree: k must be >= 2");
  if (G.order() <= 400) {
    std::optional<long> best;
    for (const PermGroup& H : all_subgroups_cached(G)) {
      if (H.order() == G.order()) continue;
      long index = G.order() / H.order();
      if (index >= 2 && index <= k && (!best || index < *best)) best = index;
    }
    return best;
  }
  std::vector<Perm> gens = small_generating_set(G);
  for (int m = 2; m <= k; ++m) {
    std::vector<Perm> sym_m;
    std::vector<uint8_t> img(m);
    std::iota(img.begin(), img.end(), 1);
    do {
      sym_m.push_back(Perm::from_images(img));
    } while (std::next_permutation(img.begin(), img.end()));
    if (detail::has_transitive_action(G, gens, m, sym_m)) return m;
  }
  return std::nullopt;
}

// The Young subgroup stabilizing each block of the partition setwise.
// Throws when the full product of symmetric groups exceeds the cap.
inline PermGroup young_subgroup(int degree, const std::vector<std::vector<int>>& blocks,
                                long max_order = kMaxOrder) {
  long order = 1;
  for (const auto& blk : blocks)
    for (size_t i = 2; i <= blk.size(); ++i) {
      order *= static_cast<long>(i);
      if (order > max_order) throw domain_error("Young subgroup exceeds enumeration cap");
    }
  std::vector<Perm> gens;
  for (const auto& blk : blocks)
    for (size_t i = 0; i + 1 < blk.size(); ++i) {
      auto img = Perm::identity(degree).images();
      img[blk[i] - 1] = static_cast<uint8_t>(blk[i + 1]);
      img[blk[i + 1] - 1] = static_cast<uint8_t>(blk[i]);
      gens.push_back(Perm::from_images(img));
    }
  return PermGroup::generated_by(degree, gens, max_order);
}

// F-hat: the Young subgroup of the partition of {1..d} into F-orbits.
inline PermGroup young_closure(const PermGroup& F, long max_order = kMaxOrder) {
  return young_subgroup(F.degree(), F.orbits(), max_order);
}

// Cheap test for F' <= F-hat that never enumerates F-hat: every generator
// must stabilize every F-orbit setwise.
inline bool stabilizes_orbits(const PermGroup& F, const Perm& s) {
  for (const auto& orb : F.orbits())
    for (int a : orb)
      if (!std::binary_search(orb.begin(), orb.end(), s(a))) return false;
  return true;
}

inline bool inside_young_closure(const PermGroup& F, const PermGroup& Fp) {
  const auto& gens = Fp.generators().empty() ? Fp.elements() : Fp.generators();
  for (const Perm& s : gens)
    if (!stabilizes_orbits(F, s)) return false;
  return true;
}

// Small generating set extracted from the element list. Probes single
// elements and a deterministic sample of pairs around a maximal-order
// element before falling back to the greedy chain.
inline std::vector<Perm> small_generating_set(const PermGroup& G) {
  if (G.order() == 1) return {};
  const Perm* max_order = &G.elements()[0];
  int best = 1;
  for (const Perm& g : G.elements()) {
    int n = g.order();
    if (n > best) {
      best = n;
      max_order = &g;
    }
  }
  if (PermGroup::generated_by(G.degree(), {*max_order}).order() == G.order())
    return {*max_order};
  size_t stride = std::max<size_t>(1, G.elements().size() / 61);
  for (size_t i = 0; i < G.elements().size(); i += stride) {
    const Perm& y = G.elements()[i];
    if (PermGroup::generated_by(G.degree(), {*max_order, y}).order() == G.order())
      return {*max_order, y};
  }
  std::vector<Perm> gens;
  PermGroup H = PermGroup::trivial(G.degree());
  for (const Perm& g : G.elements()) {
    if (H.contains(g)) continue;
    gens.push_back(g);
    H = PermGroup::generated_by(G.degree(), gens);
    if (H.order() == G.order()) break;
  }
  return gens;
}

// [H,H]: commutators of the generators, closed up under H-conjugation.
inline PermGroup derived_subgroup(const PermGroup& H) {
  std::vector<Perm> hgens = small_generating_set(H);
  std::set<Perm> dgens;
  for (const Perm& x : hgens)
    for (const Perm& y : hgens) dgens.insert(x * y * x.inverse() * y.inverse());
  for (;;) {
    PermGroup D = PermGroup::generated_by(H.degree(), {dgens.begin(), dgens.end()});
    size_t before = dgens.size();
    for (const Perm& g : hgens) {
      Perm gi = g.inverse();
      for (const Perm& d : D.generators())
        if (!D.contains(g * d * gi)) dgens.insert(g * d * gi);
    }
    if (dgens.size() == before) return D;
  }
}

// <point stabilizers of F>, a normal subgroup of F.
inline PermGroup stabilizer_closure(const PermGroup& F) {
  std::vector<Perm> gens;
  for (int a = 1; a <= F.degree(); ++a) {
    auto sg = small_generating_set(F.point_stabilizer(a));
    gens.insert(gens.end(), sg.begin(), sg.end());
  }
  return PermGroup::generated_by(F.degree(), gens);
}

// <[F'_a, F'_a] over all a>.
inline PermGroup derived_stabilizer_closure(const PermGroup& Fp) {
  std::vector<Perm> gens;
  for (int a = 1; a <= Fp.degree(); ++a) {
    auto dg = small_generating_set(derived_subgroup(Fp.point_stabilizer(a)));
    gens.insert(gens.end(), dg.begin(), dg.end());
  }
  return PermGroup::generated_by(Fp.degree(), gens);
}

// <[F'_a, F'_a] union F_a>.
inline PermGroup mixed_stabilizer_closure(const PermGroup& F, const PermGroup& Fp) {
  std::vector<Perm> gens;
  for (int a = 1; a <= Fp.degree(); ++a) {
    auto dg = small_generating_set(derived_subgroup(Fp.point_stabilizer(a)));
    gens.insert(gens.end(), dg.begin(), dg.end());
    auto sg = small_generating_set(F.point_stabilizer(a));
    gens.insert(gens.end(), sg.begin(), sg.end());
  }
  return PermGroup::generated_by(Fp.degree(), gens);
}

struct SubgroupFunctors {
  PermGroup F_plus;                // <point stabilizers of F>
  PermGroup derived_stab_closure;  // <[F'_a, F'_a]>
  PermGroup mixed_closure;         // <[F'_a, F'_a] union F_a>
  std::optional<PermGroup> young;  // F-hat, when small enough to enumerate
};

inline SubgroupFunctors subgroup_functors(const PermGroup& F, const PermGroup& Fp) {
  if (!F.is_subgroup_of(Fp)) throw domain_error("subgroup_functors: F is not inside F'");
  SubgroupFunctors r;
  r.F_plus = stabilizer_closure(F);
  r.derived_stab_closure = derived_stabilizer_closure(Fp);
  r.mixed_closure = mixed_stabilizer_closure(F, Fp);
  try {
    r.young = young_closure(F);
  } catch (const domain_error&) {
    r.young = std::nullopt;
  }
  return r;
}

// The action of a group fixing the point a on the remaining points,
// renumbered to {1..d-1}.
inline PermGroup delete_fixed_point(const PermGroup& G, int a) {
  int d = G.degree();
  auto renumber = [&](int x) { return x < a ? x : x - 1; };
  std::vector<Perm> out;
  for (const Perm& g : G.elements()) {
    if (!g.fixes(a)) throw domain_error("delete_fixed_point: group does not fix the point");
    std::vector<uint8_t> img(d - 1);
    for (int x = 1; x <= d; ++x)
      if (x != a) img[renumber(x) - 1] = static_cast<uint8_t>(renumber(g(x)));
    out.push_back(Perm::from_images(img));
  }
  return PermGroup::from_closed_elements(d - 1, std::move(out));
}

// Lexicographically smallest element of F mapping a to b; nullopt if the
// pair sits in different F-orbits.
inline std::optional<Perm> smallest_mapping(const PermGroup& F, int a, int b) {
  for (const Perm& g : F.elements())
    if (g(a) == b) return g;
  return std::nullopt;
}

}  // namespace almostlocal
