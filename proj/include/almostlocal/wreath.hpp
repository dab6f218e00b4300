#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "gff.hpp"

namespace almostlocal {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Ambient data for the ascending union L(D,D') of iterated imprimitive
// wreath products with block size ell = |X|.
struct WreathContext {
  int ell;
  PermGroup D;
  PermGroup Dp;

  WreathContext(int ell_, PermGroup D_, PermGroup Dp_)
      : ell(ell_), D(std::move(D_)), Dp(std::move(Dp_)) {
    if (ell < 2) throw domain_error("wreath context needs |X| >= 2");
    if (D.degree() != ell || Dp.degree() != ell)
      throw domain_error("wreath context: groups must act on X");
    if (!D.is_subgroup_of(Dp)) throw domain_error("wreath context: D is not inside D'");
  }
};

inline BigInt big_pow(BigInt base, long exp) {
  BigInt out = 1;
  while (exp-- > 0) out *= base;
  return out;
}

// |W_n(D)| = |D|^((ell^n - 1)/(ell - 1)), with W_0 = 1.
inline BigInt iterated_order(const PermGroup& D, int ell, int n) {
  if (n < 0) throw domain_error("iterated_order: n must be >= 0");
  if (ell < 2) throw domain_error("iterated_order: ell must be >= 2");
  BigInt levels = (big_pow(ell, n) - 1) / (ell - 1);
  BigInt out = 1;
  BigInt order = D.order();
  for (BigInt i = 0; i < levels; ++i) out *= order;
  return out;
}

struct MeasureReport {
  int n;
  BigRational mu_U;  // mu(U_{n+1}) = |D|^{-(ell^{n+1}-1)/(ell-1)}
  BigRational mu_K;  // mu(K_n) = |D'|^{ell^n} * mu_U
  bool diverges;     // |D'|^{ell-1} > |D|^ell
};

// Haar measures normalized by mu(L_0) = 1, all exact rationals.
inline MeasureReport haar_measures(const WreathContext& ctx, int n) {
  if (n < 0) throw domain_error("haar_measures: n must be >= 0");
  MeasureReport r{n, 0, 0, false};
  BigInt denom = iterated_order(ctx.D, ctx.ell, n + 1);
  r.mu_U = BigRational(1, denom);
  BigInt layer = 1;
  BigInt dp = ctx.Dp.order();
  BigInt block = big_pow(ctx.ell, n);
  for (BigInt i = 0; i < block; ++i) layer *= dp;
  r.mu_K = BigRational(layer, denom);
  r.diverges = big_pow(ctx.Dp.order(), ctx.ell - 1) > big_pow(ctx.D.order(), ctx.ell);
  return r;
}

// No lattices in L(D,D')^k for any k: D essential in D' and
// |D'| < (D':D)^ell, both exact.
inline bool lattice_obstruction(const WreathContext& ctx) {
  if (!is_essential(ctx.D, ctx.Dp)) return false;
  BigInt index = BigInt(ctx.Dp.order()) / ctx.D.order();
  return BigInt(ctx.Dp.order()) < big_pow(index, ctx.ell);
}

struct ObstructionSearch {
  bool found = false;
  std::optional<PermGroup> Dp;  // the witnessing subgroup F_a <= D' <= F'_a
};

// Searches the subgroups D' between F_a and F'_a for the no-lattice
// criterion with exponent d-1; success rules out lattices in G(F,F').
//
// A candidate D' is essential over F_a exactly when every element's
// prime-order powers lie in F_a, so the search stays inside the set E of
// elements with that property (which cuts the interval down sharply).
inline ObstructionSearch obstruction_for_pair(const GroupPair& P, int a) {
  if (!P.F().transitive()) throw domain_error("obstruction_for_pair: F must be transitive");
  if (a < 1 || a > P.degree()) throw domain_error("obstruction_for_pair: point out of range");
  PermGroup Fa = P.F().point_stabilizer(a);
  PermGroup Fpa = P.Fp().point_stabilizer(a);
  std::set<Perm> allowed;
  for (const Perm& x : Fpa.elements()) {
    int n = x.order();
    bool ok = true;
    for (int p = 2; p <= n && ok; ++p) {
      if (n % p != 0) continue;
      bool prime = true;
      for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) prime = false;
      if (!prime) continue;
      Perm power = x;
      for (int i = 1; i < n / p; ++i) power = power * x;
      if (!Fa.contains(power)) ok = false;
    }
    if (ok) allowed.insert(x);
  }
  // all subgroups F_a <= D' with elements inside `allowed`, by augmentation
  std::set<std::vector<Perm>> seen;
  std::vector<PermGroup> candidates;
  auto add = [&](const PermGroup& H) {
    for (const Perm& h : H.elements())
      if (!allowed.count(h)) return;
    if (seen.insert(H.elements()).second) candidates.push_back(H);
  };
  add(PermGroup::generated_by(Fa.degree(), Fa.elements()));
  for (size_t i = 0; i < candidates.size(); ++i) {
    PermGroup H = candidates[i];
    std::set<Perm> skip(H.elements().begin(), H.elements().end());
    for (const Perm& g : allowed) {
      if (skip.count(g)) continue;
      std::vector<Perm> gens = H.elements();
      gens.push_back(g);
      add(PermGroup::generated_by(Fa.degree(), gens));
      for (const Perm& h : H.elements()) skip.insert(h * g);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const PermGroup& x, const PermGroup& y) {
              return x.order() != y.order() ? x.order() < y.order() : x < y;
            });
  ObstructionSearch out;
  int ell = P.degree() - 1;
  for (const PermGroup& Dp : candidates) {
    BigInt index = BigInt(Dp.order()) / Fa.order();
    if (BigInt(Dp.order()) < big_pow(index, ell)) {
      out.found = true;
      out.Dp = Dp;
      return out;
    }
  }
  return out;
}

// The literal kernel order of W_{n+1}(D) -> W_n(D): the base layer
// (D)^{ell^n}, countable by enumeration at small levels. Used to cross-check
// the measure formulas against a concrete finite wreath product.
inline long literal_wreath_kernel_order(const PermGroup& D, int n, long max_order = 1000000) {
  if (n < 0 || n > 1) throw domain_error("literal wreath check only supports n <= 1");
  if (n == 0) return D.order();
  PermGroup W2 = families::wreath_imprimitive(D, D, max_order);
  // kernel of the projection onto the block action
  int ell = D.degree();
  long count = 0;
  for (const Perm& g : W2.elements()) {
    bool trivial_blocks = true;
    for (int j = 1; j <= ell && trivial_blocks; ++j)
      for (int i = 1; i <= ell; ++i) {
        int p = j + ell * (i - 1);
        if ((g(p) - 1) % ell + 1 != j) {
          trivial_blocks = false;
          break;
        }
      }
    if (trivial_blocks) ++count;
  }
  return count;
}

inline std::string rational_to_string(const BigRational& q) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  return out.str();
}

}  // namespace almostlocal
