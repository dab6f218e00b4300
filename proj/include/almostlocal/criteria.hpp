#pragma once

#include <functional>

#include "wreath.hpp"

namespace almostlocal {

struct Verdict {
  enum Value { Yes, No, NA } value = NA;
  std::string evidence;

  static Verdict yes(std::string e = "") { return {Yes, std::move(e)}; }
  static Verdict no(std::string e = "") { return {No, std::move(e)}; }
  static Verdict na(std::string e = "") { return {NA, std::move(e)}; }
  bool is_yes() const { return value == Yes; }
  std::string str() const { return value == Yes ? "yes" : value == No ? "no" : "n/a"; }
};

// Hypothesis verdicts for the structural theorems, every one an exhaustive
// check over the enumerated groups.
struct ClassifierReport {
  int k = 4;  // bound used for prop311
  Verdict standing;     // F <= F' <= F-hat
  Verdict u_equals_g;   // F = F'
  Verdict prop45_iii;   // F transitive and F' = <F'_a>
  Verdict thm413;       // F transitive and F' = <[F'_a,F'_a] union F_a>
  Verdict cor414;       // F simply transitive and F' = <[F'_a,F'_a]>
  Verdict cor421;       // (F':F) = 2, F transitive, F = F+
  Verdict thm420;       // some F <= F'' <= F' of index two with thm413 for (F,F'')
  Verdict prop311;      // F' has no subgroup of index 2..k
  Verdict prop56;       // N_{F'}(F+) = F
  Verdict prop58;       // N_{F'_a}(F_a) = F_a for all a
  Verdict cor79;        // lattice obstruction found at a stabilizer

  static const std::vector<std::string>& criterion_names() {
    static const std::vector<std::string> names = {
        "standing", "u_equals_g", "prop45_iii", "thm413", "cor414", "cor421",
        "thm420",   "prop311",    "prop56",     "prop58", "cor79"};
    return names;
  }

  Verdict get(const std::string& name) const {
    if (name == "standing") return standing;
    if (name == "u_equals_g") return u_equals_g;
    if (name == "prop45_iii") return prop45_iii;
    if (name == "thm413") return thm413;
    if (name == "cor414") return cor414;
    if (name == "cor421") return cor421;
    if (name == "thm420") return thm420;
    if (name == "prop311") return prop311;
    if (name == "prop56") return prop56;
    if (name == "prop58") return prop58;
    if (name == "cor79") return cor79;
    throw domain_error("unknown criterion: " + name);
  }

  std::string to_text() const {
    std::ostringstream out;
    for (const std::string& name : criterion_names()) {
      Verdict v = get(name);
      out << name << ": " << v.str();
      if (!v.evidence.empty()) out << "  [" << v.evidence << "]";
      out << "\n";
    }
    return out.str();
  }
};

inline ClassifierReport classify(const PermGroup& F, const PermGroup& Fp,
                                 const std::optional<PermGroup>& Fpp = {}, int k = 4) {
  ClassifierReport r;
  r.k = k;
  if (F.degree() != Fp.degree()) {
    r.standing = Verdict::no("degree mismatch");
    return r;
  }
  if (!F.is_subgroup_of(Fp)) {
    r.standing = Verdict::no("F is not a subgroup of F'");
    return r;
  }
  if (!inside_young_closure(F, Fp)) {
    r.standing = Verdict::no("F' does not stabilize the F-orbits");
    return r;
  }
  r.standing = Verdict::yes();
  GroupPair P(F, Fp);
  const SubgroupFunctors& fun = P.functors();
  bool transitive = F.transitive();
  auto order_str = [](const PermGroup& G) { return std::to_string(G.order()); };

  r.u_equals_g = F == Fp ? Verdict::yes() : Verdict::no("index " + std::to_string(Fp.order() / F.order()));

  if (!transitive) {
    r.prop45_iii = Verdict::no("F not transitive");
    r.thm413 = Verdict::no("F not transitive");
    r.cor414 = Verdict::no("F not transitive");
    r.cor421 = Verdict::no("F not transitive");
  } else {
    PermGroup fp_plus = stabilizer_closure(Fp);
    r.prop45_iii = fp_plus == Fp
                       ? Verdict::yes()
                       : Verdict::no("<F'_a> has order " + order_str(fp_plus));
    r.thm413 = fun.mixed_closure == Fp
                   ? Verdict::yes()
                   : Verdict::no("mixed closure has order " + order_str(fun.mixed_closure));
    if (!F.simply_transitive())
      r.cor414 = Verdict::no("F not simply transitive");
    else
      r.cor414 = fun.derived_stab_closure == Fp
                     ? Verdict::yes()
                     : Verdict::no("<[F'_a,F'_a]> has order " +
                                   order_str(fun.derived_stab_closure));
    if (Fp.order() != 2 * F.order())
      r.cor421 = Verdict::no("(F':F) != 2");
    else
      r.cor421 = fun.F_plus == F ? Verdict::yes()
                                 : Verdict::no("F+ has order " + order_str(fun.F_plus));
  }

  // intermediate index-two subgroups F <= F'' <= F' with thm413 for (F, F'')
  {
    auto thm413_for = [&](const PermGroup& mid) {
      return transitive && mixed_stabilizer_closure(F, mid) == mid;
    };
    std::vector<std::string> notes;
    bool found = false;
    auto consider = [&](const PermGroup& c) {
      if (!F.is_subgroup_of(c) || !c.is_subgroup_of(Fp) || Fp.order() != 2 * c.order()) {
        notes.push_back("order-" + order_str(c) + " candidate is not an index-two intermediate subgroup");
        return;
      }
      bool ok = thm413_for(c);
      notes.push_back("F'' of order " + order_str(c) + ": " + (ok ? "yes" : "no"));
      found = found || ok;
    };
    if (Fpp) {
      consider(*Fpp);
    } else {
      for (const PermGroup& c : index_two_subgroups(Fp))
        if (F.is_subgroup_of(c)) consider(c);
    }
    std::string joined;
    for (const std::string& n : notes) joined += (joined.empty() ? "" : "; ") + n;
    if (notes.empty())
      r.thm420 = Verdict::no("no index-two subgroup between F and F'");
    else
      r.thm420 = found ? Verdict::yes(joined) : Verdict::no(joined);
  }

  {
    auto m = min_nontrivial_action_degree(Fp, k);
    r.prop311 = m ? Verdict::no("F' has a subgroup of index " + std::to_string(*m))
                  : Verdict::yes();
  }
  {
    PermGroup N = normalizer(Fp, fun.F_plus);
    r.prop56 = N == F ? Verdict::yes()
                      : Verdict::no("N_{F'}(F+) has order " + order_str(N));
  }
  {
    bool all = true;
    std::string ev;
    for (int a = 1; a <= F.degree() && all; ++a) {
      PermGroup Fa = F.point_stabilizer(a);
      PermGroup N = normalizer(Fp.point_stabilizer(a), Fa);
      if (!(N == Fa)) {
        all = false;
        ev = "fails at a=" + std::to_string(a) + " with normalizer order " + order_str(N);
      }
    }
    r.prop58 = all ? Verdict::yes() : Verdict::no(ev);
  }
  if (!transitive) {
    r.cor79 = Verdict::na("F not transitive");
  } else {
    ObstructionSearch s = obstruction_for_pair(P, 1);
    r.cor79 = s.found ? Verdict::yes("D' of order " + order_str(*s.Dp))
                      : Verdict::no("no essential D' with |D'| < (D':F_a)^{d-1}");
  }
  return r;
}

// ---------------------------------------------------------------------------
// the subgroup-pair scanner

struct ScanRow {
  PermGroup F, Fp;
  bool proper = false;
  ClassifierReport report;
};

namespace detail {

inline std::vector<Perm> conjugate_sorted(const std::vector<Perm>& elems, const Perm& pi) {
  Perm pii = pi.inverse();
  std::vector<Perm> out;
  out.reserve(elems.size());
  for (const Perm& e : elems) out.push_back(pi * e * pii);
  std::sort(out.begin(), out.end());
  return out;
}

// Canonical representative of the pair under simultaneous conjugation:
// the minimum of the conjugated element-list pairs over Sym(d).
inline std::pair<std::vector<Perm>, std::vector<Perm>> pair_canonical_key(
    const PermGroup& F, const PermGroup& Fp, const PermGroup& symd) {
  std::optional<std::pair<std::vector<Perm>, std::vector<Perm>>> best;
  for (const Perm& pi : symd.elements()) {
    auto key = std::make_pair(conjugate_sorted(Fp.elements(), pi),
                              conjugate_sorted(F.elements(), pi));
    if (!best || key < *best) best = std::move(key);
  }
  return *best;
}

}  // namespace detail

// Simple conjunctive filters: criterion names, "proper" (F strictly below
// F'), joined by "and"; "not <name>" negates.
inline bool scan_filter_matches(const ScanRow& row, const std::string& filter) {
  std::istringstream in(filter);
  std::string tok;
  while (in >> tok) {
    if (tok == "and") continue;
    bool negate = false;
    if (tok == "not") {
      if (!(in >> tok)) throw domain_error("dangling 'not' in filter");
      negate = true;
    }
    bool val;
    if (tok == "proper")
      val = row.proper;
    else
      val = row.report.get(tok).is_yes();
    if (val == negate) return false;
  }
  return true;
}

// Enumerates pairs F <= F' <= Sym(d) up to simultaneous conjugacy and
// classifies each. Standing-assumption failures are kept and flagged.
inline std::vector<ScanRow> scan(int d, const std::string& filter = "", int k = 4,
                                 int max_degree = 7) {
  if (d > max_degree) throw domain_error("scan degree above bound");
  PermGroup symd = families::sym(d);
  std::vector<PermGroup> subs = all_subgroups(symd);
  std::set<std::pair<std::vector<Perm>, std::vector<Perm>>> seen;
  std::vector<ScanRow> rows;
  for (const PermGroup& Fp : subs)
    for (const PermGroup& F : subs) {
      if (F.order() > Fp.order() || Fp.order() % F.order() != 0) continue;
      if (!F.is_subgroup_of(Fp)) continue;
      if (!seen.insert(detail::pair_canonical_key(F, Fp, symd)).second) continue;
      ScanRow row{F, Fp, F.order() < Fp.order(), classify(F, Fp, {}, k)};
      if (scan_filter_matches(row, filter)) rows.push_back(std::move(row));
    }
  std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    if (a.Fp.order() != b.Fp.order()) return a.Fp.order() < b.Fp.order();
    if (a.F.order() != b.F.order()) return a.F.order() < b.F.order();
    return std::make_pair(a.Fp.elements(), a.F.elements()) <
           std::make_pair(b.Fp.elements(), b.F.elements());
  });
  return rows;
}

inline std::string scan_table(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << "F\tF'\t|F|\t|F'|";
  for (const std::string& name : ClassifierReport::criterion_names()) out << "\t" << name;
  out << "\n";
  for (const ScanRow& row : rows) {
    std::string fgens, fpgens;
    for (const Perm& g : small_generating_set(row.F))
      fgens += (fgens.empty() ? "" : ",") + g.to_cycles();
    for (const Perm& g : small_generating_set(row.Fp))
      fpgens += (fpgens.empty() ? "" : ",") + g.to_cycles();
    if (fgens.empty()) fgens = "id";
    if (fpgens.empty()) fpgens = "id";
    out << fgens << "\t" << fpgens << "\t" << row.F.order() << "\t" << row.Fp.order();
    for (const std::string& name : ClassifierReport::criterion_names())
      out << "\t" << row.report.get(name).str();
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// embeddings G(F,F') <= G(H,H')

struct EmbeddingReport {
  bool open = false;               // H_a <= F for every a
  bool closed = false;             // H n F' = F
  bool discrete = false;           // H n F' acts freely
  bool cocompact = false;          // H' = H F'
  bool cocompact_lattice = false;  // closed, cocompact, F free
  bool qi_embedded = false;        // closed and F transitive
};

inline EmbeddingReport embedding_report(const PermGroup& F, const PermGroup& Fp,
                                        const PermGroup& H, const PermGroup& Hp) {
  GroupPair small(F, Fp), big(H, Hp);
  if (!F.is_subgroup_of(H) || !Fp.is_subgroup_of(Hp))
    throw domain_error("embedding_report: containment fails");
  EmbeddingReport r;
  r.open = true;
  for (int a = 1; a <= F.degree(); ++a)
    if (!H.point_stabilizer(a).is_subgroup_of(F)) r.open = false;
  PermGroup inter = intersection(H, Fp);
  r.closed = inter == F;
  r.discrete = inter.acts_freely();
  r.cocompact = product_set_equals(H, Fp, Hp);
  r.cocompact_lattice = r.closed && r.cocompact && F.acts_freely();
  r.qi_embedded = r.closed && F.transitive();
  return r;
}

inline std::string embedding_to_text(const EmbeddingReport& r) {
  std::ostringstream out;
  out << "open: " << (r.open ? "yes" : "no") << "\n"
      << "closed: " << (r.closed ? "yes" : "no") << "\n"
      << "discrete: " << (r.discrete ? "yes" : "no") << "\n"
      << "cocompact: " << (r.cocompact ? "yes" : "no") << "\n"
      << "cocompact_lattice: " << (r.cocompact_lattice ? "yes" : "no") << "\n"
      << "qi_embedded: " << (r.qi_embedded ? "yes" : "no") << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// the example library

struct ExampleResult {
  bool pass = false;
  std::string detail;
};

struct ExampleVector {
  std::string name;
  std::function<ExampleResult()> run;
};

namespace detail {

inline ExampleResult expect(bool ok, const std::string& detail) {
  return ExampleResult{ok, detail};
}

}  // namespace detail

inline std::vector<ExampleVector> example_library() {
  using detail::expect;
  std::vector<ExampleVector> out;

  out.push_back({"d4_dihedral_sym", [] {
    ClassifierReport r = classify(construct_group("dihedral(4)"), construct_group("sym(4)"));
    return expect(r.thm413.is_yes() && !r.cor414.is_yes(), "thm413: " + r.thm413.str());
  }});
  out.push_back({"d4_cyclic_sym", [] {
    ClassifierReport r = classify(construct_group("cyclic(4)"), construct_group("sym(4)"));
    return expect(!r.thm413.is_yes(), "thm413: " + r.thm413.str() + " [" +
                                           r.thm413.evidence + "]");
  }});
  out.push_back({"d4_alt_sym", [] {
    ClassifierReport r = classify(construct_group("alt(4)"), construct_group("sym(4)"));
    return expect(r.cor421.is_yes(), "cor421: " + r.cor421.str());
  }});
  out.push_back({"d5_cyclic_alt", [] {
    ClassifierReport r = classify(construct_group("cyclic(5)"), construct_group("alt(5)"), {}, 4);
    return expect(r.cor414.is_yes() && r.prop311.is_yes(),
                  "cor414: " + r.cor414.str() + ", prop311(4): " + r.prop311.str());
  }});
  out.push_back({"d5_dihedral_affine", [] {
    ClassifierReport r = classify(construct_group("agl_sq(1,5)"), construct_group("agl(1,5)"));
    return expect(r.cor421.is_yes(), "cor421: " + r.cor421.str());
  }});
  out.push_back({"d5_alt_sym", [] {
    ClassifierReport r = classify(construct_group("alt(5)"), construct_group("sym(5)"));
    return expect(r.cor421.is_yes(), "cor421: " + r.cor421.str());
  }});
  out.push_back({"d6_alt_sym", [] {
    ClassifierReport r = classify(construct_group("alt(6)"), construct_group("sym(6)"));
    return expect(r.cor421.is_yes(), "cor421: " + r.cor421.str());
  }});
  out.push_back({"psl_pgl_q5", [] {
    GroupPair P(construct_group("psl2(5)"), construct_group("pgl2(5)"));
    ObstructionSearch s = obstruction_for_pair(P, 6);
    bool sizes = s.found && s.Dp->order() == 20;
    return expect(sizes, s.found ? "D' of order " + std::to_string(s.Dp->order())
                                 : "no obstruction found");
  }});
  out.push_back({"psl_pgl_q9", [] {
    GroupPair P(construct_group("psl2(9)"), construct_group("pgl2(9)"));
    ObstructionSearch s = obstruction_for_pair(P, 10);
    return expect(s.found && s.Dp->order() == 72,
                  s.found ? "D' of order " + std::to_string(s.Dp->order()) : "not found");
  }});
  out.push_back({"d6_c6_wreath", [] {
    PermGroup F = construct_group("cyclic(6)");
    PermGroup Fp = construct_group("wreath_imprimitive(cyclic(2), 3)");
    ClassifierReport r = classify(F, Fp);
    PermGroup N = normalizer(Fp, F);
    PermGroup fplus = stabilizer_closure(F);
    PermGroup nfplus = normalizer(Fp, fplus);
    bool ok = !r.prop56.is_yes() && N == F && nfplus == Fp;
    return expect(ok, "prop56: " + r.prop56.str() + ", N_{F'}(F) = F: " +
                          (N == F ? "yes" : "no"));
  }});
  out.push_back({"affine_q5_n1_vs_altsym", [] {
    PermGroup F = construct_group("agl_sq(1,5)");
    PermGroup Fp = construct_group("agl(1,5)");
    PermGroup H = construct_group("alt(5)");
    PermGroup Hp = construct_group("sym(5)");
    EmbeddingReport e = embedding_report(F, Fp, H, Hp);
    WreathContext ctx(4, delete_fixed_point(F.point_stabilizer(1), 1),
                      delete_fixed_point(Fp.point_stabilizer(1), 1));
    bool obstruction = lattice_obstruction(ctx);
    bool ok = e.closed && e.cocompact && !e.cocompact_lattice && obstruction;
    return expect(ok, std::string("closed: ") + (e.closed ? "yes" : "no") +
                          ", cocompact: " + (e.cocompact ? "yes" : "no") +
                          ", lattice obstruction on stabilizers: " +
                          (obstruction ? "yes" : "no"));
  }});
  out.push_back({"thm17_d7", [] {
    PermGroup F = construct_group("cyclic(7)");
    PermGroup Fp = construct_group("alt(7)");
    PermGroup H = construct_group("dihedral(7)");
    PermGroup Hp = construct_group("sym(7)");
    if (!(intersection(H, Fp) == F)) return expect(false, "D7 n Alt(7) is not C7");
    EmbeddingReport e = embedding_report(F, Fp, H, Hp);
    ClassifierReport big = classify(H, Hp);
    ClassifierReport small = classify(F, Fp);
    bool ok = e.closed && e.cocompact && e.cocompact_lattice && F.simply_transitive() &&
              big.thm413.is_yes() && small.cor414.is_yes();
    return expect(ok, "lattice: " + std::string(e.cocompact_lattice ? "yes" : "no") +
                          ", thm413(D7,Sym7): " + big.thm413.str() +
                          ", cor414(C7,Alt7): " + small.cor414.str());
  }});
  out.push_back({"thm17_d8", [] {
    PermGroup H = construct_group("dihedral(8)");
    PermGroup Hp = construct_group("sym(8)");
    PermGroup Fp = construct_group("alt(8)");
    PermGroup F = intersection(H, Fp);
    EmbeddingReport e = embedding_report(F, Fp, H, Hp);
    ClassifierReport big = classify(H, Hp);
    ClassifierReport small = classify(F, Fp);
    bool ok = F.order() == 8 && F.simply_transitive() && e.closed && e.cocompact &&
              e.cocompact_lattice && big.thm413.is_yes() && small.cor414.is_yes();
    return expect(ok, "lattice: " + std::string(e.cocompact_lattice ? "yes" : "no") +
                          ", thm413(D8,Sym8): " + big.thm413.str() +
                          ", cor414: " + small.cor414.str());
  }});
  out.push_back({"kkprime_p3_m2", [] {
    PermGroup Kp = construct_group("paper_KKprime(3,2)");
    PermGroup K = families::kkprime_alpha(3, 2);
    PermGroup H = construct_group("alt(6)");
    PermGroup Hp = construct_group("sym(6)");
    bool shape = K.acts_freely() && K.is_subgroup_of(H) && !Kp.is_subgroup_of(H) &&
                 Kp.order() == 2 * K.order();
    EmbeddingReport e = embedding_report(K, Kp, H, Hp);
    bool ok = shape && e.closed && e.cocompact && e.cocompact_lattice && e.discrete;
    return expect(ok, std::string("free: ") + (K.acts_freely() ? "yes" : "no") +
                          ", lattice: " + (e.cocompact_lattice ? "yes" : "no"));
  }});
  out.push_back({"kkprime_p3_m3_shape", [] {
    PermGroup Kp = construct_group("paper_KKprime(3,3)");
    PermGroup K = families::kkprime_alpha(3, 3);
    bool even = true;
    for (const Perm& g : K.elements()) even = even && g.is_even();
    bool has_odd = false;
    for (const Perm& g : Kp.elements()) has_odd = has_odd || !g.is_even();
    bool ok = K.acts_freely() && even && Kp.order() == 2 * K.order() && has_odd;
    return expect(ok, std::string("K free and alternating: ") +
                          (K.acts_freely() && even ? "yes" : "no"));
  }});
  out.push_back({"ex_alt_d8", [] {
    ClassifierReport r = classify(construct_group("ex_alt(8)"), construct_group("alt(8)"));
    return expect(r.cor414.is_yes(), "cor414: " + r.cor414.str());
  }});
  out.push_back({"wreath_c2_c4", [] {
    PermGroup C4 = construct_group("cyclic(4)");
    PermGroup C2 = PermGroup::generated_by(4, {parse_cycles("(1 3)(2 4)", 4)});
    WreathContext ctx(4, C2, C4);
    MeasureReport m0 = haar_measures(ctx, 0);
    MeasureReport m1 = haar_measures(ctx, 1);
    bool ok = m0.mu_K == BigRational(2) && m1.mu_K == BigRational(8) && m0.diverges &&
              lattice_obstruction(ctx);
    return expect(ok, "mu_K(0) = " + rational_to_string(m0.mu_K) +
                          ", mu_K(1) = " + rational_to_string(m1.mu_K));
  }});
  return out;
}

}  // namespace almostlocal
