#pragma once

#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "perm_group.hpp"

namespace almostlocal {

// Fq for q in {2,3,4,5,7,8,9,11,13,16}. Elements are 0..q-1; for prime
// powers the index encodes polynomial coefficients in base p, reduced by a
// fixed irreducible polynomial.
class FiniteField {
public:
  explicit FiniteField(int q) : q_(q) {
    struct Entry {
      int q, p, deg;
      std::array<int, 5> mod;  // coefficients of the irreducible, low to high
    };
    // x^2+x+1 over F2; x^3+x+1 over F2; x^2+1 over F3; x^4+x+1 over F2.
    static const Entry table[] = {
        {2, 2, 1, {0, 1, 0, 0, 0}},  {3, 3, 1, {0, 1, 0, 0, 0}},
        {4, 2, 2, {1, 1, 1, 0, 0}},  {5, 5, 1, {0, 1, 0, 0, 0}},
        {7, 7, 1, {0, 1, 0, 0, 0}},  {8, 2, 3, {1, 1, 0, 1, 0}},
        {9, 3, 2, {1, 0, 1, 0, 0}},  {11, 11, 1, {0, 1, 0, 0, 0}},
        {13, 13, 1, {0, 1, 0, 0, 0}}, {16, 2, 4, {1, 1, 0, 0, 1}},
    };
    const Entry* entry = nullptr;
    for (const auto& e : table)
      if (e.q == q) entry = &e;
    if (!entry) throw domain_error("unsupported field size q=" + std::to_string(q));
    p_ = entry->p;
    deg_ = entry->deg;
    mul_.assign(q_ * q_, 0);
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) mul_[a * q_ + b] = poly_mul(a, b, entry->mod);
  }

  int q() const { return q_; }
  int characteristic() const { return p_; }

  int add(int a, int b) const {
    int out = 0, pw = 1;
    for (int i = 0; i < deg_; ++i) {
      out += ((a % p_ + b % p_) % p_) * pw;
      a /= p_;
      b /= p_;
      pw *= p_;
    }
    return out;
  }

  int neg(int a) const {
    int out = 0, pw = 1;
    for (int i = 0; i < deg_; ++i) {
      out += ((p_ - a % p_) % p_) * pw;
      a /= p_;
      pw *= p_;
    }
    return out;
  }

  int mul(int a, int b) const { return mul_[a * q_ + b]; }

  int inv(int a) const {
    for (int b = 1; b < q_; ++b)
      if (mul(a, b) == 1) return b;
    throw domain_error("field inverse of zero");
  }

  int primitive_root() const {
    for (int g = 1; g < q_; ++g) {
      int x = g, n = 1;
      while (x != 1) {
        x = mul(x, g);
        ++n;
      }
      if (n == q_ - 1) return g;
    }
    throw domain_error("no primitive root found");
  }

  std::vector<int> nonzero_squares() const {
    std::set<int> sq;
    for (int a = 1; a < q_; ++a) sq.insert(mul(a, a));
    return {sq.begin(), sq.end()};
  }

private:
  int poly_mul(int a, int b, const std::array<int, 5>& mod) const {
    std::array<int, 9> prod{};
    for (int i = 0, aa = a; i < deg_; ++i, aa /= p_)
      for (int j = 0, bb = b; j < deg_; ++j, bb /= p_)
        prod[i + j] = (prod[i + j] + (aa % p_) * (bb % p_)) % p_;
    for (int k = 2 * deg_ - 2; k >= deg_; --k) {
      int c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      for (int i = 0; i < deg_; ++i)
        prod[k - deg_ + i] = ((prod[k - deg_ + i] - c * mod[i]) % p_ + p_ * p_) % p_;
    }
    int out = 0, pw = 1;
    for (int i = 0; i < deg_; ++i) {
      out += prod[i] * pw;
      pw *= p_;
    }
    return out;
  }

  int q_, p_, deg_;
  std::vector<int> mul_;
};

namespace families {

inline PermGroup cyclic(int d) {
  std::vector<uint8_t> img(d);
  for (int a = 1; a <= d; ++a) img[a - 1] = static_cast<uint8_t>(a % d + 1);
  return PermGroup::generated_by(d, {Perm::from_images(img)});
}

// Order-2d dihedral group acting naturally on d points (rotation + the
// reflection fixing 1).
inline PermGroup dihedral(int d) {
  if (d < 3) throw domain_error("dihedral(d) needs d >= 3");
  std::vector<uint8_t> rot(d), refl(d);
  for (int a = 1; a <= d; ++a) {
    rot[a - 1] = static_cast<uint8_t>(a % d + 1);
    refl[a - 1] = static_cast<uint8_t>((d + 2 - a - 1) % d + 1);
  }
  return PermGroup::generated_by(d, {Perm::from_images(rot), Perm::from_images(refl)});
}

inline PermGroup sym(int d) {
  if (d == 1) return PermGroup::trivial(1);
  std::vector<uint8_t> cyc(d), swp(d);
  for (int a = 1; a <= d; ++a) cyc[a - 1] = static_cast<uint8_t>(a % d + 1);
  for (int a = 1; a <= d; ++a) swp[a - 1] = static_cast<uint8_t>(a);
  std::swap(swp[0], swp[1]);
  return PermGroup::generated_by(d, {Perm::from_images(cyc), Perm::from_images(swp)});
}

inline PermGroup alt(int d) {
  if (d <= 2) return PermGroup::trivial(d);
  std::vector<Perm> gens;
  for (int a = 3; a <= d; ++a) {
    auto img = Perm::identity(d).images();
    img[0] = 2;
    img[1] = static_cast<uint8_t>(a);
    img[a - 1] = 1;
    gens.push_back(Perm::from_images(img));
  }
  return PermGroup::generated_by(d, gens);
}

// Projective line over Fq as points 1..q+1: point i <-> field element i-1,
// point q+1 <-> infinity.
namespace detail {
inline Perm moebius(const FiniteField& K, int a, int b, int c, int d) {
  int q = K.q();
  const int inf = q;  // zero-based index of the infinity point
  std::vector<uint8_t> img(q + 1);
  auto image_of = [&](int x) {
    if (x == inf) {
      if (c == 0) return inf;
      return K.mul(a, K.inv(c));
    }
    int num = K.add(K.mul(a, x), b);
    int den = K.add(K.mul(c, x), d);
    if (den == 0) return inf;
    return K.mul(num, K.inv(den));
  };
  for (int x = 0; x <= q; ++x) img[x] = static_cast<uint8_t>(image_of(x) + 1);
  return Perm::from_images(img);
}
}  // namespace detail

inline PermGroup pgl2(int q) {
  FiniteField K(q);
  int g = K.primitive_root();
  std::vector<Perm> gens{detail::moebius(K, 1, 1, 0, 1), detail::moebius(K, g, 0, 0, 1),
                         detail::moebius(K, 0, 1, 1, 0)};
  return PermGroup::generated_by(q + 1, gens);
}

inline PermGroup psl2(int q) {
  FiniteField K(q);
  int g = K.primitive_root();
  int g2 = K.mul(g, g);
  std::vector<Perm> gens{detail::moebius(K, 1, 1, 0, 1), detail::moebius(K, g2, 0, 0, 1),
                         detail::moebius(K, 0, K.neg(1), 1, 0)};
  return PermGroup::generated_by(q + 1, gens);
}

// AGL(1,q) = {x -> ax+b} on the q field elements (points 1..q).
inline PermGroup agl1(int q) {
  FiniteField K(q);
  int g = K.primitive_root();
  std::vector<uint8_t> t(q), m(q);
  for (int x = 0; x < q; ++x) {
    t[x] = static_cast<uint8_t>(K.add(x, 1) + 1);
    m[x] = static_cast<uint8_t>(K.mul(g, x) + 1);
  }
  return PermGroup::generated_by(q, {Perm::from_images(t), Perm::from_images(m)});
}

// The index-two (for odd q) subgroup with square multiplier.
inline PermGroup agl1_squares(int q) {
  FiniteField K(q);
  int g = K.primitive_root();
  int g2 = K.mul(g, g);
  std::vector<uint8_t> t(q), m(q);
  for (int x = 0; x < q; ++x) {
    t[x] = static_cast<uint8_t>(K.add(x, 1) + 1);
    m[x] = static_cast<uint8_t>(K.mul(g2, x) + 1);
  }
  return PermGroup::generated_by(q, {Perm::from_images(t), Perm::from_images(m)});
}

// Imprimitive wreath product D wr Q for D <= Sym(l), Q <= Sym(k), acting on
// l*k points with blocks {j, j+k, ..., j+(l-1)k}; block j carries a copy of
// D and Q permutes the blocks.
inline PermGroup wreath_imprimitive(const PermGroup& D, const PermGroup& Q,
                                    long max_order = kMaxOrder) {
  int l = D.degree(), k = Q.degree();
  int n = l * k;
  if (n > kMaxDegree) throw domain_error("wreath product degree exceeds cap");
  std::vector<Perm> gens;
  auto pos = [&](int block, int slot) { return block + k * (slot - 1); };
  for (int j = 1; j <= k; ++j)
    for (const Perm& g : D.generators().empty() ? D.elements() : D.generators()) {
      auto img = Perm::identity(n).images();
      for (int i = 1; i <= l; ++i) img[pos(j, i) - 1] = static_cast<uint8_t>(pos(j, g(i)));
      gens.push_back(Perm::from_images(img));
    }
  for (const Perm& q : Q.generators().empty() ? Q.elements() : Q.generators()) {
    auto img = Perm::identity(n).images();
    for (int j = 1; j <= k; ++j)
      for (int i = 1; i <= l; ++i) img[pos(j, i) - 1] = static_cast<uint8_t>(pos(q(j), i));
    gens.push_back(Perm::from_images(img));
  }
  return PermGroup::generated_by(n, gens, max_order);
}

// The simply transitive abelian subgroup of Alt(d): a d-cycle for odd d,
// and <(1..2n)(2n+1..4n), prod (i, 2n+i)> for d = 4n.
inline PermGroup ex_alt(int d) {
  if (d % 2 == 1) return cyclic(d);
  if (d % 4 != 0) throw domain_error("ex_alt(d) needs d odd or divisible by 4");
  int n = d / 4;
  std::vector<uint8_t> a(d), b(d);
  for (int i = 1; i <= 2 * n; ++i) {
    a[i - 1] = static_cast<uint8_t>(i % (2 * n) + 1);
    a[2 * n + i - 1] = static_cast<uint8_t>(2 * n + i % (2 * n) + 1);
    b[i - 1] = static_cast<uint8_t>(2 * n + i);
    b[2 * n + i - 1] = static_cast<uint8_t>(i);
  }
  return PermGroup::generated_by(d, {Perm::from_images(a), Perm::from_images(b)});
}

// K' = <alpha, tau> on p*m points: alpha is a product of m p-cycles on
// consecutive blocks, tau swaps the first two blocks pointwise. <alpha>
// acts freely inside Alt; tau is odd for odd p.
inline PermGroup paper_kkprime(int p, int m) {
  if (m < 2) throw domain_error("paper_KKprime needs m >= 2");
  int d = p * m;
  if (d > kMaxDegree) throw domain_error("paper_KKprime degree exceeds cap");
  std::vector<uint8_t> alpha(d), tau(d);
  for (int i = 1; i <= d; ++i) alpha[i - 1] = static_cast<uint8_t>(i), tau[i - 1] = static_cast<uint8_t>(i);
  for (int blk = 0; blk < m; ++blk)
    for (int i = 1; i <= p; ++i) alpha[blk * p + i - 1] = static_cast<uint8_t>(blk * p + i % p + 1);
  for (int i = 1; i <= p; ++i) {
    tau[i - 1] = static_cast<uint8_t>(p + i);
    tau[p + i - 1] = static_cast<uint8_t>(i);
  }
  return PermGroup::generated_by(d, {Perm::from_images(alpha), Perm::from_images(tau)});
}

inline PermGroup kkprime_alpha(int p, int m) {
  PermGroup Kp = paper_kkprime(p, m);
  return PermGroup::generated_by(Kp.degree(), {Kp.generators()[0]});
}

}  // namespace families

// Group family descriptors, e.g. "pgl2(5)", "dihedral(7)", "young(2,1,1)",
// "gens(4, (1 2 3), (1 2))", "wreath_imprimitive(cyclic(2), 3)".
inline PermGroup construct_group(const std::string& spec);

namespace detail {

// Splits "a, b, c" at top-level commas (parentheses nest).
inline std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

inline int to_int(const std::string& s) {
  std::string t = strip(s);
  if (t.empty()) throw domain_error("expected an integer argument");
  for (char c : t)
    if (!isdigit(static_cast<unsigned char>(c))) throw domain_error("expected an integer, got: " + t);
  return std::stoi(t);
}

}  // namespace detail

inline PermGroup construct_group(const std::string& spec) {
  using namespace detail;
  std::string s = strip(spec);
  size_t open = s.find('(');
  std::string name = strip(open == std::string::npos ? s : s.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw domain_error("malformed group descriptor: " + spec);
    args = split_args(s.substr(open + 1, s.size() - open - 2));
    for (auto& a : args) a = strip(a);
  }
  auto need = [&](size_t n) {
    if (args.size() != n)
      throw domain_error(name + " expects " + std::to_string(n) + " argument(s)");
  };
  if (name == "cyclic") {
    need(1);
    return families::cyclic(to_int(args[0]));
  }
  if (name == "dihedral") {
    need(1);
    return families::dihedral(to_int(args[0]));
  }
  if (name == "sym") {
    need(1);
    return families::sym(to_int(args[0]));
  }
  if (name == "alt") {
    need(1);
    return families::alt(to_int(args[0]));
  }
  if (name == "psl2") {
    need(1);
    return families::psl2(to_int(args[0]));
  }
  if (name == "pgl2") {
    need(1);
    return families::pgl2(to_int(args[0]));
  }
  if (name == "agl") {
    need(2);
    if (to_int(args[0]) != 1) throw domain_error("only agl(1,q) is supported");
    return families::agl1(to_int(args[1]));
  }
  if (name == "agl_sq") {
    need(2);
    if (to_int(args[0]) != 1) throw domain_error("only agl_sq(1,q) is supported");
    return families::agl1_squares(to_int(args[1]));
  }
  if (name == "ex_alt") {
    need(1);
    return families::ex_alt(to_int(args[0]));
  }
  if (name == "paper_KKprime" || name == "paper_kkprime") {
    need(2);
    return families::paper_kkprime(to_int(args[0]), to_int(args[1]));
  }
  if (name == "young") {
    if (args.empty()) throw domain_error("young needs block sizes");
    std::vector<std::vector<int>> blocks;
    int next = 1;
    for (const auto& a : args) {
      int n = to_int(a);
      std::vector<int> blk(n);
      std::iota(blk.begin(), blk.end(), next);
      next += n;
      blocks.push_back(blk);
    }
    return young_subgroup(next - 1, blocks);
  }
  if (name == "wreath_imprimitive") {
    need(2);
    PermGroup D = construct_group(args[0]);
    bool numeric = !args[1].empty() &&
                   std::all_of(args[1].begin(), args[1].end(),
                               [](char c) { return isdigit(static_cast<unsigned char>(c)); });
    PermGroup Q = numeric ? families::cyclic(to_int(args[1])) : construct_group(args[1]);
    return families::wreath_imprimitive(D, Q);
  }
  if (name == "gens") {
    if (args.size() < 2) throw domain_error("gens(d, p1, ...) needs a degree and permutations");
    int d = to_int(args[0]);
    std::vector<Perm> gens;
    for (size_t i = 1; i < args.size(); ++i) gens.push_back(parse_cycles(args[i], d));
    return PermGroup::generated_by(d, gens);
  }
  if (name == "trivial") {
    need(1);
    return PermGroup::trivial(to_int(args[0]));
  }
  throw domain_error("unknown group family: " + name);
}

}  // namespace almostlocal
