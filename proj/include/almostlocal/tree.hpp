#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perm.hpp"

namespace almostlocal {

// A vertex of the d-regular colored tree, addressed by the reduced word of
// edge colors on the geodesic from v0. Letters are colors 1..d stored as
// raw bytes; no two consecutive letters are equal. The empty word is v0,
// "1" is v1, and the edge {v, v.a} has color a (so c(e0) = 1).
class Vertex {
public:
  Vertex() = default;

  static Vertex root() { return Vertex(); }
  static Vertex v1() { return Vertex(std::string(1, 1)); }

  static Vertex from_letters(const std::vector<int>& letters) {
    std::string w;
    for (int a : letters) w.push_back(static_cast<char>(a));
    Vertex v(w);
    v.check_reduced();
    return v;
  }

  int length() const { return static_cast<int>(word_.size()); }
  bool is_root() const { return word_.empty(); }
  int parity() const { return length() % 2; }

  int letter(int i) const { return static_cast<unsigned char>(word_[i]); }
  int last_letter() const { return static_cast<unsigned char>(word_.back()); }

  // The neighbor across the color-a edge: strip the last letter when the
  // word ends in a, else append a.
  Vertex neighbor(int a) const {
    if (!word_.empty() && last_letter() == a) return parent();
    Vertex v = *this;
    v.word_.push_back(static_cast<char>(a));
    return v;
  }

  Vertex parent() const {
    if (word_.empty()) throw domain_error("v0 has no parent");
    Vertex v = *this;
    v.word_.pop_back();
    return v;
  }

  // Color of the unique edge around v not contained in L(v): the last
  // letter, with the convention 1 at v0 (the edge e0 itself).
  int toward_e0_color() const { return word_.empty() ? 1 : last_letter(); }

  Vertex prefix(int len) const { return Vertex(word_.substr(0, len)); }

  bool has_prefix(const Vertex& p) const {
    return word_.size() >= p.word_.size() && word_.compare(0, p.word_.size(), p.word_) == 0;
  }

  friend int common_prefix(const Vertex& u, const Vertex& v) {
    int n = 0;
    int lim = static_cast<int>(std::min(u.word_.size(), v.word_.size()));
    while (n < lim && u.word_[n] == v.word_[n]) ++n;
    return n;
  }

  friend int distance(const Vertex& u, const Vertex& v) {
    int k = common_prefix(u, v);
    return u.length() + v.length() - 2 * k;
  }

  friend std::vector<Vertex> geodesic(const Vertex& u, const Vertex& v) {
    int k = common_prefix(u, v);
    std::vector<Vertex> path;
    for (int len = u.length(); len >= k; --len) path.push_back(u.prefix(len));
    for (int len = k + 1; len <= v.length(); ++len) path.push_back(v.prefix(len));
    return path;
  }

  std::vector<Vertex> neighbors(int degree) const {
    std::vector<Vertex> out;
    for (int a = 1; a <= degree; ++a) out.push_back(neighbor(a));
    return out;
  }

  // Canonical order: by length, then lexicographically.
  friend bool operator<(const Vertex& a, const Vertex& b) {
    if (a.word_.size() != b.word_.size()) return a.word_.size() < b.word_.size();
    return a.word_ < b.word_;
  }
  friend bool operator==(const Vertex& a, const Vertex& b) { return a.word_ == b.word_; }
  friend bool operator!=(const Vertex& a, const Vertex& b) { return a.word_ != b.word_; }

  // Literal form: space-separated colors in double quotes; "" is v0.
  std::string to_literal() const {
    std::string out = "\"";
    for (size_t i = 0; i < word_.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(static_cast<unsigned char>(word_[i]));
    }
    out += '"';
    return out;
  }

  static Vertex parse_literal(const std::string& text, int degree) {
    std::string s = text;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    std::istringstream in(s);
    std::vector<int> letters;
    int a;
    while (in >> a) {
      if (a < 1 || a > degree) throw domain_error("vertex color out of range: " + text);
      letters.push_back(a);
    }
    return from_letters(letters);
  }

  const std::string& raw() const { return word_; }

private:
  explicit Vertex(std::string w) : word_(std::move(w)) {}

  void check_reduced() const {
    for (size_t i = 1; i < word_.size(); ++i)
      if (word_[i] == word_[i - 1]) throw domain_error("vertex word is not reduced");
  }

  std::string word_;
};

inline std::vector<Vertex> ball(const Vertex& center, int radius, int degree) {
  std::set<Vertex> out{center};
  std::vector<Vertex> frontier{center};
  for (int r = 0; r < radius; ++r) {
    std::vector<Vertex> next;
    for (const Vertex& v : frontier)
      for (const Vertex& w : v.neighbors(degree))
        if (out.insert(w).second) next.push_back(w);
    frontier = std::move(next);
  }
  return {out.begin(), out.end()};
}

// A finite complete subtree, stored by its internal-vertex set. The empty
// internal set encodes the edge e0 with leaves {v0, v1}; otherwise the tree
// is internal + all neighbors, and the leaves are the non-internal ones.
// Every subtree built here contains the edge e0. Leaf and vertex sets are
// derived once at construction; values are immutable afterwards.
class CompleteSubtree {
public:
  static CompleteSubtree edge_e0(int degree) { return CompleteSubtree(degree, {}); }

  static CompleteSubtree from_internal(int degree, std::set<Vertex> internal) {
    CompleteSubtree t(degree, std::move(internal));
    t.validate();
    return t;
  }

  int degree() const { return degree_; }
  const std::set<Vertex>& internal() const { return internal_; }
  const std::set<Vertex>& leaves() const { return leaves_; }
  const std::set<Vertex>& vertices() const { return all_; }

  bool is_internal(const Vertex& v) const { return internal_.count(v) != 0; }
  bool is_leaf(const Vertex& v) const { return leaves_.count(v) != 0; }
  bool contains(const Vertex& v) const { return all_.count(v) != 0; }

  // Distance from v0 to the farthest vertex of the subtree.
  int depth() const {
    int best = 1;
    for (const Vertex& v : leaves_) best = std::max(best, v.length());
    return best;
  }

  // The gate of v: the unique vertex of the subtree closest to v, found by
  // walking the prefixes of v from the longest (the subtree contains v0).
  Vertex gate(const Vertex& v) const {
    for (int len = v.length(); len > 0; --len) {
      Vertex p = v.prefix(len);
      if (all_.count(p)) return p;
    }
    return Vertex::root();
  }

  friend bool operator==(const CompleteSubtree& a, const CompleteSubtree& b) {
    return a.degree_ == b.degree_ && a.internal_ == b.internal_;
  }

private:
  CompleteSubtree(int degree, std::set<Vertex> internal)
      : degree_(degree), internal_(std::move(internal)) {
    if (internal_.empty()) {
      leaves_ = {Vertex::root(), Vertex::v1()};
    } else {
      for (const Vertex& v : internal_)
        for (const Vertex& w : v.neighbors(degree_))
          if (!internal_.count(w)) leaves_.insert(w);
    }
    all_ = leaves_;
    all_.insert(internal_.begin(), internal_.end());
  }

  void validate() const {
    if (!contains(Vertex::root()) || !contains(Vertex::v1()))
      throw domain_error("complete subtree does not contain the edge e0");
    if (internal_.empty()) return;
    std::set<Vertex> seen;
    std::vector<Vertex> stack{*internal_.begin()};
    seen.insert(stack.back());
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (const Vertex& w : v.neighbors(degree_))
        if (internal_.count(w) && seen.insert(w).second) stack.push_back(w);
    }
    if (seen.size() != internal_.size())
      throw domain_error("internal vertex set is not connected");
  }

  int degree_;
  std::set<Vertex> internal_;
  std::set<Vertex> leaves_;
  std::set<Vertex> all_;
};

// The minimal complete subtree containing every vertex of `points` (which
// must include v0 and v1) with every vertex of `forced` internal. The hull
// is the prefix closure of points plus the stars of forced vertices;
// internal vertices are those of hull-degree >= 2.
inline CompleteSubtree complete_hull(int degree, const std::set<Vertex>& points,
                                     const std::set<Vertex>& forced = {}) {
  if (!points.count(Vertex::root()) || !points.count(Vertex::v1()))
    throw domain_error("complete_hull: points must contain v0 and v1");
  std::set<Vertex> hull;
  auto add_with_prefixes = [&](const Vertex& v) {
    for (int len = v.length(); len >= 0; --len)
      if (!hull.insert(v.prefix(len)).second) break;
  };
  for (const Vertex& v : points) add_with_prefixes(v);
  for (const Vertex& v : forced) {
    add_with_prefixes(v);
    for (const Vertex& w : v.neighbors(degree)) add_with_prefixes(w);
  }
  std::set<Vertex> internal;
  for (const Vertex& v : hull) {
    int deg = v.is_root() ? 0 : 1;
    for (int a = 1; a <= degree; ++a) {
      Vertex w = v.neighbor(a);
      if (w.length() > v.length() && hull.count(w)) ++deg;
    }
    if (deg >= 2) internal.insert(v);
  }
  return CompleteSubtree::from_internal(degree, std::move(internal));
}

// Branch lookup: nullopt when v is internal, else the unique leaf whose
// half-tree (including the leaf itself) contains v.
inline std::optional<Vertex> branch_of(const CompleteSubtree& T, const Vertex& v) {
  if (T.is_internal(v)) return std::nullopt;
  if (T.internal().empty()) return v.has_prefix(Vertex::v1()) ? Vertex::v1() : Vertex::root();
  return T.gate(v);
}

}  // namespace almostlocal
