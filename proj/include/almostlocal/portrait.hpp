#pragma once

#include <atomic>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "tree.hpp"

namespace almostlocal {

class budget_error : public domain_error {
public:
  explicit budget_error(const std::string& what) : domain_error(what) {}
};

// Configurable cap on the internal-vertex count of any portrait base built
// by composition/inversion. Overridable via ALMOSTLOCAL_MAX_INTERNAL.
inline long& portrait_budget() {
  static long budget = [] {
    const char* env = std::getenv("ALMOSTLOCAL_MAX_INTERNAL");
    return env ? std::atol(env) : 100000L;
  }();
  return budget;
}

// A tree automorphism with branch-wise eventually constant local
// permutations: the image of v0, one permutation per internal vertex of a
// complete base subtree, and one constant tail permutation per leaf branch
// (the tail applies to the leaf itself and everything beyond it).
//
// Any assignment defines an automorphism via g(v.a) = g(v).sigma(g,v)(a);
// instances are kept in canonical (maximally pruned) form, so equality of
// automorphisms is field-wise equality.
class Portrait {
public:
  static Portrait identity(int degree) {
    return constant(Perm::identity(degree), Vertex::root());
  }

  // The unique automorphism with all local permutations equal to sigma and
  // the given image of v0.
  static Portrait constant(const Perm& sigma, const Vertex& root_image) {
    Portrait g(CompleteSubtree::edge_e0(sigma.degree()), root_image, {},
               {{Vertex::root(), sigma}, {Vertex::v1(), sigma}});
    return g;
  }

  // Validates raw data and canonicalizes. Adjacent vertices of the base
  // must agree on their connecting color: an assignment describes an
  // automorphism only when sigma(g,v)(c) = sigma(g,w)(c) for every base
  // edge {v,w} of color c (beyond the leaves this holds because tails are
  // constant).
  static Portrait validate(int degree, const std::set<Vertex>& internal,
                           const Vertex& root_image,
                           const std::map<Vertex, Perm>& internal_perm,
                           const std::map<Vertex, Perm>& tail_perm) {
    CompleteSubtree base = CompleteSubtree::from_internal(degree, internal);
    for (const auto& [v, p] : internal_perm)
      if (p.degree() != degree) throw domain_error("internal permutation degree mismatch");
    for (const auto& [v, p] : tail_perm)
      if (p.degree() != degree) throw domain_error("tail permutation degree mismatch");
    auto keys = [](const std::map<Vertex, Perm>& m) {
      std::set<Vertex> out;
      for (const auto& [v, p] : m) out.insert(v);
      return out;
    };
    if (keys(internal_perm) != base.internal())
      throw domain_error("internal permutation assignments do not match the base");
    if (keys(tail_perm) != base.leaves())
      throw domain_error("tail permutation assignments do not match the leaves");
    if (base.internal().empty()) {
      if (tail_perm.at(Vertex::root())(1) != tail_perm.at(Vertex::v1())(1))
        throw domain_error("incompatible local permutations across the edge e0");
    }
    for (const auto& [v, pv] : internal_perm)
      for (int a = 1; a <= degree; ++a) {
        Vertex w = v.neighbor(a);
        auto it = internal_perm.find(w);
        const Perm& pw = it != internal_perm.end() ? it->second : tail_perm.at(w);
        if (pv(a) != pw(a))
          throw domain_error("incompatible local permutations across the edge " +
                             v.to_literal() + " -- " + w.to_literal());
      }
    Portrait g(std::move(base), root_image, internal_perm, tail_perm);
    g.canonicalize();
    return g;
  }

  // Builds a portrait from local data anchored at an arbitrary vertex:
  // the image of v0 is recovered by walking the geodesic from the anchor.
  static Portrait from_local_data(int degree, const std::set<Vertex>& internal,
                                  const Vertex& anchor, const Vertex& anchor_image,
                                  const std::map<Vertex, Perm>& internal_perm,
                                  const std::map<Vertex, Perm>& tail_perm) {
    CompleteSubtree base = CompleteSubtree::from_internal(degree, internal);
    Portrait probe(base, Vertex::root(), internal_perm, tail_perm);
    Vertex w = anchor;
    Vertex image = anchor_image;
    while (!w.is_root()) {
      int c = w.last_letter();
      Vertex p = w.parent();
      image = image.neighbor(probe.local(w)(c));
      w = p;
    }
    return validate(degree, internal, image, internal_perm, tail_perm);
  }

  int degree() const { return base_.degree(); }
  const CompleteSubtree& base() const { return base_; }
  const Vertex& root_image() const { return root_image_; }
  const std::map<Vertex, Perm>& internal_perms() const { return internal_perm_; }
  const std::map<Vertex, Perm>& tail_perms() const { return tail_perm_; }

  // sigma(g, v).
  const Perm& local(const Vertex& v) const {
    auto leaf = branch_of(base_, v);
    if (!leaf) return internal_perm_.at(v);
    return tail_perm_.at(*leaf);
  }

  Vertex apply(const Vertex& v) const {
    Vertex image = root_image_;
    Vertex u = Vertex::root();
    for (int i = 0; i < v.length(); ++i) {
      int a = v.letter(i);
      image = image.neighbor(local(u)(a));
      u = u.neighbor(a);
    }
    return image;
  }

  // g^-1(w), by walking from the root image toward w.
  Vertex apply_inverse(const Vertex& w) const {
    Vertex u = Vertex::root();
    Vertex x = root_image_;
    while (x != w) {
      int b = w.has_prefix(x) ? w.letter(x.length()) : x.last_letter();
      int a = local(u).inverse()(b);
      u = u.neighbor(a);
      x = x.neighbor(b);
    }
    return u;
  }

  bool is_identity() const {
    return base_.internal().empty() && root_image_.is_root() &&
           tail_perm_.at(Vertex::root()).is_identity() &&
           tail_perm_.at(Vertex::v1()).is_identity();
  }

  // Moves every vertex an even distance.
  bool type_preserving() const { return root_image_.length() % 2 == 0; }

  friend bool operator==(const Portrait& a, const Portrait& b) {
    return a.root_image_ == b.root_image_ && a.internal_perm_ == b.internal_perm_ &&
           a.tail_perm_ == b.tail_perm_;
  }
  friend bool operator!=(const Portrait& a, const Portrait& b) { return !(a == b); }

  Portrait inverse() const {
    std::set<Vertex> points{Vertex::root(), Vertex::v1()};
    std::set<Vertex> forced;
    for (const Vertex& v : base_.vertices()) points.insert(apply(v));
    for (const Vertex& v : base_.internal()) forced.insert(apply(v));
    CompleteSubtree T = complete_hull(degree(), points, forced);
    check_budget(T);
    std::map<Vertex, Perm> internal, tails;
    for (const Vertex& w : T.internal()) internal.emplace(w, local(apply_inverse(w)).inverse());
    for (const Vertex& x : T.leaves()) tails.emplace(x, local(apply_inverse(x)).inverse());
    Portrait r(std::move(T), apply_inverse(Vertex::root()), std::move(internal),
               std::move(tails));
    r.canonicalize();
    return r;
  }

  // g*h is "g after h". The base refines h's base by h^-1(base(g)); on each
  // leaf branch of the refined base both sigma(h,.) and sigma(g,h.) are
  // constant, so tails multiply pointwise.
  friend Portrait operator*(const Portrait& g, const Portrait& h) {
    if (g.degree() != h.degree()) throw domain_error("portrait degree mismatch");
    std::set<Vertex> points{Vertex::root(), Vertex::v1()};
    std::set<Vertex> forced = h.base_.internal();
    for (const Vertex& v : h.base_.vertices()) points.insert(v);
    for (const Vertex& v : g.base_.vertices()) points.insert(h.apply_inverse(v));
    for (const Vertex& v : g.base_.internal()) forced.insert(h.apply_inverse(v));
    CompleteSubtree T = complete_hull(g.degree(), points, forced);
    check_budget(T);
    std::map<Vertex, Perm> internal, tails;
    for (const Vertex& w : T.internal()) internal.emplace(w, g.local(h.apply(w)) * h.local(w));
    for (const Vertex& x : T.leaves()) tails.emplace(x, g.local(h.apply(x)) * h.local(x));
    Portrait r(std::move(T), g.apply(h.apply(Vertex::root())), std::move(internal),
               std::move(tails));
    r.canonicalize();
    return r;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "degree: " << degree() << "\n";
    out << "root_image: " << root_image_.to_literal() << "\n";
    for (const auto& [v, p] : internal_perm_)
      out << "internal " << v.to_literal() << ": " << p.to_cycles() << "\n";
    for (const auto& [v, p] : tail_perm_)
      out << "tail " << v.to_literal() << ": " << p.to_cycles() << "\n";
    return out.str();
  }

  static Portrait from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int degree = -1;
    std::optional<Vertex> root;
    std::map<Vertex, Perm> internal, tails;
    std::set<Vertex> internal_set;
    while (std::getline(in, line)) {
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::string s = line;
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      size_t b = s.find_last_not_of(" \t\r");
      s = s.substr(a, b - a + 1);
      size_t colon = s.rfind(':');
      if (colon == std::string::npos) throw domain_error("portrait line missing ':' " + s);
      std::string key = s.substr(0, colon);
      std::string value = s.substr(colon + 1);
      auto trim = [](std::string t) {
        size_t x = t.find_first_not_of(" \t");
        size_t y = t.find_last_not_of(" \t");
        return x == std::string::npos ? std::string() : t.substr(x, y - x + 1);
      };
      key = trim(key);
      value = trim(value);
      if (key == "degree") {
        degree = std::stoi(value);
        if (degree < 3 || degree > kMaxDegree)
          throw domain_error("portrait degree out of range: " + value);
      } else if (key == "root_image") {
        if (degree < 0) throw domain_error("degree line must come first");
        root = Vertex::parse_literal(value, degree);
      } else if (key.rfind("internal ", 0) == 0) {
        if (degree < 0) throw domain_error("degree line must come first");
        Vertex v = Vertex::parse_literal(key.substr(9), degree);
        internal.emplace(v, parse_cycles(value, degree));
        internal_set.insert(v);
      } else if (key.rfind("tail ", 0) == 0) {
        if (degree < 0) throw domain_error("degree line must come first");
        Vertex v = Vertex::parse_literal(key.substr(5), degree);
        tails.emplace(v, parse_cycles(value, degree));
      } else {
        throw domain_error("unrecognized portrait line: " + s);
      }
    }
    if (degree < 0 || !root) throw domain_error("portrait text missing degree or root_image");
    return validate(degree, internal_set, *root, internal, tails);
  }

private:
  Portrait(CompleteSubtree base, Vertex root_image, std::map<Vertex, Perm> internal,
           std::map<Vertex, Perm> tails)
      : base_(std::move(base)),
        root_image_(std::move(root_image)),
        internal_perm_(std::move(internal)),
        tail_perm_(std::move(tails)) {}

  static void check_budget(const CompleteSubtree& T) {
    if (static_cast<long>(T.internal().size()) > portrait_budget())
      throw budget_error("portrait internal-vertex budget exceeded");
  }

  // Demotes internal vertices whose whole outward star repeats their own
  // permutation, keeping the base a complete subtree containing e0.
  void canonicalize() {
    for (;;) {
      if (internal_perm_.empty()) return;
      if (internal_perm_.size() == 1) {
        // The singleton internal vertex is v0 or v1; it may demote to a
        // leaf of e0 when the tails away from the other endpoint all
        // repeat its own permutation.
        Vertex v = internal_perm_.begin()->first;
        Perm p = internal_perm_.begin()->second;
        Vertex other = v.is_root() ? Vertex::v1() : Vertex::root();
        bool prunable = true;
        for (const auto& [leaf, tail] : tail_perm_)
          if (leaf != other && !(tail == p)) {
            prunable = false;
            break;
          }
        if (prunable) {
          Perm other_tail = tail_perm_.at(other);
          base_ = CompleteSubtree::edge_e0(degree());
          internal_perm_.clear();
          tail_perm_ = {{v, p}, {other, other_tail}};
        }
        return;
      }
      bool changed = false;
      for (const auto& [v, p] : internal_perm_) {
        std::vector<Vertex> outward;
        int internal_neighbors = 0;
        for (const Vertex& w : v.neighbors(degree())) {
          if (base_.is_internal(w))
            ++internal_neighbors;
          else
            outward.push_back(w);
        }
        if (internal_neighbors != 1) continue;
        bool prunable = true;
        for (const Vertex& w : outward) {
          if (w.is_root() || w == Vertex::v1() || !(tail_perm_.at(w) == p)) {
            prunable = false;
            break;
          }
        }
        if (!prunable) continue;
        std::set<Vertex> internal = base_.internal();
        internal.erase(v);
        for (const Vertex& w : outward) tail_perm_.erase(w);
        tail_perm_.emplace(v, p);
        internal_perm_.erase(v);
        base_ = CompleteSubtree::from_internal(degree(), std::move(internal));
        changed = true;
        break;
      }
      if (!changed) return;
    }
  }

  CompleteSubtree base_;
  Vertex root_image_;
  std::map<Vertex, Perm> internal_perm_;
  std::map<Vertex, Perm> tail_perm_;
};

}  // namespace almostlocal
