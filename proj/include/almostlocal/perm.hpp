#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace almostlocal {

// Thrown by operations whose preconditions on group/tree data fail.
class domain_error : public std::runtime_error {
public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A permutation of {1,...,d}, stored as the image tuple.
// img_[a-1] is the image of a. Products compose right-to-left:
// (s*t)(a) = s(t(a)).
class Perm {
public:
  Perm() = default;

  static Perm identity(int degree) {
    Perm p;
    p.img_.resize(degree);
    std::iota(p.img_.begin(), p.img_.end(), 1);
    return p;
  }

  static Perm from_images(std::vector<uint8_t> images) {
    Perm p;
    p.img_ = std::move(images);
    p.check_bijective();
    return p;
  }

  int degree() const { return static_cast<int>(img_.size()); }

  int operator()(int a) const { return img_[a - 1]; }

  bool is_identity() const {
    for (int a = 1; a <= degree(); ++a)
      if (img_[a - 1] != a) return false;
    return true;
  }

  Perm inverse() const {
    Perm r;
    r.img_.resize(img_.size());
    for (int a = 1; a <= degree(); ++a) r.img_[img_[a - 1] - 1] = static_cast<uint8_t>(a);
    return r;
  }

  friend Perm operator*(const Perm& s, const Perm& t) {
    if (s.degree() != t.degree()) throw domain_error("permutation degree mismatch");
    Perm r;
    r.img_.resize(s.img_.size());
    for (int a = 1; a <= s.degree(); ++a) r.img_[a - 1] = s.img_[t.img_[a - 1] - 1];
    return r;
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.img_ == b.img_; }
  friend bool operator!=(const Perm& a, const Perm& b) { return a.img_ != b.img_; }
  friend bool operator<(const Perm& a, const Perm& b) { return a.img_ < b.img_; }

  int order() const {
    Perm p = *this;
    int n = 1;
    while (!p.is_identity()) {
      p = p * *this;
      ++n;
    }
    return n;
  }

  bool fixes(int a) const { return img_[a - 1] == a; }

  // Even permutations have an even number of transpositions.
  bool is_even() const {
    std::vector<bool> seen(img_.size(), false);
    int parity = 0;
    for (int a = 1; a <= degree(); ++a) {
      if (seen[a - 1]) continue;
      int len = 0;
      for (int b = a; !seen[b - 1]; b = img_[b - 1]) {
        seen[b - 1] = true;
        ++len;
      }
      parity ^= (len - 1) & 1;
    }
    return parity == 0;
  }

  const std::vector<uint8_t>& images() const { return img_; }

  // Cycle notation with fixed points omitted; the identity prints as "id".
  std::string to_cycles() const {
    std::vector<bool> seen(img_.size(), false);
    std::ostringstream out;
    bool any = false;
    for (int a = 1; a <= degree(); ++a) {
      if (seen[a - 1] || img_[a - 1] == a) continue;
      out << '(';
      bool first = true;
      for (int b = a; !seen[b - 1]; b = img_[b - 1]) {
        seen[b - 1] = true;
        if (!first) out << ' ';
        out << b;
        first = false;
      }
      out << ')';
      any = true;
    }
    return any ? out.str() : "id";
  }

private:
  void check_bijective() const {
    std::vector<bool> hit(img_.size(), false);
    for (uint8_t v : img_) {
      if (v < 1 || v > img_.size() || hit[v - 1])
        throw domain_error("image sequence is not a bijection of {1..d}");
      hit[v - 1] = true;
    }
  }

  std::vector<uint8_t> img_;
};

// Parses cycle notation, e.g. "(1 2 3)(4 5)" or "(1,2,3)"; "id" or "()" is
// the identity. Points must lie in {1..degree}.
inline Perm parse_cycles(const std::string& text, int degree) {
  std::vector<uint8_t> img(degree);
  std::iota(img.begin(), img.end(), 1);
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  if (text.compare(i, 2, "id") == 0) {
    i += 2;
    skip_ws();
    if (i != text.size()) throw domain_error("trailing characters after 'id'");
    return Perm::from_images(img);
  }
  bool any = false;
  while (i < text.size()) {
    skip_ws();
    if (i == text.size()) break;
    if (text[i] != '(') throw domain_error("expected '(' in cycle notation: " + text);
    ++i;
    std::vector<int> cycle;
    while (true) {
      skip_ws();
      if (i < text.size() && text[i] == ')') {
        ++i;
        break;
      }
      if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i])))
        throw domain_error("malformed cycle string: " + text);
      int v = 0;
      while (i < text.size() && isdigit(static_cast<unsigned char>(text[i])))
        v = v * 10 + (text[i++] - '0');
      if (v < 1 || v > degree)
        throw domain_error("cycle point out of range 1..d: " + std::to_string(v));
      cycle.push_back(v);
      skip_ws();
      if (i < text.size() && text[i] == ',') ++i;
    }
    for (size_t k = 0; k < cycle.size(); ++k) {
      int from = cycle[k];
      int to = cycle[(k + 1) % cycle.size()];
      if (img[from - 1] != from) throw domain_error("point repeated across cycles: " + text);
      img[from - 1] = static_cast<uint8_t>(to);
    }
    any = true;
  }
  if (!any) throw domain_error("empty permutation string");
  return Perm::from_images(img);
}

}  // namespace almostlocal
