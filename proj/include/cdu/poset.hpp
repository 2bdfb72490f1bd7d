#pragma once

// Products of extended-nonnegative-real chains, points of such products, and
// antichains of minimal elements. Every partial order in this library is one of
// these products; +inf is an admitted coordinate value (it encodes "infeasible"
// resource levels), NaN never is. Order comparisons are exact; tolerances belong
// to tests, not to the order.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cdu/common.hpp"

namespace cdu {

enum class Dir : std::uint8_t { Increasing, Decreasing };

struct Coord {
  std::string name;
  std::string unit;
  Dir dir = Dir::Increasing;
};

class Poset;
using PosetRef = std::shared_ptr<const Poset>;

// A point carries the structural tag of the poset it belongs to; ops use it to
// reject wiring mistakes (points fed to a structurally different poset).
struct Point {
  std::vector<double> x;
  std::uint64_t tag = 0;

  bool operator==(const Point& o) const { return x == o.x; }
};

class Poset {
 public:
  Poset(std::string name, std::vector<Coord> coords)
      : name_(std::move(name)), coords_(std::move(coords)), tag_(structural_tag(coords_)) {}

  std::size_t dim() const { return coords_.size(); }
  Dir dir(std::size_t i) const { return coords_[i].dir; }
  const Coord& coord(std::size_t i) const { return coords_[i]; }
  const std::vector<Coord>& coords() const { return coords_; }
  const std::string& name() const { return name_; }
  std::uint64_t tag() const { return tag_; }

  // Structural identity: dimension and per-coordinate directions. Names and units
  // are documentation; two posets with equal structure are interchangeable.
  static std::uint64_t structural_tag(const std::vector<Coord>& coords) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](std::uint64_t v) {
      h ^= v;
      h *= 0x100000001b3ULL;
    };
    eat(coords.size());
    for (const auto& c : coords) eat(c.dir == Dir::Increasing ? 1 : 2);
    return h;
  }

  bool same_structure(const Poset& o) const { return tag_ == o.tag_; }

  Point point(std::vector<double> v) const {
    require(v.size() == coords_.size(), "point: coordinate count must match poset dimension");
    for (double c : v) require(!std::isnan(c), "point: NaN coordinate");
    return Point{std::move(v), tag_};
  }
  Point point(std::initializer_list<double> v) const { return point(std::vector<double>(v)); }

  bool conforms(const Point& p) const {
    return p.x.size() == coords_.size() && (p.tag == 0 || p.tag == tag_);
  }

  static PosetRef make(std::string name, std::vector<Coord> coords) {
    return std::make_shared<Poset>(std::move(name), std::move(coords));
  }

  static PosetRef product(const PosetRef& a, const PosetRef& b, std::string name = {}) {
    std::vector<Coord> coords = a->coords_;
    coords.insert(coords.end(), b->coords_.begin(), b->coords_.end());
    if (name.empty()) name = a->name_ + "*" + b->name_;
    return make(std::move(name), std::move(coords));
  }

  PosetRef opposite(std::string name = {}) const {
    std::vector<Coord> coords = coords_;
    for (auto& c : coords) c.dir = (c.dir == Dir::Increasing) ? Dir::Decreasing : Dir::Increasing;
    if (name.empty()) name = name_ + "^op";
    return make(std::move(name), std::move(coords));
  }

 private:
  std::string name_;
  std::vector<Coord> coords_;
  std::uint64_t tag_;
};

// Convenience: an all-increasing chain product with one name per coordinate.
inline PosetRef chain_product(std::string name, std::vector<Coord> coords) {
  return Poset::make(std::move(name), std::move(coords));
}

inline void check_pair(const Poset& p, const Point& a, const Point& b, const char* op) {
  if (!p.conforms(a) || !p.conforms(b)) {
    throw contract_error(std::string(op) + ": point does not conform to poset '" + p.name() + "'");
  }
}

// a <= b in the product order. Exact comparisons; +inf behaves per IEEE.
inline bool leq(const Poset& p, const Point& a, const Point& b) {
  check_pair(p, a, b, "leq");
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p.dir(i) == Dir::Increasing) {
      if (!(a.x[i] <= b.x[i])) return false;
    } else {
      if (!(a.x[i] >= b.x[i])) return false;
    }
  }
  return true;
}

// Component-wise least upper bound; exists for every pair in a chain product.
inline Point join(const Poset& p, const Point& a, const Point& b) {
  check_pair(p, a, b, "join");
  std::vector<double> out(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    out[i] = (p.dir(i) == Dir::Increasing) ? std::max(a.x[i], b.x[i]) : std::min(a.x[i], b.x[i]);
  }
  return Point{std::move(out), p.tag()};
}

// Minimal elements of an upper set. Canonical form: no member is below another,
// no duplicates. An empty antichain is the empty upper set ("infeasible").
class Antichain {
 public:
  Antichain() = default;
  explicit Antichain(PosetRef desc) : desc_(std::move(desc)) {}

  const PosetRef& desc() const { return desc_; }
  bool empty() const { return pts_.empty(); }
  std::size_t size() const { return pts_.size(); }
  const std::vector<Point>& points() const { return pts_; }

  // Inserts the principal upper set of x; returns true when x survives as a
  // minimal element (i.e. x was not already dominated).
  bool insert(Point x) {
    require(static_cast<bool>(desc_), "antichain: descriptor not set");
    require(desc_->conforms(x), "antichain insert: point does not conform");
    for (double c : x.x) require(!std::isnan(c), "antichain insert: NaN coordinate");
    for (const Point& m : pts_) {
      if (leq(*desc_, m, x)) return false;  // dominated, set unchanged
    }
    std::size_t keep = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (leq(*desc_, x, pts_[i])) continue;
      if (keep != i) pts_[keep] = std::move(pts_[i]);
      ++keep;
    }
    pts_.resize(keep);
    pts_.push_back(std::move(x));
    return true;
  }

  // True when x lies in the upper set spanned by this antichain.
  bool dominates(const Point& x) const {
    require(static_cast<bool>(desc_), "antichain: descriptor not set");
    require(desc_->conforms(x), "antichain dominates: point does not conform");
    for (const Point& m : pts_) {
      if (leq(*desc_, m, x)) return true;
    }
    return false;
  }

  // Least value of an increasing coordinate over the spanned upper set; +inf if empty.
  double min_coordinate(std::size_t i) const {
    require(static_cast<bool>(desc_), "antichain: descriptor not set");
    require(i < desc_->dim(), "min_coordinate: index out of range");
    require(desc_->dir(i) == Dir::Increasing, "min_coordinate: coordinate must be increasing");
    double best = kInf;
    for (const Point& m : pts_) best = std::min(best, m.x[i]);
    return best;
  }

  bool same_elements(const Antichain& o) const {
    if (pts_.size() != o.pts_.size()) return false;
    for (const Point& m : pts_) {
      bool found = false;
      for (const Point& n : o.pts_) {
        if (m == n) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

 private:
  PosetRef desc_;
  std::vector<Point> pts_;
};

inline void check_same_structure(const Antichain& a, const Antichain& b, const char* op) {
  require(a.desc() && b.desc(), "antichain op: descriptor not set");
  if (!a.desc()->same_structure(*b.desc())) {
    throw contract_error(std::string(op) + ": antichains live in structurally different posets");
  }
}

// Union of upper sets: minimal elements of the merged family.
inline Antichain union_of(const Antichain& a, const Antichain& b) {
  check_same_structure(a, b, "antichain union");
  Antichain out = a;
  for (const Point& m : b.points()) out.insert(m);
  return out;
}

// Intersection of upper sets: minimal elements of pairwise joins. Requires the
// component-wise join, which every chain product has.
inline Antichain intersection_of(const Antichain& a, const Antichain& b) {
  check_same_structure(a, b, "antichain intersection");
  Antichain out(a.desc());
  for (const Point& m : a.points()) {
    for (const Point& n : b.points()) out.insert(join(*a.desc(), m, n));
  }
  return out;
}

}  // namespace cdu
