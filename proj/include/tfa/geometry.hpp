#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace tfa {

/// Half-open real interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x < hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return lo < o.hi && o.lo < hi; }
  /// Same center, length scaled by `factor`.
  Interval dilate(double factor) const {
    const double c = center(), h = 0.5 * factor * length();
    return {c - h, c + h};
  }
  double distance_to(double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Relation { disjoint, a_in_b, b_in_a, equal };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::disjoint: return "disjoint";
    case Relation::a_in_b: return "a_in_b";
    case Relation::b_in_a: return "b_in_a";
    case Relation::equal: return "equal";
  }
  return "?";
}

/// [k 2^j, (k+1) 2^j). Scale and position are exact integers; all
/// combinatorial predicates use integer arithmetic only.
struct DyadicInterval {
  int scale = 0;
  std::int64_t position = 0;

  double length() const { return std::ldexp(1.0, scale); }
  double lo() const { return std::ldexp(static_cast<double>(position), scale); }
  double hi() const { return std::ldexp(static_cast<double>(position + 1), scale); }
  double center() const { return std::ldexp(static_cast<double>(position) + 0.5, scale); }
  Interval interval() const { return {lo(), hi()}; }

  /// Ancestor at a coarser or equal scale.
  DyadicInterval ancestor(int coarser_scale) const {
    if (coarser_scale < scale) throw std::invalid_argument("ancestor: scale must not decrease");
    return {coarser_scale, position >> (coarser_scale - scale)};
  }
  DyadicInterval parent() const { return ancestor(scale + 1); }
  std::array<DyadicInterval, 2> children() const {
    return {DyadicInterval{scale - 1, 2 * position}, DyadicInterval{scale - 1, 2 * position + 1}};
  }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

inline DyadicInterval make_dyadic(int scale, std::int64_t position) { return {scale, position}; }

inline Relation relate(const DyadicInterval& a, const DyadicInterval& b) {
  if (a == b) return Relation::equal;
  if (a.scale < b.scale) return a.ancestor(b.scale) == b ? Relation::a_in_b : Relation::disjoint;
  if (b.scale < a.scale) return b.ancestor(a.scale) == a ? Relation::b_in_a : Relation::disjoint;
  return Relation::disjoint;
}

inline bool contained_in(const DyadicInterval& a, const DyadicInterval& b) {
  const Relation r = relate(a, b);
  return r == Relation::a_in_b || r == Relation::equal;
}

inline bool disjoint(const DyadicInterval& a, const DyadicInterval& b) {
  return relate(a, b) == Relation::disjoint;
}

/// ω = ω₁ × ω₂ with |ω₁| = |ω₂|.
struct FrequencySquare {
  DyadicInterval omega1;
  DyadicInterval omega2;

  FrequencySquare() = default;
  FrequencySquare(DyadicInterval a, DyadicInterval b) : omega1(a), omega2(b) {
    if (a.scale != b.scale) throw std::invalid_argument("FrequencySquare: sides must have equal length");
  }
  FrequencySquare(int scale, std::int64_t k1, std::int64_t k2) : omega1{scale, k1}, omega2{scale, k2} {}

  int scale() const { return omega1.scale; }
  double side() const { return omega1.length(); }
  /// Transpose (ω₁ ↔ ω₂).
  FrequencySquare reflected() const { return {omega2, omega1}; }

  friend bool operator==(const FrequencySquare&, const FrequencySquare&) = default;
  friend auto operator<=>(const FrequencySquare&, const FrequencySquare&) = default;
};

inline bool disjoint(const FrequencySquare& a, const FrequencySquare& b) {
  return disjoint(a.omega1, b.omega1) || disjoint(a.omega2, b.omega2);
}

/// Tri-tile s = (I_s × ω₁, I_s × ω₂, I_s × ω₃). ω₃ is the interval of
/// length 4|ω₁| centred at c(ω₁) + c(ω₂); it contains ω₁ + ω₂.
struct TriTile {
  DyadicInterval spatial;
  FrequencySquare square;

  const DyadicInterval& omega1() const { return square.omega1; }
  const DyadicInterval& omega2() const { return square.omega2; }
  Interval omega3() const {
    const double c = square.omega1.center() + square.omega2.center();
    const double h = 2.0 * square.side();
    return {c - h, c + h};
  }
  Interval frequency(int j) const {
    switch (j) {
      case 1: return square.omega1.interval();
      case 2: return square.omega2.interval();
      case 3: return omega3();
    }
    throw std::invalid_argument("TriTile::frequency: component must be 1, 2 or 3");
  }
  TriTile reflected() const { return {spatial, square.reflected()}; }

  friend bool operator==(const TriTile&, const TriTile&) = default;
  friend auto operator<=>(const TriTile&, const TriTile&) = default;
};

inline TriTile build_tritile(const DyadicInterval& spatial, const FrequencySquare& square) {
  if (spatial.scale + square.scale() != 0) {
    std::ostringstream msg;
    msg << "build_tritile: |I|·|ω₁| = 2^" << spatial.scale + square.scale() << ", tiles must have area 1";
    throw std::invalid_argument(msg.str());
  }
  return {spatial, square};
}

/// Selection order shared by every stopping-time algorithm: larger spatial
/// interval first, then leftmost I, leftmost ω₁, leftmost ω₂.
inline bool selection_order(const TriTile& a, const TriTile& b) {
  if (a.spatial.scale != b.spatial.scale) return a.spatial.scale > b.spatial.scale;
  if (a.spatial.position != b.spatial.position) return a.spatial.position < b.spatial.position;
  if (a.square.omega1.position != b.square.omega1.position)
    return a.square.omega1.position < b.square.omega1.position;
  return a.square.omega2.position < b.square.omega2.position;
}

}  // namespace tfa

template <>
struct std::hash<tfa::DyadicInterval> {
  std::size_t operator()(const tfa::DyadicInterval& d) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(d.position) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(d.scale)) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

template <>
struct std::hash<tfa::FrequencySquare> {
  std::size_t operator()(const tfa::FrequencySquare& s) const noexcept {
    const std::size_t a = std::hash<tfa::DyadicInterval>{}(s.omega1);
    const std::size_t b = std::hash<tfa::DyadicInterval>{}(s.omega2);
    return a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  }
};

template <>
struct std::hash<tfa::TriTile> {
  std::size_t operator()(const tfa::TriTile& t) const noexcept {
    const std::size_t a = std::hash<tfa::DyadicInterval>{}(t.spatial);
    const std::size_t b = std::hash<tfa::FrequencySquare>{}(t.square);
    return a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  }
};

namespace tfa {

/// Finite collection Ω of pairwise disjoint frequency squares.
class SquareCollection {
 public:
  SquareCollection() = default;
  explicit SquareCollection(std::vector<FrequencySquare> squares) : squares_(std::move(squares)) {
    if (auto clash = first_overlap()) {
      std::ostringstream msg;
      msg << "SquareCollection: squares " << clash->first << " and " << clash->second << " overlap";
      throw std::invalid_argument(msg.str());
    }
  }

  const std::vector<FrequencySquare>& squares() const { return squares_; }
  std::size_t size() const { return squares_.size(); }
  bool empty() const { return squares_.empty(); }
  auto begin() const { return squares_.begin(); }
  auto end() const { return squares_.end(); }
  const FrequencySquare& operator[](std::size_t i) const { return squares_[i]; }

  /// Adds a square if it is disjoint from every member; returns whether it was added.
  bool try_insert(const FrequencySquare& s) {
    for (const auto& t : squares_)
      if (!disjoint(s, t)) return false;
    squares_.push_back(s);
    return true;
  }

  /// Indices of the first overlapping pair, if any. Dyadic squares are nested
  /// or disjoint, so an ancestor lookup settles the common no-overlap case in
  /// O(n·levels); the O(n²) scan runs only to name the offending pair.
  std::optional<std::pair<std::size_t, std::size_t>> first_overlap() const {
    if (!any_overlap()) return std::nullopt;
    for (std::size_t i = 0; i < squares_.size(); ++i)
      for (std::size_t j = i + 1; j < squares_.size(); ++j)
        if (!disjoint(squares_[i], squares_[j])) return std::pair{i, j};
    return std::nullopt;
  }
  bool pairwise_disjoint() const { return !any_overlap(); }

  bool any_overlap() const {
    if (squares_.size() < 2) return false;
    std::unordered_set<FrequencySquare> seen;
    int top = squares_[0].scale();
    for (const auto& s : squares_) {
      if (!seen.insert(s).second) return true;
      top = std::max(top, s.scale());
    }
    for (const auto& s : squares_)
      for (int j = s.scale() + 1; j <= top; ++j)
        if (seen.count(FrequencySquare(s.omega1.ancestor(j), s.omega2.ancestor(j)))) return true;
    return false;
  }

  friend bool operator==(const SquareCollection&, const SquareCollection&) = default;

 private:
  std::vector<FrequencySquare> squares_;
};

/// Text format: one square per line, "j k1 k2". Lines starting with '#' are comments.
inline void write_squares(std::ostream& os, const SquareCollection& omega) {
  for (const auto& s : omega) os << s.scale() << ' ' << s.omega1.position << ' ' << s.omega2.position << '\n';
}

inline SquareCollection read_squares(std::istream& is) {
  std::vector<FrequencySquare> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int j;
    std::int64_t k1, k2;
    if (!(ls >> j >> k1 >> k2)) throw std::runtime_error("read_squares: malformed line " + std::to_string(lineno));
    out.emplace_back(j, k1, k2);
  }
  return SquareCollection(std::move(out));
}

inline std::string squares_to_string(const SquareCollection& omega) {
  std::ostringstream os;
  write_squares(os, omega);
  return os.str();
}

inline SquareCollection squares_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_squares(is);
}

/// Finite set S of tri-tiles, kept in insertion order with lookups by
/// frequency square and by spatial containment.
class TileCollection {
 public:
  TileCollection() = default;
  explicit TileCollection(std::vector<TriTile> tiles) : tiles_(std::move(tiles)) {}

  const std::vector<TriTile>& tiles() const { return tiles_; }
  std::size_t size() const { return tiles_.size(); }
  bool empty() const { return tiles_.empty(); }
  auto begin() const { return tiles_.begin(); }
  auto end() const { return tiles_.end(); }
  const TriTile& operator[](std::size_t i) const { return tiles_[i]; }
  void push_back(const TriTile& t) { tiles_.push_back(t); }

  /// Ω(S): distinct squares in first-appearance order.
  std::vector<FrequencySquare> squares() const {
    std::vector<FrequencySquare> out;
    for (const auto& t : tiles_)
      if (std::find(out.begin(), out.end(), t.square) == out.end()) out.push_back(t.square);
    return out;
  }

  std::map<FrequencySquare, std::vector<TriTile>> by_square() const {
    std::map<FrequencySquare, std::vector<TriTile>> out;
    for (const auto& t : tiles_) out[t.square].push_back(t);
    return out;
  }

  bool contains(const TriTile& t) const { return std::find(tiles_.begin(), tiles_.end(), t) != tiles_.end(); }

 private:
  std::vector<TriTile> tiles_;
};

/// S(I₀) = { s ∈ S : I_s ⊆ I₀ }.
inline TileCollection restrict(const TileCollection& tiles, const DyadicInterval& I0) {
  std::vector<TriTile> out;
  for (const auto& t : tiles)
    if (contained_in(t.spatial, I0)) out.push_back(t);
  return TileCollection(std::move(out));
}

/// For every ω ∈ Ω and every dyadic I with |I|·|ω₁| = 1 meeting `window`, one tile.
inline TileCollection tiles_from_squares(const SquareCollection& omega, const Interval& window) {
  std::vector<TriTile> out;
  for (const auto& sq : omega) {
    const int js = -sq.scale();
    const double len = std::ldexp(1.0, js);
    const auto first = static_cast<std::int64_t>(std::floor(window.lo / len));
    for (std::int64_t k = first;; ++k) {
      const DyadicInterval I{js, k};
      if (I.lo() >= window.hi) break;
      if (I.hi() <= window.lo) continue;
      out.push_back(build_tritile(I, sq));
    }
  }
  return TileCollection(std::move(out));
}

/// Closed axis-parallel box in the frequency plane.
struct Box {
  double x0, y0, x1, y1;
  double side() const { return x1 - x0; }
  double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
};

inline Box box_of(const FrequencySquare& s) {
  return {s.omega1.lo(), s.omega2.lo(), s.omega1.hi(), s.omega2.hi()};
}

/// Bounded open set 𝒪 ⊂ ℝ². Besides the indicator, a region supplies the
/// distance from a box to 𝒪ᶜ (0 when the box meets 𝒪ᶜ) and a conservative
/// test of whether a box meets 𝒪 at all.
struct OpenRegion {
  std::function<bool(double, double)> indicator;
  Box bounds;
  std::function<double(const Box&)> box_distance;
  std::function<bool(const Box&)> box_meets;

  bool contains(double x, double y) const { return indicator(x, y); }

  static OpenRegion empty() {
    return {[](double, double) { return false; }, {0, 0, 0, 0}, [](const Box&) { return 0.0; },
            [](const Box&) { return false; }};
  }

  /// Open disc of radius `radius` centred at (cx, cy).
  static OpenRegion disc(double cx, double cy, double radius) {
    OpenRegion r;
    r.indicator = [=](double x, double y) { return std::hypot(x - cx, y - cy) < radius; };
    r.bounds = {cx - radius, cy - radius, cx + radius, cy + radius};
    r.box_distance = [=](const Box& b) {
      const double fx = std::max(std::abs(b.x0 - cx), std::abs(b.x1 - cx));
      const double fy = std::max(std::abs(b.y0 - cy), std::abs(b.y1 - cy));
      return std::max(0.0, radius - std::hypot(fx, fy));
    };
    r.box_meets = [=](const Box& b) {
      const double nx = std::clamp(cx, b.x0, b.x1), ny = std::clamp(cy, b.y0, b.y1);
      return std::hypot(nx - cx, ny - cy) < radius;
    };
    return r;
  }

  /// Open square (x0, x0 + side) × (y0, y0 + side).
  static OpenRegion open_square(double x0, double y0, double side) {
    OpenRegion r;
    const double x1 = x0 + side, y1 = y0 + side;
    r.indicator = [=](double x, double y) { return x0 < x && x < x1 && y0 < y && y < y1; };
    r.bounds = {x0, y0, x1, y1};
    r.box_distance = [=](const Box& b) {
      return std::max(0.0, std::min({b.x0 - x0, x1 - b.x1, b.y0 - y0, y1 - b.y1}));
    };
    r.box_meets = [=](const Box& b) { return b.x0 < x1 && x0 < b.x1 && b.y0 < y1 && y0 < b.y1; };
    return r;
  }

  /// Region known only through its indicator. Distances are measured on a
  /// lattice of spacing `resolution` with an exact Euclidean distance
  /// transform; accuracy is ±resolution.
  static OpenRegion from_indicator(std::function<bool(double, double)> indicator, Box bounds,
                                   double resolution);
};

namespace detail {

// Squared 1-D distance transform (lower envelope of parabolas).
inline void distance_transform_1d(const std::vector<double>& f, std::vector<double>& d) {
  const std::size_t n = f.size();
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double s;
    while (true) {
      const double p = static_cast<double>(v[k]);
      const double qq = static_cast<double>(q);
      s = ((f[q] + qq * qq) - (f[v[k]] + p * p)) / (2.0 * qq - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {  // k == 0 and new parabola dominates
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  d.assign(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double diff = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = diff * diff + f[v[k]];
  }
}

// Exact Euclidean distance (in lattice units) from each lattice point to the
// nearest point with mask == target.
inline std::vector<double> distance_transform(const std::vector<char>& mask, std::size_t nx, std::size_t ny,
                                              char target) {
  constexpr double inf = 1e300;
  std::vector<double> g(nx * ny);
  std::vector<double> col(ny), out;
  for (std::size_t i = 0; i < nx * ny; ++i) g[i] = mask[i] == target ? 0.0 : inf;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) col[y] = g[x * ny + y];
    distance_transform_1d(col, out);
    for (std::size_t y = 0; y < ny; ++y) g[x * ny + y] = out[y];
  }
  std::vector<double> row(nx);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) row[x] = g[x * ny + y];
    distance_transform_1d(row, out);
    for (std::size_t x = 0; x < nx; ++x) g[x * ny + y] = std::sqrt(out[x]);
  }
  return g;
}

}  // namespace detail

inline OpenRegion OpenRegion::from_indicator(std::function<bool(double, double)> indicator, Box bounds,
                                             double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("from_indicator: resolution must be positive");
  // One lattice cell of margin guarantees complement points on every side.
  const double ox = bounds.x0 - resolution, oy = bounds.y0 - resolution;
  const auto nx = static_cast<std::size_t>(std::ceil((bounds.x1 - bounds.x0) / resolution)) + 3;
  const auto ny = static_cast<std::size_t>(std::ceil((bounds.y1 - bounds.y0) / resolution)) + 3;
  if (nx * ny > (std::size_t{1} << 26)) throw std::invalid_argument("from_indicator: lattice too fine");
  std::vector<char> inside(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      inside[x * ny + y] = indicator(ox + resolution * double(x), oy + resolution * double(y)) ? 1 : 0;
  auto to_out = std::make_shared<std::vector<double>>(detail::distance_transform(inside, nx, ny, 0));
  auto to_in = std::make_shared<std::vector<double>>(detail::distance_transform(inside, nx, ny, 1));

  // Minimum of a lattice field over lattice points inside the box.
  auto box_min = [=](const std::vector<double>& field, const Box& b) {
    const auto lo_x = static_cast<std::int64_t>(std::ceil((b.x0 - ox) / resolution));
    const auto hi_x = static_cast<std::int64_t>(std::floor((b.x1 - ox) / resolution));
    const auto lo_y = static_cast<std::int64_t>(std::ceil((b.y0 - oy) / resolution));
    const auto hi_y = static_cast<std::int64_t>(std::floor((b.y1 - oy) / resolution));
    double best = std::numeric_limits<double>::infinity();
    for (auto x = std::max<std::int64_t>(lo_x, 0); x <= std::min<std::int64_t>(hi_x, std::int64_t(nx) - 1); ++x)
      for (auto y = std::max<std::int64_t>(lo_y, 0); y <= std::min<std::int64_t>(hi_y, std::int64_t(ny) - 1); ++y)
        best = std::min(best, field[std::size_t(x) * ny + std::size_t(y)]);
    return best;
  };

  OpenRegion r;
  r.indicator = indicator;
  r.bounds = bounds;
  r.box_distance = [=](const Box& b) {
    const double d = box_min(*to_out, b);
    return std::isfinite(d) ? d * resolution : 0.0;
  };
  r.box_meets = [=](const Box& b) {
    // Conservative: the lattice may miss features narrower than one cell.
    const Box grown{b.x0 - resolution, b.y0 - resolution, b.x1 + resolution, b.y1 + resolution};
    return box_min(*to_in, grown) * resolution <= resolution;
  };
  return r;
}

inline bool region_contains_square(const OpenRegion& region, const Box& b) {
  const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
  return region.contains(b.x0, b.y0) && region.contains(b.x1, b.y0) && region.contains(b.x0, b.y1) &&
         region.contains(b.x1, b.y1) && region.contains(cx, cy);
}

/// Whitney constant: accepted squares satisfy |ω| ≤ dist(ω, 𝒪ᶜ) ≤ 4·diam(ω).
inline constexpr double kWhitneyUpper = 4.0;

/// Quadtree Whitney cover of `region` by disjoint dyadic squares of side ≥ 2^{-n_max}.
inline SquareCollection whitney_cover(const OpenRegion& region, int n_max) {
  if (n_max < 0) throw std::invalid_argument("whitney_cover: n_max must be non-negative");
  std::vector<FrequencySquare> out;
  const Box& bb = region.bounds;
  const double extent = std::max(bb.x1 - bb.x0, bb.y1 - bb.y0);
  if (!(extent > 0)) return {};
  const int root = static_cast<int>(std::ceil(std::log2(extent)));
  const double len = std::ldexp(1.0, root);
  const auto kx0 = static_cast<std::int64_t>(std::floor(bb.x0 / len));
  const auto kx1 = static_cast<std::int64_t>(std::floor(bb.x1 / len));
  const auto ky0 = static_cast<std::int64_t>(std::floor(bb.y0 / len));
  const auto ky1 = static_cast<std::int64_t>(std::floor(bb.y1 / len));

  std::function<void(const FrequencySquare&)> visit = [&](const FrequencySquare& sq) {
    const Box b = box_of(sq);
    if (!region.box_meets(b)) return;
    const double side = b.side();
    const double d = region.box_distance(b);
    if (d >= side && d <= kWhitneyUpper * b.diameter() && region_contains_square(region, b)) {
      out.push_back(sq);
      return;
    }
    if (sq.scale() <= -n_max) return;
    for (const auto& c1 : sq.omega1.children())
      for (const auto& c2 : sq.omega2.children()) visit(FrequencySquare(c1, c2));
  };
  for (auto kx = kx0; kx <= kx1; ++kx)
    for (auto ky = ky0; ky <= ky1; ++ky) visit(FrequencySquare(root, kx, ky));
  return SquareCollection(std::move(out));
}

/// Shell index n with 2^{-n} ≤ d < 2^{-n+1}.
inline int shell_index(double distance) {
  if (!(distance > 0)) throw std::invalid_argument("shell_index: distance must be positive");
  return -static_cast<int>(std::floor(std::log2(distance)));
}

/// Ω_n: squares of the cover with 2^{-n} ≤ dist(ω, 𝒪ᶜ) < 2^{-n+1}.
inline SquareCollection shell(const SquareCollection& cover, const OpenRegion& region, int n) {
  std::vector<FrequencySquare> out;
  for (const auto& sq : cover)
    if (shell_index(region.box_distance(box_of(sq))) == n) out.push_back(sq);
  return SquareCollection(std::move(out));
}

/// #Ω_n for every populated shell.
inline std::map<int, std::size_t> shell_counts(const SquareCollection& cover, const OpenRegion& region) {
  std::map<int, std::size_t> out;
  for (const auto& sq : cover) ++out[shell_index(region.box_distance(box_of(sq)))];
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const DyadicInterval& d) {
  return os << '[' << d.lo() << ',' << d.hi() << ')';
}
inline std::ostream& operator<<(std::ostream& os, const FrequencySquare& s) {
  return os << s.omega1 << 'x' << s.omega2;
}
inline std::ostream& operator<<(std::ostream& os, const TriTile& t) {
  return os << "I=" << t.spatial << " w=" << t.square;
}

}  // namespace tfa
