#pragma once

// Random configurations for tests, suites and the acceptance run.

#include <random>
#include <set>

#include "columns_rows.hpp"

namespace tfa {

// Reference grid for tile-level tests: frequencies in [0, 12), band ±32.
inline const Grid kTileGrid(4096, 64.0);
inline const Interval kTileBand{0.0, 12.0};

inline DyadicInterval random_dyadic_in(const Interval& range, int scale, std::mt19937_64& rng) {
  const double len = std::ldexp(1.0, scale);
  const auto first = static_cast<std::int64_t>(std::ceil(range.lo / len));
  const auto last = static_cast<std::int64_t>(std::floor(range.hi / len)) - 1;
  std::uniform_int_distribution<std::int64_t> pick(first, std::max(first, last));
  return {scale, pick(rng)};
}

/// Column (or, with reflect, the mirror row) of up to `size` tiles. Distinct
/// squares have disjoint cross intervals; with `separated`, cross intervals
/// are also kept one sibling apart and there is one tile per square, so the
/// dilated wave packets are exactly orthogonal.
inline Column random_column(std::mt19937_64& rng, std::size_t size, bool separated = false) {
  std::uniform_int_distribution<int> top_scale(0, 3);
  const int a = top_scale(rng);
  const DyadicInterval It = random_dyadic_in({-8, 8}, a, rng);
  const DyadicInterval w1 = random_dyadic_in({0, 8}, -a, rng);
  const DyadicInterval w2 = random_dyadic_in(kTileBand, -a, rng);
  const TriTile top = build_tritile(It, FrequencySquare(w1, w2));

  std::vector<TriTile> members;
  std::vector<DyadicInterval> cross;
  std::set<TriTile, decltype(&selection_order)> seen(&selection_order);
  std::uniform_int_distribution<int> scale(-a, 1);
  for (int attempt = 0; attempt < 4000 && members.size() < size; ++attempt) {
    const int j = scale(rng);
    const DyadicInterval s1 = w1.ancestor(j);
    const DyadicInterval s2 = random_dyadic_in(kTileBand, j, rng);
    const DyadicInterval Is = random_dyadic_in(It.interval(), -j, rng);
    const TriTile s = build_tritile(Is, FrequencySquare(s1, s2));
    bool ok = !seen.count(s);
    for (std::size_t i = 0; ok && i < members.size(); ++i) {
      if (members[i].square == s.square) {
        ok = !separated;
        continue;
      }
      if (separated) {
        const Interval a2 = cross[i].interval().dilate(1.1), b2 = s2.interval().dilate(1.1);
        ok = !a2.intersects(b2);
      } else {
        ok = disjoint(cross[i], s2);
      }
    }
    if (!ok) continue;
    seen.insert(s);
    members.push_back(s);
    cross.push_back(s2);
  }
  return Column(top, std::move(members));
}

inline Row reflect(const Column& C) {
  std::vector<TriTile> m;
  for (const auto& s : C.members) m.push_back(s.reflected());
  return Row(C.top.reflected(), std::move(m));
}

/// h_ω random with spectrum on the dilated output interval of ω, for every square in S.
inline SequenceH random_h(const Grid& grid, const std::vector<FrequencySquare>& squares, std::mt19937_64& rng) {
  SequenceH h(grid);
  for (const auto& w : squares) {
    const TriTile probe = build_tritile(make_dyadic(-w.scale(), 0), w);
    h.set(w, random_bandlimited(grid, probe.omega3().dilate(1.1), rng));
  }
  return h;
}

inline SequenceH reflect(const SequenceH& h) {
  SequenceH out(h.grid);
  for (const auto& [w, v] : h.entries) out.set(w.reflected(), v);
  return out;
}

/// Up to `count` pairwise disjoint squares of side 1/2, 1 or 2 inside [0, extent)².
inline SquareCollection random_squares(std::mt19937_64& rng, std::size_t count, double extent = 8.0) {
  std::uniform_int_distribution<int> scale(-1, 1);
  SquareCollection omega;
  for (int attempt = 0; attempt < 1000 && omega.size() < count; ++attempt) {
    const int j = scale(rng);
    omega.try_insert(FrequencySquare(random_dyadic_in({0, extent}, j, rng), random_dyadic_in({0, extent}, j, rng)));
  }
  return omega;
}

/// Tiles over random disjoint squares, spatial window [-w, w), optionally
/// thinned to at most `max_tiles` by uniform sampling.
inline TileCollection random_collection(std::mt19937_64& rng, std::size_t squares, double w = 4.0,
                                        std::size_t max_tiles = 0) {
  const TileCollection all = tiles_from_squares(random_squares(rng, squares), {-w, w});
  if (max_tiles == 0 || all.size() <= max_tiles) return all;
  std::vector<TriTile> pool(all.begin(), all.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(max_tiles);
  return TileCollection(pool);
}

/// Measurable sets as 1-3 random intervals in [-4, 4).
inline std::vector<Interval> random_interval_union(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-4, 4), len(0.1, 2.0);
  std::uniform_int_distribution<int> count(1, 3);
  std::vector<Interval> parts;
  for (int k = count(rng); k > 0; --k) {
    const double a = pos(rng);
    parts.push_back({a, a + len(rng)});
  }
  return parts;
}

inline SampledFunction indicator_of(const Grid& grid, const std::vector<Interval>& parts) {
  return SampledFunction::from(grid, [&](double x) {
    for (const auto& I : parts)
      if (I.contains(x)) return 1.0;
    return 0.0;
  });
}

/// u·1_F scaled so that |u·1_F| ≤ 1_F.
inline SampledFunction dominated_by(const SampledFunction& u, const SampledFunction& F) {
  SampledFunction out = pointwise_product(u, F);
  const double m = lp_norm(out, std::numeric_limits<double>::infinity());
  if (m > 0)
    for (auto& v : out.values) v /= m;
  return out;
}

/// h normalized so that its ℓ^{r'} aggregate is at most 1.
inline void normalize_aggregate(SequenceH& h, double r_prime) {
  const SampledFunction agg = h.aggregate(r_prime);
  double m = 0;
  for (std::size_t i = 0; i < agg.size(); ++i) m = std::max(m, agg[i].real());
  if (m > 0)
    for (auto& [w, v] : h.entries)
      for (auto& x : v.values) x /= m;
}

/// Tiles plus random inputs over them: the standard instance of the tile suites.
struct TileInstance {
  TileCollection S;
  SampledFunction f, g;
  SequenceH h;
};

inline TileInstance random_tile_instance(std::mt19937_64& rng, std::size_t squares, std::size_t max_tiles = 0,
                                         const Grid& grid = kTileGrid) {
  TileInstance in;
  in.S = random_collection(rng, squares, 4.0, max_tiles);
  in.f = random_bandlimited(grid, kTileBand, rng);
  in.g = random_bandlimited(grid, kTileBand, rng);
  in.h = random_h(grid, in.S.squares(), rng);
  return in;
}

}  // namespace tfa
