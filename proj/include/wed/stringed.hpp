// Bounded weighted string edit distance: furthest-reaching unweighted
// aligner, string reduction, kernel and banded weighted DP.
#ifndef WED_STRINGED_HPP_
#define WED_STRINGED_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wed/core.hpp"
#include "wed/seqkit.hpp"

namespace wed {

// One step group of an alignment: a run of `len` matching diagonal steps
// starting at (x, y), or a single edit at (x, y).
struct EditStep {
  enum class Kind { match_run, substitute, remove, insert };
  Kind kind;
  std::size_t x, y, len;
};

namespace detail {

// Furthest-reaching diagonal search; returns the unweighted distance and a
// compact script, or nothing when the distance exceeds k. Ties in the
// traceback prefer substitution, then deletion, then insertion.
inline std::optional<std::pair<std::int64_t, std::vector<EditStep>>> furthest_reaching(
    const Sequence& x, const Sequence& y, std::int64_t k) {
  if (k < 0) return std::nullopt;
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  const std::int64_t m = static_cast<std::int64_t>(y.size());
  const std::int64_t target = m - n;
  if (target > k || -target > k) return std::nullopt;
  const std::int64_t kk = std::min<std::int64_t>(k, n + m);
  std::optional<LceIndex> index;
  auto lce = [&](std::int64_t px, std::int64_t py) -> std::int64_t {
    if (px >= n || py >= m) return 0;
    if (!index) {
      // Small slides are cheaper by hand than building the index.
      std::int64_t l = 0;
      while (px + l < n && py + l < m && l < 64 && x[px + l] == y[py + l]) ++l;
      if (l < 64 || px + l == n || py + l == m) return l;
      index.emplace(x, y);
    }
    return static_cast<std::int64_t>(index->lce(px, py));
  };
  const std::int64_t width = 2 * kk + 1;
  constexpr std::int64_t kNone = -1;
  std::vector<std::int64_t> front((kk + 1) * width, kNone), start((kk + 1) * width, kNone);
  std::vector<signed char> from((kk + 1) * width, -1);  // 0 sub, 1 del, 2 ins
  auto at = [&](std::int64_t e, std::int64_t d) { return e * width + (d + kk); };
  start[at(0, 0)] = 0;
  front[at(0, 0)] = lce(0, 0);
  std::int64_t found = -1;
  if (target == 0 && front[at(0, 0)] == n) found = 0;
  for (std::int64_t e = 1; e <= kk && found < 0; ++e) {
    for (std::int64_t d = -e; d <= e; ++d) {
      std::int64_t best = kNone;
      signed char src = -1;
      auto offer = [&](std::int64_t cand, signed char s) {
        if (cand > best) {
          best = cand;
          src = s;
        }
      };
      if (d >= -(e - 1) && d <= e - 1 && front[at(e - 1, d)] != kNone) {
        std::int64_t px = front[at(e - 1, d)];
        if (px + 1 <= n && px + 1 + d <= m) offer(px + 1, 0);
      }
      if (d + 1 <= e - 1 && front[at(e - 1, d + 1)] != kNone) {
        std::int64_t px = front[at(e - 1, d + 1)];
        if (px + 1 <= n && px + 1 + d >= 0) offer(px + 1, 1);
      }
      if (d - 1 >= -(e - 1) && front[at(e - 1, d - 1)] != kNone) {
        std::int64_t px = front[at(e - 1, d - 1)];
        if (px + d <= m && px + d >= 0) offer(px, 2);
      }
      if (best == kNone) continue;
      start[at(e, d)] = best;
      from[at(e, d)] = src;
      front[at(e, d)] = best + lce(best, best + d);
      if (d == target && front[at(e, d)] == n) {
        found = e;
        break;
      }
    }
  }
  if (found < 0) return std::nullopt;
  std::vector<EditStep> rev;
  std::int64_t e = found, d = target;
  while (true) {
    std::int64_t s = start[at(e, d)], f = front[at(e, d)];
    if (f > s)
      rev.push_back({EditStep::Kind::match_run, static_cast<std::size_t>(s), static_cast<std::size_t>(s + d),
                     static_cast<std::size_t>(f - s)});
    if (e == 0) break;
    switch (from[at(e, d)]) {
      case 0:
        rev.push_back({EditStep::Kind::substitute, static_cast<std::size_t>(s - 1),
                       static_cast<std::size_t>(s - 1 + d), 1});
        break;
      case 1:
        rev.push_back({EditStep::Kind::remove, static_cast<std::size_t>(s - 1), static_cast<std::size_t>(s + d),
                       1});
        d += 1;
        break;
      default:
        rev.push_back({EditStep::Kind::insert, static_cast<std::size_t>(s), static_cast<std::size_t>(s + d - 1),
                       1});
        d -= 1;
        break;
    }
    --e;
  }
  std::reverse(rev.begin(), rev.end());
  return std::make_pair(found, std::move(rev));
}

inline Alignment script_to_alignment(const std::vector<EditStep>& script) {
  Alignment a;
  a.path.emplace_back(0, 0);
  for (const auto& s : script) {
    switch (s.kind) {
      case EditStep::Kind::match_run:
        for (std::size_t t = 1; t <= s.len; ++t) a.path.emplace_back(s.x + t, s.y + t);
        break;
      case EditStep::Kind::substitute:
        a.path.emplace_back(s.x + 1, s.y + 1);
        break;
      case EditStep::Kind::remove:
        a.path.emplace_back(s.x + 1, s.y);
        break;
      case EditStep::Kind::insert:
        a.path.emplace_back(s.x, s.y + 1);
        break;
    }
  }
  return a;
}

}  // namespace detail

struct UnweightedResult {
  std::int64_t cost;
  Alignment alignment;
};

// Exact unweighted edit distance with a witnessing alignment, or nothing if
// the distance exceeds k.
inline std::optional<UnweightedResult> unweighted_ed_bounded(const Sequence& x, const Sequence& y,
                                                             std::int64_t k) {
  auto r = detail::furthest_reaching(x, y, k);
  if (!r) return std::nullopt;
  return UnweightedResult{r->first, detail::script_to_alignment(r->second)};
}

// Caps powers Q^{4k+1} with |Q| <= 2k, then keeps 21k^3 symbols at each end
// once the result reaches 42k^3.
inline Sequence string_reduction(const Sequence& p, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const std::size_t e = static_cast<std::size_t>(4 * k);
  const std::size_t maxq = static_cast<std::size_t>(2 * k);
  Sequence r = periodicity_reduction(p, e, [&](std::size_t i, std::size_t j) { return j - i <= maxq; });
  const std::int64_t cut = poly_bound(21, k, 3);
  if (static_cast<std::int64_t>(r.size()) >= 2 * cut) {
    Sequence out(r.begin(), r.begin() + cut);
    out.insert(out.end(), r.end() - cut, r.end());
    return out;
  }
  return r;
}

struct Replacement {
  std::size_t x_begin, x_end, y_begin, y_end;
  Sequence text;
};

struct StringKernelResult {
  Sequence x, y;
  std::vector<Replacement> replacements;
  bool failed = false;
};

inline StringKernelResult string_kernel(const Sequence& x, const Sequence& y, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  StringKernelResult res;
  const std::int64_t limit = poly_bound(85, k, 4);
  if (static_cast<std::int64_t>(x.size()) <= limit && static_cast<std::int64_t>(y.size()) <= limit) {
    res.x = x;
    res.y = y;
    return res;
  }
  auto fr = detail::furthest_reaching(x, y, k);
  if (!fr) {
    res.failed = true;
    res.x.assign(static_cast<std::size_t>(k + 1), Symbol{1});
    return res;
  }
  std::size_t edited = 0, runs = 0;
  for (const auto& s : fr->second) {
    if (s.kind == EditStep::Kind::match_run) {
      ++runs;
      Sequence piece(x.begin() + s.x, x.begin() + s.x + s.len);
      Sequence red = string_reduction(piece, k);
      res.x.insert(res.x.end(), red.begin(), red.end());
      res.y.insert(res.y.end(), red.begin(), red.end());
      res.replacements.push_back({s.x, s.x + s.len, s.y, s.y + s.len, std::move(red)});
    } else {
      if (s.kind != EditStep::Kind::insert) {
        res.x.push_back(x[s.x]);
        ++edited;
      }
      if (s.kind != EditStep::Kind::remove) res.y.push_back(y[s.y]);
    }
  }
  // At most k edited characters of X and at most k+1 matched runs.
  if (static_cast<std::int64_t>(edited) > k || static_cast<std::int64_t>(runs) > k + 1)
    throw std::logic_error("alignment walk produced more pieces than its cost allows");
  return res;
}

// ed^w(X,Y) if it is at most k, INF otherwise. Only cells with |i-j| <= k are
// evaluated; w must be normalized for the band to be exact.
inline Cost banded_weighted_ed(const Sequence& x, const Sequence& y, std::int64_t k, const WeightTable& w) {
  if (k < 0) return Cost::inf();
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  const std::int64_t m = static_cast<std::int64_t>(y.size());
  if (n - m > k || m - n > k) return Cost::inf();
  const std::int64_t kk = std::min<std::int64_t>(k, std::max(n, m));
  const Cost cap = Cost::from_units(k);
  auto clip = [&](Cost c) { return c > cap ? Cost::inf() : c; };
  const std::int64_t width = 2 * kk + 1;
  std::vector<Cost> prev(width, Cost::inf()), cur(width, Cost::inf());
  // Row i holds columns j in [i-kk, i+kk] at offset j - i + kk.
  prev[kk] = Cost();
  for (std::int64_t j = 1; j <= std::min(m, kk); ++j) prev[j + kk] = clip(prev[j - 1 + kk] + w(kEpsilon, y[j - 1]));
  for (std::int64_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), Cost::inf());
    std::int64_t jlo = std::max<std::int64_t>(0, i - kk), jhi = std::min(m, i + kk);
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      std::int64_t o = j - i + kk;
      Cost best = Cost::inf();
      // From (i-1, j): offset o+1 in the previous row.
      if (o + 1 < width) best = std::min(best, prev[o + 1] + w(x[i - 1], kEpsilon));
      if (j > 0) {
        best = std::min(best, prev[o] + w(x[i - 1], y[j - 1]));
        if (o - 1 >= 0) best = std::min(best, cur[o - 1] + w(kEpsilon, y[j - 1]));
      }
      cur[o] = clip(best);
    }
    std::swap(prev, cur);
  }
  return prev[m - n + kk];
}

inline Cost weighted_ed_le_k(const Sequence& x, const Sequence& y, std::int64_t k, const WeightTable& w) {
  StringKernelResult kr = string_kernel(x, y, k);
  return banded_weighted_ed(kr.x, kr.y, k, w);
}

}  // namespace wed

#endif
