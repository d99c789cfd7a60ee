// Weighted Dyck edit distance: parenthesis alphabets, greedy preprocessing,
// interval DPs over non-crossing matchings, DyckReduction and the kernel.
#ifndef WED_DYCKKIT_HPP_
#define WED_DYCKKIT_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wed/core.hpp"
#include "wed/seqkit.hpp"

namespace wed {

// Opening symbols T, closing symbols T-bar and the involution between them.
class DyckAlphabet {
 public:
  DyckAlphabet() = default;

  void add_pair(Symbol open, Symbol close) {
    if (open == kEpsilon || close == kEpsilon || open == close)
      throw std::invalid_argument("invalid parenthesis pair");
    std::size_t need = std::max(open, close) + 1;
    if (comp_.size() < need) {
      comp_.resize(need, WeightTable::kNone);
      opening_.resize(need, 0);
    }
    if (comp_[open] != WeightTable::kNone || comp_[close] != WeightTable::kNone)
      throw std::invalid_argument("symbol already belongs to a parenthesis pair");
    comp_[open] = close;
    comp_[close] = open;
    opening_[open] = 1;
  }

  bool contains(Symbol s) const { return s < comp_.size() && comp_[s] != WeightTable::kNone; }
  bool is_opening(Symbol s) const {
    if (!contains(s)) throw std::invalid_argument("symbol outside the parenthesis alphabet");
    return opening_[s] != 0;
  }
  Symbol complement(Symbol s) const {
    if (s == kEpsilon) return kEpsilon;
    if (!contains(s)) throw std::invalid_argument("symbol outside the parenthesis alphabet");
    return comp_[s];
  }
  std::vector<Symbol> openings() const {
    std::vector<Symbol> out;
    for (Symbol s = 1; s < comp_.size(); ++s)
      if (contains(s) && opening_[s]) out.push_back(s);
    return out;
  }
  Symbol smallest_opening() const {
    for (Symbol s = 1; s < comp_.size(); ++s)
      if (contains(s) && opening_[s]) return s;
    throw std::invalid_argument("empty parenthesis alphabet");
  }
  Symbol max_symbol() const { return comp_.empty() ? 0 : static_cast<Symbol>(comp_.size() - 1); }

  // Installs the involution into a weight table covering every symbol.
  void attach(WeightTable& w) const {
    if (w.sigma() < max_symbol()) w.grow(max_symbol());
    std::vector<Symbol> comp(w.sigma() + 1, WeightTable::kNone);
    comp[0] = kEpsilon;
    for (Symbol s = 1; s < comp_.size(); ++s) comp[s] = comp_[s];
    w.set_complement(std::move(comp));
  }

  // Reverses the order and complements every symbol.
  Sequence reverse_complement(const Sequence& x) const {
    Sequence out(x.rbegin(), x.rend());
    for (Symbol& s : out) s = complement(s);
    return out;
  }

 private:
  std::vector<Symbol> comp_;
  std::vector<char> opening_;
};

// Reads `OPEN<TAB>CLOSE` lines; `#` starts a comment line.
inline DyckAlphabet read_pairs_file(std::istream& in, Alphabet& alpha) {
  DyckAlphabet d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw std::invalid_argument("pairs file line " + std::to_string(lineno) + ": expected OPEN<TAB>CLOSE");
    std::string a = line.substr(0, tab), b = line.substr(tab + 1);
    if (a == "-" || b == "-") throw std::invalid_argument("pairs file line " + std::to_string(lineno) + ": '-' is reserved");
    try {
      d.add_pair(alpha.intern(a), alpha.intern(b));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("pairs file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return d;
}

struct HeightProfile {
  std::vector<std::int64_t> h;  // h[0..n]
  std::vector<std::size_t> peaks, valleys;
};

inline HeightProfile height_profile(const Sequence& x, const DyckAlphabet& alpha) {
  HeightProfile p;
  p.h.assign(x.size() + 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) p.h[i + 1] = p.h[i] + (alpha.is_opening(x[i]) ? 1 : -1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (p.h[i - 1] > p.h[i] && p.h[i] < p.h[i + 1]) p.valleys.push_back(i);
    if (p.h[i - 1] < p.h[i] && p.h[i] > p.h[i + 1]) p.peaks.push_back(i);
  }
  return p;
}

inline std::size_t valley_count(const Sequence& x, const DyckAlphabet& alpha) {
  return height_profile(x, alpha).valleys.size();
}

// Removes adjacent (a, complement of a) pairs with a opening until none remain.
inline Sequence greedy_preprocess(const Sequence& x, const DyckAlphabet& alpha) {
  Sequence st;
  st.reserve(x.size());
  for (Symbol s : x) {
    if (!alpha.is_opening(s) && !st.empty() && alpha.is_opening(st.back()) && alpha.complement(st.back()) == s)
      st.pop_back();
    else
      st.push_back(s);
  }
  return st;
}

inline bool is_preprocessed(const Sequence& x, const DyckAlphabet& alpha) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (alpha.is_opening(x[i]) && alpha.complement(x[i]) == x[i + 1]) return false;
  return true;
}

inline Cost single_cost(Symbol x, const WeightTable& w) { return w(x, kEpsilon); }

inline Cost pair_cost(Symbol x, Symbol y, const WeightTable& w, const DyckAlphabet& alpha) {
  Cost best = w(x, kEpsilon) + w(y, kEpsilon);
  for (Symbol z : alpha.openings()) best = std::min(best, w(x, z) + w(y, alpha.complement(z)));
  return best;
}

struct DyckMatching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by first index
};

// Checks the non-crossing and disjointness invariants.
inline bool is_noncrossing(const DyckMatching& m, std::size_t n) {
  std::vector<std::int64_t> mate(n, -1);
  for (auto [i, j] : m.pairs) {
    if (i >= j || j >= n || mate[i] >= 0 || mate[j] >= 0) return false;
    mate[i] = static_cast<std::int64_t>(j);
    mate[j] = static_cast<std::int64_t>(i);
  }
  std::vector<std::size_t> st;
  for (std::size_t p = 0; p < n; ++p) {
    if (mate[p] < 0) continue;
    if (static_cast<std::size_t>(mate[p]) > p) {
      st.push_back(p);
    } else {
      if (st.empty() || st.back() != static_cast<std::size_t>(mate[p])) return false;
      st.pop_back();
    }
  }
  return true;
}

namespace detail {

// Symbol-indexed single and pair costs in scaled units.
class DyckCosts {
 public:
  DyckCosts(const Sequence& x, const WeightTable& w, const DyckAlphabet& alpha) {
    Symbol hi = 0;
    for (Symbol s : x) hi = std::max(hi, s);
    n_ = hi + 1;
    single_.assign(n_, Cost());
    pair_.assign(n_ * n_, Cost::inf());
    std::vector<char> used(n_, 0);
    for (Symbol s : x) used[s] = 1;
    for (Symbol a = 1; a < n_; ++a) {
      if (!used[a]) continue;
      single_[a] = single_cost(a, w);
      for (Symbol b = 1; b < n_; ++b)
        if (used[b]) pair_[a * n_ + b] = pair_cost(a, b, w, alpha);
    }
  }
  Cost single(Symbol a) const { return single_[a]; }
  Cost pair(Symbol a, Symbol b) const { return pair_[a * n_ + b]; }

 private:
  std::size_t n_ = 0;
  std::vector<Cost> single_, pair_;
};

inline DyckMatching trace_dense(const std::vector<std::int64_t>& choice, std::size_t n) {
  DyckMatching m;
  auto at = [&](std::size_t i, std::size_t j) { return i * (n + 1) + j; };
  std::vector<std::pair<std::size_t, std::size_t>> st{{0, n}};
  while (!st.empty()) {
    auto [i, j] = st.back();
    st.pop_back();
    if (i >= j) continue;
    std::int64_t c = choice[at(i, j)];
    if (c < 0) {
      st.push_back({i + 1, j});
    } else {
      std::size_t mm = static_cast<std::size_t>(c);
      m.pairs.push_back({i, mm});
      st.push_back({mm + 1, j});
      st.push_back({i + 1, mm});
    }
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

struct DyckResult {
  Cost cost;
  DyckMatching matching;
};

// O(n^3) interval DP over every interval.
inline DyckResult dense_dyck(const Sequence& x, const DyckCosts& c) {
  const std::size_t n = x.size();
  std::vector<Cost> d((n + 1) * (n + 1), Cost());
  std::vector<std::int64_t> choice((n + 1) * (n + 1), -1);
  auto at = [&](std::size_t i, std::size_t j) { return i * (n + 1) + j; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      Cost best = c.single(x[i]) + d[at(i + 1, j)];
      std::int64_t pick = -1;
      for (std::size_t m = i + 1; m < j; ++m) {
        Cost v = c.pair(x[i], x[m]) + d[at(i + 1, m)] + d[at(m + 1, j)];
        if (v < best) {
          best = v;
          pick = static_cast<std::int64_t>(m);
        }
      }
      d[at(i, j)] = best;
      choice[at(i, j)] = pick;
    }
  }
  return {d[at(0, n)], trace_dense(choice, n)};
}

// Interval DP restricted to intervals [i, j) whose height imbalance
// (H(i) - min) + (H(j) - min), min over H[i..j], is at most 2k. Every
// unmatched position costs at least 1 and every imperfect pair at least 1
// while covering at most 2 units of imbalance, so pruned intervals cost more
// than k under normalized weights. Values above k become INF.
class BandedDyck {
 public:
  BandedDyck(const Sequence& x, const std::vector<std::int64_t>& h, const DyckCosts& c, std::int64_t k)
      : x_(x), h_(h), c_(c), k_(k), cap_(Cost::from_units(k)), rmq_(h), ends_(x.size() + 1) {}

  DyckResult run() {
    const std::size_t n = x_.size();
    for (std::size_t i = n + 1; i-- > 0;) {
      enumerate_ends(i);
      auto& row = ends_[i];
      for (auto& cell : row) {
        std::size_t j = cell.end;
        if (j == i) {
          cell.cost = Cost();
          continue;
        }
        Cost best = c_.single(x_[i]) + lookup(i + 1, j);
        std::int64_t pick = -1;
        for (const auto& mid : ends_[i + 1]) {
          std::size_t m = mid.end;
          if (m >= j) break;
          if (mid.cost.is_inf()) continue;
          Cost v = c_.pair(x_[i], x_[m]) + mid.cost;
          if (v > cap_) continue;
          v = v + lookup(m + 1, j);
          if (v < best) {
            best = v;
            pick = static_cast<std::int64_t>(m);
          }
        }
        cell.cost = best > cap_ ? Cost::inf() : best;
        cell.choice = pick;
      }
    }
    DyckResult r;
    r.cost = lookup(0, n);
    if (!r.cost.is_inf()) r.matching = trace(n);
    return r;
  }

 private:
  struct Cell {
    std::size_t end;
    Cost cost;
    std::int64_t choice = -1;
  };

  const Cell* find(std::size_t i, std::size_t j) const {
    const auto& row = ends_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j, [](const Cell& c, std::size_t v) { return c.end < v; });
    return it != row.end() && it->end == j ? &*it : nullptr;
  }
  Cost lookup(std::size_t i, std::size_t j) const {
    const Cell* c = find(i, j);
    return c ? c->cost : Cost::inf();
  }

  // First position p in (from, limit] with h[p] <= t, or nothing.
  std::optional<std::size_t> next_at_most(std::size_t from, std::int64_t t) const {
    const std::size_t n1 = h_.size();
    if (from + 1 >= n1 || rmq_.query(from + 1, n1) > t) return std::nullopt;
    std::size_t lo = from + 1, hi = n1;  // answer in [lo, hi)
    std::size_t step = 1;
    // Gallop, then bisect.
    while (lo + step < hi && rmq_.query(lo, lo + step) > t) {
      lo += step;
      step *= 2;
    }
    hi = std::min(hi, lo + step);
    while (hi - lo > 1) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (rmq_.query(lo, mid) <= t)
        hi = mid;
      else
        lo = mid;
    }
    return lo;
  }

  void enumerate_ends(std::size_t i) {
    auto& row = ends_[i];
    const std::int64_t hi_ = h_[i];
    std::int64_t mn = hi_;
    std::size_t j = i;
    row.push_back({i, Cost(), -1});
    while (true) {
      std::int64_t t = 2 * mn + 2 * k_ - hi_;
      auto nx = next_at_most(j, t);
      if (!nx) break;
      j = *nx;
      mn = std::min(mn, h_[j]);
      if (hi_ - mn > 2 * k_) break;
      if ((hi_ - mn) + (h_[j] - mn) <= 2 * k_) row.push_back({j, Cost(), -1});
    }
  }

  DyckMatching trace(std::size_t n) const {
    DyckMatching m;
    std::vector<std::pair<std::size_t, std::size_t>> st{{0, n}};
    while (!st.empty()) {
      auto [i, j] = st.back();
      st.pop_back();
      if (i >= j) continue;
      const Cell* c = find(i, j);
      if (c->choice < 0) {
        st.push_back({i + 1, j});
      } else {
        std::size_t mm = static_cast<std::size_t>(c->choice);
        m.pairs.push_back({i, mm});
        st.push_back({mm + 1, j});
        st.push_back({i + 1, mm});
      }
    }
    std::sort(m.pairs.begin(), m.pairs.end());
    return m;
  }

  const Sequence& x_;
  const std::vector<std::int64_t>& h_;
  const DyckCosts& c_;
  std::int64_t k_;
  Cost cap_;
  RangeMin<std::int64_t> rmq_;
  std::vector<std::vector<Cell>> ends_;
};

}  // namespace detail

using DyckResult = detail::DyckResult;

// dyck^w(X) with a witnessing matching. With a band k the value is clipped
// at k (INF above) and only intervals that can cost at most k are visited;
// the band needs normalized weights.
inline DyckResult weighted_dyck_dp(const Sequence& x, const WeightTable& w, const DyckAlphabet& alpha,
                                   std::optional<std::int64_t> band = std::nullopt) {
  detail::DyckCosts costs(x, w, alpha);
  if (!band) return detail::dense_dyck(x, costs);
  if (*band < 0) return {Cost::inf(), {}};
  HeightProfile hp = height_profile(x, alpha);
  return detail::BandedDyck(x, hp.h, costs, *band).run();
}

inline Cost dyck_matching_cost(const Sequence& x, const DyckMatching& m, const WeightTable& w,
                               const DyckAlphabet& alpha) {
  std::vector<char> used(x.size(), 0);
  Cost total;
  for (auto [i, j] : m.pairs) {
    used[i] = used[j] = 1;
    total = total + pair_cost(x[i], x[j], w, alpha);
  }
  for (std::size_t p = 0; p < x.size(); ++p)
    if (!used[p]) total = total + single_cost(x[p], w);
  return total;
}

struct UnweightedDyckResult {
  std::int64_t cost;
  DyckMatching matching;
};

// Unweighted Dyck distance if it is at most k, by the banded DP under the
// discrete metric.
inline std::optional<UnweightedDyckResult> unweighted_dyck_bounded(const Sequence& x, const DyckAlphabet& alpha,
                                                                   std::int64_t k) {
  if (k < 0) return std::nullopt;
  WeightTable unit(alpha.max_symbol());
  DyckResult r = weighted_dyck_dp(x, unit, alpha, k);
  if (r.cost.is_inf()) return std::nullopt;
  return UnweightedDyckResult{r.cost.scaled() / Cost::kScale, std::move(r.matching)};
}

// Caps powers Q^{8k+1} of primitive Q with |Q| <= 4k, then keeps 78k^3
// symbols at each end once the result reaches 156k^3.
inline Sequence dyck_reduction(const Sequence& p, std::int64_t k, const DyckAlphabet& alpha) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  for (Symbol s : p)
    if (!alpha.is_opening(s)) throw std::invalid_argument("dyck_reduction expects opening symbols only");
  PeriodIndex per(p);
  const std::size_t maxq = static_cast<std::size_t>(4 * k);
  Sequence r = periodicity_reduction(p, static_cast<std::size_t>(8 * k), [&](std::size_t i, std::size_t j) {
    return j - i <= maxq && per.is_primitive(i, j);
  });
  const std::int64_t cut = poly_bound(78, k, 3);
  if (static_cast<std::int64_t>(r.size()) >= 2 * cut) {
    Sequence out(r.begin(), r.begin() + cut);
    out.insert(out.end(), r.end() - cut, r.end());
    return out;
  }
  return r;
}

// A maximal matched run X[a..b) of openings and its partner run X[c..d).
struct MatchedRun {
  std::size_t a, b, c, d;
};

struct DyckKernelResult {
  Sequence x;
  std::vector<MatchedRun> runs;
  bool failed = false;
};

// X[a..b) in T*, X[c..d) in T-bar*, equal lengths, b <= c, and
// H(b) + H(c) - 2 min H[b..c] <= 2k.
inline bool is_k_synchronized(const Sequence& x, const DyckAlphabet& alpha, const MatchedRun& r, std::int64_t k) {
  if (r.a > r.b || r.c > r.d || r.d > x.size() || r.b > r.c || r.b - r.a != r.d - r.c) return false;
  for (std::size_t p = r.a; p < r.b; ++p)
    if (!alpha.is_opening(x[p])) return false;
  for (std::size_t p = r.c; p < r.d; ++p)
    if (alpha.is_opening(x[p])) return false;
  HeightProfile hp = height_profile(x, alpha);
  std::int64_t mn = *std::min_element(hp.h.begin() + r.b, hp.h.begin() + r.c + 1);
  return hp.h[r.b] + hp.h[r.c] - 2 * mn <= 2 * k;
}

inline DyckKernelResult dyck_kernel_trace(const Sequence& x, std::int64_t k, const DyckAlphabet& alpha) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!is_preprocessed(x, alpha)) throw std::invalid_argument("dyck_kernel expects greedily preprocessed input");
  DyckKernelResult res;
  if (static_cast<std::int64_t>(x.size()) <= poly_bound(630, k, 4)) {
    res.x = x;
    return res;
  }
  auto ud = unweighted_dyck_bounded(x, alpha, k);
  if (!ud) {
    // a^{k+1} would only cost about (k+1)/2 because two equal openings can
    // be repaired by one substitution; a^{2k+1} needs k+1 edits.
    res.failed = true;
    res.x.assign(static_cast<std::size_t>(2 * k + 1), alpha.smallest_opening());
    return res;
  }
  const std::size_t n = x.size();
  constexpr std::size_t kNoMate = static_cast<std::size_t>(-1);
  std::vector<std::size_t> mate(n, kNoMate);
  for (auto [i, j] : ud->matching.pairs) {
    mate[i] = j;
    mate[j] = i;
  }
  // A position is edited unless it is an opening paired with its complement
  // to the right, or the closing side of such a pair.
  std::vector<char> perfect(n, 0);
  for (auto [i, j] : ud->matching.pairs)
    if (alpha.is_opening(x[i]) && alpha.complement(x[i]) == x[j]) perfect[i] = perfect[j] = 1;
  std::vector<std::size_t> close_end(n, kNoMate);
  std::vector<Sequence> close_text(n);
  for (std::size_t i = 0; i < n;) {
    if (!perfect[i]) {
      res.x.push_back(x[i]);
      ++i;
      continue;
    }
    if (mate[i] < i) {
      if (close_end[i] == kNoMate) throw std::logic_error("closing run reached before its opening run");
      res.x.insert(res.x.end(), close_text[i].begin(), close_text[i].end());
      i = close_end[i];
      continue;
    }
    std::size_t a = i, b = i + 1;
    while (b < n && perfect[b] && mate[b] > b && mate[b] + 1 == mate[b - 1]) ++b;
    std::size_t c = mate[b - 1], d = mate[a] + 1;
    res.runs.push_back({a, b, c, d});
    Sequence red = dyck_reduction(Sequence(x.begin() + a, x.begin() + b), k, alpha);
    res.x.insert(res.x.end(), red.begin(), red.end());
    close_text[c] = alpha.reverse_complement(red);
    close_end[c] = d;
    i = b;
  }
  return res;
}

inline Sequence dyck_kernel(const Sequence& x, std::int64_t k, const DyckAlphabet& alpha) {
  return dyck_kernel_trace(x, k, alpha).x;
}

inline Cost weighted_dyck_le_k(const Sequence& x, std::int64_t k, const WeightTable& w, const DyckAlphabet& alpha) {
  if (k < 0) return Cost::inf();
  Sequence pre = greedy_preprocess(x, alpha);
  if (k == 0) return weighted_dyck_dp(pre, w, alpha, 0).cost;
  Sequence ker = dyck_kernel(pre, k, alpha);
  return weighted_dyck_dp(ker, w, alpha, k).cost.clip(k);
}

}  // namespace wed

#endif
