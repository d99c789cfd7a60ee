// Brute-force references: quadratic and exhaustive edit distances, forest
// mapping enumeration, Dyck matching enumeration and naive string scans.
// None of these share code paths with the kernels they check.
#ifndef WED_ORACLES_HPP_
#define WED_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wed/core.hpp"
#include "wed/dyckkit.hpp"
#include "wed/foresttk.hpp"

namespace wed::oracle {

// Textbook quadratic table.
inline Cost full_dp_weighted_ed(const Sequence& x, const Sequence& y, const WeightTable& w) {
  const std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<Cost>> d(n + 1, std::vector<Cost>(m + 1));
  for (std::size_t i = 1; i <= n; ++i) d[i][0] = d[i - 1][0] + w(x[i - 1], kEpsilon);
  for (std::size_t j = 1; j <= m; ++j) d[0][j] = d[0][j - 1] + w(kEpsilon, y[j - 1]);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j] + w(x[i - 1], kEpsilon), d[i][j - 1] + w(kEpsilon, y[j - 1]),
                          d[i - 1][j - 1] + w(x[i - 1], y[j - 1])});
  return d[n][m];
}

// Minimum over every lattice path; |X| + |Y| <= 12.
inline Cost enumerate_alignments_ed(const Sequence& x, const Sequence& y, const WeightTable& w) {
  if (x.size() + y.size() > 12) throw std::invalid_argument("alignment enumeration limited to |X|+|Y| <= 12");
  Cost best = Cost::inf();
  std::function<void(std::size_t, std::size_t, Cost)> walk = [&](std::size_t i, std::size_t j, Cost acc) {
    if (i == x.size() && j == y.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i < x.size()) walk(i + 1, j, acc + w(x[i], kEpsilon));
    if (j < y.size()) walk(i, j + 1, acc + w(kEpsilon, y[j]));
    if (i < x.size() && j < y.size()) walk(i + 1, j + 1, acc + w(x[i], y[j]));
  };
  walk(0, 0, Cost());
  return best;
}

// Minimum cost over forest alignments, enumerated as node mappings whose
// aligned open/close tokens appear in the same relative order in both
// forests. Each forest has at most 8 nodes.
inline Cost enumerate_forest_alignments(const Sequence& f, const Sequence& g, const WeightTable& w) {
  struct Node {
    std::size_t open, close;
    Symbol label;
  };
  auto nodes_of = [](const Sequence& t) {
    std::vector<Node> out;
    std::vector<std::size_t> st;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (is_open(t[i])) {
        st.push_back(out.size());
        out.push_back({i, 0, token_label(t[i])});
      } else {
        if (st.empty()) throw std::invalid_argument("unbalanced forest");
        out[st.back()].close = i;
        st.pop_back();
      }
    }
    if (!st.empty()) throw std::invalid_argument("unbalanced forest");
    return out;
  };
  std::vector<Node> a = nodes_of(f), b = nodes_of(g);
  if (a.size() > 8 || b.size() > 8) throw std::invalid_argument("forest enumeration limited to 8 nodes");
  // Lower bound for branch and bound: every remaining F node costs at least
  // the cheaper of deletion and its best relabel.
  std::vector<Cost> cheapest(a.size() + 1, Cost());
  for (std::size_t u = a.size(); u-- > 0;) {
    Cost c = w(a[u].label, kEpsilon);
    for (const auto& v : b) c = std::min(c, w(a[u].label, v.label));
    cheapest[u] = cheapest[u + 1] + c;
  }
  std::vector<int> mapped_to(a.size(), -1);
  std::vector<char> used(b.size(), 0);
  Cost best = Cost::inf();
  auto before = [](std::size_t p, std::size_t q) { return p < q; };
  auto consistent = [&](std::size_t u, std::size_t v) {
    for (std::size_t u2 = 0; u2 < u; ++u2) {
      if (mapped_to[u2] < 0) continue;
      const Node& x1 = a[u2];
      const Node& y1 = b[static_cast<std::size_t>(mapped_to[u2])];
      const std::size_t fx[2] = {x1.open, x1.close}, gx[2] = {y1.open, y1.close};
      const std::size_t fy[2] = {a[u].open, a[u].close}, gy[2] = {b[v].open, b[v].close};
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          if (before(fx[s], fy[t]) != before(gx[s], gy[t])) return false;
    }
    return true;
  };
  std::function<void(std::size_t, Cost)> go = [&](std::size_t u, Cost acc) {
    if (!(acc + cheapest[u] < best)) return;
    if (u == a.size()) {
      Cost total = acc;
      for (std::size_t v = 0; v < b.size(); ++v)
        if (!used[v]) total = total + w(kEpsilon, b[v].label);
      best = std::min(best, total);
      return;
    }
    go(u + 1, acc + w(a[u].label, kEpsilon));
    for (std::size_t v = 0; v < b.size(); ++v) {
      if (used[v] || !consistent(u, v)) continue;
      used[v] = 1;
      mapped_to[u] = static_cast<int>(v);
      go(u + 1, acc + w(a[u].label, b[v].label));
      mapped_to[u] = -1;
      used[v] = 0;
    }
  };
  go(0, Cost());
  return best;
}

// All Dyck words of length at most `max_len` over the alphabet's pairs.
inline std::vector<Sequence> dyck_words(const DyckAlphabet& alpha, std::size_t max_len) {
  std::vector<Sequence> out;
  std::vector<Symbol> opens = alpha.openings();
  Sequence cur, st;
  std::function<void()> grow = [&] {
    if (st.empty()) out.push_back(cur);
    if (cur.size() + st.size() + 2 <= max_len) {
      for (Symbol o : opens) {
        cur.push_back(o);
        st.push_back(o);
        grow();
        st.pop_back();
        cur.pop_back();
      }
    }
    if (!st.empty()) {
      Symbol o = st.back();
      cur.push_back(alpha.complement(o));
      st.pop_back();
      grow();
      st.push_back(o);
      cur.pop_back();
    }
  };
  grow();
  return out;
}

// Distance from a short string to the Dyck language, by trying every Dyck
// word of length at most 6.
inline Cost brute_dyck_distance(const Sequence& x, const WeightTable& w, const DyckAlphabet& alpha) {
  Cost best = Cost::inf();
  for (const Sequence& d : dyck_words(alpha, 6)) best = std::min(best, full_dp_weighted_ed(x, d, w));
  return best;
}

// Minimum over every non-crossing matching of the summed piece costs;
// |X| <= 10.
inline Cost enumerate_dyck_matchings(const Sequence& x, const WeightTable& w, const DyckAlphabet& alpha) {
  if (x.size() > 10) throw std::invalid_argument("matching enumeration limited to |X| <= 10");
  const std::size_t n = x.size();
  std::vector<Cost> single(n);
  std::vector<std::vector<Cost>> pair(n, std::vector<Cost>(n, Cost::inf()));
  for (std::size_t i = 0; i < n; ++i) {
    single[i] = brute_dyck_distance(Sequence{x[i]}, w, alpha);
    for (std::size_t j = i + 1; j < n; ++j) pair[i][j] = brute_dyck_distance(Sequence{x[i], x[j]}, w, alpha);
  }
  // Each matching is generated once: position i is either left alone or
  // paired with some m, which splits the rest into (i, m) and (m, j).
  std::function<std::vector<Cost>(std::size_t, std::size_t)> all = [&](std::size_t i, std::size_t j) {
    if (i >= j) return std::vector<Cost>{Cost()};
    std::vector<Cost> out;
    for (Cost c : all(i + 1, j)) out.push_back(c + single[i]);
    for (std::size_t m = i + 1; m < j; ++m)
      for (Cost in : all(i + 1, m))
        for (Cost rest : all(m + 1, j)) out.push_back(pair[i][m] + in + rest);
    return out;
  };
  std::vector<Cost> costs = all(0, n);
  return *std::min_element(costs.begin(), costs.end());
}

struct PowerViolation {
  std::size_t pos, period;
  friend bool operator==(const PowerViolation&, const PowerViolation&) = default;
};

inline bool naive_is_primitive(const Sequence& p, std::size_t i, std::size_t j) {
  const std::size_t len = j - i;
  for (std::size_t d = 1; d < len; ++d) {
    if (len % d != 0) continue;
    bool periodic = true;
    for (std::size_t t = i + d; t < j && periodic; ++t) periodic = p[t] == p[t - d];
    if (periodic) return false;
  }
  return true;
}

// Every (i, q) with P[i..i+(e+1)q) = Q^{e+1}, q <= maxq, Q primitive and
// accepted by `accept` (which sees the fragment [i, i+q)).
inline std::vector<PowerViolation> naive_power_scan(
    const Sequence& p, std::size_t e, std::size_t maxq,
    const std::function<bool(std::size_t, std::size_t)>& accept = nullptr) {
  std::vector<PowerViolation> out;
  for (std::size_t q = 1; q <= maxq; ++q) {
    for (std::size_t i = 0; i + (e + 1) * q <= p.size(); ++i) {
      bool power = true;
      for (std::size_t t = i + q; t < i + (e + 1) * q && power; ++t) power = p[t] == p[t - q];
      if (!power || !naive_is_primitive(p, i, i + q)) continue;
      if (accept && !accept(i, i + q)) continue;
      out.push_back({i, q});
    }
  }
  return out;
}

// Same scan restricted to fragments Q that are balanced token sequences.
inline std::vector<PowerViolation> naive_balanced_power_scan(const Sequence& p, std::size_t e, std::size_t maxq) {
  return naive_power_scan(p, e, maxq, [&](std::size_t i, std::size_t j) {
    std::int64_t h = 0;
    for (std::size_t t = i; t < j; ++t) {
      h += is_open(p[t]) ? 1 : -1;
      if (h < 0) return false;
    }
    return h == 0;
  });
}

inline std::size_t naive_lce(const Sequence& x, std::size_t i, const Sequence& y, std::size_t j) {
  std::size_t l = 0;
  while (i + l < x.size() && j + l < y.size() && x[i + l] == y[j + l]) ++l;
  return l;
}

// Smallest p >= 1 with X[t] = X[t+p] throughout X[i..j); the length itself
// when no smaller period exists.
inline std::size_t naive_period(const Sequence& x, std::size_t i, std::size_t j) {
  for (std::size_t p = 1; p < j - i; ++p) {
    bool ok = true;
    for (std::size_t t = i; t + p < j && ok; ++t) ok = x[t] == x[t + p];
    if (ok) return p;
  }
  return j - i;
}

}  // namespace wed::oracle

#endif
