// Sequence indexes (suffix array, LCE, range minimum, shortest period) and
// the generic exponent-capping scan used by all three kernels.
#ifndef WED_SEQKIT_HPP_
#define WED_SEQKIT_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wed/core.hpp"

namespace wed {

namespace detail {

// Induced-sorting suffix array construction over values in [0, upper].
inline std::vector<int> sa_is(const std::vector<int>& s, int upper) {
  const int n = static_cast<int>(s.size());
  if (n == 0) return {};
  if (n < 10) {
    std::vector<int> sa(n);
    std::iota(sa.begin(), sa.end(), 0);
    std::sort(sa.begin(), sa.end(), [&](int a, int b) {
      return std::lexicographical_compare(s.begin() + a, s.end(), s.begin() + b, s.end());
    });
    return sa;
  }
  std::vector<int> sa(n);
  std::vector<char> ls(n, 0);  // 1 for S-type positions
  for (int i = n - 2; i >= 0; --i) ls[i] = s[i] == s[i + 1] ? ls[i + 1] : (s[i] < s[i + 1]);
  std::vector<int> sum_l(upper + 1, 0), sum_s(upper + 1, 0);
  for (int i = 0; i < n; ++i) {
    if (!ls[i])
      ++sum_s[s[i]];
    else
      ++sum_l[s[i] + 1];
  }
  for (int i = 0; i <= upper; ++i) {
    sum_s[i] += sum_l[i];
    if (i < upper) sum_l[i + 1] += sum_s[i];
  }
  auto induce = [&](const std::vector<int>& lms) {
    std::fill(sa.begin(), sa.end(), -1);
    std::vector<int> buf(sum_s);
    for (int d : lms)
      if (d != n) sa[buf[s[d]]++] = d;
    buf = sum_l;
    sa[buf[s[n - 1]]++] = n - 1;
    for (int i = 0; i < n; ++i) {
      int v = sa[i];
      if (v >= 1 && !ls[v - 1]) sa[buf[s[v - 1]]++] = v - 1;
    }
    buf = sum_l;
    for (int i = n - 1; i >= 0; --i) {
      int v = sa[i];
      if (v >= 1 && ls[v - 1]) sa[--buf[s[v - 1] + 1]] = v - 1;
    }
  };
  std::vector<int> lms_map(n + 1, -1);
  std::vector<int> lms;
  for (int i = 1; i < n; ++i)
    if (!ls[i - 1] && ls[i]) {
      lms_map[i] = static_cast<int>(lms.size());
      lms.push_back(i);
    }
  const int m = static_cast<int>(lms.size());
  induce(lms);
  if (m) {
    std::vector<int> sorted_lms;
    sorted_lms.reserve(m);
    for (int v : sa)
      if (lms_map[v] != -1) sorted_lms.push_back(v);
    std::vector<int> rec(m);
    int rec_upper = 0;
    rec[lms_map[sorted_lms[0]]] = 0;
    for (int i = 1; i < m; ++i) {
      int l = sorted_lms[i - 1], r = sorted_lms[i];
      int end_l = lms_map[l] + 1 < m ? lms[lms_map[l] + 1] : n;
      int end_r = lms_map[r] + 1 < m ? lms[lms_map[r] + 1] : n;
      bool same = true;
      if (end_l - l != end_r - r) {
        same = false;
      } else {
        while (l < end_l && s[l] == s[r]) {
          ++l;
          ++r;
        }
        if (l == n || s[l] != s[r]) same = false;
      }
      if (!same) ++rec_upper;
      rec[lms_map[sorted_lms[i]]] = rec_upper;
    }
    std::vector<int> rec_sa = sa_is(rec, rec_upper);
    for (int i = 0; i < m; ++i) sorted_lms[i] = lms[rec_sa[i]];
    induce(sorted_lms);
  }
  return sa;
}

}  // namespace detail

// Range minimum over a fixed array: sparse table over blocks of 32 entries,
// linear scans inside a block.
template <class T>
class RangeMin {
 public:
  RangeMin() = default;
  explicit RangeMin(std::vector<T> a) : a_(std::move(a)) {
    std::size_t nb = (a_.size() + kBlock - 1) / kBlock;
    if (nb == 0) return;
    table_.emplace_back(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t lo = b * kBlock, hi = std::min(a_.size(), lo + kBlock);
      table_[0][b] = *std::min_element(a_.begin() + lo, a_.begin() + hi);
    }
    for (std::size_t lvl = 1; (std::size_t{1} << lvl) <= nb; ++lvl) {
      std::size_t half = std::size_t{1} << (lvl - 1);
      std::vector<T> row(nb - (std::size_t{1} << lvl) + 1);
      for (std::size_t b = 0; b < row.size(); ++b)
        row[b] = std::min(table_[lvl - 1][b], table_[lvl - 1][b + half]);
      table_.push_back(std::move(row));
    }
  }

  const std::vector<T>& values() const { return a_; }

  // Minimum of a[l..r); requires l < r.
  T query(std::size_t l, std::size_t r) const {
    if (l >= r || r > a_.size()) throw std::out_of_range("empty or out-of-range RMQ");
    std::size_t bl = l / kBlock, br = (r - 1) / kBlock;
    if (br - bl <= 1) return *std::min_element(a_.begin() + l, a_.begin() + r);
    T best = *std::min_element(a_.begin() + l, a_.begin() + (bl + 1) * kBlock);
    best = std::min(best, *std::min_element(a_.begin() + br * kBlock, a_.begin() + r));
    std::size_t lo = bl + 1, hi = br;  // full blocks [lo, hi)
    std::size_t lvl = 0;
    while ((std::size_t{2} << lvl) <= hi - lo) ++lvl;
    best = std::min(best, table_[lvl][lo]);
    best = std::min(best, table_[lvl][hi - (std::size_t{1} << lvl)]);
    return best;
  }

 private:
  static constexpr std::size_t kBlock = 32;
  std::vector<T> a_;
  std::vector<std::vector<T>> table_;
};

// Longest common extension queries between suffixes of X and suffixes of Y
// (Y = X for the single-sequence form).
class LceIndex {
 public:
  explicit LceIndex(const Sequence& x) : nx_(x.size()), ny_(x.size()), offset_(0), joint_(false) {
    build(x, nullptr);
  }
  LceIndex(const Sequence& x, const Sequence& y)
      : nx_(x.size()), ny_(y.size()), offset_(x.size() + 1), joint_(true) {
    build(x, &y);
  }

  std::size_t lce(std::size_t x, std::size_t y) const {
    if (x > nx_ || y > ny_) throw std::out_of_range("LCE position out of range");
    if (x == nx_ || y == ny_) return 0;
    std::size_t px = x, py = offset_ + y;
    if (px == py) return nx_ - x;
    // Short extensions are answered by direct comparison.
    std::size_t lim = std::min({kScan, nx_ - x, ny_ - y});
    std::size_t l = 0;
    while (l < lim && text_[px + l] == text_[py + l]) ++l;
    if (l < lim || l == nx_ - x || l == ny_ - y) return l;
    int r1 = rank_[px], r2 = rank_[py];
    if (r1 > r2) std::swap(r1, r2);
    return static_cast<std::size_t>(lcp_.query(r1 + 1, r2 + 1));
  }

  std::size_t size_x() const { return nx_; }
  std::size_t size_y() const { return ny_; }

 private:
  static constexpr std::size_t kScan = 16;

  void build(const Sequence& x, const Sequence* y) {
    std::size_t n = x.size() + (y ? y->size() + 1 : 0);
    if (n > static_cast<std::size_t>(std::numeric_limits<int>::max() - 2))
      throw std::length_error("sequence too long for LCE index");
    text_.resize(n);
    Symbol mx = 0;
    for (Symbol s : x) mx = std::max(mx, s);
    if (y)
      for (Symbol s : *y) mx = std::max(mx, s);
    // Dense ranks keep the suffix sorter's bucket arrays small.
    std::vector<Symbol> vals;
    bool dense = mx <= n + 1024;
    if (!dense) {
      vals.assign(x.begin(), x.end());
      if (y) vals.insert(vals.end(), y->begin(), y->end());
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    }
    auto code = [&](Symbol s) -> int {
      if (dense) return static_cast<int>(s);
      return static_cast<int>(std::lower_bound(vals.begin(), vals.end(), s) - vals.begin());
    };
    int upper = dense ? static_cast<int>(mx) : static_cast<int>(vals.size());
    for (std::size_t i = 0; i < x.size(); ++i) text_[i] = code(x[i]);
    if (y) {
      int sep = upper + 1;
      upper = sep;
      text_[x.size()] = sep;
      for (std::size_t i = 0; i < y->size(); ++i) text_[offset_ + i] = code((*y)[i]);
    }
    std::vector<int> sa = detail::sa_is(text_, upper);
    rank_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) rank_[sa[i]] = static_cast<int>(i);
    std::vector<int> lcp(n, 0);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (h > 0) --h;
      if (rank_[i] == 0) {
        h = 0;
        continue;
      }
      std::size_t j = sa[rank_[i] - 1];
      while (i + h < n && j + h < n && text_[i + h] == text_[j + h]) ++h;
      lcp[rank_[i]] = static_cast<int>(h);
    }
    lcp_ = RangeMin<int>(std::move(lcp));
  }

  std::size_t nx_, ny_, offset_;
  bool joint_;
  std::vector<int> text_;
  std::vector<int> rank_;
  RangeMin<int> lcp_;
};

// Shortest-period queries on fragments. A query costs O(j - i); the kernels
// only ask about windows of length O(k).
class PeriodIndex {
 public:
  explicit PeriodIndex(const Sequence& x) : x_(&x) {}

  // per(X[i..j)) if the fragment has exponent at least 2, nothing otherwise.
  std::optional<std::size_t> shortest_period(std::size_t i, std::size_t j) const {
    std::size_t p = period(i, j);
    if (p == 0 || j - i < 2 * p) return std::nullopt;
    return p;
  }

  bool is_primitive(std::size_t i, std::size_t j) const {
    if (i >= j) throw std::invalid_argument("primitivity of an empty fragment");
    std::size_t len = j - i;
    std::size_t p = period(i, j);
    return !(p <= len / 2 && len % p == 0);
  }

 private:
  // Shortest period of X[i..j) via the prefix function; 0 for empty fragments.
  std::size_t period(std::size_t i, std::size_t j) const {
    if (i > j || j > x_->size()) throw std::out_of_range("fragment out of range");
    std::size_t len = j - i;
    if (len == 0) return 0;
    thread_local std::vector<std::size_t> pi;
    pi.assign(len, 0);
    const Symbol* s = x_->data() + i;
    for (std::size_t q = 1; q < len; ++q) {
      std::size_t k = pi[q - 1];
      while (k > 0 && s[q] != s[k]) k = pi[k - 1];
      if (s[q] == s[k]) ++k;
      pi[q] = k;
    }
    return len - pi[len - 1];
  }

  const Sequence* x_;
};

// Membership predicate for the exponent-capping scan; receives primitive
// fragments [i, j) of the processed sequence.
using MembershipOracle = std::function<bool(std::size_t, std::size_t)>;

// Left-to-right scan that caps every power Q^{e+1} (Q accepted by the oracle)
// down to exponent e.
inline Sequence periodicity_reduction(const Sequence& p, std::size_t e, const MembershipOracle& in_q) {
  if (e == 0) throw std::invalid_argument("exponent cap must be positive");
  PeriodIndex per(p);
  Sequence out;
  out.reserve(p.size());
  const std::size_t n = p.size();
  std::size_t r = 0;
  while (r < n) {
    std::size_t q = 1;
    if (r + 2 * e <= n) {
      if (auto s = per.shortest_period(r, r + 2 * e)) q = *s;
    }
    // The test only needs to know whether LCE(r, r+q) reaches e*q, so the
    // comparison stops there.
    bool long_run = false;
    if (r + q + e * q <= n) {
      long_run = std::equal(p.begin() + r, p.begin() + r + e * q, p.begin() + r + q);
    }
    if (long_run && in_q(r, r + q)) {
      r += q;
    } else {
      out.push_back(p[r]);
      ++r;
    }
  }
  return out;
}

}  // namespace wed

#endif
