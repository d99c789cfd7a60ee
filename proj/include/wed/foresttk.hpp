// Labeled balanced-parenthesis forests and contexts, piece decompositions,
// the pairs DP, horizontal/vertical reductions, the forest kernel and a
// banded Zhang-Shasha style weighted tree edit distance.
#ifndef WED_FORESTTK_HPP_
#define WED_FORESTTK_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wed/core.hpp"
#include "wed/seqkit.hpp"

namespace wed {

// Token encoding: open(a) = 2a, close(a) = 2a + 1.
inline Symbol open_token(Symbol label) { return 2 * label; }
inline Symbol close_token(Symbol label) { return 2 * label + 1; }
inline bool is_open(Symbol tok) { return (tok & 1) == 0; }
inline Symbol token_label(Symbol tok) { return tok >> 1; }

// A balanced token sequence with prefix heights, a range-minimum index over
// the heights and open/close cross pointers.
class Forest {
 public:
  Forest() : Forest(Sequence{}) {}
  explicit Forest(Sequence tokens) : tokens_(std::move(tokens)) {
    const std::size_t n = tokens_.size();
    std::vector<std::int32_t> h(n + 1, 0);
    partner_.assign(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
      Symbol t = tokens_[i];
      if (token_label(t) == kEpsilon) throw std::invalid_argument("forest token with empty label");
      if (is_open(t)) {
        stack.push_back(i);
        h[i + 1] = h[i] + 1;
      } else {
        if (stack.empty() || tokens_[stack.back()] != open_token(token_label(t)))
          throw std::invalid_argument("unbalanced forest");
        partner_[i] = stack.back();
        partner_[stack.back()] = i;
        stack.pop_back();
        h[i + 1] = h[i] - 1;
      }
    }
    if (!stack.empty()) throw std::invalid_argument("unbalanced forest");
    height_ = RangeMin<std::int32_t>(std::move(h));
  }

  const Sequence& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  std::size_t node_count() const { return tokens_.size() / 2; }
  std::int32_t height(std::size_t i) const { return height_.values()[i]; }
  std::size_t partner(std::size_t i) const { return partner_[i]; }

  // F[i..j) is balanced iff H(i) = H(j) = min H over [i..j].
  bool is_balanced(std::size_t i, std::size_t j) const {
    if (i > j || j > size()) throw std::out_of_range("fragment out of range");
    if (i == j) return true;
    return height(i) == height(j) && height_.query(i, j + 1) == height(i);
  }
  bool is_tree(std::size_t i, std::size_t j) const {
    return i < j && is_open(tokens_[i]) && partner_[i] == j - 1 && is_balanced(i, j);
  }
  // End of the tree whose root opens at i.
  std::size_t tree_end(std::size_t i) const {
    if (i >= size() || !is_open(tokens_[i])) throw std::invalid_argument("no tree starts here");
    return partner_[i] + 1;
  }

 private:
  Sequence tokens_;
  std::vector<std::size_t> partner_;
  RangeMin<std::int32_t> height_;
};

// Parses `(label child*)*`; labels are interned into `alpha`.
inline Forest parse_forest(std::string_view text, Alphabet& alpha) {
  Sequence toks;
  std::vector<Symbol> stack;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto is_label_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (true) {
    skip();
    if (i == text.size()) break;
    char c = text[i];
    if (c == '(') {
      ++i;
      skip();
      std::size_t b = i;
      while (i < text.size() && is_label_char(text[i])) ++i;
      if (b == i) throw std::invalid_argument("expected a label after '(' at offset " + std::to_string(b));
      Symbol a = alpha.intern(std::string(text.substr(b, i - b)));
      toks.push_back(open_token(a));
      stack.push_back(a);
    } else if (c == ')') {
      if (stack.empty()) throw std::invalid_argument("unmatched ')' at offset " + std::to_string(i));
      toks.push_back(close_token(stack.back()));
      stack.pop_back();
      ++i;
    } else {
      throw std::invalid_argument(std::string("unexpected character '") + c + "' at offset " +
                                  std::to_string(i));
    }
  }
  if (!stack.empty()) throw std::invalid_argument("unbalanced forest: missing ')'");
  return Forest(std::move(toks));
}

inline std::string format_forest(const Sequence& tokens, const Alphabet& alpha) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Symbol t = tokens[i];
    if (is_open(t)) {
      if (i > 0 && !out.empty() && out.back() != '(') out += ' ';
      out += '(';
      out += alpha.name(token_label(t));
    } else {
      out += ')';
    }
  }
  return out;
}

// A tree with one hole: L * R is a tree whose root opens at L[0].
struct Context {
  Sequence left, right;
  std::size_t size() const { return left.size() + right.size(); }
  friend bool operator==(const Context&, const Context&) = default;
};

// C * D = <C_L D_L ; D_R C_R>.
inline Context compose(const Context& c, const Context& d) {
  Context r;
  r.left = c.left;
  r.left.insert(r.left.end(), d.left.begin(), d.left.end());
  r.right = d.right;
  r.right.insert(r.right.end(), c.right.begin(), c.right.end());
  return r;
}

inline bool is_context(const Context& c) {
  if (c.left.empty() || c.right.empty()) return false;
  Sequence all = c.left;
  all.insert(all.end(), c.right.begin(), c.right.end());
  try {
    Forest f(all);
    return f.is_tree(0, all.size());
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// A balanced fragment [i, j) or a context <F[i..i2); F[j2..j)>.
struct Piece {
  enum class Kind { balanced, context };
  Kind kind = Kind::balanced;
  std::size_t i = 0, i2 = 0, j2 = 0, j = 0;

  static Piece balanced_piece(std::size_t i, std::size_t j) { return {Kind::balanced, i, j, j, j}; }
  static Piece context_piece(std::size_t i, std::size_t i2, std::size_t j2, std::size_t j) {
    return {Kind::context, i, i2, j2, j};
  }
  std::size_t length() const { return kind == Kind::balanced ? j - i : (i2 - i) + (j - j2); }
  friend bool operator==(const Piece&, const Piece&) = default;
};

// Recursive structure of a piece decomposition: empty, a single balanced
// piece, a split at m, or a context piece around an inner decomposition.
struct DecompNode {
  enum class Kind { empty, leaf, split, context };
  Kind kind = Kind::empty;
  std::size_t i = 0, j = 0;
  std::size_t a = 0, b = 0;  // split: a = m; context: a = i', b = j'
  int left = -1, right = -1;  // split children, or inner (left) for context
};

struct PieceDecomposition {
  std::vector<DecompNode> nodes;
  int root = -1;

  std::vector<Piece> pieces() const {
    std::vector<Piece> out;
    if (root < 0) return out;
    std::vector<int> st{root};
    while (!st.empty()) {
      const DecompNode& n = nodes[st.back()];
      st.pop_back();
      switch (n.kind) {
        case DecompNode::Kind::empty:
          break;
        case DecompNode::Kind::leaf:
          out.push_back(Piece::balanced_piece(n.i, n.j));
          break;
        case DecompNode::Kind::split:
          st.push_back(n.right);
          st.push_back(n.left);
          break;
        case DecompNode::Kind::context:
          out.push_back(Piece::context_piece(n.i, n.a, n.b, n.j));
          st.push_back(n.left);
          break;
      }
    }
    return out;
  }
};

namespace detail {

class Decomposer {
 public:
  Decomposer(const Forest& f, std::size_t t) : f_(f), t_(t) {}

  PieceDecomposition run() {
    out_.root = build(0, f_.size());
    return std::move(out_);
  }

 private:
  int add(DecompNode n) {
    out_.nodes.push_back(n);
    return static_cast<int>(out_.nodes.size()) - 1;
  }

  // Union of decompositions of consecutive balanced ranges, as nested splits.
  int chain(const std::vector<std::pair<std::size_t, std::size_t>>& parts) {
    std::vector<std::pair<std::size_t, std::size_t>> ne;
    for (auto p : parts)
      if (p.first < p.second) ne.push_back(p);
    if (ne.empty()) return add({DecompNode::Kind::empty, parts.front().first, parts.front().first});
    int acc = build(ne.back().first, ne.back().second);
    for (std::size_t q = ne.size() - 1; q-- > 0;) {
      int l = build(ne[q].first, ne[q].second);
      DecompNode s{DecompNode::Kind::split, ne[q].first, ne.back().second, ne[q].second, 0, l, acc};
      acc = add(s);
    }
    return acc;
  }

  int build(std::size_t i, std::size_t j) {
    if (j == i) return add({DecompNode::Kind::empty, i, j});
    if (j <= i + t_) return add({DecompNode::Kind::leaf, i, j});
    const bool whole_tree = f_.is_tree(i, j);
    std::size_t ip = i, jp = j;
    while (true) {
      std::size_t m = f_.tree_end(ip);
      if ((m - i) + (j - jp) <= t_) {
        ip = m;
      } else if (m < jp && (ip - i) + (j - m) <= t_) {
        jp = m;
      } else if (!whole_tree) {
        return chain({{i, ip}, {ip, m}, {m, jp}, {jp, j}});
      } else if (m == jp && (ip + 1 - i) + (j - jp + 1) <= t_) {
        ++ip;
        --jp;
      } else {
        int inner = chain({{ip, m}, {m, jp}});
        DecompNode c{DecompNode::Kind::context, i, j, ip, jp, inner, -1};
        return add(c);
      }
    }
  }

  const Forest& f_;
  std::size_t t_;
  PieceDecomposition out_;
};

}  // namespace detail

inline PieceDecomposition piece_decomposition(const Forest& f, std::size_t t) {
  if (t < 2) throw std::invalid_argument("piece length bound must be at least 2");
  return detail::Decomposer(f, t).run();
}

struct PiecePair {
  Piece f, g;
};

namespace detail {

class PairsSolver {
 public:
  PairsSolver(const Forest& f, const PieceDecomposition& d, const Forest& g, std::size_t s)
      : f_(f), d_(d), g_(g), s_(s), lce_(f.tokens(), g.tokens()), w_(2 * s + 1) {
    memo_.assign(d.nodes.size() * w_ * w_, kUnknown);
    choice_.assign(d.nodes.size() * w_ * w_, Choice{});
  }

  std::vector<PiecePair> run() {
    std::vector<PiecePair> out;
    if (d_.root < 0) return out;
    std::size_t nf = f_.size(), ng = g_.size();
    if ((nf > ng ? nf - ng : ng - nf) > s_) return out;
    solve(d_.root, 0, ng);
    collect(d_.root, 0, ng, out);
    return out;
  }

 private:
  static constexpr int kUnknown = -1;
  enum class Move : std::uint8_t { none, skip_front, skip_back, leaf, split, context_pair, context_skip };
  struct Choice {
    Move move = Move::none;
    std::size_t arg = 0;
  };

  std::size_t key(int node, std::size_t ip, std::size_t jp) const {
    const DecompNode& n = d_.nodes[node];
    std::size_t oi = ip + s_ - n.i, oj = jp + s_ - n.j;
    return (static_cast<std::size_t>(node) * w_ + oi) * w_ + oj;
  }

  bool same(std::size_t fi, std::size_t gi, std::size_t len) const {
    if (fi + len > f_.size() || gi + len > g_.size()) return false;
    return lce_.lce(fi, gi) >= len;
  }

  int solve(int node, std::size_t ip, std::size_t jp) {
    const DecompNode& n = d_.nodes[node];
    std::size_t kk = key(node, ip, jp);
    if (memo_[kk] != kUnknown) return memo_[kk];
    int best = 0;
    Choice pick{};
    auto offer = [&](int v, Move mv, std::size_t arg) {
      if (v > best) {
        best = v;
        pick = {mv, arg};
      }
    };
    if (n.kind != DecompNode::Kind::empty) {
      if (ip < std::min(jp, n.i + s_)) offer(solve(node, ip + 1, jp), Move::skip_front, 0);
      if (jp > std::max(ip, n.j >= s_ ? n.j - s_ : 0)) offer(solve(node, ip, jp - 1), Move::skip_back, 0);
    }
    switch (n.kind) {
      case DecompNode::Kind::empty:
        break;
      case DecompNode::Kind::leaf:
        if (jp - ip == n.j - n.i && same(n.i, ip, n.j - n.i)) offer(1, Move::leaf, 0);
        break;
      case DecompNode::Kind::split: {
        std::size_t m = n.a;
        std::size_t lo = std::max(ip, m >= s_ ? m - s_ : 0), hi = std::min(jp, m + s_);
        for (std::size_t mp = lo; mp <= hi; ++mp) offer(solve(n.left, ip, mp) + solve(n.right, mp, jp), Move::split, mp);
        break;
      }
      case DecompNode::Kind::context: {
        std::size_t l = n.a - n.i, r = n.j - n.b;
        if (ip + l + r <= jp && same(n.i, ip, l) && same(n.b, jp - r, r) && g_.is_balanced(ip + l, jp - r))
          offer(1 + solve(n.left, ip + l, jp - r), Move::context_pair, 0);
        std::size_t lo = std::max(n.a >= s_ ? n.a - s_ : 0, ip), hi = std::min(n.b + s_, jp);
        if (lo <= hi) offer(solve(n.left, lo, hi), Move::context_skip, 0);
        break;
      }
    }
    memo_[kk] = best;
    choice_[kk] = pick;
    return best;
  }

  void collect(int node, std::size_t ip, std::size_t jp, std::vector<PiecePair>& out) {
    while (true) {
      const DecompNode& n = d_.nodes[node];
      Choice c = choice_[key(node, ip, jp)];
      switch (c.move) {
        case Move::none:
          return;
        case Move::skip_front:
          ++ip;
          continue;
        case Move::skip_back:
          --jp;
          continue;
        case Move::leaf:
          out.push_back({Piece::balanced_piece(n.i, n.j), Piece::balanced_piece(ip, jp)});
          return;
        case Move::split:
          collect(n.left, ip, c.arg, out);
          node = n.right;
          ip = c.arg;
          continue;
        case Move::context_pair: {
          std::size_t l = n.a - n.i, r = n.j - n.b;
          out.push_back({Piece::context_piece(n.i, n.a, n.b, n.j), Piece::context_piece(ip, ip + l, jp - r, jp)});
          node = n.left;
          ip += l;
          jp -= r;
          continue;
        }
        case Move::context_skip: {
          std::size_t lo = std::max(n.a >= s_ ? n.a - s_ : 0, ip), hi = std::min(n.b + s_, jp);
          node = n.left;
          ip = lo;
          jp = hi;
          continue;
        }
      }
    }
  }

  const Forest& f_;
  const PieceDecomposition& d_;
  const Forest& g_;
  std::size_t s_;
  LceIndex lce_;
  std::size_t w_;
  std::vector<int> memo_;
  std::vector<Choice> choice_;
};

}  // namespace detail

// Maximum set of (piece of D, piece of G) pairs that one alignment of width
// at most s matches perfectly.
inline std::vector<PiecePair> pairs(const Forest& f, const PieceDecomposition& d, const Forest& g, std::size_t s) {
  return detail::PairsSolver(f, d, g, s).run();
}

inline Sequence canonical_forest(std::int64_t half, Symbol a = 1) {
  Sequence out(static_cast<std::size_t>(half), open_token(a));
  out.insert(out.end(), static_cast<std::size_t>(half), close_token(a));
  return out;
}

// Caps powers of primitive balanced Q (|Q| <= 4k) at exponent 4k, then
// replaces results of length >= 74k^3 by the canonical forest.
inline Sequence horizontal_reduction(const Sequence& p, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  Forest host(p);
  const std::size_t e = static_cast<std::size_t>(4 * k);
  Sequence r = periodicity_reduction(
      p, e, [&](std::size_t i, std::size_t j) { return j - i <= e && host.is_balanced(i, j); });
  const std::int64_t half = poly_bound(37, k, 3);
  if (static_cast<std::int64_t>(r.size()) >= 2 * half) return canonical_forest(half);
  return r;
}

// Splits a context into its depth-1 factors <(a F ; G )a>, outermost first.
struct DepthOneContext {
  Symbol label;
  Sequence inner_left, inner_right;
  friend auto operator<=>(const DepthOneContext&, const DepthOneContext&) = default;
  friend bool operator==(const DepthOneContext&, const DepthOneContext&) = default;
};

inline std::vector<DepthOneContext> split_context(const Context& c) {
  if (!is_context(c)) throw std::invalid_argument("not a context");
  std::vector<std::size_t> spine_open, st;
  for (std::size_t i = 0; i < c.left.size(); ++i) {
    if (is_open(c.left[i]))
      st.push_back(i);
    else
      st.pop_back();
  }
  spine_open = st;
  std::vector<std::size_t> spine_close;
  std::size_t depth = 0;
  for (std::size_t i = 0; i < c.right.size(); ++i) {
    if (is_open(c.right[i])) {
      ++depth;
    } else if (depth > 0) {
      --depth;
    } else {
      spine_close.push_back(i);
    }
  }
  const std::size_t e = spine_open.size();
  std::vector<DepthOneContext> out(e);
  for (std::size_t q = 0; q < e; ++q) {
    std::size_t b = spine_open[q] + 1, en = q + 1 < e ? spine_open[q + 1] : c.left.size();
    out[q].label = token_label(c.left[spine_open[q]]);
    out[q].inner_left.assign(c.left.begin() + b, c.left.begin() + en);
  }
  // Closes in R appear innermost first.
  for (std::size_t q = 0; q < e; ++q) {
    std::size_t node = e - 1 - q;
    std::size_t b = q == 0 ? 0 : spine_close[q - 1] + 1, en = spine_close[q];
    out[node].inner_right.assign(c.right.begin() + b, c.right.begin() + en);
  }
  return out;
}

inline Context join_context(const std::vector<DepthOneContext>& parts) {
  Context c;
  for (const auto& p : parts) {
    c.left.push_back(open_token(p.label));
    c.left.insert(c.left.end(), p.inner_left.begin(), p.inner_left.end());
  }
  for (std::size_t q = parts.size(); q-- > 0;) {
    c.right.insert(c.right.end(), parts[q].inner_right.begin(), parts[q].inner_right.end());
    c.right.push_back(close_token(parts[q].label));
  }
  return c;
}

inline Context canonical_context(std::int64_t k, Symbol a = 1) {
  const std::int64_t cnt = 17 * k * k;
  std::vector<DepthOneContext> parts(static_cast<std::size_t>(cnt));
  for (std::int64_t i = 0; i < cnt; ++i) {
    auto& p = parts[static_cast<std::size_t>(i)];
    p.label = a;
    for (std::int64_t t = 0; t < i; ++t) {
      p.inner_left.push_back(open_token(a));
      p.inner_left.push_back(close_token(a));
    }
    for (std::int64_t t = 0; t < cnt - 1 - i; ++t) {
      p.inner_right.push_back(open_token(a));
      p.inner_right.push_back(close_token(a));
    }
  }
  return join_context(parts);
}

struct VerticalIds {
  Sequence ids;                         // identifier string of the depth-1 factors
  std::vector<DepthOneContext> table;   // identifier -> factor
};

// Horizontally reduces every factor and ranks the factors by sorting.
inline VerticalIds vertical_ids(const Context& p, std::int64_t k) {
  std::vector<DepthOneContext> parts = split_context(p);
  for (auto& d : parts) {
    d.inner_left = horizontal_reduction(d.inner_left, k);
    d.inner_right = horizontal_reduction(d.inner_right, k);
  }
  VerticalIds v;
  v.table = parts;
  std::sort(v.table.begin(), v.table.end());
  v.table.erase(std::unique(v.table.begin(), v.table.end()), v.table.end());
  v.ids.reserve(parts.size());
  for (const auto& d : parts)
    v.ids.push_back(static_cast<Symbol>(std::lower_bound(v.table.begin(), v.table.end(), d) - v.table.begin()));
  return v;
}

inline Context vertical_reduction(const Context& p, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  VerticalIds v = vertical_ids(p, k);
  std::vector<std::size_t> prefix(v.ids.size() + 1, 0);
  for (std::size_t i = 0; i < v.ids.size(); ++i)
    prefix[i + 1] = prefix[i] + 2 + v.table[v.ids[i]].inner_left.size() + v.table[v.ids[i]].inner_right.size();
  PeriodIndex per(v.ids);
  const std::size_t maxlen = static_cast<std::size_t>(8 * k);
  Sequence reduced = periodicity_reduction(v.ids, static_cast<std::size_t>(6 * k), [&](std::size_t i, std::size_t j) {
    return prefix[j] - prefix[i] <= maxlen && per.is_primitive(i, j);
  });
  std::vector<DepthOneContext> parts;
  parts.reserve(reduced.size());
  for (Symbol id : reduced) parts.push_back(v.table[id]);
  Context out = join_context(parts);
  if (static_cast<std::int64_t>(out.size()) >= poly_bound(578, k, 4)) return canonical_context(k);
  return out;
}

struct ForestPair {
  Sequence f, g;
};

inline ForestPair forest_kernel_step(const Sequence& f_in, const Sequence& g_in, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const bool swapped = f_in.size() < g_in.size();
  const Sequence& fs = swapped ? g_in : f_in;
  const Sequence& gs = swapped ? f_in : g_in;
  const std::size_t n = fs.size();
  if (static_cast<std::int64_t>(n) < poly_bound(12716, k, 5))
    throw std::invalid_argument("forest kernel step needs max size >= 12716k^5");
  Forest f(fs), g(gs);
  const std::size_t t = (n + 2 * k - 1) / (2 * k);
  PieceDecomposition d = piece_decomposition(f, t);
  std::vector<PiecePair> s = pairs(f, d, g, static_cast<std::size_t>(2 * k));
  const std::size_t dn = d.pieces().size();
  ForestPair out;
  if (static_cast<std::int64_t>(s.size()) < static_cast<std::int64_t>(dn) - k) {
    Sequence sentinel;
    for (std::int64_t i = 0; i <= k; ++i) {
      sentinel.push_back(open_token(1));
      sentinel.push_back(close_token(1));
    }
    if (swapped)
      out.g = std::move(sentinel);
    else
      out.f = std::move(sentinel);
    return out;
  }
  struct Edit {
    std::size_t b, e;
    Sequence text;
  };
  std::vector<Edit> fe, ge;
  for (const auto& pr : s) {
    if (pr.f.kind == Piece::Kind::balanced) {
      Sequence red = horizontal_reduction(Sequence(fs.begin() + pr.f.i, fs.begin() + pr.f.j), k);
      fe.push_back({pr.f.i, pr.f.j, red});
      ge.push_back({pr.g.i, pr.g.j, std::move(red)});
    } else {
      Context c{Sequence(fs.begin() + pr.f.i, fs.begin() + pr.f.i2), Sequence(fs.begin() + pr.f.j2, fs.begin() + pr.f.j)};
      Context red = vertical_reduction(c, k);
      fe.push_back({pr.f.i, pr.f.i2, red.left});
      fe.push_back({pr.f.j2, pr.f.j, red.right});
      ge.push_back({pr.g.i, pr.g.i2, std::move(red.left)});
      ge.push_back({pr.g.j2, pr.g.j, std::move(red.right)});
    }
  }
  auto apply = [](const Sequence& src, std::vector<Edit> edits) {
    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.b > b.b; });
    Sequence r = src;
    for (const auto& e : edits) {
      r.erase(r.begin() + e.b, r.begin() + e.e);
      r.insert(r.begin() + e.b, e.text.begin(), e.text.end());
    }
    return r;
  };
  Sequence nf = apply(fs, std::move(fe)), ng = apply(gs, std::move(ge));
  if (swapped) {
    out.f = std::move(ng);
    out.g = std::move(nf);
  } else {
    out.f = std::move(nf);
    out.g = std::move(ng);
  }
  return out;
}

inline ForestPair forest_kernel(const Sequence& f, const Sequence& g, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  ForestPair cur{f, g};
  const std::int64_t limit = poly_bound(12717, k, 5);
  while (static_cast<std::int64_t>(std::max(cur.f.size(), cur.g.size())) > limit) cur = forest_kernel_step(cur.f, cur.g, k);
  return cur;
}

namespace detail {

// Postorder view of a forest with a virtual root appended (index n+1).
struct PostorderTree {
  std::vector<Symbol> label;       // 1-based; label[n+1] is the virtual root
  std::vector<std::size_t> lml;    // leftmost leaf descendant, 1-based
  std::vector<std::size_t> keyroots;
  std::size_t n = 0;               // real node count

  explicit PostorderTree(const Sequence& tokens) {
    n = tokens.size() / 2;
    label.assign(n + 2, 0);
    lml.assign(n + 2, 0);
    std::vector<std::size_t> first_child_lml;  // per open node on the stack
    std::vector<Symbol> st_label;
    std::size_t counter = 0;
    // Stack of (label, lml of first child or 0).
    std::vector<std::pair<Symbol, std::size_t>> st;
    std::size_t root_first = 0;
    for (Symbol t : tokens) {
      if (is_open(t)) {
        st.push_back({token_label(t), 0});
      } else {
        auto [lab, fc] = st.back();
        st.pop_back();
        ++counter;
        label[counter] = lab;
        lml[counter] = fc == 0 ? counter : fc;
        if (st.empty()) {
          if (root_first == 0) root_first = lml[counter];
        } else if (st.back().second == 0) {
          st.back().second = lml[counter];
        }
      }
    }
    label[n + 1] = 0;
    lml[n + 1] = n == 0 ? n + 1 : root_first;
    std::vector<char> seen(n + 2, 0);
    for (std::size_t v = n + 1; v >= 1; --v) {
      if (!seen[lml[v]]) {
        seen[lml[v]] = 1;
        keyroots.push_back(v);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }
};

// Zhang-Shasha forest distance restricted to postorder band |i - j| <= band.
// Cells outside the band are INF; with band >= both sizes the result is exact.
inline Cost zhang_shasha(const Sequence& ft, const Sequence& gt, const WeightTable& w, std::size_t band,
                         std::optional<Cost> cap) {
  PostorderTree a(ft), b(gt);
  const std::size_t na = a.n + 1, nb = b.n + 1;  // including virtual roots
  auto diff = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
  if (diff(na, nb) > band) return Cost::inf();
  const std::size_t bw = 2 * band + 1;
  std::vector<Cost> td((na + 1) * bw, Cost::inf());
  auto tdi = [&](std::size_t i, std::size_t j) { return i * bw + (j + band - i); };
  auto del = [&](std::size_t i) { return i == na ? Cost::inf() : w(a.label[i], kEpsilon); };
  auto ins = [&](std::size_t j) { return j == nb ? Cost::inf() : w(kEpsilon, b.label[j]); };
  auto rel = [&](std::size_t i, std::size_t j) {
    if (i == na || j == nb) return (i == na && j == nb) ? Cost() : Cost::inf();
    return w(a.label[i], b.label[j]);
  };
  auto clip = [&](Cost c) { return cap && c > *cap ? Cost::inf() : c; };
  std::vector<Cost> fd;
  for (std::size_t u : a.keyroots) {
    for (std::size_t v : b.keyroots) {
      const std::size_t lu = a.lml[u], lv = b.lml[v];
      if (diff(lu, lv) > band) continue;
      // fd rows: i in [lu-1, u]; columns j in [i-band, i+band] intersected with [lv-1, v].
      // Rows are stored over whichever of the two column ranges is narrower.
      const std::size_t rows = u - lu + 2, cols = v - lv + 2;
      const bool rect = cols <= bw;
      const std::size_t width = rect ? cols : bw;
      fd.assign(rows * width, Cost::inf());
      auto fdi = [&](std::size_t i, std::size_t j) -> std::size_t {
        return (i - (lu - 1)) * width + (rect ? j - (lv - 1) : j + band - i);
      };
      auto in_band = [&](std::size_t i, std::size_t j) { return diff(i, j) <= band; };
      auto get = [&](std::size_t i, std::size_t j) -> Cost {
        if (!in_band(i, j) || i + 1 < lu || j + 1 < lv) return Cost::inf();
        return fd[fdi(i, j)];
      };
      fd[fdi(lu - 1, lv - 1)] = Cost();
      for (std::size_t i = lu - 1; i <= u; ++i) {
        std::size_t jlo = std::max(lv - 1, i > band ? i - band : 0);
        std::size_t jhi = std::min(v, i + band);
        for (std::size_t j = jlo; j <= jhi; ++j) {
          if (i == lu - 1 && j == lv - 1) continue;
          Cost best = Cost::inf();
          if (i >= lu) best = std::min(best, get(i - 1, j) + del(i));
          if (j >= lv) best = std::min(best, get(i, j - 1) + ins(j));
          if (i >= lu && j >= lv) {
            if (a.lml[i] == lu && b.lml[j] == lv) {
              Cost c = clip(get(i - 1, j - 1) + rel(i, j));
              best = std::min(best, c);
              fd[fdi(i, j)] = clip(best);
              td[tdi(i, j)] = fd[fdi(i, j)];
              continue;
            }
            std::size_t pi = a.lml[i] - 1, pj = b.lml[j] - 1;
            if (pi + 1 >= lu && pj + 1 >= lv && in_band(i, j)) {
              Cost t = td[tdi(i, j)];
              best = std::min(best, get(pi, pj) + t);
            }
          }
          fd[fdi(i, j)] = clip(best);
        }
      }
    }
  }
  if (!(diff(na, nb) <= band)) return Cost::inf();
  return td[tdi(na, nb)];
}

}  // namespace detail

// Exact weighted tree edit distance (node deletions, insertions, relabels).
inline Cost weighted_ted(const Sequence& f, const Sequence& g, const WeightTable& w) {
  std::size_t band = std::max(f.size(), g.size()) / 2 + 2;
  return detail::zhang_shasha(f, g, w, band, std::nullopt);
}

// ted^w clipped at k using only the postorder band |i - j| <= k; exact for
// normalized weights.
inline Cost weighted_ted_bounded(const Sequence& f, const Sequence& g, std::int64_t k, const WeightTable& w) {
  if (k < 0) return Cost::inf();
  Cost cap = Cost::from_units(k);
  std::size_t band = static_cast<std::size_t>(std::min<std::int64_t>(k, static_cast<std::int64_t>(std::max(f.size(), g.size()) / 2 + 2)));
  return detail::zhang_shasha(f, g, w, band, cap).clip(k);
}

inline Cost weighted_ted_le_k(const Sequence& f, const Sequence& g, std::int64_t k, const WeightTable& w) {
  ForestPair kp = forest_kernel(f, g, k);
  return weighted_ted_bounded(kp.f, kp.g, k, w);
}

}  // namespace wed

#endif
