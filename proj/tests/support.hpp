// Random instance generators shared by the unit tests and the acceptance
// binary. Everything is seeded explicitly so failures reproduce.
#ifndef WED_TESTS_SUPPORT_HPP_
#define WED_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "wed/core.hpp"
#include "wed/dyckkit.hpp"
#include "wed/foresttk.hpp"

namespace wedtest {

using wed::Cost;
using wed::Sequence;
using wed::Symbol;
using wed::WeightTable;
using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Sequence random_string(Rng& rng, std::size_t len, Symbol sigma) {
  Sequence s(len);
  for (auto& c : s) c = static_cast<Symbol>(uniform(rng, 1, sigma));
  return s;
}

// Applies `edits` random insertions, deletions or substitutions.
inline Sequence mutate(Rng& rng, Sequence s, int edits, Symbol sigma) {
  for (int e = 0; e < edits; ++e) {
    int op = static_cast<int>(uniform(rng, 0, 2));
    if (s.empty()) op = 1;
    std::size_t p = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(s.size()) - (op == 1 ? 0 : 1)));
    if (op == 0)
      s.erase(s.begin() + p);
    else if (op == 1)
      s.insert(s.begin() + p, static_cast<Symbol>(uniform(rng, 1, sigma)));
    else
      s[p] = static_cast<Symbol>(uniform(rng, 1, sigma));
  }
  return s;
}

// Off-diagonal entries drawn from {1, 1.25, ..., 1 + 0.25*(steps-1)}; the
// costs are normalized but need not satisfy the triangle inequality.
inline WeightTable random_normalized(Rng& rng, Symbol sigma, int steps = 9) {
  WeightTable w(sigma);
  for (Symbol a = 0; a <= sigma; ++a)
    for (Symbol b = 0; b <= sigma; ++b)
      if (a != b) w.set(a, b, Cost::from_scaled(Cost::kScale + 250000 * uniform(rng, 0, steps - 1)));
  return w;
}

// Shortest-path closure; keeps the table normalized and makes it satisfy
// the triangle inequality.
inline void close_under_triangle(WeightTable& w) {
  const Symbol n = static_cast<Symbol>(w.sigma());
  for (Symbol c = 0; c <= n; ++c)
    for (Symbol a = 0; a <= n; ++a)
      for (Symbol b = 0; b <= n; ++b)
        if (a != b && w(a, c) + w(c, b) < w(a, b)) w.set(a, b, w(a, c) + w(c, b));
}

inline WeightTable random_quasimetric(Rng& rng, Symbol sigma) {
  WeightTable w = random_normalized(rng, sigma, 13);
  close_under_triangle(w);
  return w;
}

// Parenthesis alphabet with `types` pairs: opening 2t-1, closing 2t.
inline wed::DyckAlphabet paren_alphabet(Symbol types) {
  wed::DyckAlphabet d;
  for (Symbol t = 1; t <= types; ++t) d.add_pair(2 * t - 1, 2 * t);
  return d;
}

// Random skew-symmetric table closed under the triangle inequality. The map
// (a, b) -> (bar b, bar a) reverses shortest paths, so closure keeps skew
// symmetry.
inline WeightTable random_skewmetric(Rng& rng, const wed::DyckAlphabet& d) {
  const Symbol n = d.max_symbol();
  WeightTable w = random_normalized(rng, n, 13);
  auto bar = [&](Symbol s) { return d.complement(s); };
  for (Symbol a = 0; a <= n; ++a)
    for (Symbol b = 0; b <= n; ++b)
      if (a != b) w.set(bar(b), bar(a), w(a, b));
  close_under_triangle(w);
  d.attach(w);
  return w;
}

inline WeightTable unit_dyck_table(const wed::DyckAlphabet& d) {
  WeightTable w(d.max_symbol());
  d.attach(w);
  return w;
}

// Random forest with `nodes` nodes and labels in [1, sigma], as tokens.
inline Sequence random_forest(Rng& rng, std::size_t nodes, Symbol sigma) {
  Sequence out;
  std::vector<Symbol> stack;
  std::size_t opened = 0;
  while (opened < nodes || !stack.empty()) {
    bool can_open = opened < nodes;
    bool do_open = can_open && (stack.empty() || uniform(rng, 0, 1) == 0);
    if (do_open) {
      Symbol a = static_cast<Symbol>(uniform(rng, 1, sigma));
      out.push_back(wed::open_token(a));
      stack.push_back(a);
      ++opened;
    } else {
      out.push_back(wed::close_token(stack.back()));
      stack.pop_back();
    }
  }
  return out;
}

// Random node edit: relabel, delete (children move up) or insert a leaf.
inline Sequence mutate_forest(Rng& rng, Sequence f, int edits, Symbol sigma) {
  for (int e = 0; e < edits; ++e) {
    std::vector<std::size_t> opens;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (wed::is_open(f[i])) opens.push_back(i);
    int op = static_cast<int>(uniform(rng, 0, 2));
    if (opens.empty()) op = 2;
    if (op == 2) {
      // Insert a leaf at a random boundary, which keeps the sequence balanced.
      std::size_t p = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(f.size())));
      Symbol a = static_cast<Symbol>(uniform(rng, 1, sigma));
      f.insert(f.begin() + p, {wed::open_token(a), wed::close_token(a)});
      continue;
    }
    wed::Forest host(f);
    std::size_t o = opens[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(opens.size()) - 1))];
    std::size_t c = host.partner(o);
    if (op == 0) {
      Symbol a = static_cast<Symbol>(uniform(rng, 1, sigma));
      f[o] = wed::open_token(a);
      f[c] = wed::close_token(a);
    } else {
      f.erase(f.begin() + c);
      f.erase(f.begin() + o);
    }
  }
  return f;
}

inline std::size_t node_count(const Sequence& f) { return f.size() / 2; }

// Random string over the parenthesis alphabet: a random Dyck word with a few
// random edits.
inline Sequence random_near_dyck(Rng& rng, const wed::DyckAlphabet& d, std::size_t pairs, int edits) {
  std::vector<Symbol> opens = d.openings();
  Sequence out, st;
  std::size_t opened = 0;
  while (opened < pairs || !st.empty()) {
    bool do_open = opened < pairs && (st.empty() || uniform(rng, 0, 1) == 0);
    if (do_open) {
      Symbol o = opens[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(opens.size()) - 1))];
      out.push_back(o);
      st.push_back(o);
      ++opened;
    } else {
      out.push_back(d.complement(st.back()));
      st.pop_back();
    }
  }
  return mutate(rng, out, edits, d.max_symbol());
}

}  // namespace wedtest

#endif
