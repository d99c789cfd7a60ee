#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "wed/foresttk.hpp"
#include "wed/oracles.hpp"

using namespace wed;

namespace {

Sequence tokens(const std::string& text, Alphabet& alpha) { return parse_forest(text, alpha).tokens(); }

Sequence leaves(Symbol label, std::size_t count) {
  Sequence out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(open_token(label));
    out.push_back(close_token(label));
  }
  return out;
}

// Structural checks shared by the decomposition tests: every piece has the
// right form, pieces are disjoint and cover the forest.
void check_decomposition(const Forest& f, const PieceDecomposition& d, std::size_t t) {
  std::vector<int> cover(f.size(), 0);
  for (const Piece& p : d.pieces()) {
    REQUIRE(p.length() >= 1);
    REQUIRE(p.length() <= t);
    if (p.kind == Piece::Kind::balanced) {
      REQUIRE(f.is_balanced(p.i, p.j));
      for (std::size_t x = p.i; x < p.j; ++x) ++cover[x];
    } else {
      REQUIRE(p.i < p.i2);
      REQUIRE(p.i2 <= p.j2);
      REQUIRE(p.j2 < p.j);
      REQUIRE(f.is_tree(p.i, p.j));
      REQUIRE(f.is_balanced(p.i2, p.j2));
      for (std::size_t x = p.i; x < p.i2; ++x) ++cover[x];
      for (std::size_t x = p.j2; x < p.j; ++x) ++cover[x];
    }
  }
  for (int c : cover) REQUIRE(c == 1);
  const double bound = std::max(1.0, 6.0 * static_cast<double>(f.size()) / static_cast<double>(t) - 1.0);
  REQUIRE(static_cast<double>(d.pieces().size()) <= bound);
}

// Validates a pairs result: identical content and form, offsets within s,
// disjoint G pieces.
void check_pairs(const Forest& f, const Forest& g, const std::vector<PiecePair>& s, std::size_t width) {
  std::vector<int> used(g.size(), 0);
  auto diff = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  for (const auto& pr : s) {
    REQUIRE(pr.f.kind == pr.g.kind);
    REQUIRE(pr.f.length() == pr.g.length());
    const auto& ft = f.tokens();
    const auto& gt = g.tokens();
    REQUIRE(diff(pr.f.i, pr.g.i) <= width);
    REQUIRE(diff(pr.f.j, pr.g.j) <= width);
    if (pr.f.kind == Piece::Kind::balanced) {
      REQUIRE(std::equal(ft.begin() + pr.f.i, ft.begin() + pr.f.j, gt.begin() + pr.g.i));
      for (std::size_t x = pr.g.i; x < pr.g.j; ++x) REQUIRE(used[x]++ == 0);
    } else {
      REQUIRE(std::equal(ft.begin() + pr.f.i, ft.begin() + pr.f.i2, gt.begin() + pr.g.i));
      REQUIRE(std::equal(ft.begin() + pr.f.j2, ft.begin() + pr.f.j, gt.begin() + pr.g.j2));
      REQUIRE(g.is_tree(pr.g.i, pr.g.j));
      REQUIRE(g.is_balanced(pr.g.i2, pr.g.j2));
      for (std::size_t x = pr.g.i; x < pr.g.i2; ++x) REQUIRE(used[x]++ == 0);
      for (std::size_t x = pr.g.j2; x < pr.g.j; ++x) REQUIRE(used[x]++ == 0);
    }
  }
}

}  // namespace

TEST_CASE("forest parsing", "[foresttk][trivial]") {
  Alphabet a;
  Forest one = parse_forest("(a)", a);
  CHECK(one.tokens() == Sequence{open_token(1), close_token(1)});
  Forest two = parse_forest("(a (b))", a);
  CHECK(two.size() == 4);
  CHECK(two.node_count() == 2);
  CHECK(format_forest(two.tokens(), a) == "(a (b))");
  CHECK_THROWS_AS(parse_forest("(a", a), std::invalid_argument);
  CHECK_THROWS_AS(parse_forest("a)", a), std::invalid_argument);
  CHECK_THROWS_AS(parse_forest("( )", a), std::invalid_argument);
  CHECK_THROWS_AS(Forest(Sequence{open_token(1), close_token(2)}), std::invalid_argument);
}

TEST_CASE("balanced fragment queries", "[foresttk][trivial]") {
  Alphabet a;
  Forest f = parse_forest("(a)(b)", a);
  CHECK(f.is_balanced(0, 2));
  CHECK_FALSE(f.is_balanced(1, 3));
  CHECK(f.is_balanced(2, 2));
  CHECK(f.is_balanced(0, 4));
  CHECK_THROWS_AS(f.is_balanced(0, 5), std::out_of_range);
}

TEST_CASE("balanced fragment queries agree with a stack scan", "[foresttk][property]") {
  wedtest::Rng rng(31);
  for (int it = 0; it < 100; ++it) {
    Sequence t = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 60)), 3);
    Forest f(t);
    for (std::size_t i = 0; i <= t.size(); ++i) {
      for (std::size_t j = i; j <= t.size(); ++j) {
        std::int64_t h = 0;
        bool ok = true;
        for (std::size_t x = i; x < j && ok; ++x) {
          h += is_open(t[x]) ? 1 : -1;
          ok = h >= 0;
        }
        REQUIRE(f.is_balanced(i, j) == (ok && h == 0));
      }
    }
  }
}

TEST_CASE("decomposition examples", "[foresttk]") {
  Alphabet a;
  Forest one = parse_forest("(a)", a);
  auto d1 = piece_decomposition(one, 2);
  REQUIRE(d1.pieces().size() == 1);
  CHECK(d1.pieces()[0] == Piece::balanced_piece(0, 2));

  Forest six(leaves(1, 6));
  auto d6 = piece_decomposition(six, 4);  // [derived]
  check_decomposition(six, d6, 4);
  CHECK(d6.pieces().size() <= 17);

  CHECK(piece_decomposition(Forest(), 2).pieces().empty());
  CHECK_THROWS_AS(piece_decomposition(one, 1), std::invalid_argument);
}

TEST_CASE("decomposition bounds on random forests", "[foresttk][property]") {
  wedtest::Rng rng(32);
  for (int it = 0; it < 150; ++it) {
    std::size_t nodes = static_cast<std::size_t>(wedtest::uniform(rng, 0, 1000));
    Forest f(it % 3 == 0 ? leaves(1, nodes) : wedtest::random_forest(rng, nodes, 4));
    for (std::size_t t : {2u, 8u, 64u}) check_decomposition(f, piece_decomposition(f, t), t);
  }
}

TEST_CASE("decomposition of deep paths uses context pieces", "[foresttk]") {
  Sequence path;
  for (int i = 0; i < 200; ++i) path.push_back(open_token(1));
  for (int i = 0; i < 200; ++i) path.push_back(close_token(1));
  Forest f(path);
  auto d = piece_decomposition(f, 16);
  check_decomposition(f, d, 16);
  bool has_context = false;
  for (const auto& p : d.pieces()) has_context = has_context || p.kind == Piece::Kind::context;
  CHECK(has_context);
}

TEST_CASE("pairs examples", "[foresttk]") {
  Alphabet a;
  Forest f = parse_forest("(a)(b)", a);
  Forest g = parse_forest("(a)(c)", a);
  auto d = piece_decomposition(f, 2);
  REQUIRE(d.pieces().size() == 2);
  auto s = pairs(f, d, g, 2);  // [derived]
  REQUIRE(s.size() == 1);
  CHECK(s[0].f == Piece::balanced_piece(0, 2));
  CHECK(s[0].g == Piece::balanced_piece(0, 2));

  Forest h = parse_forest("(x)(y)(z)", a);
  CHECK(pairs(f, d, h, 2).empty());
  CHECK(pairs(f, d, Forest(leaves(1, 5)), 1).empty());  // size gap above s
}

TEST_CASE("pairs against itself pairs every piece", "[foresttk][property]") {
  wedtest::Rng rng(33);
  for (int it = 0; it < 200; ++it) {
    Forest f(wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 200)), 3));
    std::size_t t = static_cast<std::size_t>(wedtest::uniform(rng, 2, 20));
    auto d = piece_decomposition(f, t);
    auto s = pairs(f, d, f, 0);
    REQUIRE(s.size() == d.pieces().size());
    check_pairs(f, f, s, 0);
  }
}

TEST_CASE("pairs cover all but k pieces when the distance is at most k", "[foresttk][property]") {
  wedtest::Rng rng(34);
  WeightTable unit(4);
  int checked = 0;
  for (int it = 0; it < 600; ++it) {
    std::int64_t k = wedtest::uniform(rng, 1, 3);
    Sequence ft = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 1, 16)), 4);
    Sequence gt = wedtest::mutate_forest(rng, ft, static_cast<int>(wedtest::uniform(rng, 0, k)), 4);
    if (wedtest::node_count(gt) > 16) continue;
    Cost d = weighted_ted(ft, gt, unit);
    if (d > Cost::from_units(k)) continue;
    Forest f(ft), g(gt);
    if (f.size() < g.size()) std::swap(f, g);
    std::size_t t = static_cast<std::size_t>(wedtest::uniform(rng, 2, 8));
    auto dec = piece_decomposition(f, t);
    auto s = pairs(f, dec, g, static_cast<std::size_t>(2 * k));
    check_pairs(f, g, s, static_cast<std::size_t>(2 * k));
    REQUIRE(static_cast<std::int64_t>(s.size()) >= static_cast<std::int64_t>(dec.pieces().size()) - k);
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("horizontal reduction examples", "[foresttk]") {
  CHECK(horizontal_reduction(leaves(1, 100), 1) == leaves(1, 4));  // [derived]
  CHECK(horizontal_reduction(leaves(2, 1), 1) == leaves(2, 1));
  // Aperiodic long forest collapses to the canonical forest.
  Sequence chain;
  for (Symbol lab = 1; lab <= 60; ++lab) chain.insert(chain.end(), {open_token(lab), close_token(lab)});
  Sequence r = horizontal_reduction(chain, 1);
  CHECK(r == canonical_forest(37));  // [published]
  CHECK(r.size() == 74);
}

TEST_CASE("horizontal reduction avoids balanced powers and stays short", "[foresttk][property]") {
  wedtest::Rng rng(35);
  for (int it = 0; it < 300; ++it) {
    std::int64_t k = wedtest::uniform(rng, 1, 2);
    Sequence p;
    while (p.size() < 300) {
      Sequence q = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 1, 3)), 2);
      std::int64_t reps = wedtest::uniform(rng, 1, 14);
      for (std::int64_t r = 0; r < reps; ++r) p.insert(p.end(), q.begin(), q.end());
    }
    Sequence r = horizontal_reduction(p, k);
    REQUIRE(Forest(r).size() == r.size());
    REQUIRE(static_cast<std::int64_t>(r.size()) <= 74 * k * k * k);
    REQUIRE(oracle::naive_balanced_power_scan(r, static_cast<std::size_t>(4 * k), static_cast<std::size_t>(4 * k)).empty());
  }
}

TEST_CASE("vertical reduction examples", "[foresttk]") {
  Context deep{Sequence(20, open_token(1)), Sequence(20, close_token(1))};
  Context r = vertical_reduction(deep, 1);  // [derived]
  CHECK(r.left == Sequence(6, open_token(1)));
  CHECK(r.right == Sequence(6, close_token(1)));

  Context flat{{open_token(2)}, {close_token(2)}};
  CHECK(vertical_reduction(flat, 1) == flat);

  // A long spine of distinct factors collapses to the canonical context.
  Context big;
  for (Symbol lab = 1; lab <= 400; ++lab) {
    big.left.push_back(open_token(lab));
    big.right.insert(big.right.begin(), close_token(lab));
  }
  Context c = vertical_reduction(big, 1);
  CHECK(c == canonical_context(1));  // [published]
  CHECK(c.size() == 578);
  CHECK(is_context(c));
  CHECK_THROWS_AS(vertical_reduction(Context{{open_token(1)}, {}}, 1), std::invalid_argument);
}

TEST_CASE("context splitting round-trips", "[foresttk][property]") {
  wedtest::Rng rng(36);
  for (int it = 0; it < 300; ++it) {
    Context c;
    std::int64_t depth = wedtest::uniform(rng, 1, 8);
    for (std::int64_t d = 0; d < depth; ++d) {
      Symbol lab = static_cast<Symbol>(wedtest::uniform(rng, 1, 3));
      Sequence l = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 3)), 3);
      Sequence r = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 3)), 3);
      Context layer{{open_token(lab)}, r};
      layer.left.insert(layer.left.end(), l.begin(), l.end());
      layer.right.push_back(close_token(lab));
      c = c.size() == 0 ? layer : compose(c, layer);
    }
    REQUIRE(is_context(c));
    auto parts = split_context(c);
    REQUIRE(static_cast<std::int64_t>(parts.size()) == depth);
    REQUIRE(join_context(parts) == c);
  }
}

TEST_CASE("vertical reduction avoids identifier powers", "[foresttk][property]") {
  wedtest::Rng rng(37);
  for (int it = 0; it < 200; ++it) {
    std::int64_t k = wedtest::uniform(rng, 1, 2);
    std::vector<DepthOneContext> pool;
    for (int q = 0; q < 3; ++q)
      pool.push_back({static_cast<Symbol>(wedtest::uniform(rng, 1, 2)),
                      wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 1)), 2),
                      wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 1)), 2)});
    std::vector<DepthOneContext> parts;
    while (parts.size() < 120) {
      std::size_t len = static_cast<std::size_t>(wedtest::uniform(rng, 1, 3));
      std::vector<DepthOneContext> block;
      for (std::size_t b = 0; b < len; ++b) block.push_back(pool[static_cast<std::size_t>(wedtest::uniform(rng, 0, 2))]);
      std::int64_t reps = wedtest::uniform(rng, 1, 16);
      for (std::int64_t r = 0; r < reps; ++r) parts.insert(parts.end(), block.begin(), block.end());
    }
    Context out = vertical_reduction(join_context(parts), k);
    REQUIRE(is_context(out));
    REQUIRE(static_cast<std::int64_t>(out.size()) <= 578 * k * k * k * k);
    VerticalIds v = vertical_ids(out, k);
    std::vector<std::size_t> prefix{0};
    for (Symbol id : v.ids)
      prefix.push_back(prefix.back() + 2 + v.table[id].inner_left.size() + v.table[id].inner_right.size());
    auto viol = oracle::naive_power_scan(v.ids, static_cast<std::size_t>(6 * k), v.ids.size(),
                                         [&](std::size_t i, std::size_t j) {
                                           return prefix[j] - prefix[i] <= static_cast<std::size_t>(8 * k);
                                         });
    REQUIRE(viol.empty());
  }
}

TEST_CASE("weighted forest distance examples", "[foresttk]") {
  Alphabet a;
  WeightTable unit(8);
  CHECK(weighted_ted(tokens("(a)", a), tokens("(b)", a), unit) == Cost::from_units(1));
  CHECK(weighted_ted(tokens("(a(b))", a), tokens("(a)", a), unit) == Cost::from_units(1));  // [derived]
  wedtest::Rng rng(38);
  WeightTable w = wedtest::random_quasimetric(rng, 8);
  Sequence f = tokens("(a (b (c)) (d)) (e)", a);
  // Every node deleted: sum of deletion costs.
  Cost expect;
  for (Symbol t : f)
    if (is_open(t)) expect = expect + w(token_label(t), kEpsilon);
  CHECK(weighted_ted(f, Sequence{}, w) == expect);
  CHECK(weighted_ted(f, f, w) == Cost());
}

TEST_CASE("weighted forest distance matches mapping enumeration", "[foresttk][property]") {
  wedtest::Rng rng(39);
  for (int it = 0; it < 400; ++it) {
    WeightTable w = it % 6 == 0 ? WeightTable(3) : wedtest::random_quasimetric(rng, 3);
    Sequence f = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 6)), 3);
    Sequence g = it % 2 ? wedtest::mutate_forest(rng, f, 2, 3)
                        : wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 6)), 3);
    if (wedtest::node_count(g) > 8) continue;
    REQUIRE(weighted_ted(f, g, w) == oracle::enumerate_forest_alignments(f, g, w));
  }
}

TEST_CASE("forest distance satisfies the triangle inequality", "[foresttk][property]") {
  wedtest::Rng rng(40);
  for (int it = 0; it < 500; ++it) {
    WeightTable w = wedtest::random_quasimetric(rng, 3);
    Sequence f = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 6)), 3);
    Sequence g = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 6)), 3);
    Sequence h = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 6)), 3);
    REQUIRE(weighted_ted(f, h, w) <= weighted_ted(f, g, w) + weighted_ted(g, h, w));
  }
}

TEST_CASE("bounded forest distance equals the clipped full distance", "[foresttk][property]") {
  wedtest::Rng rng(41);
  for (int it = 0; it < 1500; ++it) {
    WeightTable w = wedtest::random_quasimetric(rng, 3);
    std::int64_t k = wedtest::uniform(rng, 1, 3);
    Sequence f = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 0, 14)), 3);
    Sequence g = wedtest::mutate_forest(rng, f, static_cast<int>(wedtest::uniform(rng, 0, 3)), 3);
    REQUIRE(weighted_ted_bounded(f, g, k, w) == weighted_ted(f, g, w).clip(k));
    REQUIRE(weighted_ted_le_k(f, g, k, w) == weighted_ted(f, g, w).clip(k));
  }
}

TEST_CASE("forest kernel examples", "[foresttk]") {
  const std::int64_t k = 1;
  Sequence big = leaves(1, 10000);
  Sequence one_off = big;
  one_off[5000 * 2] = open_token(2);
  one_off[5000 * 2 + 1] = close_token(2);

  ForestPair same = forest_kernel_step(big, big, k);
  CHECK(same.f == same.g);
  CHECK(same.f.size() < big.size());

  ForestPair gone = forest_kernel_step(big, Sequence{}, k);
  CHECK(gone.f == leaves(1, 2));
  CHECK(gone.g.empty());
  ForestPair flipped = forest_kernel_step(Sequence{}, big, k);
  CHECK(flipped.f.empty());
  CHECK(flipped.g == leaves(1, 2));

  ForestPair step = forest_kernel_step(big, one_off, k);  // [derived]
  CHECK(static_cast<std::int64_t>(step.f.size()) <= static_cast<std::int64_t>(big.size()) / 2 + 6358);
  CHECK(static_cast<std::int64_t>(step.g.size()) <= static_cast<std::int64_t>(big.size()) / 2 + 6358);
  WeightTable unit(2);
  CHECK(weighted_ted_bounded(step.f, step.g, 2, unit) == Cost::from_units(1));

  ForestPair fixed = forest_kernel(big, one_off, k);
  CHECK(static_cast<std::int64_t>(std::max(fixed.f.size(), fixed.g.size())) <= 12717);
  CHECK(weighted_ted_le_k(big, one_off, k, unit) == Cost::from_units(1));

  CHECK_THROWS_AS(forest_kernel_step(leaves(1, 10), leaves(1, 10), k), std::invalid_argument);
  ForestPair small = forest_kernel(leaves(1, 10), leaves(2, 10), k);
  CHECK(small.f == leaves(1, 10));
  CHECK(small.g == leaves(2, 10));
}

TEST_CASE("forest kernel preserves the clipped distance on large random forests", "[foresttk][property]") {
  wedtest::Rng rng(42);
  for (int it = 0; it < 6; ++it) {
    const std::int64_t k = 1;
    WeightTable w = wedtest::random_quasimetric(rng, 3);
    Sequence f = wedtest::random_forest(rng, static_cast<std::size_t>(wedtest::uniform(rng, 7000, 12000)), 3);
    Sequence g = wedtest::mutate_forest(rng, f, static_cast<int>(wedtest::uniform(rng, 0, 2)), 3);
    ForestPair kp = forest_kernel(f, g, k);
    REQUIRE(static_cast<std::int64_t>(std::max(kp.f.size(), kp.g.size())) <= 12717);
    REQUIRE(weighted_ted_bounded(kp.f, kp.g, k, w) == weighted_ted_bounded(f, g, k, w));
  }
}
