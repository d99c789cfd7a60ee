// Alphabets, exact costs, weight tables and alignment paths shared by the
// string, forest and Dyck pipelines.
#ifndef WED_CORE_HPP_
#define WED_CORE_HPP_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wed {

using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

// Id 0 is the empty symbol; real symbols are numbered from 1.
inline constexpr Symbol kEpsilon = 0;

// Saturating k^p * c, used for the polynomial size thresholds of the kernels.
inline std::int64_t poly_bound(std::int64_t c, std::int64_t k, int p) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t r = c;
  for (int i = 0; i < p; ++i) {
    if (k != 0 && r > kMax / k) return kMax;
    r *= k;
  }
  return r;
}

// Nonnegative cost stored as an integer number of millionths, or INF.
class Cost {
 public:
  static constexpr std::int64_t kScale = 1'000'000;
  static constexpr std::int64_t kInfRaw = std::numeric_limits<std::int64_t>::max();

  constexpr Cost() = default;

  static constexpr Cost from_scaled(std::int64_t v) {
    if (v < 0) throw std::invalid_argument("negative cost");
    return Cost(v);
  }
  static Cost from_units(std::int64_t units) {
    if (units < 0) throw std::invalid_argument("negative cost");
    if (units > (kInfRaw - 1) / kScale) throw std::overflow_error("cost overflow");
    return Cost(units * kScale);
  }
  static constexpr Cost inf() { return Cost(kInfRaw); }

  constexpr bool is_inf() const { return v_ == kInfRaw; }
  constexpr std::int64_t scaled() const { return v_; }

  friend Cost operator+(Cost a, Cost b) {
    if (a.is_inf() || b.is_inf()) return inf();
    if (a.v_ > kInfRaw - 1 - b.v_) throw std::overflow_error("cost overflow");
    return Cost(a.v_ + b.v_);
  }
  Cost& operator+=(Cost o) { return *this = *this + o; }

  friend constexpr auto operator<=>(Cost a, Cost b) = default;

  // The value itself when it is at most k, INF otherwise.
  Cost clip(std::int64_t k) const {
    if (is_inf()) return *this;
    if (k < 0) return inf();
    if (k > (kInfRaw - 1) / kScale) return *this;
    return v_ <= k * kScale ? *this : inf();
  }

  std::string to_string() const {
    if (is_inf()) return "INF";
    std::string frac = std::to_string(v_ % kScale);
    frac.insert(0, 6 - frac.size(), '0');
    return std::to_string(v_ / kScale) + "." + frac;
  }

  // Accepts "12", "12.5", "0.000001"; at most six fraction digits.
  static Cost parse(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty cost");
    std::size_t dot = s.find('.');
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (ip.empty() || (dot != std::string_view::npos && fp.empty()))
      throw std::invalid_argument("malformed cost '" + std::string(s) + "'");
    if (fp.size() > 6)
      throw std::invalid_argument("cost '" + std::string(s) + "' has more than 6 fraction digits");
    auto digits = [&](std::string_view d) {
      for (char c : d)
        if (c < '0' || c > '9') throw std::invalid_argument("malformed cost '" + std::string(s) + "'");
    };
    digits(ip);
    digits(fp);
    std::int64_t whole = 0;
    for (char c : ip) {
      if (whole > (kInfRaw - 1) / 10) throw std::overflow_error("cost overflow");
      whole = whole * 10 + (c - '0');
    }
    std::int64_t frac = 0;
    for (std::size_t i = 0; i < 6; ++i) frac = frac * 10 + (i < fp.size() ? fp[i] - '0' : 0);
    Cost w = from_units(whole);
    return w + Cost(frac);
  }

 private:
  constexpr explicit Cost(std::int64_t v) : v_(v) {}
  std::int64_t v_ = 0;
};

// Bijection between external token names and symbol ids 1..size().
class Alphabet {
 public:
  Alphabet() : names_{"-"} {}

  Symbol intern(const std::string& name) {
    if (name == "-") return kEpsilon;
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    Symbol id = static_cast<Symbol>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
  }
  std::optional<Symbol> find(const std::string& name) const {
    if (name == "-") return kEpsilon;
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name(Symbol s) const {
    if (s >= names_.size()) throw std::out_of_range("unknown symbol id");
    return names_[s];
  }
  // Number of real symbols, i.e. |Sigma|.
  std::size_t size() const { return names_.size() - 1; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> ids_;
};

// Total cost function over (Sigma + epsilon)^2. Entries are filled during
// construction; afterwards the table is only read.
class WeightTable {
 public:
  WeightTable() : WeightTable(0) {}
  // Discrete metric over symbols 1..sigma.
  explicit WeightTable(std::size_t sigma) { grow(sigma); }

  std::size_t sigma() const { return sigma_; }

  Cost operator()(Symbol a, Symbol b) const {
    if (a > sigma_ || b > sigma_) throw std::out_of_range("symbol outside weight table");
    return Cost::from_scaled(w_[a * (sigma_ + 1) + b]);
  }

  void set(Symbol a, Symbol b, Cost c) {
    if (a > sigma_ || b > sigma_) throw std::out_of_range("symbol outside weight table");
    if (c.is_inf()) throw std::invalid_argument("weight table entries must be finite");
    if (a == b && c.scaled() != 0) throw std::invalid_argument("nonzero diagonal weight");
    w_[a * (sigma_ + 1) + b] = c.scaled();
  }

  // Extends the table to symbols 1..sigma; new off-diagonal entries cost 1.
  void grow(std::size_t sigma) {
    if (sigma < sigma_ && !w_.empty()) return;
    std::size_t old = w_.empty() ? 0 : sigma_ + 1;
    std::vector<std::int64_t> nw((sigma + 1) * (sigma + 1), Cost::kScale);
    for (std::size_t a = 0; a <= sigma; ++a) nw[a * (sigma + 1) + a] = 0;
    for (std::size_t a = 0; a < old; ++a)
      for (std::size_t b = 0; b < old; ++b) nw[a * (sigma + 1) + b] = w_[a * old + b];
    w_ = std::move(nw);
    sigma_ = sigma;
    if (!comp_.empty()) comp_.resize(sigma + 1, kNone);
  }

  // comp[a] is the complement of a; comp[0] must be 0.
  void set_complement(std::vector<Symbol> comp) {
    if (comp.size() != sigma_ + 1) throw std::invalid_argument("complement map has wrong size");
    if (comp[0] != kEpsilon) throw std::invalid_argument("complement of epsilon must be epsilon");
    for (std::size_t a = 1; a <= sigma_; ++a) {
      Symbol b = comp[a];
      if (b == kNone) continue;
      if (b == kEpsilon || b > sigma_ || comp[b] != a || b == a)
        throw std::invalid_argument("complement map is not an involution without fixed points");
    }
    comp_ = std::move(comp);
  }
  bool has_complement() const {
    if (comp_.empty()) return false;
    for (std::size_t a = 1; a <= sigma_; ++a)
      if (comp_[a] == kNone) return false;
    return true;
  }
  Symbol complement(Symbol a) const {
    if (comp_.empty() || a > sigma_ || comp_[a] == kNone)
      throw std::invalid_argument("symbol has no complement");
    return comp_[a];
  }

  static constexpr Symbol kNone = std::numeric_limits<Symbol>::max();

 private:
  std::size_t sigma_ = 0;
  std::vector<std::int64_t> w_;
  std::vector<Symbol> comp_;
};

// Reads `A<TAB>B<TAB>COST` lines. Symbols are interned into `alpha`.
inline WeightTable read_weight_file(std::istream& in, Alphabet& alpha) {
  struct Entry {
    Symbol a, b;
    Cost c;
  };
  std::vector<Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t p = 0;
    while (true) {
      std::size_t q = line.find('\t', p);
      f.push_back(line.substr(p, q == std::string::npos ? std::string::npos : q - p));
      if (q == std::string::npos) break;
      p = q + 1;
    }
    if (f.size() != 3 || f[0].empty() || f[1].empty())
      throw std::invalid_argument("weight file line " + std::to_string(lineno) +
                                  ": expected A<TAB>B<TAB>COST");
    Cost c;
    try {
      c = Cost::parse(f[2]);
    } catch (const std::exception& e) {
      throw std::invalid_argument("weight file line " + std::to_string(lineno) + ": " + e.what());
    }
    Symbol a = alpha.intern(f[0]);
    Symbol b = alpha.intern(f[1]);
    if (a == b && c.scaled() != 0)
      throw std::invalid_argument("weight file line " + std::to_string(lineno) +
                                  ": nonzero diagonal entry");
    entries.push_back({a, b, c});
  }
  WeightTable w(alpha.size());
  for (const auto& e : entries) w.set(e.a, e.b, e.c);
  return w;
}

enum class WeightMode { normalized, quasimetric, skewmetric };

inline std::optional<WeightMode> parse_weight_mode(std::string_view s) {
  if (s == "normalized") return WeightMode::normalized;
  if (s == "quasimetric") return WeightMode::quasimetric;
  if (s == "skewmetric") return WeightMode::skewmetric;
  return std::nullopt;
}

struct Violation {
  enum class Kind { below_one, triangle, skew };
  Kind kind;
  Symbol a = 0, b = 0, c = 0;  // c is only meaningful for triangle violations
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_weights(const WeightTable& w, WeightMode mode) {
  if (mode == WeightMode::skewmetric && !w.has_complement())
    throw std::invalid_argument("skewmetric validation needs a complement involution");
  ValidationReport rep;
  const Symbol n = static_cast<Symbol>(w.sigma());
  for (Symbol a = 0; a <= n; ++a)
    for (Symbol b = 0; b <= n; ++b)
      if (a != b && w(a, b).scaled() < Cost::kScale)
        rep.violations.push_back({Violation::Kind::below_one, a, b, 0});
  if (mode == WeightMode::normalized) return rep;
  for (Symbol a = 0; a <= n; ++a)
    for (Symbol c = 0; c <= n; ++c)
      for (Symbol b = 0; b <= n; ++b)
        if (w(a, c) + w(c, b) < w(a, b)) rep.violations.push_back({Violation::Kind::triangle, a, c, b});
  if (mode == WeightMode::quasimetric) return rep;
  auto bar = [&](Symbol s) { return s == kEpsilon ? kEpsilon : w.complement(s); };
  for (Symbol a = 0; a <= n; ++a)
    for (Symbol b = 0; b <= n; ++b)
      if (w(a, b) != w(bar(b), bar(a))) rep.violations.push_back({Violation::Kind::skew, a, b, 0});
  return rep;
}

// Lattice path from (0,0) to (|X|,|Y|) with unit steps.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

inline void check_alignment(const Alignment& a, std::size_t nx, std::size_t ny) {
  const auto& p = a.path;
  if (p.empty() || p.front() != std::pair<std::size_t, std::size_t>{0, 0} ||
      p.back() != std::pair<std::size_t, std::size_t>{nx, ny})
    throw std::invalid_argument("alignment must run from (0,0) to (|X|,|Y|)");
  for (std::size_t t = 1; t < p.size(); ++t) {
    std::size_t dx = p[t].first - p[t - 1].first, dy = p[t].second - p[t - 1].second;
    bool ok = p[t].first >= p[t - 1].first && p[t].second >= p[t - 1].second && dx <= 1 && dy <= 1 &&
              dx + dy >= 1;
    if (!ok) throw std::invalid_argument("alignment has an invalid step");
  }
}

inline Cost alignment_cost(const Sequence& x, const Sequence& y, const Alignment& a,
                           const WeightTable& w) {
  check_alignment(a, x.size(), y.size());
  Cost total;
  for (std::size_t t = 1; t < a.path.size(); ++t) {
    auto [x0, y0] = a.path[t - 1];
    auto [x1, y1] = a.path[t];
    if (x1 > x0 && y1 > y0)
      total += w(x[x0], y[y0]);
    else if (x1 > x0)
      total += w(x[x0], kEpsilon);
    else
      total += w(kEpsilon, y[y0]);
  }
  return total;
}

}  // namespace wed

#endif
