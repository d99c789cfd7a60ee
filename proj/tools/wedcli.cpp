// Command-line front end: threshold-clipped weighted edit distances for
// strings, forests and Dyck repairs, plus weight-table validation.
//
//   wedcli string --x X --y Y --weights W --k K [--kernel-out P] [--oracle] [--chars|--bytes]
//   wedcli tree   --f F --g G --weights W --k K [--kernel-out P] [--oracle]
//   wedcli dyck   --x X --pairs T --weights W --k K [--kernel-out P] [--oracle] [--chars]
//   wedcli validate-weights --weights W --mode normalized|quasimetric|skewmetric [--pairs T]
//
// Distance subcommands accept `--batch LIST` instead of the instance files.
// Exit codes: 0 success (INF included), 1 oracle mismatch, 2 bad input.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wed/core.hpp"
#include "wed/dyckkit.hpp"
#include "wed/foresttk.hpp"
#include "wed/oracles.hpp"
#include "wed/stringed.hpp"

namespace {

using namespace wed;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitBadInput = 2;

enum class Kind { string, tree, dyck };
enum class TextMode { tokens, chars, bytes };

struct RunConfig {
  std::string x, y, weights, pairs, mode, kernel_out, batch;
  std::int64_t k = 1;
  bool oracle = false, chars = false, bytes = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_text(const std::string& text, TextMode mode) {
  std::vector<std::string> out;
  if (mode == TextMode::tokens) {
    std::istringstream in(text);
    for (std::string t; in >> t;) out.push_back(t);
  } else if (mode == TextMode::chars) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) out.emplace_back(1, c);
  } else {
    std::string body = text;
    if (!body.empty() && body.back() == '\n') body.pop_back();
    for (char c : body) out.emplace_back(1, c);
  }
  return out;
}

Sequence read_sequence(const std::string& path, TextMode mode, Alphabet& alpha) {
  Sequence s;
  for (const auto& t : split_text(read_file(path), mode)) {
    Symbol id = alpha.intern(t);
    if (id == kEpsilon) throw std::invalid_argument(path + ": '-' is reserved for the empty symbol");
    s.push_back(id);
  }
  return s;
}

std::string format_sequence(const Sequence& s, TextMode mode, const Alphabet& alpha) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (mode == TextMode::tokens && i > 0) out += ' ';
    out += alpha.name(s[i]);
  }
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << body << '\n';
}

struct Instance {
  std::string label;
  Sequence a, b;
};

struct Outcome {
  Cost distance;
  std::optional<Cost> oracle;
  std::exception_ptr error;
};

// Each non-comment line lists the instance files; relative paths are taken
// from the list file's directory.
std::vector<std::vector<std::string>> read_batch_list(const std::string& list, std::size_t per_line) {
  std::istringstream in(read_file(list));
  std::filesystem::path base = std::filesystem::path(list).parent_path();
  std::vector<std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> paths;
    for (std::string p; ls >> p;) paths.push_back(p);
    if (paths.empty() || paths[0][0] == '#') continue;
    if (paths.size() != per_line)
      throw std::invalid_argument(list + " line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(per_line) + " paths");
    for (auto& p : paths)
      if (std::filesystem::path(p).is_relative()) p = (base / p).string();
    out.push_back(std::move(paths));
  }
  return out;
}

class DistanceRun {
 public:
  DistanceRun(Kind kind, RunConfig cfg) : kind_(kind), cfg_(std::move(cfg)) {}

  int run() {
    if (cfg_.k < 1) throw std::invalid_argument("--k must be at least 1");
    if (cfg_.chars && cfg_.bytes) throw std::invalid_argument("--chars and --bytes are exclusive");
    if (!cfg_.batch.empty() && !cfg_.kernel_out.empty())
      throw std::invalid_argument("--kernel-out cannot be combined with --batch");
    text_ = cfg_.bytes ? TextMode::bytes : cfg_.chars ? TextMode::chars : TextMode::tokens;
    load_tables();
    load_instances();
    finish_tables();

    std::vector<Outcome> results(instances_.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next++) < instances_.size();) {
        try {
          results[i] = solve(instances_[i]);
        } catch (...) {
          results[i].error = std::current_exception();
        }
      }
    };
    std::size_t threads = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), instances_.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    int code = kExitOk;
    const bool batch = !cfg_.batch.empty();
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].error) std::rethrow_exception(results[i].error);
      std::string prefix = batch ? instances_[i].label + "\t" : "";
      std::cout << prefix << "distance " << results[i].distance.to_string() << '\n';
      if (results[i].oracle) {
        std::cout << prefix << "oracle " << results[i].oracle->to_string() << '\n';
        if (*results[i].oracle != results[i].distance) {
          std::cerr << "oracle mismatch" << (batch ? " for " + instances_[i].label : "") << '\n';
          code = kExitMismatch;
        }
      }
    }
    if (!cfg_.kernel_out.empty()) write_kernel(instances_.front());
    return code;
  }

 private:
  void load_tables() {
    {
      std::istringstream in(read_file(cfg_.weights));
      weights_ = read_weight_file(in, alpha_);
    }
    if (kind_ == Kind::dyck) {
      std::istringstream in(read_file(cfg_.pairs));
      pairs_ = read_pairs_file(in, alpha_);
    }
  }

  Instance load_one(const std::vector<std::string>& paths) {
    Instance ins;
    for (std::size_t i = 0; i < paths.size(); ++i) ins.label += (i ? " " : "") + paths[i];
    switch (kind_) {
      case Kind::string:
        ins.a = read_sequence(paths[0], text_, alpha_);
        ins.b = read_sequence(paths[1], text_, alpha_);
        break;
      case Kind::tree:
        ins.a = parse_forest(read_file(paths[0]), alpha_).tokens();
        ins.b = parse_forest(read_file(paths[1]), alpha_).tokens();
        break;
      case Kind::dyck:
        ins.a = read_sequence(paths[0], text_, alpha_);
        for (Symbol s : ins.a)
          if (!pairs_.contains(s))
            throw std::invalid_argument(paths[0] + ": symbol '" + alpha_.name(s) + "' is not in the pairs file");
        break;
    }
    return ins;
  }

  void load_instances() {
    const std::size_t per = kind_ == Kind::dyck ? 1 : 2;
    if (!cfg_.batch.empty()) {
      for (const auto& paths : read_batch_list(cfg_.batch, per)) instances_.push_back(load_one(paths));
      return;
    }
    std::vector<std::string> paths{cfg_.x};
    if (per == 2) paths.push_back(cfg_.y);
    for (const auto& p : paths)
      if (p.empty()) throw std::invalid_argument("missing instance file");
    instances_.push_back(load_one(paths));
  }

  // Symbols seen only in the inputs get unit costs; the table must then meet
  // the weight class the pipeline is exact for.
  void finish_tables() {
    weights_.grow(alpha_.size());
    WeightMode need = WeightMode::normalized;
    if (kind_ == Kind::tree) need = WeightMode::quasimetric;
    if (kind_ == Kind::dyck) {
      need = WeightMode::skewmetric;
      for (Symbol s = 1; s <= alpha_.size(); ++s)
        if (!pairs_.contains(s))
          throw std::invalid_argument("symbol '" + alpha_.name(s) + "' is not in the pairs file");
      pairs_.attach(weights_);
    }
    ValidationReport rep = validate_weights(weights_, need);
    if (!rep.ok())
      throw std::invalid_argument("weight table violates the required weight class (" +
                                  std::to_string(rep.violations.size()) + " violations; see validate-weights)");
  }

  Outcome solve(const Instance& ins) const {
    Outcome o;
    const std::int64_t k = cfg_.k;
    switch (kind_) {
      case Kind::string:
        o.distance = weighted_ed_le_k(ins.a, ins.b, k, weights_);
        if (cfg_.oracle) o.oracle = oracle::full_dp_weighted_ed(ins.a, ins.b, weights_).clip(k);
        break;
      case Kind::tree:
        o.distance = weighted_ted_le_k(ins.a, ins.b, k, weights_);
        if (cfg_.oracle) {
          bool small = ins.a.size() <= 16 && ins.b.size() <= 16;
          Cost full = small ? oracle::enumerate_forest_alignments(ins.a, ins.b, weights_)
                            : weighted_ted(ins.a, ins.b, weights_);
          o.oracle = full.clip(k);
        }
        break;
      case Kind::dyck:
        o.distance = weighted_dyck_le_k(ins.a, k, weights_, pairs_);
        if (cfg_.oracle) {
          Cost full = ins.a.size() <= 10 ? oracle::enumerate_dyck_matchings(ins.a, weights_, pairs_)
                                         : weighted_dyck_dp(ins.a, weights_, pairs_).cost;
          o.oracle = full.clip(k);
        }
        break;
    }
    return o;
  }

  void write_kernel(const Instance& ins) const {
    const std::string& p = cfg_.kernel_out;
    switch (kind_) {
      case Kind::string: {
        StringKernelResult r = string_kernel(ins.a, ins.b, cfg_.k);
        write_file(p + ".x", format_sequence(r.x, text_, alpha_));
        write_file(p + ".y", format_sequence(r.y, text_, alpha_));
        break;
      }
      case Kind::tree: {
        ForestPair r = forest_kernel(ins.a, ins.b, cfg_.k);
        write_file(p + ".x", format_forest(r.f, alpha_));
        write_file(p + ".y", format_forest(r.g, alpha_));
        break;
      }
      case Kind::dyck:
        write_file(p + ".x", format_sequence(dyck_kernel(greedy_preprocess(ins.a, pairs_), cfg_.k, pairs_), text_, alpha_));
        break;
    }
  }

  Kind kind_;
  RunConfig cfg_;
  TextMode text_ = TextMode::tokens;
  Alphabet alpha_;
  WeightTable weights_;
  DyckAlphabet pairs_;
  std::vector<Instance> instances_;
};

std::string kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::below_one: return "below_one";
    case Violation::Kind::triangle: return "triangle";
    case Violation::Kind::skew: return "skew";
  }
  return "unknown";
}

int validate(const RunConfig& cfg) {
  auto mode = parse_weight_mode(cfg.mode);
  if (!mode) throw std::invalid_argument("unknown weight mode '" + cfg.mode + "'");
  Alphabet alpha;
  std::istringstream win(read_file(cfg.weights));
  WeightTable w = read_weight_file(win, alpha);
  if (!cfg.pairs.empty()) {
    std::istringstream pin(read_file(cfg.pairs));
    DyckAlphabet d = read_pairs_file(pin, alpha);
    w.grow(alpha.size());
    d.attach(w);
  }
  if (*mode == WeightMode::skewmetric && !w.has_complement())
    throw std::invalid_argument("skewmetric mode needs --pairs covering every symbol");
  ValidationReport rep = validate_weights(w, *mode);
  if (rep.ok()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  for (const auto& v : rep.violations) {
    std::cout << kind_name(v.kind) << ' ' << alpha.name(v.a) << ' ' << alpha.name(v.b);
    if (v.kind == Violation::Kind::triangle) std::cout << ' ' << alpha.name(v.c);
    std::cout << '\n';
  }
  return kExitBadInput;
}

void add_instance_options(CLI::App* sub, RunConfig& cfg, Kind kind) {
  if (kind == Kind::tree) {
    sub->add_option("--f", cfg.x, "First forest file");
    sub->add_option("--g", cfg.y, "Second forest file");
  } else {
    sub->add_option("--x", cfg.x, "First input file");
    if (kind == Kind::string) sub->add_option("--y", cfg.y, "Second input file");
  }
  if (kind == Kind::dyck) sub->add_option("--pairs", cfg.pairs, "Parenthesis pairs file")->required();
  sub->add_option("--weights", cfg.weights, "Weight table file")->required();
  sub->add_option("--k", cfg.k, "Distance threshold")->required();
  sub->add_option("--kernel-out", cfg.kernel_out, "Write the kernel instance to PREFIX.x / PREFIX.y");
  sub->add_option("--batch", cfg.batch, "File listing one instance per line");
  sub->add_flag("--oracle", cfg.oracle, "Also run the brute-force reference");
  if (kind != Kind::tree) sub->add_flag("--chars", cfg.chars, "Each non-space character is a symbol");
  if (kind == Kind::string) sub->add_flag("--bytes", cfg.bytes, "Each byte is a symbol");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-clipped weighted edit distances for strings, forests and Dyck repairs"};
  app.require_subcommand(1);
  RunConfig cfg;
  CLI::App* s = app.add_subcommand("string", "Weighted string edit distance clipped at k");
  CLI::App* t = app.add_subcommand("tree", "Weighted forest edit distance clipped at k");
  CLI::App* d = app.add_subcommand("dyck", "Weighted Dyck edit distance clipped at k");
  CLI::App* v = app.add_subcommand("validate-weights", "Check a weight table against a weight class");
  add_instance_options(s, cfg, Kind::string);
  add_instance_options(t, cfg, Kind::tree);
  add_instance_options(d, cfg, Kind::dyck);
  v->add_option("--weights", cfg.weights, "Weight table file")->required();
  v->add_option("--mode", cfg.mode, "normalized, quasimetric or skewmetric")->required();
  v->add_option("--pairs", cfg.pairs, "Parenthesis pairs file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (v->parsed()) return validate(cfg);
    Kind kind = s->parsed() ? Kind::string : t->parsed() ? Kind::tree : Kind::dyck;
    return DistanceRun(kind, cfg).run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}
