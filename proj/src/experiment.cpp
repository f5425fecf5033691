#include "fhslab/experiment.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fhslab/cutoff_commutator.hpp"
#include "fhslab/error.hpp"
#include "fhslab/format.hpp"
#include "fhslab/interaction.hpp"
#include "fhslab/spectrum.hpp"
#include "fhslab/stability.hpp"

#ifndef FHSLAB_VERSION
#define FHSLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace fhs {

const char* library_version() { return FHSLAB_VERSION; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "solve-bubble", "spectrum",        "interaction-sweep", "cutoff-sweep",
      "kpv-sweep",    "stability-sweep", "project"};
  return names;
}

namespace {

bool is_experiment(std::string_view name) {
  const auto& n = experiment_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

bool valid_key(std::string_view k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

[[noreturn]] void config_fail(const std::string& source, int line, const std::string& what) {
  std::ostringstream msg;
  msg << source;
  if (line > 0) msg << ":" << line;
  msg << ": " << what;
  fail(ErrorCode::config_error, msg.str());
}

const std::set<std::string>& shared_keys() {
  static const std::set<std::string> k = {"N", "s", "t", "r_min", "r_max", "n", "tol",
                                          "experiment", "format", "output", "seed", "threads"};
  return k;
}

const std::set<std::string>& section_keys(const std::string& exp) {
  static const std::map<std::string, std::set<std::string>> k = {
      {"solve-bubble", {"max_iterations", "damping"}},
      {"spectrum", {"k", "lambda", "gap_samples"}},
      {"interaction-sweep", {"alpha", "beta", "qs"}},
      {"cutoff-sweep", {"r", "ratios"}},
      {"kpv-sweep", {"lambdas"}},
      {"stability-sweep", {"nu", "kappas"}},
      {"project", {"nu", "scales", "coeffs", "init_scales", "init_coeffs", "noise", "ortho_tol",
                   "max_iterations"}},
  };
  return k.at(exp);
}

}  // namespace

const ConfigEntry* ExperimentConfig::find(std::string_view key, std::string_view section) const {
  const std::vector<ConfigEntry>* list = &shared;
  if (!section.empty()) {
    auto it = sections.find(std::string(section));
    if (it == sections.end()) return nullptr;
    list = &it->second;
  }
  for (const auto& e : *list)
    if (e.key == key) return &e;
  return nullptr;
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  for (const auto& e : shared) out << e.key << " = " << e.value << "\n";
  for (const auto& [name, list] : sections) {
    out << "[" << name << "]\n";
    for (const auto& e : list) out << e.key << " = " << e.value << "\n";
  }
  return out.str();
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source = source;
  std::vector<ConfigEntry>* current = &cfg.shared;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') config_fail(source, line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!is_experiment(name)) config_fail(source, line_no, "unknown experiment section [" + name + "]");
      if (cfg.sections.count(name)) config_fail(source, line_no, "section [" + name + "] repeated");
      current = &cfg.sections[name];
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) config_fail(source, line_no, "expected key = value");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (!valid_key(key)) config_fail(source, line_no, "bad key '" + key + "'");
      if (value.empty()) config_fail(source, line_no, "missing value for " + key);
      for (const auto& e : *current)
        if (e.key == key)
          config_fail(source, line_no, key + " already set on line " + std::to_string(e.line));
      current->push_back({key, value, line_no});
    }
    if (end == text.size()) break;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string bubble_cache_name(const Params& P, const RadialGrid& g, double tol) {
  std::ostringstream name;
  name << "bubble_N" << P.N() << "_s" << fmt_double(P.s()) << "_t" << fmt_double(P.t()) << "_r"
       << fmt_double(g.r_min()) << "_" << fmt_double(g.r_max()) << "_n" << g.size() << "_tol"
       << fmt_double(tol) << ".txt";
  return name.str();
}

namespace {

class FileLock {
 public:
  explicit FileLock(const std::string& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) fail(ErrorCode::io_error, "cannot open lock file " + path);
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      fail(ErrorCode::io_error, "cannot lock " + path);
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

CacheLookup cached_bubble(const std::string& cache_dir, const Params& P, GridPtr grid, double tol) {
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create cache directory " + cache_dir + ": " + ec.message());
  CacheLookup res;
  res.path = (fs::path(cache_dir) / bubble_cache_name(P, *grid, tol)).string();
  FileLock lock(res.path + ".lock");
  if (fs::exists(res.path)) {
    try {
      Bubble b = load_bubble_file(res.path);
      if (!(b.params == P) || !b.profile.grid().same_as(*grid) || b.tol != tol)
        fail(ErrorCode::invalid_data, "key mismatch");
      if (!(b.residual <= 1e3 * tol)) fail(ErrorCode::invalid_data, "stored residual " + fmt_double(b.residual));
      res.bubble = std::make_shared<const Bubble>(std::move(b));
      res.hit = true;
      return res;
    } catch (const Error& e) {
      res.warnings.push_back("cache entry " + res.path + " unusable (" + e.what() + "), recomputing");
    }
  }
  auto b = std::make_shared<const Bubble>(solve_bubble(P, grid, tol));
  const std::string tmp = res.path + ".tmp";
  save_bubble_file(*b, tmp);
  fs::rename(tmp, res.path, ec);
  if (ec) fail(ErrorCode::io_error, "cannot move " + tmp + " into place: " + ec.message());
  res.bubble = b;
  return res;
}

namespace {

// Typed access to the active keys with line-referenced errors.
class Reader {
 public:
  Reader(const ExperimentConfig& cfg, std::string section) : cfg_(cfg), section_(std::move(section)) {
    for (const auto& e : cfg.shared)
      if (!shared_keys().count(e.key) && !section_keys(section_).count(e.key))
        config_fail(cfg.source, e.line, "unknown key '" + e.key + "'");
    if (auto it = cfg.sections.find(section_); it != cfg.sections.end())
      for (const auto& e : it->second)
        if (!section_keys(section_).count(e.key))
          config_fail(cfg.source, e.line, "unknown key '" + e.key + "' in [" + section_ + "]");
  }

  // section value wins over the shared one
  const ConfigEntry* entry(const std::string& key) const {
    if (const auto* e = cfg_.find(key, section_)) return e;
    return cfg_.find(key);
  }
  int line(const std::string& key) const {
    const auto* e = entry(key);
    return e ? e->line : 0;
  }
  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    const auto* e = entry(key);
    config_fail(cfg_.source, e ? e->line : 0, e ? key + " = " + e->value + ": " + what : what);
  }

  double real(const std::string& key, double def) const {
    const auto* e = entry(key);
    if (!e) return def;
    try {
      const double v = parse_double(e->value);
      if (!std::isfinite(v)) bad(key, "must be finite");
      return v;
    } catch (const Error& err) {
      if (err.code() == ErrorCode::config_error) throw;
      bad(key, err.what());
    }
  }
  double required_real(const std::string& key) const {
    if (!entry(key)) config_fail(cfg_.source, 0, "missing required key " + key);
    return real(key, 0.0);
  }
  long long integer(const std::string& key, long long def) const {
    const auto* e = entry(key);
    if (!e) return def;
    try {
      return parse_int(e->value);
    } catch (const Error& err) {
      bad(key, err.what());
    }
  }
  std::string text(const std::string& key, const std::string& def) const {
    const auto* e = entry(key);
    return e ? e->value : def;
  }
  std::vector<double> list(const std::string& key, std::vector<double> def) const {
    const auto* e = entry(key);
    if (!e) return def;
    std::vector<double> out;
    std::string item;
    std::istringstream in(e->value);
    while (std::getline(in, item, ',')) {
      try {
        out.push_back(parse_double(item));
      } catch (const Error& err) {
        bad(key, err.what());
      }
      if (!std::isfinite(out.back())) bad(key, "entries must be finite");
    }
    return out;
  }

 private:
  const ExperimentConfig& cfg_;
  std::string section_;
};

struct Plan {
  std::string experiment;
  int N = 0;
  double s = 0.0, t = 0.0;
  double r_min = 1e-6, r_max = 1e6;
  std::size_t n = 4096;
  double tol = 1e-8;
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 1;
  int threads = 1;

  int max_iterations = 0;
  double damping = 0.5;
  int k = 5;
  double lambda = 1.0;
  std::size_t gap_samples = 0;
  double alpha = 0.0, beta = 0.0;
  std::vector<double> qs;
  double cutoff_r = 1e-2;
  std::vector<double> ratios;
  std::vector<double> lambdas;
  int nu = 2;
  std::vector<double> kappas;
  std::vector<double> scales, coeffs, init_scales, init_coeffs;
  double noise = 0.0;
  double ortho_tol = 1e-10;
};

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

Plan make_plan(const ExperimentConfig& cfg, const RunOptions& opts) {
  std::string exp = opts.experiment;
  const auto* e = cfg.find("experiment");
  if (exp.empty()) {
    if (!e) config_fail(cfg.source, 0, "no experiment selected (experiment = ... or a subcommand)");
    exp = e->value;
    if (!is_experiment(exp)) config_fail(cfg.source, e->line, "unknown experiment '" + exp + "'");
  }
  if (!is_experiment(exp)) config_fail(cfg.source, 0, "unknown experiment '" + exp + "'");
  const Reader rd(cfg, exp);
  Plan p;
  p.experiment = exp;

  const long long N = rd.integer("N", 0);
  if (!rd.entry("N")) config_fail(cfg.source, 0, "missing required key N");
  p.s = rd.required_real("s");
  p.t = rd.required_real("t");
  if (N < 1 || N > 64) rd.bad("N", "violates 1 <= N <= 64");
  p.N = static_cast<int>(N);
  try {
    Params check(p.N, p.s, p.t);
    (void)check;
  } catch (const Error& err) {
    const std::string msg = err.what();
    std::string key = "N";
    if (msg.rfind("s =", 0) == 0) key = "s";
    if (msg.rfind("t =", 0) == 0) key = "t";
    config_fail(cfg.source, rd.line(key), msg);
  }
  const Params P(p.N, p.s, p.t);

  p.r_min = rd.real("r_min", p.r_min);
  p.r_max = rd.real("r_max", p.r_max);
  const long long n = rd.integer("n", static_cast<long long>(p.n));
  if (!(p.r_min > 0.0)) rd.bad("r_min", "must be positive");
  if (!(p.r_max > p.r_min)) rd.bad("r_max", "must exceed r_min");
  if (n < 256 || n > (1 << 20)) rd.bad("n", "must lie in [256, 1048576]");
  p.n = static_cast<std::size_t>(n);
  p.tol = rd.real("tol", p.tol);
  if (!(p.tol > 0.0 && p.tol < 1e-2)) rd.bad("tol", "must lie in (0, 1e-2)");
  p.format = rd.text("format", p.format);
  if (p.format != "csv" && p.format != "text") rd.bad("format", "must be csv or text");
  p.output = rd.text("output", exp + (p.format == "csv" ? ".csv" : ".txt"));
  if (p.output.find('/') != std::string::npos || p.output == "manifest.txt")
    rd.bad("output", "must be a plain file name other than manifest.txt");
  const long long seed = rd.integer("seed", 1);
  if (seed < 0) rd.bad("seed", "must be non-negative");
  p.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(seed);
  const long long threads = rd.integer("threads", 1);
  if (threads < 1 || threads > 256) rd.bad("threads", "must lie in [1, 256]");
  p.threads = opts.threads > 0 ? opts.threads : static_cast<int>(threads);

  if (exp == "solve-bubble") {
    p.max_iterations = static_cast<int>(rd.integer("max_iterations", SolveOptions{}.max_iterations));
    if (p.max_iterations < 1) rd.bad("max_iterations", "must be positive");
    p.damping = rd.real("damping", SolveOptions{}.damping);
    if (!(p.damping > 0.0 && p.damping <= 1.0)) rd.bad("damping", "must lie in (0, 1]");
  } else if (exp == "spectrum") {
    p.k = static_cast<int>(rd.integer("k", 5));
    if (p.k < 3 || p.k > 40) rd.bad("k", "must lie in [3, 40]");
    p.lambda = rd.real("lambda", 1.0);
    if (!(p.lambda > 0.0)) rd.bad("lambda", "must be positive");
    const long long g = rd.integer("gap_samples", 0);
    if (g < 0 || g > 100000) rd.bad("gap_samples", "must lie in [0, 100000]");
    p.gap_samples = static_cast<std::size_t>(g);
  } else if (exp == "interaction-sweep") {
    p.alpha = rd.real("alpha", P.p());
    p.beta = rd.real("beta", P.crit() - p.alpha);
    if (!(p.alpha > 0.0)) rd.bad("alpha", "must be positive");
    if (!(p.beta > 0.0)) rd.bad("beta", "must be positive");
    if (std::abs(p.alpha + p.beta - P.crit()) > 1e-12)
      rd.bad(rd.entry("beta") ? "beta" : "alpha", "alpha + beta must equal crit = " + fmt_double(P.crit()));
    p.qs = rd.list("qs", default_q_sweep());
    if (p.qs.empty() || !std::all_of(p.qs.begin(), p.qs.end(), [](double q) { return q > 0.0 && q <= 1.0; }))
      rd.bad("qs", "entries must lie in (0, 1]");
  } else if (exp == "cutoff-sweep") {
    p.cutoff_r = rd.real("r", p.cutoff_r);
    p.ratios = rd.list("ratios", default_cutoff_ratios());
    if (!(p.cutoff_r >= 10.0 * p.r_min)) rd.bad("r", "needs a decade of margin above r_min");
    if (p.ratios.size() < 2) rd.bad("ratios", "needs at least two ratios");
    for (double ratio : p.ratios) {
      if (!(ratio > 1.0)) rd.bad("ratios", "entries must exceed 1");
      if (!(p.cutoff_r * ratio <= 0.1 * p.r_max))
        rd.bad("ratios", "r * ratio needs a decade of margin below r_max");
    }
  } else if (exp == "kpv-sweep") {
    p.lambdas = rd.list("lambdas", {1e-1, 1.0, 1e1, 1e2});
    if (p.lambdas.empty() || !all_positive(p.lambdas)) rd.bad("lambdas", "entries must be positive");
  } else if (exp == "stability-sweep") {
    p.nu = static_cast<int>(rd.integer("nu", 2));
    if (p.nu < 1 || p.nu > 8) rd.bad("nu", "must lie in [1, 8]");
    p.kappas = rd.list("kappas", default_kappas());
    if (p.kappas.size() < 2) rd.bad("kappas", "needs at least two values");
    for (double k : p.kappas)
      if (!(k > 0.0 && k < 1.0)) rd.bad("kappas", "entries must lie in (0, 1)");
  } else if (exp == "project") {
    p.scales = rd.list("scales", {});
    if (p.scales.empty()) config_fail(cfg.source, 0, "missing required key scales");
    if (!all_positive(p.scales)) rd.bad("scales", "entries must be positive");
    p.coeffs = rd.list("coeffs", std::vector<double>(p.scales.size(), 1.0));
    if (p.coeffs.size() != p.scales.size()) rd.bad("coeffs", "needs one entry per scale");
    p.nu = static_cast<int>(rd.integer("nu", static_cast<long long>(p.scales.size())));
    if (p.nu < 1 || p.nu > 8) rd.bad("nu", "must lie in [1, 8]");
    p.init_scales = rd.list("init_scales", {});
    p.init_coeffs = rd.list("init_coeffs", {});
    if (!p.init_scales.empty()) {
      if (!all_positive(p.init_scales)) rd.bad("init_scales", "entries must be positive");
      if (static_cast<int>(p.init_scales.size()) != p.nu) rd.bad("init_scales", "needs nu entries");
      if (p.init_coeffs.empty()) p.init_coeffs.assign(p.init_scales.size(), 1.0);
      if (p.init_coeffs.size() != p.init_scales.size()) rd.bad("init_coeffs", "needs one entry per init scale");
    } else if (!p.init_coeffs.empty()) {
      rd.bad("init_coeffs", "needs init_scales");
    }
    p.noise = rd.real("noise", 0.0);
    if (!(p.noise >= 0.0)) rd.bad("noise", "must be non-negative");
    p.ortho_tol = rd.real("ortho_tol", p.ortho_tol);
    if (!(p.ortho_tol > 0.0 && p.ortho_tol < 1.0)) rd.bad("ortho_tol", "must lie in (0, 1)");
    p.max_iterations = static_cast<int>(rd.integer("max_iterations", ProjectOptions{}.max_iterations));
    if (p.max_iterations < 1) rd.bad("max_iterations", "must be positive");
  }
  return p;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void write(const std::string& path, const std::string& format) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io_error, "cannot write " + path);
    if (format == "csv") {
      for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
      out << "\n";
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
      }
    } else {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        out << "[row " << r << "]\n";
        for (std::size_t i = 0; i < header.size(); ++i) out << header[i] << " = " << rows[r][i] << "\n";
      }
    }
    if (!out) fail(ErrorCode::io_error, "write failed: " + path);
  }
};

std::string f(double v) { return fmt_double(v); }
std::string f(std::size_t v) { return std::to_string(v); }
std::string f(int v) { return std::to_string(v); }
std::string f(bool v) { return v ? "true" : "false"; }

std::vector<std::string> param_cols(const Plan& p) { return {f(p.N), f(p.s), f(p.t)}; }

std::vector<std::string> with_params(const Plan& p, std::vector<std::string> rest) {
  auto row = param_cols(p);
  row.insert(row.end(), rest.begin(), rest.end());
  return row;
}

using Extras = std::vector<std::pair<std::string, std::string>>;

// log-slope of |V| around r_max / 100
double tail_slope(const RadialFn& v) {
  const auto& g = v.grid();
  const double x = std::log(g.r_max() / 100.0);
  const auto j = static_cast<std::ptrdiff_t>(std::lround((x - g.log_node(0)) / g.step()));
  const std::ptrdiff_t m = 8;
  if (j - m < 0 || j + m >= static_cast<std::ptrdiff_t>(g.size())) return NAN;
  return (std::log(std::abs(v[j + m])) - std::log(std::abs(v[j - m]))) / (2.0 * m * g.step());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Plan p = make_plan(cfg, opts);
  const Params P(p.N, p.s, p.t);
  const GridPtr grid = make_log_grid(p.r_min, p.r_max, p.n);

  RunResult res;
  res.experiment = p.experiment;
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create " + opts.out_dir + ": " + ec.message());
  auto out_path = [&](const std::string& name) { return (fs::path(opts.out_dir) / name).string(); };

  std::string cache_dir = opts.cache_dir;
  if (cache_dir.empty()) {
    const char* env = std::getenv("FHSLAB_CACHE_DIR");
    cache_dir = env && *env ? env : out_path("cache");
  }
  std::string cache_file;
  auto bubble = [&]() {
    CacheLookup c = cached_bubble(cache_dir, P, grid, p.tol);
    res.cache_hit = c.hit;
    cache_file = c.path;
    res.warnings.insert(res.warnings.end(), c.warnings.begin(), c.warnings.end());
    return c.bubble;
  };

  Table table;
  Extras extras;
  const std::string& exp = p.experiment;

  if (exp == "solve-bubble") {
    std::shared_ptr<const Bubble> V;
    SolveOptions so;
    if (p.max_iterations != so.max_iterations || p.damping != so.damping) {
      // non-default solver settings bypass the cache
      so.max_iterations = p.max_iterations;
      so.damping = p.damping;
      V = std::make_shared<const Bubble>(solve_bubble(P, grid, p.tol, so));
    } else {
      V = bubble();
    }
    const std::string prof = out_path("bubble.txt");
    save_bubble_file(*V, prof);
    res.outputs.push_back(prof);
    const double slope = tail_slope(V->profile);
    table.header = {"N", "s", "t", "r_min", "r_max", "n", "tol", "mu", "residual", "iterations", "tail_slope"};
    table.add(with_params(p, {f(p.r_min), f(p.r_max), f(p.n), f(p.tol), f(V->mu), f(V->residual),
                              f(V->iterations), f(slope)}));
    extras = {{"mu", f(V->mu)}, {"residual", f(V->residual)}, {"residual_ok", f(V->residual <= p.tol)}};
  } else if (exp == "spectrum") {
    auto V = bubble();
    const SpectralReport rep = linearized_eigs(*V, p.k, p.lambda);
    const std::string txt = out_path("spectrum_report.txt");
    {
      std::ofstream out(txt, std::ios::binary);
      write_spectral_report(rep, out);
      if (!out) fail(ErrorCode::io_error, "write failed: " + txt);
    }
    res.outputs.push_back(txt);
    table.header = {"N", "s", "t", "lambda", "k", "index", "mu", "gap_margin", "trimmed_nodes"};
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
      table.add(with_params(p, {f(p.lambda), f(p.k), f(i + 1), f(rep.eigenvalues[i]), f(rep.gap_margin),
                                f(rep.trimmed_nodes)}));
    extras = {{"gap_margin", f(rep.gap_margin)}, {"lanczos_steps", f(rep.lanczos_steps)}};
    if (p.gap_samples > 0) {
      const auto checks = random_gap_checks(*V, rep, p.gap_samples, p.seed, p.threads);
      Table gap;
      gap.header = {"N", "s", "t", "sample", "lhs", "rhs", "ratio"};
      double worst = 0.0;
      for (std::size_t i = 0; i < checks.size(); ++i) {
        gap.add(with_params(p, {f(i), f(checks[i].lhs), f(checks[i].rhs), f(checks[i].ratio)}));
        worst = std::max(worst, checks[i].ratio);
      }
      const std::string gp = out_path(p.format == "csv" ? "spectrum_gap.csv" : "spectrum_gap.txt");
      gap.write(gp, p.format);
      res.outputs.push_back(gp);
      extras.push_back({"max_gap_ratio", f(worst)});
    }
  } else if (exp == "interaction-sweep") {
    auto V = bubble();
    const auto rows = interaction_sweep(*V, p.alpha, p.beta, p.qs, p.threads);
    table.header = {"N", "s", "t", "alpha", "beta", "Q", "integral", "predicted_exponent", "fitted_exponent",
                    "residual"};
    for (const auto& r : rows)
      table.add(with_params(p, {f(r.alpha), f(r.beta), f(r.q), f(r.integral), f(r.predicted_exponent),
                                f(r.fitted_exponent), f(r.residual)}));
  } else if (exp == "cutoff-sweep") {
    const auto rows = cutoff_sweep(P, grid, p.cutoff_r, p.ratios, p.threads);
    table.header = {"N", "s", "t", "r", "R", "ratio", "norm", "fitted_slope"};
    for (const auto& r : rows)
      table.add(with_params(p, {f(r.r), f(r.R), f(r.ratio), f(r.norm), f(r.fitted_slope)}));
    extras = {{"predicted_slope", f(-1.0 / P.crit())}};
  } else if (exp == "kpv-sweep") {
    const auto rows = kpv_sweep(P, grid, p.lambdas, p.threads);
    table.header = {"N", "s", "t", "lambda", "alpha1", "alpha2", "p1", "p2", "a1", "a2", "ratio"};
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rows) {
      const auto& e = r.exponents;
      table.add(with_params(p, {f(r.lambda), f(e.alpha1), f(e.alpha2), f(e.p1), f(e.p2), f(e.a1), f(e.a2),
                                f(r.ratio)}));
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    extras = {{"ratio_spread", f(hi / lo)}};
  } else if (exp == "stability-sweep") {
    auto V = bubble();
    const StabilitySweep sw = stability_sweep(V, sharpness_bump(grid), p.kappas, p.nu, p.threads);
    table.header = {"N",     "s",        "t",       "nu",          "kappa",         "gamma",
                    "distance", "ratio", "slope_gamma", "slope_distance", "max_ortho_residual",
                    "min_Q", "energy",   "energy_window_ok"};
    for (const auto& r : sw.rows)
      table.add(with_params(p, {f(p.nu), f(r.kappa), f(r.gamma), f(r.distance), f(r.ratio), f(sw.slope_gamma),
                                f(sw.slope_distance), f(r.max_ortho_residual), f(r.min_q), f(r.energy),
                                f(r.energy_window_ok)}));
    extras = {{"ratio_spread", f(sw.ratio_spread)},
              {"interaction_constant", f(sw.interaction_constant)},
              {"interaction_bound_ok", f(sw.interaction_bound_ok)}};
  } else if (exp == "project") {
    auto V = bubble();
    BubbleFamily truth{p.scales, p.coeffs, V};
    truth.validate();
    RadialFn u = truth.evaluate();
    if (p.noise > 0.0) u += p.noise * random_test_function(grid, p.seed, 0);
    ProjectOptions po;
    po.ortho_tol = p.ortho_tol;
    po.max_iterations = p.max_iterations;
    StabilityReport rep;
    if (!p.init_scales.empty())
      rep = project_multibubble(u, BubbleFamily{p.init_scales, p.init_coeffs, V}, po);
    else
      rep = project_multibubble(u, p.nu, V, po);
    res.warnings.insert(res.warnings.end(), rep.warnings.begin(), rep.warnings.end());
    std::vector<std::size_t> found(rep.family.size()), given(p.scales.size());
    for (std::size_t i = 0; i < found.size(); ++i) found[i] = i;
    for (std::size_t i = 0; i < given.size(); ++i) given[i] = i;
    std::sort(found.begin(), found.end(), [&](auto a, auto b) { return rep.family.scales[a] < rep.family.scales[b]; });
    std::sort(given.begin(), given.end(), [&](auto a, auto b) { return p.scales[a] < p.scales[b]; });
    table.header = {"N", "s", "t", "nu", "index", "scale", "coeff", "input_scale", "input_coeff",
                    "gamma", "distance", "max_ortho_residual", "iterations", "energy", "energy_window_ok"};
    for (std::size_t i = 0; i < found.size(); ++i) {
      const bool paired = found.size() == given.size();
      table.add(with_params(p, {f(rep.family.size()), f(i), f(rep.family.scales[found[i]]),
                                f(rep.family.coeffs[found[i]]), paired ? f(p.scales[given[i]]) : "nan",
                                paired ? f(p.coeffs[given[i]]) : "nan", f(rep.gamma), f(rep.distance),
                                f(rep.max_ortho_residual()), f(rep.iterations), f(rep.energy),
                                f(rep.energy_window_ok)}));
    }
    extras = {{"distance", f(rep.distance)}, {"gamma", f(rep.gamma)}};
  }

  const std::string table_path = out_path(p.output);
  table.write(table_path, p.format);
  res.outputs.insert(res.outputs.begin(), table_path);

  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string manifest = out_path("manifest.txt");
  std::ofstream m(manifest, std::ios::binary);
  if (!m) fail(ErrorCode::io_error, "cannot write " + manifest);
  m << "experiment = " << exp << "\n";
  m << "version = " << library_version() << "\n";
  m << "config = " << cfg.source << "\n";
  m << "seed = " << p.seed << "\n";
  m << "threads = " << p.threads << "\n";
  m << "wall_time = " << fmt_double(res.wall_time) << "\n";
  if (!cache_file.empty()) {
    m << "cache_hit = " << f(res.cache_hit) << "\n";
    m << "cache_file = " << cache_file << "\n";
  }
  for (const auto& [k, v] : extras) m << k << " = " << v << "\n";
  for (const auto& o : res.outputs) m << "output = " << o << "\n";
  for (const auto& w : res.warnings) m << "warning = " << w << "\n";
  m << "[config]\n" << cfg.echo();
  if (!m) fail(ErrorCode::io_error, "write failed: " + manifest);
  res.outputs.push_back(manifest);
  return res;
}

}  // namespace fhs
