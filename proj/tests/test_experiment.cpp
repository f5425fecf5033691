#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fhslab/error.hpp"
#include "fhslab/experiment.hpp"

using namespace fhs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("FHSLAB_TEST_TMP");
  const fs::path base = env && *env ? fs::path(env) : fs::temp_directory_path() / "fhslab_test_experiment";
  const fs::path dir = base / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    const ExperimentConfig cfg = parse_config(text, "x.cfg");
    RunOptions o;
    o.out_dir = scratch("never").string();
    run_experiment(cfg, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    return e.what();
  }
  FAIL("no error raised");
  return {};
}

const char* kBase =
    "# two dimensions\n"
    "N = 2\n"
    "s = 0.75\n"
    "t = 0.5\n"
    "tol = 1e-8\n";

}  // namespace

TEST_CASE("parsing: sections, comments, echo") {
  const ExperimentConfig cfg = parse_config(std::string(kBase) + "experiment = spectrum\n\n[spectrum]\nk = 4  \n", "a.cfg");
  REQUIRE(cfg.find("N"));
  CHECK(cfg.find("N")->line == 2);
  CHECK(cfg.find("k") == nullptr);
  REQUIRE(cfg.find("k", "spectrum"));
  CHECK(cfg.find("k", "spectrum")->value == "4");
  CHECK(cfg.find("k", "spectrum")->line == 9);
  const std::string echo = cfg.echo();
  CHECK(echo.find("[spectrum]") != std::string::npos);
  CHECK(parse_config(echo, "b.cfg").echo() == echo);
  CHECK(experiment_names().size() == 7);
}

TEST_CASE("parse errors carry the line") {
  auto msg = [](const std::string& text) {
    try {
      parse_config(text, "x.cfg");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config_error);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg("N = 2\nbogus line\n").find("x.cfg:2:") != std::string::npos);
  CHECK(msg("N = 2\nN = 3\n").find("x.cfg:2:") != std::string::npos);
  CHECK(msg("N = 2\n[nonsense]\n").find("x.cfg:2:") != std::string::npos);
  CHECK(msg("[spectrum\n").find("x.cfg:1:") != std::string::npos);
  CHECK(msg("s =\n").find("x.cfg:1:") != std::string::npos);
}

TEST_CASE("validation errors name key, value and constraint") {
  const std::string t = config_error("experiment = solve-bubble\nN = 2\ns = 0.75\nt = 1.6\n");
  CHECK(t.find("x.cfg:4:") != std::string::npos);
  CHECK(t.find("t ∈ (0, 2s)") != std::string::npos);
  CHECK(config_error("experiment = solve-bubble\nN = 2\ns = 1.5\nt = 0.5\n").find("x.cfg:3:") != std::string::npos);
  const std::string k = config_error(std::string(kBase) + "experiment = spectrum\n[spectrum]\nk = 2\n");
  CHECK(k.find("x.cfg:8: k = 2") != std::string::npos);
  CHECK(config_error(std::string(kBase) + "experiment = spectrum\nwobble = 1\n").find("x.cfg:7:") !=
        std::string::npos);
  CHECK(config_error(std::string(kBase) + "experiment = spectrum\n[spectrum]\nalpha = 1\n").find("x.cfg:8:") !=
        std::string::npos);
  CHECK(config_error(std::string(kBase) + "experiment = dance\n").find("x.cfg:6:") != std::string::npos);
  CHECK(config_error(std::string(kBase) + "experiment = solve-bubble\nn = 12\n").find("x.cfg:7: n = 12") !=
        std::string::npos);
  CHECK(config_error(std::string(kBase) + "experiment = solve-bubble\noutput = a/b.csv\n").find("x.cfg:7:") !=
        std::string::npos);
  CHECK(config_error(std::string(kBase)).find("no experiment") != std::string::npos);
}

TEST_CASE("bubble cache: miss, hit, key change, corruption") {
  const fs::path dir = scratch("cache");
  const Params P(2, 0.75, 0.5);
  const GridPtr g = make_default_grid();
  const CacheLookup first = cached_bubble(dir.string(), P, g, 1e-8);
  CHECK_FALSE(first.hit);
  CHECK(first.warnings.empty());
  CHECK(fs::exists(first.path));
  const CacheLookup second = cached_bubble(dir.string(), P, g, 1e-8);
  CHECK(second.hit);
  CHECK(second.path == first.path);
  CHECK(second.bubble->mu == first.bubble->mu);
  for (std::size_t j = 0; j < g->size(); ++j) REQUIRE(second.bubble->profile[j] == first.bubble->profile[j]);

  const CacheLookup other = cached_bubble(dir.string(), P, make_log_grid(1e-6, 1e6, 2048), 1e-8);
  CHECK_FALSE(other.hit);
  CHECK(other.path != first.path);

  {
    std::ofstream out(first.path, std::ios::binary | std::ios::trunc);
    out << "# N = 2\ngarbage\n";
  }
  const CacheLookup healed = cached_bubble(dir.string(), P, g, 1e-8);
  CHECK_FALSE(healed.hit);
  REQUIRE(healed.warnings.size() == 1);
  CHECK(healed.warnings[0].find("recomputing") != std::string::npos);
  CHECK(healed.bubble->mu == first.bubble->mu);
  CHECK(cached_bubble(dir.string(), P, g, 1e-8).hit);
}

TEST_CASE("runs are byte-reproducible and tables carry N, s, t") {
  const std::string text = std::string(kBase) + "seed = 5\n[spectrum]\nk = 4\ngap_samples = 6\n";
  const ExperimentConfig cfg = parse_config(text, "rep.cfg");
  const fs::path cache = scratch("shared_cache");
  std::string tables[2], gaps[2];
  for (int i = 0; i < 2; ++i) {
    RunOptions o;
    o.out_dir = scratch("run" + std::to_string(i)).string();
    o.experiment = "spectrum";
    o.cache_dir = cache.string();
    o.threads = 1 + 2 * i;
    const RunResult r = run_experiment(cfg, o);
    CHECK(r.cache_hit == (i == 1));
    CHECK(r.outputs.back().ends_with("manifest.txt"));
    CHECK(r.outputs.front().ends_with("spectrum.csv"));
    tables[i] = slurp(r.outputs.front());
    gaps[i] = slurp(fs::path(o.out_dir) / "spectrum_gap.csv");
    const std::string man = slurp(r.outputs.back());
    for (const char* key : {"experiment = spectrum", "version = ", "seed = 5", "wall_time = ", "cache_hit = ",
                            "[config]"})
      CHECK(man.find(key) != std::string::npos);
  }
  CHECK(tables[0] == tables[1]);
  CHECK(gaps[0] == gaps[1]);
  CHECK(tables[0].rfind("N,s,t,lambda,k,index,mu,gap_margin,trimmed_nodes\n", 0) == 0);
  std::istringstream lines(tables[0]);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.rfind("2,0.75,0.5,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 4);

  RunOptions o;
  o.out_dir = scratch("seeded").string();
  o.experiment = "spectrum";
  o.cache_dir = cache.string();
  o.seed = 6;
  run_experiment(cfg, o);
  CHECK(slurp(fs::path(o.out_dir) / "spectrum_gap.csv") != gaps[0]);
}

TEST_CASE("text format and cutoff sweep without a bubble") {
  const ExperimentConfig cfg =
      parse_config(std::string(kBase) + "experiment = cutoff-sweep\nformat = text\n[cutoff-sweep]\nratios = 1e2, 1e3\n",
                   "c.cfg");
  RunOptions o;
  o.out_dir = scratch("cutoff").string();
  const RunResult r = run_experiment(cfg, o);
  CHECK_FALSE(r.cache_hit);
  CHECK(r.outputs.front().ends_with("cutoff-sweep.txt"));
  const std::string table = slurp(r.outputs.front());
  CHECK(table.find("ratio") != std::string::npos);
  CHECK(slurp(r.outputs.back()).find("cache_file") == std::string::npos);
}
