#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fhslab/fhslab.h"

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::int64_t seed = -1;
  int threads = 0;
};

int report_failure(const char* stage) {
  std::fprintf(stderr, "fhslab: %s failed [%s]: %s\n", stage, fhs_status_name(fhs_last_status()),
               fhs_last_error());
  return 2;
}

int run(const Flags& fl, const std::string& experiment) {
  fhs_config* cfg = nullptr;
  if (fhs_config_load(fl.config.c_str(), &cfg) != FHS_OK) return report_failure("config");
  fhs_run* res = nullptr;
  const fhs_status st =
      fhs_run_experiment(cfg, experiment.c_str(), fl.out.c_str(), fl.seed, fl.threads, nullptr, &res);
  fhs_config_free(cfg);
  if (st != FHS_OK) return report_failure(experiment.empty() ? "run" : experiment.c_str());
  for (size_t i = 0; i < fhs_run_warning_count(res); ++i)
    std::fprintf(stderr, "warning: %s\n", fhs_run_warning(res, i));
  for (size_t i = 0; i < fhs_run_output_count(res); ++i) std::printf("%s\n", fhs_run_output(res, i));
  std::fprintf(stderr, "done in %.2f s%s\n", fhs_run_wall_time(res), fhs_run_cache_hit(res) ? " (cached bubble)" : "");
  fhs_run_free(res);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Hardy-Sobolev bubble experiments"};
  app.set_version_flag("--version", std::string(fhs_version()));
  app.require_subcommand(1);

  Flags fl;
  auto add_flags = [&fl](CLI::App* sub) {
    sub->add_option("--config", fl.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", fl.out, "output directory")->capture_default_str();
    sub->add_option("--seed", fl.seed, "overrides the config seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", fl.threads, "overrides the config thread count")->check(CLI::Range(1, 256));
  };

  std::string chosen;
  auto* generic = app.add_subcommand("run", "run the experiment named in the config");
  add_flags(generic);
  generic->callback([&] { chosen = ""; });
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"solve-bubble", "solve for the extremal profile and cache it"},
      {"spectrum", "linearized eigenvalues around the bubble"},
      {"interaction-sweep", "two-bubble integrals over a Q sweep"},
      {"cutoff-sweep", "weighted norm of the log cutoff against R/r"},
      {"kpv-sweep", "weighted commutator ratios over dilations"},
      {"stability-sweep", "deficit and distance along the sharpness family"},
      {"project", "project a bubble sum onto the multi-bubble manifold"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(sub);
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }

  CLI11_PARSE(app, argc, argv);
  return run(fl, chosen);
}
