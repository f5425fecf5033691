#include "fhslab/fhslab.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "fhslab/bubble.hpp"
#include "fhslab/cutoff_commutator.hpp"
#include "fhslab/error.hpp"
#include "fhslab/experiment.hpp"
#include "fhslab/interaction.hpp"
#include "fhslab/spectrum.hpp"
#include "fhslab/stability.hpp"

struct fhs_params {
  fhs::Params value;
};
struct fhs_grid {
  fhs::GridPtr value;
};
struct fhs_bubble {
  std::shared_ptr<const fhs::Bubble> value;
};
struct fhs_spectrum {
  fhs::SpectralReport value;
};
struct fhs_config {
  fhs::ExperimentConfig value;
  std::string echo;
};
struct fhs_run {
  fhs::RunResult value;
};

namespace {

thread_local fhs_status last_status = FHS_OK;
thread_local std::string last_message;

fhs_status set_error(fhs_status st, const char* what) {
  last_status = st;
  last_message = what ? what : "";
  return st;
}

template <class F>
fhs_status guard(F&& body) {
  try {
    body();
    last_status = FHS_OK;
    last_message.clear();
    return FHS_OK;
  } catch (const fhs::Error& e) {
    return set_error(static_cast<fhs_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FHS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FHS_INTERNAL, e.what());
  } catch (...) {
    return set_error(FHS_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (!p) fhs::fail(fhs::ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

fhs_status copy_out(const std::vector<double>& v, double* out, size_t cap, size_t* len) {
  if (len) *len = v.size();
  if (cap < v.size())
    return set_error(FHS_BUFFER_TOO_SMALL, ("need room for " + std::to_string(v.size()) + " values").c_str());
  if (!v.empty()) {
    if (!out) return set_error(FHS_INVALID_ARGUMENT, "out is NULL");
    std::memcpy(out, v.data(), v.size() * sizeof(double));
  }
  return FHS_OK;
}

}  // namespace

extern "C" {

const char* fhs_version(void) { return fhs::library_version(); }

const char* fhs_status_name(fhs_status status) {
  switch (status) {
    case FHS_OK: return "ok";
    case FHS_BUFFER_TOO_SMALL: return "buffer-too-small";
    case FHS_INTERNAL: return "internal";
    default: break;
  }
  if (status >= FHS_INVALID_ARGUMENT && status <= FHS_CONFIG_ERROR)
    return fhs::error_code_name(static_cast<fhs::ErrorCode>(status));
  return "unknown";
}

const char* fhs_last_error(void) { return last_message.c_str(); }
fhs_status fhs_last_status(void) { return last_status; }

fhs_status fhs_params_new(int N, double s, double t, fhs_params** out) {
  return guard([&] {
    need(out, "out");
    *out = new fhs_params{fhs::Params(N, s, t)};
  });
}

void fhs_params_free(fhs_params* params) { delete params; }

fhs_status fhs_params_exponents(const fhs_params* params, double* crit, double* p, double* q) {
  return guard([&] {
    need(params, "params");
    if (crit) *crit = params->value.crit();
    if (p) *p = params->value.p();
    if (q) *q = params->value.q();
  });
}

fhs_status fhs_grid_new(double r_min, double r_max, size_t n, fhs_grid** out) {
  return guard([&] {
    need(out, "out");
    *out = new fhs_grid{fhs::make_log_grid(r_min, r_max, n)};
  });
}

fhs_status fhs_grid_default(fhs_grid** out) {
  return guard([&] {
    need(out, "out");
    *out = new fhs_grid{fhs::make_default_grid()};
  });
}

void fhs_grid_free(fhs_grid* grid) { delete grid; }

fhs_status fhs_grid_nodes(const fhs_grid* grid, double* out, size_t cap, size_t* len) {
  fhs_status st = guard([&] { need(grid, "grid"); });
  return st ? st : copy_out(grid->value->nodes(), out, cap, len);
}

fhs_status fhs_bubble_solve(const fhs_params* params, const fhs_grid* grid, double tol, fhs_bubble** out) {
  return guard([&] {
    need(params, "params");
    need(grid, "grid");
    need(out, "out");
    auto b = std::make_shared<const fhs::Bubble>(fhs::solve_bubble(params->value, grid->value, tol));
    *out = new fhs_bubble{std::move(b)};
  });
}

fhs_status fhs_bubble_load(const char* path, fhs_bubble** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new fhs_bubble{std::make_shared<const fhs::Bubble>(fhs::load_bubble_file(path))};
  });
}

fhs_status fhs_bubble_save(const fhs_bubble* bubble, const char* path) {
  return guard([&] {
    need(bubble, "bubble");
    need(path, "path");
    fhs::save_bubble_file(*bubble->value, path);
  });
}

void fhs_bubble_free(fhs_bubble* bubble) { delete bubble; }

fhs_status fhs_bubble_info(const fhs_bubble* bubble, double* mu, double* residual, int* iterations) {
  return guard([&] {
    need(bubble, "bubble");
    if (mu) *mu = bubble->value->mu;
    if (residual) *residual = bubble->value->residual;
    if (iterations) *iterations = bubble->value->iterations;
  });
}

fhs_status fhs_bubble_values(const fhs_bubble* bubble, double* out, size_t cap, size_t* len) {
  fhs_status st = guard([&] { need(bubble, "bubble"); });
  return st ? st : copy_out(bubble->value->profile.values(), out, cap, len);
}

fhs_status fhs_bubble_dilate(const fhs_bubble* bubble, double lambda, double* out, size_t cap, size_t* len) {
  std::vector<double> v;
  fhs_status st = guard([&] {
    need(bubble, "bubble");
    v = fhs::dilate(*bubble->value, lambda).values();
  });
  return st ? st : copy_out(v, out, cap, len);
}

fhs_status fhs_family_deficit(const fhs_bubble* bubble, const double* scales, const double* coeffs, size_t count,
                              double* gamma) {
  return guard([&] {
    need(bubble, "bubble");
    need(scales, "scales");
    need(coeffs, "coeffs");
    need(gamma, "gamma");
    fhs::BubbleFamily fam{std::vector<double>(scales, scales + count), std::vector<double>(coeffs, coeffs + count),
                          bubble->value};
    fam.validate();
    *gamma = fhs::deficit(fam.evaluate(), bubble->value->params);
  });
}

fhs_status fhs_two_bubble_integral(const fhs_bubble* bubble, double lambda_i, double lambda_j, double alpha,
                                   double beta, double* out) {
  return guard([&] {
    need(bubble, "bubble");
    need(out, "out");
    *out = fhs::two_bubble_integral(*bubble->value, lambda_i, lambda_j, alpha, beta);
  });
}

fhs_status fhs_spectrum_compute(const fhs_bubble* bubble, int k, double lambda, fhs_spectrum** out) {
  return guard([&] {
    need(bubble, "bubble");
    need(out, "out");
    *out = new fhs_spectrum{fhs::linearized_eigs(*bubble->value, k, lambda)};
  });
}

void fhs_spectrum_free(fhs_spectrum* spectrum) { delete spectrum; }

fhs_status fhs_spectrum_eigenvalues(const fhs_spectrum* spectrum, double* out, size_t cap, size_t* len) {
  fhs_status st = guard([&] { need(spectrum, "spectrum"); });
  return st ? st : copy_out(spectrum->value.eigenvalues, out, cap, len);
}

fhs_status fhs_spectrum_gap_margin(const fhs_spectrum* spectrum, double* margin) {
  return guard([&] {
    need(spectrum, "spectrum");
    need(margin, "margin");
    *margin = spectrum->value.gap_margin;
  });
}

fhs_status fhs_cutoff_norm(const fhs_params* params, const fhs_grid* grid, double r, double R, double* out) {
  return guard([&] {
    need(params, "params");
    need(grid, "grid");
    need(out, "out");
    *out = fhs::cutoff_weighted_norm({r, R}, params->value, grid->value);
  });
}

fhs_status fhs_config_load(const char* path, fhs_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto cfg = fhs::load_config(path);
    std::string echo = cfg.echo();
    *out = new fhs_config{std::move(cfg), std::move(echo)};
  });
}

fhs_status fhs_config_parse(const char* text, const char* source, fhs_config** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    auto cfg = fhs::parse_config(text, source ? source : "<string>");
    std::string echo = cfg.echo();
    *out = new fhs_config{std::move(cfg), std::move(echo)};
  });
}

void fhs_config_free(fhs_config* config) { delete config; }

const char* fhs_config_echo(const fhs_config* config) { return config ? config->echo.c_str() : ""; }

fhs_status fhs_run_experiment(const fhs_config* config, const char* experiment, const char* out_dir, int64_t seed,
                              int threads, const char* cache_dir, fhs_run** out) {
  return guard([&] {
    need(config, "config");
    need(out_dir, "out_dir");
    need(out, "out");
    if (threads < 0) fhs::fail(fhs::ErrorCode::invalid_argument, "threads must be non-negative");
    fhs::RunOptions opts;
    opts.out_dir = out_dir;
    if (experiment) opts.experiment = experiment;
    if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
    opts.threads = threads;
    if (cache_dir) opts.cache_dir = cache_dir;
    *out = new fhs_run{fhs::run_experiment(config->value, opts)};
  });
}

void fhs_run_free(fhs_run* run) { delete run; }
int fhs_run_cache_hit(const fhs_run* run) { return run && run->value.cache_hit ? 1 : 0; }
double fhs_run_wall_time(const fhs_run* run) { return run ? run->value.wall_time : 0.0; }
size_t fhs_run_output_count(const fhs_run* run) { return run ? run->value.outputs.size() : 0; }
const char* fhs_run_output(const fhs_run* run, size_t i) {
  return run && i < run->value.outputs.size() ? run->value.outputs[i].c_str() : nullptr;
}
size_t fhs_run_warning_count(const fhs_run* run) { return run ? run->value.warnings.size() : 0; }
const char* fhs_run_warning(const fhs_run* run, size_t i) {
  return run && i < run->value.warnings.size() ? run->value.warnings[i].c_str() : nullptr;
}

}  // extern "C"
