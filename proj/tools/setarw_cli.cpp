// setarw command-line front end: simulate | detect | bench | validate.
// Links the shared library through include/setarw.h only.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "setarw.h"

namespace {

// Exit codes: 0 success (detect: confident), 1 error or usage, 2 detect
// finished but flagged low contrast.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitLowContrast = 2;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

int fail(const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return kExitError;
}

int fail_status(const std::string& context) {
  return fail(context + ": " + setarw_last_error());
}

const char* status_name(setarw_status s) {
  switch (s) {
    case SETARW_OK: return "ok";
    case SETARW_INVALID_ARGUMENT: return "invalid_argument";
    case SETARW_PARSE_ERROR: return "parse_error";
    case SETARW_SIMULATION_ERROR: return "simulation_error";
    case SETARW_ESTIMATION_ERROR: return "estimation_error";
    case SETARW_IO_ERROR: return "io_error";
    case SETARW_INTERNAL_ERROR: return "internal_error";
  }
  return "internal_error";
}

bool read_file(const std::string& path, std::string* out, std::string* err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *err = "cannot open " + path;
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    *err = "read failed on " + path;
    return false;
  }
  *out = buf.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text, std::string* err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    *err = "cannot open " + path + " for writing";
    return false;
  }
  out << text;
  out.flush();
  if (!out) {
    *err = "write failed on " + path;
    return false;
  }
  return true;
}

// Writes to the path, or to stdout when the path is empty.
bool emit(const std::string& path, const std::string& text, std::string* err) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  return write_file(path, text, err);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  setarw_string_free(s);
  return out;
}

struct ModelHandle {
  setarw_model* h = nullptr;
  ~ModelHandle() { setarw_model_free(h); }
};

struct SeriesHandle {
  setarw_series* h = nullptr;
  ~SeriesHandle() { setarw_series_free(h); }
};

struct ReportHandle {
  setarw_report* h = nullptr;
  ~ReportHandle() { setarw_report_free(h); }
};

struct WaveletHandle {
  setarw_wavelet* h = nullptr;
  ~WaveletHandle() { setarw_wavelet_free(h); }
};

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string model_path;
  long long n = 0;
  long long seed = 1;
  int burn_in = 500;
  std::string out = "series.csv";
};

int cmd_simulate(const SimulateArgs& args) {
  ModelHandle model;
  if (setarw_model_load(args.model_path.c_str(), &model.h) != SETARW_OK)
    return fail_status("model " + args.model_path);

  SeriesHandle series;
  if (setarw_simulate(model.h, args.n, args.seed, args.burn_in, &series.h) != SETARW_OK)
    return fail(setarw_last_error());  // the library message names the step

  if (setarw_series_save(series.h, args.out.c_str()) != SETARW_OK)
    return fail_status("save " + args.out);

  char* model_text = nullptr;
  if (setarw_model_format(model.h, &model_text) != SETARW_OK)
    return fail_status("provenance");
  std::ostringstream prov;
  prov << "# schema: setarw-provenance/1\n"
       << "[provenance]\n"
       << "seed = " << args.seed << "\n"
       << "burn_in = " << args.burn_in << "\n"
       << "n = " << args.n << "\n\n"
       << take_string(model_text);
  std::string err;
  if (!write_file(args.out + ".prov", prov.str(), &err)) return fail(err);
  return kExitOk;
}

// ---- detect ------------------------------------------------------------

struct DetectArgs {
  std::string series_path;
  std::string model_path;
  std::string config_path;
  std::string method = "wavelet";
  std::string surface_out;
  std::string out;
};

int cmd_detect(const DetectArgs& args) {
  if (args.method == "grid-aic" && !args.surface_out.empty())
    return fail("--surface-out applies to the wavelet method only");

  std::string config_text;
  if (!args.config_path.empty()) {
    std::string err;
    if (!read_file(args.config_path, &config_text, &err)) return fail(err);
  }

  ModelHandle model;
  if (!args.model_path.empty() &&
      setarw_model_load(args.model_path.c_str(), &model.h) != SETARW_OK)
    return fail_status("model " + args.model_path);

  SeriesHandle series;
  if (setarw_series_load(args.series_path.c_str(), &series.h) != SETARW_OK)
    return fail_status("series " + args.series_path);

  ReportHandle report;
  if (args.method == "grid-aic") {
    if (setarw_detect_grid_aic(series.h, model.h, config_text.c_str(), &report.h) !=
        SETARW_OK)
      return fail_status("detect");
  } else {
    int want_surfaces = args.surface_out.empty() ? 0 : 1;
    if (setarw_detect(series.h, model.h, config_text.c_str(), nullptr, want_surfaces,
                      &report.h) != SETARW_OK)
      return fail_status("detect");
  }

  char* json = nullptr;
  if (setarw_report_to_json(report.h, &json) != SETARW_OK) return fail_status("report");
  std::string err;
  if (!emit(args.out, take_string(json) + "\n", &err)) return fail(err);

  if (!args.surface_out.empty()) {
    char* csv = nullptr;
    if (setarw_report_surfaces_csv(report.h, &csv) != SETARW_OK)
      return fail_status("surfaces");
    if (!write_file(args.surface_out, take_string(csv), &err)) return fail(err);
    char* bases = nullptr;
    if (setarw_report_bases_csv(report.h, &bases) != SETARW_OK)
      return fail_status("surfaces");
    if (!write_file(args.surface_out + ".bases", take_string(bases), &err))
      return fail(err);
  }

  return setarw_report_low_contrast(report.h) ? kExitLowContrast : kExitOk;
}

// ---- bench -------------------------------------------------------------

struct BenchArgs {
  std::string model_path;
  long long n = 0;
  long long seed = 1;
  std::vector<long long> seeds;  // explicit list; overrides seed/reps
  long long reps = 1;
  int burn_in = 500;
  std::string config_path;
  std::vector<std::string> methods;
  int jobs = 1;
  bool timings = false;
  std::string out;
};

struct RunRow {
  std::string method;
  long long seed = 0;
  setarw_status status = SETARW_OK;
  int d_hat = 0;
  bool delay_correct = false;
  std::vector<double> lambda_hats;
  double contrast = 0.0;
  double window_a = 0.0;
  double window_b = 0.0;
  int j_n = 0;
  double lambda_grid_step = 0.0;
  double runtime_ms = 0.0;
};

RunRow bench_one(const setarw_model* model, long long n, long long seed, int burn_in,
                 const std::string& config_text, const std::string& method) {
  RunRow row;
  row.method = method;
  row.seed = seed;
  auto start = std::chrono::steady_clock::now();

  SeriesHandle series;
  setarw_status st = setarw_simulate(model, n, seed, burn_in, &series.h);
  if (st == SETARW_OK) {
    ReportHandle report;
    st = method == "grid-aic"
             ? setarw_detect_grid_aic(series.h, model, config_text.c_str(), &report.h)
             : setarw_detect(series.h, model, config_text.c_str(), nullptr, 0, &report.h);
    if (st == SETARW_OK) {
      row.d_hat = setarw_report_d_hat(report.h);
      row.delay_correct = row.d_hat == setarw_model_delay(model);
      int r_hat = setarw_report_r_hat(report.h);
      for (int i = 0; i < r_hat; ++i)
        row.lambda_hats.push_back(setarw_report_lambda_hat(report.h, i));
      row.contrast = setarw_report_contrast(report.h);
      row.window_a = setarw_report_a(report.h);
      row.window_b = setarw_report_b(report.h);
      row.j_n = setarw_report_j_n(report.h);
      row.lambda_grid_step = setarw_report_lambda_grid_step(report.h);
    }
  }
  row.status = st;
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return row;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void append_run_row(std::ostringstream& out, const RunRow& row, bool timings) {
  out << "run," << row.method << ',' << row.seed << ',' << status_name(row.status) << ',';
  if (row.status == SETARW_OK) {
    out << row.d_hat << ',' << (row.delay_correct ? 1 : 0) << ',';
    for (size_t i = 0; i < row.lambda_hats.size(); ++i) {
      if (i) out << ';';
      out << g17(row.lambda_hats[i]);
    }
    out << ',' << g17(row.contrast) << ',' << g17(row.window_a) << ','
        << g17(row.window_b) << ',' << row.j_n << ',' << g17(row.lambda_grid_step) << ',';
  } else {
    out << ",,,,,,,,";
  }
  out << g17(timings ? row.runtime_ms : 0.0);
  out << ",,,,,\n";  // summary-only columns stay empty on run rows
}

void append_summary_row(std::ostringstream& out, const std::string& method,
                        const std::vector<const RunRow*>& rows,
                        const std::vector<double>& true_lambdas) {
  long long n_runs = static_cast<long long>(rows.size());
  long long n_ok = 0;
  long long n_correct = 0;
  std::vector<double> contrasts;
  std::vector<double> errors;  // per-run mean |lambda_hat - lambda|
  for (const RunRow* row : rows) {
    if (row->status != SETARW_OK) continue;
    ++n_ok;
    if (row->delay_correct) ++n_correct;
    contrasts.push_back(row->contrast);
    size_t pairs = std::min(row->lambda_hats.size(), true_lambdas.size());
    if (row->delay_correct && pairs > 0) {
      double err = 0.0;
      for (size_t i = 0; i < pairs; ++i)
        err += std::fabs(row->lambda_hats[i] - true_lambdas[i]);
      errors.push_back(err / static_cast<double>(pairs));
    }
  }
  double accuracy =
      n_runs ? static_cast<double>(n_correct) / static_cast<double>(n_runs) : 0.0;
  out << "summary," << method << ",,,,,,,,,,,," << g17(accuracy) << ',';
  if (!errors.empty()) {
    double mae = 0.0;
    for (double e : errors) mae += e;
    out << g17(mae / static_cast<double>(errors.size()));
  }
  out << ',';
  if (!contrasts.empty()) out << g17(median(contrasts));
  out << ',' << n_runs << ',' << n_ok << '\n';
}

int cmd_bench(const BenchArgs& args) {
  ModelHandle model;
  if (setarw_model_load(args.model_path.c_str(), &model.h) != SETARW_OK)
    return fail_status("model " + args.model_path);

  std::string config_text;
  if (!args.config_path.empty()) {
    std::string err;
    if (!read_file(args.config_path, &config_text, &err)) return fail(err);
  }

  std::vector<long long> seeds = args.seeds;
  if (seeds.empty()) {
    for (long long r = 0; r < args.reps; ++r) seeds.push_back(args.seed + r);
  }
  if (seeds.empty()) return fail("bench needs a nonempty seed list");

  std::vector<std::string> methods = args.methods;
  if (methods.empty()) methods.push_back("wavelet");

  std::vector<double> true_lambdas;
  for (int i = 0; i < setarw_model_threshold_count(model.h); ++i)
    true_lambdas.push_back(setarw_model_threshold(model.h, i));

  // One task per (seed, method), seed-major, filled into fixed slots so the
  // output order is independent of worker scheduling.
  struct Task {
    long long seed;
    std::string method;
  };
  std::vector<Task> tasks;
  for (long long seed : seeds)
    for (const std::string& method : methods) tasks.push_back({seed, method});
  std::vector<RunRow> rows(tasks.size());

  int jobs = std::max(1, args.jobs);
  jobs = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(jobs), tasks.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      rows[i] = bench_one(model.h, args.n, tasks[i].seed, args.burn_in, config_text,
                          tasks[i].method);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::ostringstream out;
  out << "# schema: setarw-bench/1\n";
  out << "kind,method,seed,status,d_hat,delay_correct,lambda_hats,contrast,window_a,"
         "window_b,j_n,lambda_grid_step,runtime_ms,delay_accuracy,threshold_mae,"
         "median_contrast,n_runs,n_ok\n";
  for (const RunRow& row : rows) append_run_row(out, row, args.timings);
  for (const std::string& method : methods) {
    std::vector<const RunRow*> subset;
    for (const RunRow& row : rows)
      if (row.method == method) subset.push_back(&row);
    append_summary_row(out, method, subset, true_lambdas);
  }

  std::string err;
  if (!emit(args.out, out.str(), &err)) return fail(err);
  return kExitOk;
}

// ---- validate ----------------------------------------------------------

struct ValidateArgs {
  std::string config_path;
  bool detector_geometry = false;
  std::string out;
};

int cmd_validate(const ValidateArgs& args) {
  WaveletHandle psi;
  setarw_status st = args.detector_geometry ? setarw_wavelet_detector_default(&psi.h)
                                            : setarw_wavelet_default(&psi.h);
  if (st != SETARW_OK) return fail_status("wavelet");

  if (!args.config_path.empty()) {
    // The config's [wavelet] section overrides the built-in geometry; detect
    // applies the same section, so validate sees the same wavelet.
    std::string config_text, err;
    if (!read_file(args.config_path, &config_text, &err)) return fail(err);
    WaveletHandle from_config;
    if (setarw_wavelet_from_config(config_text.c_str(), psi.h, &from_config.h) != SETARW_OK)
      return fail_status("wavelet config");
    std::swap(psi.h, from_config.h);
  }

  char* text = nullptr;
  if (setarw_wavelet_validation_report(psi.h, &text) != SETARW_OK)
    return fail_status("validate");
  std::string report = take_string(text);
  std::string err;
  if (!emit(args.out, report, &err)) return fail(err);
  return report.find("assumption_ok = true") != std::string::npos ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SETAR delay and threshold detection toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Simulate a SETAR series to CSV");
  sim->add_option("--model", sim_args.model_path, "Model config file")->required();
  sim->add_option("--n", sim_args.n, "Series length")->required();
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--burn-in", sim_args.burn_in, "Discarded warmup steps");
  sim->add_option("--out", sim_args.out, "Output CSV path (default series.csv)");

  DetectArgs det_args;
  CLI::App* det = app.add_subcommand("detect", "Detect delay and thresholds in a series");
  det->add_option("series", det_args.series_path, "Input series CSV")->required();
  det->add_option("--model", det_args.model_path, "Model config for fallback bounds");
  det->add_option("--config", det_args.config_path, "Estimator/detector config file");
  det->add_option("--method", det_args.method, "Detection method")
      ->check(CLI::IsMember({"wavelet", "grid-aic"}));
  det->add_option("--surface-out", det_args.surface_out, "Dump W surfaces to CSV");
  det->add_option("--out", det_args.out, "Report path (default stdout)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo simulate/detect batches");
  bench->add_option("--model", bench_args.model_path, "Model config file")->required();
  bench->add_option("--n", bench_args.n, "Series length")->required();
  bench->add_option("--seed", bench_args.seed, "First seed (seeds are seed..seed+R-1)");
  bench->add_option("--seeds", bench_args.seeds, "Explicit seed list (overrides --seed/--reps)")
      ->delimiter(',');
  bench->add_option("--reps", bench_args.reps, "Repetition count R")
      ->check(CLI::PositiveNumber);
  bench->add_option("--burn-in", bench_args.burn_in, "Discarded warmup steps");
  bench->add_option("--config", bench_args.config_path, "Estimator/detector config file");
  bench->add_option("--method", bench_args.methods, "Methods to run (repeatable)")
      ->check(CLI::IsMember({"wavelet", "grid-aic"}));
  bench->add_option("--jobs", bench_args.jobs, "Parallel worker limit")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--timings", bench_args.timings,
                  "Record wall-clock runtimes (breaks byte reproducibility)");
  bench->add_option("--out", bench_args.out, "Output CSV path (default stdout)");

  ValidateArgs val_args;
  CLI::App* val = app.add_subcommand("validate", "Verify wavelet moments and support");
  val->add_option("--config", val_args.config_path, "Config with a [wavelet] section");
  val->add_flag("--detector", val_args.detector_geometry,
                "Validate the detector default geometry");
  val->add_option("--out", val_args.out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (sim->parsed()) return cmd_simulate(sim_args);
  if (det->parsed()) return cmd_detect(det_args);
  if (bench->parsed()) return cmd_bench(bench_args);
  if (val->parsed()) return cmd_validate(val_args);
  return fail("no subcommand");
}
