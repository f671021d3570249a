#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rua/errors.hpp"
#include "rua/image.hpp"
#include "rua/policy.hpp"
#include "rua/search.hpp"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct AugmentOptions {
  std::string input;
  std::string output;
  double r = 0.0;
  int n_max = 5;
  std::uint64_t seed = 0;
  std::string mode = "rua";
  bool aligned = true;
  bool random = true;
  bool expanded = true;
  std::string trace;
  int jobs = 1;
};

struct SearchOptions {
  std::string eval_cmd;
  int max_iter = 4;
  std::string ledger;
  bool resume = false;
  double timeout_s = 0.0;
  std::uint64_t seed = 0;
};

struct GridCliOptions {
  std::string eval_cmd;
  std::vector<double> points;
  int diagonal = 0;
  std::string mn;
  std::string ledger;
  int jobs = 1;
};

struct DemoSurfaceOptions {
  std::string kind = "quadratic";
  double peak = 0.5;
  double height = 0.9;
  double width = 0.4;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double r = 0.0;
};

struct BenchOptions {
  std::string input;
  std::vector<int> n_list;
  int trials = 3;
  double r = 0.5;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string json_path;
};

/// Index-sharded parallel loop; rethrows the first worker exception.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr error;
  std::vector<std::thread> workers;
  const int n_workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count));
  workers.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

/// PPM files in `dir`, sorted by filename. Image indices for seeding are
/// ranks in this order, independent of directory enumeration order.
std::vector<fs::path> list_ppm_sorted(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw rua::IoError("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw rua::IoError("no .ppm files in " + dir.string());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

rua::AugmentMode resolve_mode(const AugmentOptions& opts) {
  if (opts.mode == "rua") return rua::AugmentMode::rua();
  if (opts.mode == "ra") return rua::AugmentMode::ra();
  return rua::AugmentMode{opts.aligned, opts.random, opts.expanded};
}

rua::Image load_named(const fs::path& path) {
  try {
    return rua::load_ppm(path);
  } catch (const rua::Error& e) {
    throw rua::IoError(path.string() + ": " + e.what());
  }
}

int cmd_augment(const AugmentOptions& opts) {
  const auto files = list_ppm_sorted(opts.input);
  fs::create_directories(opts.output);

  rua::PolicyConfig cfg;
  cfg.r = opts.r;
  cfg.n_max = opts.n_max;
  cfg.mode = resolve_mode(opts);
  cfg.seed = opts.seed;

  std::vector<std::string> trace_lines(files.size());
  parallel_for(files.size(), opts.jobs, [&](std::size_t i) {
    const rua::Image img = load_named(files[i]);
    const rua::AugmentResult result = rua::augment_image(img, cfg, i);
    const fs::path out_path = fs::path(opts.output) / files[i].filename();
    try {
      rua::save_ppm(result.image, out_path);
    } catch (const rua::Error& e) {
      throw rua::IoError(out_path.string() + ": " + e.what());
    }
    if (!opts.trace.empty()) {
      ordered_json line;
      line["file"] = files[i].filename().string();
      line["index"] = i;
      ordered_json ops = ordered_json::array();
      for (const rua::TransformParams& op : result.trace) {
        ordered_json o;
        o["kind"] = rua::to_string(op.kind);
        o["magnitude"] = op.magnitude;
        ops.push_back(std::move(o));
      }
      line["ops"] = std::move(ops);
      trace_lines[i] = line.dump();
    }
  });

  if (!opts.trace.empty()) {
    std::ofstream out(opts.trace, std::ios::trunc);
    if (!out) throw rua::IoError("cannot open trace file: " + opts.trace);
    for (const std::string& line : trace_lines) out << line << '\n';
    out.flush();
    if (!out) throw rua::IoError("trace write failed: " + opts.trace);
  }
  std::printf("augmented %zu images -> %s\n", files.size(), opts.output.c_str());
  return 0;
}

void print_report(const rua::SearchReport& report, bool with_mn) {
  std::printf("  #  %-22s %-14s %s\n", "r", "score", "wall_s");
  for (const rua::EvalRecord& rec : report.records) {
    std::printf("%3d  %-22.17g %-14.8g %.3f\n", rec.ordinal, rec.r, rec.score,
                rec.wall_time_s);
  }
  if (with_mn) {
    std::printf("best r = %.17g  score = %.17g  (M = %d, N = %d)\n",
                report.best_r, report.best_score, report.best_m, report.best_n);
  } else {
    std::printf("best r = %.17g  score = %.17g\n", report.best_r,
                report.best_score);
  }
}

int cmd_search(const SearchOptions& opts) {
  rua::ExternalCommand cmd;
  cmd.command_template = opts.eval_cmd;
  cmd.timeout_s = opts.timeout_s;
  rua::GssSearchOptions search_opts;
  search_opts.max_iter = opts.max_iter;
  search_opts.resume = opts.resume;
  search_opts.seed = opts.seed;
  const rua::SearchReport report =
      rua::run_gss_search(rua::EvaluatorSpec(cmd), search_opts, opts.ledger);
  print_report(report, false);
  return 0;
}

rua::GridSpec resolve_grid(const GridCliOptions& opts) {
  if (!opts.points.empty()) return rua::GridSpec::points(opts.points);
  if (opts.diagonal > 0) return rua::GridSpec::diagonal(opts.diagonal);
  int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
  if (std::sscanf(opts.mn.c_str(), "%d..%dx%d..%d", &m_lo, &m_hi, &n_lo, &n_hi) != 4) {
    throw rua::DomainError("--mn expects M1..M2xN1..N2, e.g. 1..10x1..10");
  }
  return rua::GridSpec::mn(m_lo, m_hi, n_lo, n_hi);
}

int cmd_grid(const GridCliOptions& opts) {
  const rua::GridSpec grid = resolve_grid(opts);
  rua::ExternalCommand cmd;
  cmd.command_template = opts.eval_cmd;
  rua::GridOptions grid_opts;
  grid_opts.jobs = opts.jobs;
  const rua::SearchReport report =
      rua::run_grid(rua::EvaluatorSpec(cmd), grid, grid_opts, opts.ledger);
  print_report(report, grid.shape == rua::GridSpec::Shape::kMn);
  return 0;
}

int cmd_demo_surface(const DemoSurfaceOptions& opts) {
  rua::SyntheticSurface surface;
  surface.kind = opts.kind == "tent" ? rua::SurfaceKind::kTent
                                     : rua::SurfaceKind::kQuadratic;
  surface.peak_r = opts.peak;
  surface.height = opts.height;
  surface.width = opts.width;
  surface.noise_sigma = opts.noise;
  surface.noise_seed = 0;
  const double score =
      rua::evaluate(rua::EvaluatorSpec(surface), opts.r, opts.seed);
  std::printf("%.17g\n", score);
  return 0;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

int cmd_bench(const BenchOptions& opts) {
  const auto files = list_ppm_sorted(opts.input);

  rua::PolicyConfig cfg;
  cfg.r = opts.r;
  cfg.seed = opts.seed;

  ordered_json report;
  report["input"] = opts.input;
  report["images"] = files.size();
  report["trials"] = opts.trials;
  report["r"] = opts.r;
  report["seed"] = opts.seed;
  report["jobs"] = opts.jobs;
  ordered_json rows = ordered_json::array();

  std::printf("%5s  %12s  %10s\n", "n", "images/s", "ms/image");
  for (const int n : opts.n_list) {
    std::vector<double> trial_s(static_cast<std::size_t>(opts.trials));
    for (int t = 0; t < opts.trials; ++t) {
      const auto t0 = std::chrono::steady_clock::now();
      parallel_for(files.size(), opts.jobs, [&](std::size_t i) {
        const rua::Image img = load_named(files[i]);
        rua::augment_image_fixed_count(img, cfg, i, n);
      });
      trial_s[static_cast<std::size_t>(t)] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
    const double seconds = median(trial_s);
    const double throughput = static_cast<double>(files.size()) / seconds;
    std::printf("%5d  %12.1f  %10.3f\n", n, throughput,
                1000.0 * seconds / static_cast<double>(files.size()));
    ordered_json row;
    row["n"] = n;
    row["images_per_s"] = throughput;
    row["median_s"] = seconds;
    row["trial_s"] = trial_s;
    rows.push_back(std::move(row));
  }
  report["rows"] = std::move(rows);

  if (!opts.json_path.empty()) {
    std::ofstream out(opts.json_path, std::ios::trunc);
    if (!out) throw rua::IoError("cannot open json report: " + opts.json_path);
    out << report.dump(2) << '\n';
    out.flush();
    if (!out) throw rua::IoError("json report write failed: " + opts.json_path);
  }
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const rua::LedgerCorrupt& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const rua::CommandFailed& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (!e.output.empty()) {
      std::fprintf(stderr, "evaluator output:\n%s\n", e.output.c_str());
    }
    return 3;
  } catch (const rua::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const rua::Timeout& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const rua::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rua::BadMagic& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rua::BadHeader& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rua::Truncated& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rua::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

std::string require_r_placeholder(const std::string& tmpl) {
  if (tmpl.find("{r}") == std::string::npos) {
    return "--eval-cmd must contain the {r} placeholder";
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-intensity image augmentation and search driver"};
  app.require_subcommand(1);

  AugmentOptions aug;
  CLI::App* aug_cmd = app.add_subcommand(
      "augment", "augment a directory of PPM images");
  aug_cmd->add_option("--input", aug.input, "input directory")->required();
  aug_cmd->add_option("--output", aug.output, "output directory")->required();
  aug_cmd->add_option("--r", aug.r, "augmentation intensity in [0,1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  aug_cmd->add_option("--nmax", aug.n_max, "transforms per image at r=1")
      ->default_val(5)
      ->check(CLI::PositiveNumber);
  aug_cmd->add_option("--seed", aug.seed, "root random seed");
  aug_cmd->add_option("--mode", aug.mode, "parameter schedule preset")
      ->default_val("rua")
      ->check(CLI::IsMember({"rua", "ra", "custom"}));
  aug_cmd->add_option("--aligned", aug.aligned,
                      "custom mode: distortion grows from zero with r");
  aug_cmd->add_option("--random", aug.random,
                      "custom mode: sample magnitudes over the interval");
  aug_cmd->add_option("--expanded", aug.expanded,
                      "custom mode: widened intensity caps");
  aug_cmd->add_option("--trace", aug.trace, "write per-image JSONL trace here");
  aug_cmd->add_option("--jobs", aug.jobs, "parallel workers")
      ->default_val(1)
      ->check(CLI::PositiveNumber);

  SearchOptions sea;
  CLI::App* search_cmd = app.add_subcommand(
      "search", "golden-section search for the best r against an evaluator");
  search_cmd->add_option("--eval-cmd", sea.eval_cmd,
                         "shell template; {r} and optional {seed}")
      ->required()
      ->check(require_r_placeholder);
  search_cmd->add_option("--max-iter", sea.max_iter, "bracket-shrink steps")
      ->default_val(4)
      ->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--ledger", sea.ledger, "JSONL evaluation ledger")
      ->required();
  search_cmd->add_flag("--resume", sea.resume,
                       "replay an interrupted ledger and continue");
  search_cmd->add_option("--timeout", sea.timeout_s,
                         "per-evaluation timeout in seconds (0 = none)")
      ->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--seed", sea.seed, "root of per-evaluation seeds");

  GridCliOptions gri;
  CLI::App* grid_cmd = app.add_subcommand(
      "grid", "evaluate a fixed grid of r values");
  grid_cmd->add_option("--eval-cmd", gri.eval_cmd,
                       "shell template; {r}, optional {seed} and {n}")
      ->required()
      ->check(require_r_placeholder);
  CLI::Option_group* shape = grid_cmd->add_option_group("shape");
  shape->add_option("--points", gri.points, "explicit r values")
      ->delimiter(',');
  shape->add_option("--diagonal", gri.diagonal,
                    "k points r = 1/k .. 1")
      ->check(CLI::PositiveNumber);
  shape->add_option("--mn", gri.mn, "legacy grid, M1..M2xN1..N2");
  shape->require_option(1);
  grid_cmd->add_option("--ledger", gri.ledger, "JSONL evaluation ledger")
      ->required();
  grid_cmd->add_option("--jobs", gri.jobs, "concurrent evaluations")
      ->default_val(1)
      ->check(CLI::PositiveNumber);

  DemoSurfaceOptions demo;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-surface", "print a synthetic score; usable as an --eval-cmd target");
  demo_cmd->add_option("--kind", demo.kind, "surface shape")
      ->default_val("quadratic")
      ->check(CLI::IsMember({"quadratic", "tent"}));
  demo_cmd->add_option("--peak", demo.peak, "peak location")
      ->default_val(0.5)
      ->check(CLI::Range(0.0, 1.0));
  demo_cmd->add_option("--height", demo.height, "peak height")->default_val(0.9);
  demo_cmd->add_option("--width", demo.width, "half-width")
      ->default_val(0.4)
      ->check(CLI::PositiveNumber);
  demo_cmd->add_option("--noise", demo.noise, "gaussian noise sigma")
      ->check(CLI::NonNegativeNumber);
  demo_cmd->add_option("--seed", demo.seed, "noise attempt seed");
  demo_cmd->add_option("--r", demo.r, "where to evaluate")
      ->required()
      ->check(CLI::Range(0.0, 1.0));

  BenchOptions ben;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "throughput at fixed per-image transform counts");
  bench_cmd->add_option("--input", ben.input, "input directory")->required();
  bench_cmd->add_option("--n", ben.n_list, "transform counts, e.g. 0,1,3,5")
      ->required()
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--trials", ben.trials, "repeats per count (median wins)")
      ->default_val(3)
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--r", ben.r, "magnitude intensity")
      ->default_val(0.5)
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--seed", ben.seed, "root random seed");
  bench_cmd->add_option("--jobs", ben.jobs, "parallel workers")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--json", ben.json_path, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  if (aug_cmd->parsed()) return guarded([&] { return cmd_augment(aug); });
  if (search_cmd->parsed()) return guarded([&] { return cmd_search(sea); });
  if (grid_cmd->parsed()) return guarded([&] { return cmd_grid(gri); });
  if (demo_cmd->parsed()) return guarded([&] { return cmd_demo_surface(demo); });
  if (bench_cmd->parsed()) return guarded([&] { return cmd_bench(ben); });
  return 1;
}
