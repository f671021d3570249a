#include "rua/search.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rua/errors.hpp"
#include "rua/gss.hpp"
#include "rua/rng.hpp"

namespace rua {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void replace_all(std::string& s, std::string_view key, std::string_view value) {
  for (std::size_t pos = 0; (pos = s.find(key, pos)) != std::string::npos;
       pos += value.size()) {
    s.replace(pos, key.size(), value);
  }
}

std::string now_iso8601_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommandResult {
  int exit_code = 0;
  bool signaled = false;
  int term_signal = 0;
  std::string output;
};

[[noreturn]] void kill_and_throw_timeout(pid_t pid, const std::string& command,
                                         double timeout_s) {
  ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  throw Timeout("evaluator exceeded " + format_short(timeout_s) +
                " s: " + command);
}

/// Runs `command` through /bin/sh, capturing standard output. stderr passes
/// through. timeout_s 0 means no limit; on expiry the child is killed.
CommandResult run_command(const std::string& command, double timeout_s) {
  int fds[2];
  if (::pipe(fds) != 0) {
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw IoError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::close(fds[0]);
    if (::dup2(fds[1], STDOUT_FILENO) < 0) _exit(127);
    ::close(fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(fds[1]);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_s);
  const auto remaining_ms = [&]() -> long long {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               deadline - std::chrono::steady_clock::now())
        .count();
  };

  std::string output;
  char buf[4096];
  for (;;) {
    int wait_ms = -1;
    if (timeout_s > 0) {
      const long long left = remaining_ms();
      if (left <= 0) {
        ::close(fds[0]);
        kill_and_throw_timeout(pid, command, timeout_s);
      }
      wait_ms = static_cast<int>(std::min<long long>(left, 60000));
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int rc = ::poll(&pfd, 1, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      ::close(fds[0]);
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;  // deadline re-checked at the top
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fds[0]);
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      throw IoError(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);

  // Output is closed but the child may still be running; keep honoring the
  // deadline while reaping.
  int status = 0;
  if (timeout_s > 0) {
    for (;;) {
      const pid_t done = ::waitpid(pid, &status, WNOHANG);
      if (done == pid) break;
      if (done < 0 && errno != EINTR) {
        throw IoError(std::string("waitpid: ") + std::strerror(errno));
      }
      if (remaining_ms() <= 0) kill_and_throw_timeout(pid, command, timeout_s);
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  } else {
    while (::waitpid(pid, &status, 0) < 0) {
      if (errno != EINTR) {
        throw IoError(std::string("waitpid: ") + std::strerror(errno));
      }
    }
  }

  CommandResult result;
  result.output = std::move(output);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.term_signal = WTERMSIG(status);
    result.exit_code = 128 + result.term_signal;
  }
  return result;
}

/// Last non-empty stdout line, parsed as a decimal real.
double parse_score(const std::string& output, const std::string& command) {
  std::string last;
  std::string line;
  std::istringstream in(output);
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    last = line.substr(begin, end - begin + 1);
  }
  if (last.empty()) {
    throw ParseError("evaluator printed no score: " + command);
  }
  errno = 0;
  char* tail = nullptr;
  const double value = std::strtod(last.c_str(), &tail);
  if (tail == last.c_str() || *tail != '\0' || errno == ERANGE) {
    throw ParseError("evaluator's last output line is not a number: \"" + last +
                     "\"");
  }
  return value;
}

double surface_value(const SyntheticSurface& s, double r,
                     std::uint64_t attempt_seed) {
  double v = 0;
  switch (s.kind) {
    case SurfaceKind::kQuadratic: {
      const double q = (r - s.peak_r) / s.width;
      v = s.height * (1.0 - q * q);
      break;
    }
    case SurfaceKind::kTent: {
      // Asymmetric on purpose: the slope right of the peak is doubled.
      const double d = r - s.peak_r;
      v = d <= 0 ? s.height * (1.0 + d / s.width)
                 : s.height * (1.0 - 2.0 * d / s.width);
      break;
    }
  }
  v = std::clamp(v, 0.0, 1.0);
  if (s.noise_sigma > 0) {
    std::uint64_t z = mix64(std::bit_cast<std::uint64_t>(r));
    z = mix64(z + s.noise_seed);
    z = mix64(z + attempt_seed);
    RandomStream rng(z);
    v += s.noise_sigma * rng.next_gaussian();
  }
  return v;
}

const char* surface_kind_name(SurfaceKind kind) {
  return kind == SurfaceKind::kQuadratic ? "quadratic" : "tent";
}

EvalRecord parse_record(const ordered_json& j) {
  if (!j.is_object()) throw LedgerCorrupt("ledger line is not a JSON object");
  const auto need = [&](const char* key) -> const ordered_json& {
    const auto it = j.find(key);
    if (it == j.end()) {
      throw LedgerCorrupt(std::string("ledger record lacks key \"") + key + "\"");
    }
    return *it;
  };
  const auto number = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_number()) {
      throw LedgerCorrupt(std::string("ledger key \"") + key + "\" is not a number");
    }
    return v.get<double>();
  };
  const auto text = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_string()) {
      throw LedgerCorrupt(std::string("ledger key \"") + key + "\" is not a string");
    }
    return v.get<std::string>();
  };
  EvalRecord rec;
  rec.r = number("r");
  rec.score = number("score");
  const auto& ord = need("ordinal");
  if (!ord.is_number_integer()) {
    throw LedgerCorrupt("ledger key \"ordinal\" is not an integer");
  }
  rec.ordinal = ord.get<int>();
  rec.wall_time_s = number("wall_time_s");
  rec.evaluator = text("evaluator");
  rec.timestamp = text("timestamp");
  return rec;
}

void truncate_file(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open ledger for writing: " + path.string());
}

EvalRecord make_record(double r, double score, int ordinal, double wall_time_s,
                       const EvaluatorSpec& spec) {
  EvalRecord rec;
  rec.r = r;
  rec.score = score;
  rec.ordinal = ordinal;
  rec.wall_time_s = wall_time_s;
  rec.evaluator = evaluator_identity(spec);
  rec.timestamp = now_iso8601_utc();
  return rec;
}

}  // namespace

double evaluate(const EvaluatorSpec& spec, double r, std::uint64_t attempt_seed,
                std::optional<int> n) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("r must be in [0, 1]");
  if (const auto* surface = std::get_if<SyntheticSurface>(&spec)) {
    return surface_value(*surface, r, attempt_seed);
  }
  const auto& external = std::get<ExternalCommand>(spec);
  std::string cmd = external.command_template;
  replace_all(cmd, "{r}", format_full(r));
  replace_all(cmd, "{seed}", std::to_string(attempt_seed));
  if (n.has_value()) replace_all(cmd, "{n}", std::to_string(*n));
  const CommandResult res = run_command(cmd, external.timeout_s);
  if (res.signaled) {
    throw CommandFailed("evaluator killed by signal " +
                            std::to_string(res.term_signal) + ": " + cmd,
                        res.exit_code, res.output);
  }
  if (res.exit_code != 0) {
    throw CommandFailed("evaluator exited with status " +
                            std::to_string(res.exit_code) + ": " + cmd,
                        res.exit_code, res.output);
  }
  return parse_score(res.output, cmd);
}

std::string evaluator_identity(const EvaluatorSpec& spec) {
  if (const auto* external = std::get_if<ExternalCommand>(&spec)) {
    return "cmd: " + external->command_template;
  }
  const auto& s = std::get<SyntheticSurface>(spec);
  std::string id = "surface: ";
  id += surface_kind_name(s.kind);
  id += " peak=" + format_short(s.peak_r);
  id += " height=" + format_short(s.height);
  id += " width=" + format_short(s.width);
  id += " noise=" + format_short(s.noise_sigma);
  id += " noise_seed=" + std::to_string(s.noise_seed);
  return id;
}

void ledger_append(const std::filesystem::path& path, const EvalRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open ledger for append: " + path.string());
  ordered_json j;
  j["r"] = record.r;
  j["score"] = record.score;
  j["ordinal"] = record.ordinal;
  j["wall_time_s"] = record.wall_time_s;
  j["evaluator"] = record.evaluator;
  j["timestamp"] = record.timestamp;
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw IoError("ledger write failed: " + path.string());
}

std::vector<EvalRecord> ledger_load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ledger: " + path.string());
  std::vector<EvalRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw LedgerCorrupt("ledger line " + std::to_string(line_no) +
                          " is not valid JSON: " + e.what());
    }
    records.push_back(parse_record(j));
    if (records.back().ordinal != static_cast<int>(records.size())) {
      throw LedgerCorrupt("ledger ordinals are not consecutive at line " +
                          std::to_string(line_no));
    }
  }
  return records;
}

SearchReport run_gss_search(const EvaluatorSpec& spec, const GssSearchOptions& options,
                            const std::filesystem::path& ledger_path) {
  if (options.max_iter < 0) throw DomainError("max_iter must be non-negative");
  const std::size_t budget = static_cast<std::size_t>(options.max_iter) + 2;

  std::vector<EvalRecord> prior;
  if (options.resume && std::filesystem::exists(ledger_path)) {
    prior = ledger_load(ledger_path);
    if (prior.size() > budget) {
      throw LedgerCorrupt("ledger holds " + std::to_string(prior.size()) +
                          " records but the search budget is " +
                          std::to_string(budget));
    }
  } else {
    truncate_file(ledger_path);
  }

  SearchReport report;
  report.records.reserve(budget);

  // Replays recorded scores through the identical probe sequence, then
  // evaluates fresh probes, appending each record before the next request.
  const auto obtain = [&](double x) -> double {
    const std::size_t position = report.records.size();
    if (position < prior.size()) {
      const EvalRecord& rec = prior[position];
      if (rec.r != x) {
        throw LedgerCorrupt("resumed ledger record " +
                            std::to_string(rec.ordinal) + " has r = " +
                            format_full(rec.r) + ", expected probe " +
                            format_full(x));
      }
      report.records.push_back(rec);
      return rec.score;
    }
    const std::uint64_t attempt_seed = derive_stream_seed(options.seed, position);
    const auto t0 = std::chrono::steady_clock::now();
    const double score = evaluate(spec, x, attempt_seed);
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    const EvalRecord rec =
        make_record(x, score, static_cast<int>(position) + 1, wall, spec);
    ledger_append(ledger_path, rec);
    report.records.push_back(rec);
    return score;
  };

  GssInit init = gss_init(0.0, 1.0);
  GssState state = init.state;
  for (double x : init.probes) gss_supply(state, obtain(x));
  for (int i = 0; i < options.max_iter; ++i) {
    GssStepResult step = gss_step(state);
    state = step.state;
    gss_supply(state, obtain(step.next_probe));
  }
  report.best_r = gss_result(state);
  report.best_score = state.y_c > state.y_d ? state.y_c : state.y_d;
  return report;
}

GridSpec GridSpec::points(std::vector<double> values) {
  if (values.empty()) throw DomainError("point grid needs at least one r");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("grid r values must be in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  GridSpec g;
  g.shape = Shape::kPoints;
  g.r_values = std::move(values);
  return g;
}

GridSpec GridSpec::diagonal(int k) {
  if (k < 1) throw DomainError("diagonal point count must be positive");
  GridSpec g;
  g.shape = Shape::kDiagonal;
  g.diagonal_k = k;
  return g;
}

GridSpec GridSpec::mn(int m_lo, int m_hi, int n_lo, int n_hi) {
  if (m_lo < 1 || m_hi > 10 || m_lo > m_hi || n_lo < 1 || n_hi > 10 ||
      n_lo > n_hi) {
    throw DomainError("M and N ranges must be within 1..10 and non-empty");
  }
  GridSpec g;
  g.shape = Shape::kMn;
  g.m_lo = m_lo;
  g.m_hi = m_hi;
  g.n_lo = n_lo;
  g.n_hi = n_hi;
  return g;
}

namespace {

struct GridPoint {
  double r = 0;
  int m = 0;
  int n = 0;
  bool has_mn = false;
};

std::vector<GridPoint> enumerate_grid(const GridSpec& grid) {
  std::vector<GridPoint> points;
  switch (grid.shape) {
    case GridSpec::Shape::kPoints:
      for (double v : grid.r_values) points.push_back({v});
      break;
    case GridSpec::Shape::kDiagonal:
      for (int i = 1; i <= grid.diagonal_k; ++i) {
        points.push_back({static_cast<double>(i) / grid.diagonal_k});
      }
      break;
    case GridSpec::Shape::kMn:
      for (int m = grid.m_lo; m <= grid.m_hi; ++m) {
        for (int n = grid.n_lo; n <= grid.n_hi; ++n) {
          points.push_back({m / 10.0, m, n, true});
        }
      }
      break;
  }
  return points;
}

}  // namespace

SearchReport run_grid(const EvaluatorSpec& spec, const GridSpec& grid,
                      const GridOptions& options,
                      const std::filesystem::path& ledger_path) {
  const std::vector<GridPoint> points = enumerate_grid(grid);
  if (points.empty()) throw DomainError("grid is empty");
  truncate_file(ledger_path);

  std::vector<EvalRecord> records(points.size());
  const int jobs = std::max(1, options.jobs);

  const auto evaluate_point = [&](std::size_t i) {
    const GridPoint& p = points[i];
    const std::uint64_t attempt_seed = derive_stream_seed(options.seed, i);
    const auto t0 = std::chrono::steady_clock::now();
    const double score =
        evaluate(spec, p.r, attempt_seed,
                 p.has_mn ? std::optional<int>(p.n) : std::nullopt);
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return std::pair<double, double>(score, wall);
  };

  if (jobs == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [score, wall] = evaluate_point(i);
      records[i] = make_record(points[i].r, score, static_cast<int>(i) + 1, wall, spec);
      ledger_append(ledger_path, records[i]);
    }
  } else {
    // Records are appended in completion order; the report keeps grid order.
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    int appended = 0;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= points.size() || failed.load()) return;
          try {
            const auto [score, wall] = evaluate_point(i);
            std::lock_guard<std::mutex> lock(mu);
            records[i] = make_record(points[i].r, score, ++appended, wall, spec);
            ledger_append(ledger_path, records[i]);
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

  SearchReport report;
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (records[i].score > records[best].score) best = i;
  }
  report.best_r = points[best].r;
  report.best_score = records[best].score;
  report.best_m = points[best].m;
  report.best_n = points[best].n;
  report.records = std::move(records);
  return report;
}

}  // namespace rua
