#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rua {

/// Shell command evaluator. The template must contain {r} (replaced with the
/// probe value at full precision) and may contain {seed} and, for 2d grid
/// runs, {n}. The score is the last non-empty line of standard output parsed
/// as a decimal real; a non-zero exit is CommandFailed. timeout_s 0 disables
/// the timeout.
struct ExternalCommand {
  std::string command_template;
  double timeout_s = 0.0;
};

enum class SurfaceKind { kQuadratic, kTent };

/// Synthetic unimodal score surface for end-to-end tests without training.
///   quadratic: height * (1 - ((r - peak)/width)^2)
///   tent:      height - height*|r - peak|/width on the left of the peak and
///              twice that slope on the right (asymmetric on purpose)
/// both clipped to [0, 1] before noise. Gaussian noise (sigma) is seeded per
/// (r, noise_seed, attempt seed), so repeated evaluation at the same point
/// with the same seeds returns the same value.
struct SyntheticSurface {
  SurfaceKind kind = SurfaceKind::kQuadratic;
  double peak_r = 0.5;
  double height = 0.9;
  double width = 0.4;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

using EvaluatorSpec = std::variant<ExternalCommand, SyntheticSurface>;

/// One f(r) call. Throws CommandFailed, ParseError, Timeout, DomainError.
/// `n` is substituted for {n} when present (2d grid runs).
double evaluate(const EvaluatorSpec& spec, double r, std::uint64_t attempt_seed,
                std::optional<int> n = std::nullopt);

/// Stable one-line description used in ledger records.
std::string evaluator_identity(const EvaluatorSpec& spec);

/// One persisted evaluation. Serialized as one JSON object per ledger line
/// with exactly the keys r, score, ordinal, wall_time_s, evaluator,
/// timestamp.
struct EvalRecord {
  double r = 0;
  double score = 0;
  int ordinal = 0;  // consecutive from 1 within one ledger
  double wall_time_s = 0;
  std::string evaluator;
  std::string timestamp;  // ISO-8601 UTC
};

/// Appends one record and flushes before returning. Throws IoError.
void ledger_append(const std::filesystem::path& path, const EvalRecord& record);

/// Loads all records, validating JSON shape and ordinal continuity.
/// An empty file yields an empty list. Throws IoError, LedgerCorrupt.
std::vector<EvalRecord> ledger_load(const std::filesystem::path& path);

struct SearchReport {
  double best_r = 0;
  double best_score = 0;
  int best_m = 0;  // set only by 2d grid runs
  int best_n = 0;
  std::vector<EvalRecord> records;
};

struct GssSearchOptions {
  int max_iter = 4;
  bool resume = false;
  std::uint64_t seed = 0;  // root of the per-evaluation attempt seeds
};

/// Golden-section search for the best r in [0, 1] against `spec`. Every
/// record is appended to the ledger before the next probe is requested, so
/// an interrupted run can be resumed: with resume=true the recorded scores
/// replay through the identical probe sequence and evaluation continues
/// where it stopped. A fresh run (resume=false) truncates the ledger.
/// Exactly max_iter + 2 records exist on completion.
SearchReport run_gss_search(const EvaluatorSpec& spec, const GssSearchOptions& options,
                            const std::filesystem::path& ledger_path);

/// Grid over r. Exactly one of the three shapes is active:
///   points:   explicit r values, evaluated in ascending order
///   diagonal: r in {1/k, 2/k, ..., 1}, ascending
///   mn:       the legacy two-parameter grid, row-major (M outer, N inner),
///             evaluated at r = M/10 with {n} = N
struct GridSpec {
  enum class Shape { kPoints, kDiagonal, kMn };
  Shape shape = Shape::kPoints;
  std::vector<double> r_values;      // kPoints
  int diagonal_k = 0;                // kDiagonal
  int m_lo = 1, m_hi = 10;           // kMn, inclusive, within 1..10
  int n_lo = 1, n_hi = 10;

  static GridSpec points(std::vector<double> values);
  static GridSpec diagonal(int k);
  static GridSpec mn(int m_lo, int m_hi, int n_lo, int n_hi);
};

struct GridOptions {
  int jobs = 1;
  std::uint64_t seed = 0;
};

/// Evaluates every grid point, recording all of them, and reports the argmax
/// with ties broken toward the smaller r (then smaller M, then N). With
/// jobs > 1 evaluations run concurrently; records are appended in completion
/// order and the report is re-sorted to grid order. Grid ledgers are always
/// written fresh.
SearchReport run_grid(const EvaluatorSpec& spec, const GridSpec& grid,
                      const GridOptions& options,
                      const std::filesystem::path& ledger_path);

}  // namespace rua
