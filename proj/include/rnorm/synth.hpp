#pragma once

// Synthetic power-law test matrices and the error-vs-budget sweep engine.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnorm/operator.hpp"

namespace rnorm {

/// A = Q diag(1^-c, 2^-c, ..., d^-c) Q^T with Q a seeded random rotation.
struct SpectrumSpec {
  Index d = 1000;
  double c = 1.0;
  std::uint64_t seed = 7;
};

/// Dense symmetric matrix with the requested spectrum. Q is the orthogonal
/// factor of a seeded Gaussian d x d matrix with the signs fixed so that R
/// has a positive diagonal. Throws ParameterError if d < 2 or c < 0.
std::shared_ptr<const Matrix> make_powerlaw_matrix(const SpectrumSpec& spec);

enum class Method { adaptive, jl };
enum class Metric { max_elementwise, frobenius };
enum class SplitPolicy { equal_quarters };

const char* to_string(Method m);
Method parse_method(const std::string& name);

struct SweepConfig {
  Index d = 1000;
  std::vector<double> cs{0.5, 1.0, 1.5, 2.0};
  std::vector<Index> budgets{64, 128, 256, 512};
  Index repetitions = 10;
  std::uint64_t matrix_seed = 7;  // one matrix per c
  std::uint64_t seed = 1;  // repetition k uses seed + k
  SplitPolicy split = SplitPolicy::equal_quarters;
  unsigned jobs = 1;

  /// Throws ParameterError on empty lists, d < 2, negative c, or a budget
  /// whose adaptive split is empty or not below d.
  void validate() const;
};

struct ErrorRecord {
  Method method = Method::adaptive;
  double c = 0.0;
  Index d = 0;
  Index budget = 0;
  std::uint64_t seed = 0;
  double max_elementwise_rel_error = 0.0;
  double frobenius_rel_error = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t queries = 0;  // meter reading, forward + transpose

  double error(Metric metric) const {
    return metric == Metric::frobenius ? frobenius_rel_error : max_elementwise_rel_error;
  }
};

/// max_i |x~_i - x_i| / x_i over rows with x_i > 0.
double max_elementwise_rel_error(const Vector& estimate, const Vector& exact);
/// |sum x~ - sum x| / sum x.
double frobenius_rel_error(const Vector& estimate, const Vector& exact);

/// One record per (c, budget, seed, method), sorted by that key with
/// adaptive before jl. Cells run on `config.jobs` threads; output order and
/// values do not depend on the thread count.
std::vector<ErrorRecord> run_sweep(const SweepConfig& config);

/// Records for one method and one c.
std::vector<ErrorRecord> select_records(std::span<const ErrorRecord> records, Method method, double c);

/// Least-squares slope of log(mean error) against log(budget), one point per
/// budget. Records must share method and c; needs at least 3 budgets.
double fit_loglog_slope(std::span<const ErrorRecord> records, Metric metric);

struct SummaryRow {
  Method method = Method::adaptive;
  double c = 0.0;
  Index d = 0;
  Index budget = 0;
  Index reps = 0;
  double max_elem_mean = 0.0, max_elem_std = 0.0, max_elem_median = 0.0;
  double frob_mean = 0.0, frob_std = 0.0, frob_median = 0.0;
};

/// Mean, sample standard deviation and median per (method, c, budget).
std::vector<SummaryRow> summarize(std::span<const ErrorRecord> records);

void write_records_csv(std::ostream& out, std::span<const ErrorRecord> records);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace rnorm
