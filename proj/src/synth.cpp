#include "rnorm/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"
#include "rnorm/rownorm.hpp"

namespace rnorm {

std::shared_ptr<const Matrix> make_powerlaw_matrix(const SpectrumSpec& spec) {
  if (spec.d < 2) throw ParameterError("power-law matrix needs d >= 2");
  if (!(spec.c >= 0.0) || !std::isfinite(spec.c)) throw ParameterError("decay exponent c must be >= 0");

  const Matrix gaussian = gaussian_block(spec.d, spec.d, spec.seed, streams::kRotation);
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ();
  for (Index j = 0; j < spec.d; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }

  Vector spectrum(spec.d);
  for (Index i = 0; i < spec.d; ++i) spectrum[i] = std::pow(static_cast<double>(i + 1), -spec.c);

  Matrix a = q * spectrum.asDiagonal() * q.transpose();
  // Symmetrise exactly; the product above is symmetric only up to rounding.
  Matrix sym = 0.5 * (a + a.transpose());
  return std::make_shared<const Matrix>(std::move(sym));
}

const char* to_string(Method m) { return m == Method::adaptive ? "adaptive" : "jl"; }

Method parse_method(const std::string& name) {
  if (name == "adaptive") return Method::adaptive;
  if (name == "jl") return Method::jl;
  throw ParameterError("unknown method '" + name + "' (expected adaptive or jl)");
}

void SweepConfig::validate() const {
  if (d < 2) throw ParameterError("sweep dimension d must be at least 2");
  if (cs.empty()) throw ParameterError("sweep needs at least one decay exponent");
  if (budgets.empty()) throw ParameterError("sweep needs at least one budget");
  if (repetitions < 1) throw ParameterError("sweep needs at least one repetition");
  for (double c : cs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("decay exponents must be >= 0");
  }
  for (Index b : budgets) {
    if (b / 4 < 1) throw ParameterError("budget " + std::to_string(b) + " is too small to split in four");
    if (b / 4 >= d) throw ParameterError("budget " + std::to_string(b) + " is too large for d=" + std::to_string(d));
  }
}

double max_elementwise_rel_error(const Vector& estimate, const Vector& exact) {
  if (estimate.size() != exact.size()) throw DimensionError("error metric: size mismatch");
  double worst = 0.0;
  for (Index i = 0; i < exact.size(); ++i) {
    if (exact[i] > 0.0) worst = std::max(worst, std::abs(estimate[i] - exact[i]) / exact[i]);
  }
  return worst;
}

double frobenius_rel_error(const Vector& estimate, const Vector& exact) {
  if (estimate.size() != exact.size()) throw DimensionError("error metric: size mismatch");
  const double truth = exact.sum();
  if (!(truth > 0.0)) return 0.0;
  return std::abs(estimate.sum() - truth) / truth;
}

namespace {

struct Cell {
  std::size_t c_index;
  std::size_t budget_index;
  Index rep;
  Method method;
};

void run_in_pool(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          task(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<ErrorRecord> run_sweep(const SweepConfig& config) {
  config.validate();

  std::vector<std::shared_ptr<const Matrix>> matrices(config.cs.size());
  std::vector<Vector> exact(config.cs.size());
  run_in_pool(config.cs.size(), config.jobs, [&](std::size_t k) {
    matrices[k] = make_powerlaw_matrix({config.d, config.cs[k], config.matrix_seed});
    exact[k] = exact_rownorms(*matrices[k]);
  });

  std::vector<Cell> cells;
  for (std::size_t ci = 0; ci < config.cs.size(); ++ci)
    for (std::size_t bi = 0; bi < config.budgets.size(); ++bi)
      for (Index rep = 0; rep < config.repetitions; ++rep)
        for (Method m : {Method::adaptive, Method::jl}) cells.push_back({ci, bi, rep, m});

  std::vector<ErrorRecord> records(cells.size());
  run_in_pool(cells.size(), config.jobs, [&](std::size_t k) {
    const Cell& cell = cells[k];
    const Index budget = config.budgets[cell.budget_index];
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(cell.rep);
    const DenseOperator op(matrices[cell.c_index]);

    EstimateReport report;
    if (cell.method == Method::adaptive) {
      const SketchPair split = split_budget(budget, seed);
      report = estimate_rownorms_adaptive(op, split.m_s, split.m_g, seed);
    } else {
      report = estimate_rownorms_jl(op, budget, seed);
    }

    ErrorRecord& rec = records[k];
    rec.method = cell.method;
    rec.c = config.cs[cell.c_index];
    rec.d = config.d;
    rec.budget = budget;
    rec.seed = seed;
    rec.max_elementwise_rel_error = max_elementwise_rel_error(report.estimates, exact[cell.c_index]);
    rec.frobenius_rel_error = frobenius_rel_error(report.estimates, exact[cell.c_index]);
    rec.wall_time_s = report.wall_time_s;
    rec.queries = op.meter().total();
  });

  std::stable_sort(records.begin(), records.end(), [](const ErrorRecord& x, const ErrorRecord& y) {
    return std::tie(x.c, x.budget, x.seed, x.method) < std::tie(y.c, y.budget, y.seed, y.method);
  });
  return records;
}

std::vector<ErrorRecord> select_records(std::span<const ErrorRecord> records, Method method, double c) {
  std::vector<ErrorRecord> out;
  for (const auto& r : records) {
    if (r.method == method && r.c == c) out.push_back(r);
  }
  return out;
}

double fit_loglog_slope(std::span<const ErrorRecord> records, Metric metric) {
  if (records.empty()) throw ParameterError("slope fit needs records");
  std::map<Index, std::pair<double, Index>> per_budget;
  for (const auto& r : records) {
    if (r.method != records.front().method || r.c != records.front().c) {
      throw ParameterError("slope fit needs records of a single method and decay exponent");
    }
    if (r.budget < 1) throw ParameterError("slope fit needs positive budgets");
    auto& [sum, count] = per_budget[r.budget];
    sum += r.error(metric);
    ++count;
  }
  if (per_budget.size() < 3) throw ParameterError("slope fit needs at least 3 distinct budgets");

  std::vector<double> xs, ys;
  for (const auto& [budget, acc] : per_budget) {
    const double mean = acc.first / static_cast<double>(acc.second);
    if (!(mean > 0.0)) throw ParameterError("slope fit needs positive mean errors");
    xs.push_back(std::log(static_cast<double>(budget)));
    ys.push_back(std::log(mean));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

namespace {

struct Stats {
  double mean = 0.0, std = 0.0, median = 0.0;
};

Stats describe(std::vector<double> v) {
  Stats s;
  const double n = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return s;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const ErrorRecord> records) {
  using Key = std::tuple<int, double, Index>;
  std::map<Key, std::vector<const ErrorRecord*>> groups;
  for (const auto& r : records) groups[{static_cast<int>(r.method), r.c, r.budget}].push_back(&r);

  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) {
    std::vector<double> max_elem, frob;
    for (const auto* r : group) {
      max_elem.push_back(r->max_elementwise_rel_error);
      frob.push_back(r->frobenius_rel_error);
    }
    const Stats me = describe(max_elem);
    const Stats fr = describe(frob);
    SummaryRow row;
    row.method = group.front()->method;
    row.c = group.front()->c;
    row.d = group.front()->d;
    row.budget = group.front()->budget;
    row.reps = static_cast<Index>(group.size());
    row.max_elem_mean = me.mean;
    row.max_elem_std = me.std;
    row.max_elem_median = me.median;
    row.frob_mean = fr.mean;
    row.frob_std = fr.std;
    row.frob_median = fr.median;
    out.push_back(row);
  }
  return out;
}

void write_records_csv(std::ostream& out, std::span<const ErrorRecord> records) {
  const auto precision = out.precision(12);
  out << "method,c,d,budget,seed,max_elem_err,frob_err,wall_time_s\n";
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.c << ',' << r.d << ',' << r.budget << ',' << r.seed << ','
        << r.max_elementwise_rel_error << ',' << r.frobenius_rel_error << ',' << r.wall_time_s << '\n';
  }
  out.precision(precision);
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  const auto precision = out.precision(12);
  out << "method,c,d,budget,reps,max_elem_mean,max_elem_std,max_elem_median,frob_mean,frob_std,frob_median\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.c << ',' << r.d << ',' << r.budget << ',' << r.reps << ','
        << r.max_elem_mean << ',' << r.max_elem_std << ',' << r.max_elem_median << ',' << r.frob_mean << ','
        << r.frob_std << ',' << r.frob_median << '\n';
  }
  out.precision(precision);
}

}  // namespace rnorm
