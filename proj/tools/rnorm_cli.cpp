// rnorm: command-line front end for the row-norm, distance and leverage
// estimators and the synthetic benchmark sweep.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 malformed input,
// 3 numerical failure (singular factor).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rnorm/distances.hpp"
#include "rnorm/errors.hpp"
#include "rnorm/io.hpp"
#include "rnorm/leverage.hpp"
#include "rnorm/rownorm.hpp"
#include "rnorm/synth.hpp"
#include "rnorm/version.hpp"

namespace {

using namespace rnorm;

constexpr std::uint64_t kDefaultSeed = 20240601;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct InputOptions {
  std::string path;
  std::string format = "auto";
};

struct WidthOptions {
  std::optional<Index> budget;
  std::optional<Index> m_s;
  std::optional<Index> m_g;
  std::optional<Index> width;
  std::string method = "adaptive";
};

struct CommonOptions {
  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
  bool emit_exact = false;
};

// Resolved widths for one estimator call.
struct Widths {
  Method method = Method::adaptive;
  Index m_s = 0;
  Index m_g = 0;  // JL: projection width
};

Widths resolve_widths(const WidthOptions& w, std::uint64_t seed) {
  Widths out;
  out.method = parse_method(w.method);
  if (out.method == Method::jl) {
    if (w.m_s || w.m_g) throw ParameterError("--m-s/--m-g apply to the adaptive method; use --width or --budget");
    if (w.width) {
      out.m_g = *w.width;
    } else if (w.budget) {
      out.m_g = *w.budget;
    } else {
      throw ParameterError("give --budget or --width");
    }
    return out;
  }
  if (w.width) throw ParameterError("--width applies to the jl method; use --m-s/--m-g or --budget");
  if (w.budget) {
    const SketchPair p = split_budget(*w.budget, seed);
    out.m_s = p.m_s;
    out.m_g = p.m_g;
  } else if (w.m_s && w.m_g) {
    out.m_s = *w.m_s;
    out.m_g = *w.m_g;
  } else {
    throw ParameterError("give --budget, or both --m-s and --m-g");
  }
  return out;
}

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input,-i", in.path, "Matrix file (RNORM-DENSE v1 or Matrix Market)")->required();
  cmd->add_option("--format", in.format, "auto | dense | mtx")->capture_default_str();
}

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->envname("RNORM_SEED")->capture_default_str();
  cmd->add_option("--out,-o", c.out, "Output CSV path, '-' for standard output")->capture_default_str();
  cmd->add_flag("--emit-exact", c.emit_exact, "Append an exact column computed from the materialised matrix");
}

void add_widths(CLI::App* cmd, WidthOptions& w, bool with_method) {
  auto* budget = cmd->add_option("--budget,-b", w.budget, "Total matrix-vector query budget");
  auto* ms = cmd->add_option("--m-s", w.m_s, "Range sketch width (adaptive)");
  auto* mg = cmd->add_option("--m-g", w.m_g, "Residual probe width (adaptive)");
  budget->excludes(ms)->excludes(mg);
  if (with_method) {
    auto* width = cmd->add_option("--width", w.width, "Projection width (jl)");
    budget->excludes(width);
    width->excludes(ms)->excludes(mg);
    cmd->add_option("--method", w.method, "adaptive | jl")
        ->check(CLI::IsMember({"adaptive", "jl"}))
        ->capture_default_str();
  }
}

// Output sink that is either standard output or a file.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw DataError("cannot write '" + path + "'");
    }
    stream().precision(std::numeric_limits<double>::max_digits10);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw DataError("failed writing output");
    }
  }

 private:
  std::ofstream file_;
};

std::string command_line(int argc, char** argv) {
  std::string s = "rnorm";
  for (int k = 1; k < argc; ++k) {
    s += ' ';
    s += argv[k];
  }
  return s;
}

void provenance(std::ostream& out, const std::string& cmd, const std::string& fields) {
  out << "# rnorm " << kVersion << '\n' << "# command: " << cmd << '\n' << "# " << fields << '\n';
}

Vector exact_rows(const LoadedMatrix& m, const OperatorPtr& op) {
  if (const auto* sp = dynamic_cast<const SparseOperator*>(op.get())) {
    const SparseMatrix& a = sp->matrix();
    Vector out(a.rows());
    for (Index i = 0; i < a.rows(); ++i) out(i) = a.row(i).squaredNorm();
    return out;
  }
  return exact_rownorms(m.to_dense());
}

int run_rownorm(const InputOptions& in, const WidthOptions& wo, const CommonOptions& co, const std::string& cmd) {
  const Widths w = resolve_widths(wo, co.seed);
  const LoadedMatrix m = load_matrix(in.path, parse_format(in.format));
  const OperatorPtr op = m.make_operator();
  const EstimateReport r = w.method == Method::adaptive ? estimate_rownorms_adaptive(*op, w.m_s, w.m_g, co.seed)
                                                        : estimate_rownorms_jl(*op, w.m_g, co.seed);
  Vector exact;
  if (co.emit_exact) exact = exact_rows(m, op);

  Sink sink(co.out);
  std::ostream& out = sink.stream();
  std::ostringstream f;
  f << "method=" << to_string(w.method) << " seed=" << co.seed << " rows=" << op->rows() << " cols=" << op->cols()
    << " m_s=" << r.m_s << " m_g=" << r.m_g << " rank_used=" << r.rank_used
    << " queries_forward=" << r.queries_forward << " queries_transpose=" << r.queries_transpose;
  provenance(out, cmd, f.str());
  out << (co.emit_exact ? "i,estimate,exact\n" : "i,estimate\n");
  for (Index i = 0; i < r.estimates.size(); ++i) {
    out << i << ',' << r.estimates(i);
    if (co.emit_exact) out << ',' << exact(i);
    out << '\n';
  }
  sink.close();
  return kOk;
}

int run_distance(const InputOptions& in, const std::string& pairs_path, const WidthOptions& wo,
                 const CommonOptions& co, const std::string& cmd) {
  const Widths w = resolve_widths(wo, co.seed);
  const LoadedMatrix m = load_matrix(in.path, parse_format(in.format));
  const PairSet pairs = pairs_path.empty() ? PairSet::all_pairs(m.rows()) : read_pairs(pairs_path);
  const OperatorPtr op = m.make_operator();
  const DistanceReport r = w.method == Method::adaptive
                               ? estimate_distances_adaptive(*op, pairs, w.m_s, w.m_g, co.seed)
                               : estimate_distances_jl(*op, pairs, w.m_g, co.seed);
  Vector exact;
  if (co.emit_exact) exact = exact_distances(m.to_dense(), pairs);

  Sink sink(co.out);
  std::ostream& out = sink.stream();
  std::ostringstream f;
  f << "method=" << to_string(w.method) << " seed=" << co.seed << " points=" << op->rows() << " dim=" << op->cols()
    << " pairs=" << pairs.size() << " m_s=" << r.m_s << " m_g=" << r.m_g << " rank_used=" << r.rank_used
    << " queries_forward=" << r.queries_forward << " queries_transpose=" << r.queries_transpose;
  provenance(out, cmd, f.str());
  out << (co.emit_exact ? "i,j,estimate,exact\n" : "i,j,estimate\n");
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out << pairs[p].first << ',' << pairs[p].second << ',' << r.estimates(static_cast<Index>(p));
    if (co.emit_exact) out << ',' << exact(static_cast<Index>(p));
    out << '\n';
  }
  sink.close();
  return kOk;
}

int run_leverage(const InputOptions& in, std::optional<Index> r1_opt, const WidthOptions& wo,
                 const CommonOptions& co, const std::string& cmd) {
  const Widths w = resolve_widths(wo, co.seed);
  const LoadedMatrix m = load_matrix(in.path, parse_format(in.format));
  const Index r1 = r1_opt.value_or(default_embedding_rows(m.cols()));
  const LeverageReport r = estimate_leverage_adaptive(m.make_operator(), r1, w.m_s, w.m_g, co.seed);
  Vector exact;
  if (co.emit_exact) exact = exact_leverage(m.to_dense());

  Sink sink(co.out);
  std::ostream& out = sink.stream();
  std::ostringstream f;
  f << "method=adaptive seed=" << co.seed << " rows=" << m.rows() << " cols=" << m.cols() << " r1=" << r.r1
    << " epsilon1=" << r.epsilon1 << " m_s=" << r.m_s << " m_g=" << r.m_g << " rank_used=" << r.rank_used
    << " queries_forward=" << r.queries_forward << " queries_transpose=" << r.queries_transpose;
  provenance(out, cmd, f.str());
  out << (co.emit_exact ? "row,theta_estimate,theta_exact\n" : "row,theta_estimate\n");
  for (Index i = 0; i < r.scores.size(); ++i) {
    out << i << ',' << r.scores(i);
    if (co.emit_exact) out << ',' << exact(i);
    out << '\n';
  }
  sink.close();
  std::cout << std::setprecision(10) << "sum_theta_estimate=" << r.total;
  if (co.emit_exact) std::cout << " sum_theta_exact=" << exact.sum();
  std::cout << '\n';
  return kOk;
}

std::string default_summary_path(const std::string& out) {
  if (out == "-") return "summary.csv";
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + ".summary" + p.extension().string())).string();
}

int run_sweep_cmd(SweepConfig cfg, const std::string& out_path, std::string summary_path, const std::string& cmd) {
  cfg.validate();
  const auto records = run_sweep(cfg);
  const auto rows = summarize(records);
  if (summary_path.empty()) summary_path = default_summary_path(out_path);

  std::ostringstream f;
  f << "d=" << cfg.d << " c=";
  for (std::size_t k = 0; k < cfg.cs.size(); ++k) f << (k ? ";" : "") << cfg.cs[k];
  f << " budgets=";
  for (std::size_t k = 0; k < cfg.budgets.size(); ++k) f << (k ? ";" : "") << cfg.budgets[k];
  std::uint64_t queries = 0;
  for (const ErrorRecord& r : records) queries += r.queries;
  f << " reps=" << cfg.repetitions << " matrix_seed=" << cfg.matrix_seed << " seed=" << cfg.seed
    << " split=m/4 queries_total=" << queries;

  Sink rec(out_path);
  provenance(rec.stream(), cmd, f.str());
  write_records_csv(rec.stream(), records);
  rec.close();
  Sink sum(summary_path);
  provenance(sum.stream(), cmd, f.str());
  write_summary_csv(sum.stream(), rows);
  sum.close();
  if (out_path != "-") std::cout << "wrote " << records.size() << " records to " << out_path << " and summary to " << summary_path << '\n';
  return kOk;
}

int run_oracle(const InputOptions& in, const std::string& quantity, const std::string& pairs_path,
               const std::string& out_path, const std::string& cmd) {
  const LoadedMatrix m = load_matrix(in.path, parse_format(in.format));
  Sink sink(out_path);
  std::ostream& out = sink.stream();
  provenance(out, cmd, "exact quantity=" + quantity + " rows=" + std::to_string(m.rows()) + " cols=" + std::to_string(m.cols()));
  if (quantity == "rownorm") {
    const Vector x = exact_rows(m, m.make_operator());
    out << "i,exact\n";
    for (Index i = 0; i < x.size(); ++i) out << i << ',' << x(i) << '\n';
  } else if (quantity == "leverage") {
    const Vector x = exact_leverage(m.to_dense());
    out << "row,theta_exact\n";
    for (Index i = 0; i < x.size(); ++i) out << i << ',' << x(i) << '\n';
  } else {
    const PairSet pairs = pairs_path.empty() ? PairSet::all_pairs(m.rows()) : read_pairs(pairs_path);
    const Vector x = exact_distances(m.to_dense(), pairs);
    out << "i,j,exact\n";
    for (std::size_t p = 0; p < pairs.size(); ++p)
      out << pairs[p].first << ',' << pairs[p].second << ',' << x(static_cast<Index>(p)) << '\n';
  }
  sink.close();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized row-norm, distance and leverage-score estimation", "rnorm"};
  app.set_version_flag("--version", rnorm::kVersion);
  app.require_subcommand(1, 1);
  const std::string cmd = command_line(argc, argv);

  InputOptions row_in, dist_in, lev_in, orc_in;
  WidthOptions row_w, dist_w, lev_w;
  CommonOptions row_c, dist_c, lev_c;

  auto* rownorm = app.add_subcommand("rownorm", "Estimate squared Euclidean row norms");
  add_input(rownorm, row_in);
  add_widths(rownorm, row_w, true);
  add_common(rownorm, row_c);

  std::string dist_pairs;
  auto* distance = app.add_subcommand("distance", "Estimate squared distances between rows");
  add_input(distance, dist_in);
  distance->add_option("--pairs", dist_pairs, "CSV of 0-based 'i,j' pairs (default: all pairs)");
  add_widths(distance, dist_w, true);
  add_common(distance, dist_c);

  std::optional<Index> r1;
  auto* leverage = app.add_subcommand("leverage", "Estimate leverage scores of a tall full-rank matrix");
  add_input(leverage, lev_in);
  leverage->add_option("--r1", r1, "Rows of the Gaussian subspace embedding (default max(4d, d + 40))");
  add_widths(leverage, lev_w, false);
  add_common(leverage, lev_c);

  SweepConfig sweep_cfg;
  std::string sweep_out = "sweep.csv", sweep_summary;
  auto* sweep = app.add_subcommand("sweep", "Error-vs-budget sweep on synthetic power-law matrices");
  sweep->add_option("--d", sweep_cfg.d, "Matrix dimension")->capture_default_str();
  sweep->add_option("--c", sweep_cfg.cs, "Spectral decay exponents")->delimiter(',')->capture_default_str();
  sweep->add_option("--budgets", sweep_cfg.budgets, "Query budgets")->delimiter(',')->capture_default_str();
  sweep->add_option("--reps", sweep_cfg.repetitions, "Repetitions per cell")->capture_default_str();
  sweep->add_option("--matrix-seed", sweep_cfg.matrix_seed, "Seed of the test matrices")->capture_default_str();
  sweep->add_option("--seed", sweep_cfg.seed, "Base estimator seed")->envname("RNORM_SEED")->capture_default_str();
  sweep->add_option("--jobs,-j", sweep_cfg.jobs, "Worker threads")->envname("RNORM_JOBS")->capture_default_str();
  sweep->add_option("--out,-o", sweep_out, "Per-repetition records CSV")->capture_default_str();
  sweep->add_option("--summary", sweep_summary, "Summary CSV (default <out>.summary.csv)");

  std::string quantity = "rownorm", orc_pairs, orc_out = "-";
  auto* oracle = app.add_subcommand("oracle", "Exact reference values from the materialised matrix");
  add_input(oracle, orc_in);
  oracle->add_option("--quantity", quantity, "rownorm | leverage | distance")
      ->check(CLI::IsMember({"rownorm", "leverage", "distance"}))
      ->capture_default_str();
  oracle->add_option("--pairs", orc_pairs, "Pairs CSV for --quantity distance");
  oracle->add_option("--out,-o", orc_out, "Output CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*rownorm) return run_rownorm(row_in, row_w, row_c, cmd);
    if (*distance) return run_distance(dist_in, dist_pairs, dist_w, dist_c, cmd);
    if (*leverage) return run_leverage(lev_in, r1, lev_w, lev_c, cmd);
    if (*sweep) return run_sweep_cmd(sweep_cfg, sweep_out, sweep_summary, cmd);
    if (*oracle) return run_oracle(orc_in, quantity, orc_pairs, orc_out, cmd);
  } catch (const ParameterError& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kData;
  } catch (const DimensionError& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kData;
  } catch (const InputError& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kData;
  } catch (const FactorError& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "rnorm: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
