#include "spikelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "spikelab/error.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/simulate.hpp"
#include "spikelab/theory.hpp"

namespace spikelab {

namespace {

[[noreturn]] void invalid_plan(const std::string& m) { throw Error(ErrorKind::InvalidPlan, m); }

void validate_plan(const SweepPlan& plan) {
  if (plan.grid.empty()) invalid_plan("grid is empty");
  for (std::size_t i = 1; i < plan.grid.size(); ++i)
    if (!(plan.grid[i] > plan.grid[i - 1])) invalid_plan("grid must be strictly increasing");
  for (double g : plan.grid)
    if (!std::isfinite(g)) invalid_plan("grid values must be finite");
  if (plan.trials == 1) invalid_plan("trials must be 0 (theory only) or at least 2");
  if (plan.gamma_tracks_c && plan.axis == SweepAxis::Gamma)
    invalid_plan("gamma_tracks_c cannot be combined with a gamma axis");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real("csv", s);
}

std::optional<std::int64_t> opt_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_integer("csv", s);
}

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return format_real(*v);
  else
    return fmt::format("{}", *v);
}

void write_row(std::ostream& os, const SweepRow& r) {
  os << format_real(r.axis_value) << ',' << format_real(r.c) << ',' << cell(r.d) << ',' << cell(r.n) << ','
     << cell(r.empirical_mean) << ',' << cell(r.empirical_stderr) << ',' << cell(r.theory_finite_d) << ','
     << cell(r.theory_asymptotic) << ',' << cell(r.bias) << ',' << cell(r.variance) << ',' << cell(r.data_noise)
     << ',' << cell(r.target_alignment) << ',' << cell(r.beneficial_flag) << '\n';
}

}  // namespace

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::CFixedD: return "c-fixed-d";
    case SweepAxis::CFixedN: return "c-fixed-n";
    case SweepAxis::Ratio: return "ratio";
    case SweepAxis::Gamma: return "gamma";
  }
  return "unknown";
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "c-fixed-d" || s == "c") return SweepAxis::CFixedD;
  if (s == "c-fixed-n") return SweepAxis::CFixedN;
  if (s == "ratio") return SweepAxis::Ratio;
  if (s == "gamma") return SweepAxis::Gamma;
  invalid_plan(fmt::format("axis '{}' is not one of c-fixed-d, c-fixed-n, ratio, gamma", s));
}

const std::vector<std::string>& plan_keys() {
  static const std::vector<std::string> keys = {"axis", "grid", "trials", "master_seed", "emit_terms", "gamma_tracks_c"};
  return keys;
}

SweepPlan plan_from_entries(const Entries& e) {
  SweepPlan p;
  p.base = spec_from_entries(e);
  if (auto it = e.find("axis"); it != e.end()) p.axis = parse_axis(it->second);
  if (auto it = e.find("grid"); it != e.end()) p.grid = parse_real_list("grid", it->second);
  if (auto it = e.find("trials"); it != e.end()) {
    const auto t = parse_integer("trials", it->second);
    if (t < 0) invalid_plan("trials must be non-negative");
    p.trials = static_cast<std::size_t>(t);
  }
  if (auto it = e.find("master_seed"); it != e.end()) p.master_seed = parse_seed("master_seed", it->second);
  if (auto it = e.find("emit_terms"); it != e.end()) p.emit_terms = parse_bool("emit_terms", it->second);
  if (auto it = e.find("gamma_tracks_c"); it != e.end()) p.gamma_tracks_c = parse_bool("gamma_tracks_c", it->second);
  return p;
}

ProblemSpec grid_spec(const SweepPlan& plan, std::size_t i) {
  if (i >= plan.grid.size()) invalid_plan("grid index out of range");
  const double x = plan.grid[i];
  SpecInput s = plan.base;
  switch (plan.axis) {
    case SweepAxis::CFixedD:
      if (!(x > 0.0)) invalid_plan("c grid values must be positive");
      if (s.d) {
        const auto n = std::llround(static_cast<double>(*s.d) / x);
        if (n < 1) invalid_plan(fmt::format("c = {} leaves no samples at d = {}", x, *s.d));
        s.n = n;
        s.c.reset();
      } else {
        if (s.n) invalid_plan("a fixed-d sweep needs d, not n");
        s.c = x;
      }
      break;
    case SweepAxis::CFixedN:
      if (!(x > 0.0)) invalid_plan("c grid values must be positive");
      if (s.n) {
        const auto d = std::llround(static_cast<double>(*s.n) * x);
        if (d < 1) invalid_plan(fmt::format("c = {} leaves no features at n = {}", x, *s.n));
        s.d = d;
        s.c.reset();
      } else {
        if (s.d) invalid_plan("a fixed-n sweep needs n, not d");
        s.c = x;
      }
      break;
    case SweepAxis::Ratio:
      s.alpha_z = x * s.alpha_a;
      break;
    case SweepAxis::Gamma:
      if (!(x >= 0.0)) invalid_plan("gamma grid values must be non-negative");
      s.scaling = OperatorNorm{x};
      break;
  }
  ProblemSpec spec = resolve_spec(s);
  if (plan.gamma_tracks_c) {
    s = to_input(spec);
    s.scaling = OperatorNorm{spec.c};
    s.theta2_test.reset();
    spec = resolve_spec(s);
  }
  try {
    branch_for(spec.c);
  } catch (const Error& e) {
    invalid_plan(fmt::format("grid point {} (c = {}): {}", x, spec.c, e.what()));
  }
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
  validate_plan(plan);
  std::vector<ProblemSpec> specs;
  specs.reserve(plan.grid.size());
  for (std::size_t i = 0; i < plan.grid.size(); ++i) {
    specs.push_back(grid_spec(plan, i));
    if (plan.trials > 0 && !specs.back().has_dimensions())
      throw Error(ErrorKind::MissingDimension, "simulated sweeps need d and n");
  }

  std::vector<SweepRow> rows;
  rows.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ProblemSpec& spec = specs[i];
    SweepRow r;
    r.axis_value = plan.grid[i];
    r.c = spec.c;
    r.d = spec.d;
    r.n = spec.n;
    const RiskDecomposition asym = risk_general(spec, false);
    r.theory_asymptotic = asym.excess;
    RiskDecomposition terms = asym;
    if (spec.d) {
      terms = risk_general(spec, true);
      r.theory_finite_d = terms.excess;
    }
    if (plan.emit_terms) {
      r.bias = terms.bias;
      r.variance = terms.variance;
      r.data_noise = terms.data_noise;
      r.target_alignment = terms.target_alignment;
    }
    r.beneficial_flag = alignment_coefficient(spec, false) < 0.0 ? 1 : 0;
    if (plan.trials > 0) {
      MCOptions opt;
      opt.threads = plan.threads;
      const MCEstimate mc = monte_carlo_risk(spec, plan.trials, derive_seed(plan.master_seed, i), opt);
      r.empirical_mean = mc.mean;
      r.empirical_stderr = mc.std_error;
    }
    rows.push_back(r);
  }
  return rows;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "axis_value",       "c",    "d",        "n",          "empirical_mean",   "empirical_stderr", "theory_finite_d",
      "theory_asymptotic", "bias", "variance", "data_noise", "target_alignment", "beneficial_flag",
  };
  return cols;
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) write_row(os, r);
}

std::vector<SweepRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::MissingColumns, "CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != csv_columns())
    throw Error(ErrorKind::MissingColumns, fmt::format("unexpected CSV header '{}'", line));
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != csv_columns().size())
      throw Error(ErrorKind::MissingColumns, fmt::format("row has {} fields, expected {}", f.size(), csv_columns().size()));
    SweepRow r;
    r.axis_value = parse_real("axis_value", f[0]);
    r.c = parse_real("c", f[1]);
    r.d = opt_int(f[2]);
    r.n = opt_int(f[3]);
    r.empirical_mean = opt_real(f[4]);
    r.empirical_stderr = opt_real(f[5]);
    r.theory_finite_d = opt_real(f[6]);
    r.theory_asymptotic = opt_real(f[7]);
    r.bias = opt_real(f[8]);
    r.variance = opt_real(f[9]);
    r.data_noise = opt_real(f[10]);
    r.target_alignment = opt_real(f[11]);
    if (auto v = opt_int(f[12])) r.beneficial_flag = static_cast<int>(*v);
    rows.push_back(r);
  }
  return rows;
}

CompareReport compare_report(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorKind::MissingColumns, "no rows to compare");
  CompareReport rep;
  rep.z.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.empirical_mean || !r.empirical_stderr || !r.theory_finite_d)
      throw Error(ErrorKind::MissingColumns,
                  fmt::format("row {} lacks empirical_mean, empirical_stderr or theory_finite_d", i));
    const double diff = *r.empirical_mean - *r.theory_finite_d;
    double z;
    if (*r.empirical_stderr > 0.0)
      z = diff / *r.empirical_stderr;
    else
      z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    rep.z.push_back(z);
    if (std::abs(z) > rep.max_abs_z || i == 0) {
      rep.max_abs_z = std::abs(z);
      rep.worst_point = i;
    }
  }
  std::vector<double> a(rep.z.size());
  std::transform(rep.z.begin(), rep.z.end(), a.begin(), [](double z) { return std::abs(z); });
  std::sort(a.begin(), a.end());
  const std::size_t m = a.size() / 2;
  rep.median_abs_z = a.size() % 2 ? a[m] : 0.5 * (a[m - 1] + a[m]);
  rep.pass = rep.max_abs_z <= 4.0 && rep.median_abs_z <= 2.0;
  return rep;
}

std::vector<std::pair<std::string, SweepPlan>> validation_plans(std::size_t trials, std::uint64_t master_seed,
                                                                unsigned threads) {
  std::vector<std::pair<std::string, SweepPlan>> plans;
  const struct {
    const char* name;
    bool frobenius;
    double align2;
  } cases[] = {
      {"operator-aligned", false, 1.0},
      {"operator-orthogonal", false, 0.0},
      {"frobenius-aligned", true, 1.0},
      {"frobenius-orthogonal", true, 0.0},
  };
  std::uint64_t idx = 0;
  for (const auto& cs : cases) {
    SweepPlan p;
    p.base.d = 1000;
    p.base.tau2 = 1.0;
    p.base.tau_eps2 = 1.0;
    p.base.alpha_z = 1.0;
    p.base.alpha_a = 1.0;
    p.base.beta_norm2 = 1.0;
    p.base.align2 = cs.align2;
    if (cs.frobenius) {
      p.base.scaling = FrobeniusNorm{};
    } else {
      p.base.scaling = OperatorNorm{1.0};
      p.gamma_tracks_c = true;
    }
    p.axis = SweepAxis::CFixedD;
    p.grid = {0.5, 2.0, 4.0, 8.0};
    p.trials = trials;
    p.master_seed = derive_seed(master_seed, idx++);
    p.threads = threads;
    plans.emplace_back(cs.name, p);
  }
  return plans;
}

ValidationResult run_validation(std::size_t trials, std::uint64_t master_seed, unsigned threads) {
  ValidationResult v;
  std::vector<SweepRow> all;
  for (auto& [name, plan] : validation_plans(trials, master_seed, threads)) {
    ValidationSeries s{name, run_sweep(plan)};
    all.insert(all.end(), s.rows.begin(), s.rows.end());
    v.series.push_back(std::move(s));
  }
  v.report = compare_report(all);
  return v;
}

void write_validation_csv(std::ostream& os, const ValidationResult& v) {
  os << "series";
  for (const auto& c : csv_columns()) os << ',' << c;
  os << '\n';
  for (const auto& s : v.series)
    for (const auto& r : s.rows) {
      os << s.name << ',';
      write_row(os, r);
    }
}

}  // namespace spikelab
