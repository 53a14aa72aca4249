#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "spikelab/config.hpp"
#include "spikelab/error.hpp"
#include "spikelab/experiments.hpp"
#include "spikelab/linalg.hpp"
#include "spikelab/model.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/regime.hpp"
#include "spikelab/rmt.hpp"
#include "spikelab/simulate.hpp"
#include "spikelab/theory.hpp"
#include "spikelab/thresholds.hpp"

namespace spikelab::cli {

namespace {

std::string dashed(std::string key) {
  for (auto& ch : key)
    if (ch == '_') ch = '-';
  return key;
}

// Options of one subcommand, keyed by field name; config files use the same keys.
class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "flat key = value file; flags take precedence");
  }

  void option(const std::string& key, const std::string& desc) {
    opts_[key] = app_->add_option("--" + dashed(key), values_[key], key + ": " + desc);
  }
  void option(const std::string& key, const std::string& alias, const std::string& desc) {
    opts_[key] = app_->add_option("--" + dashed(key) + ",--" + alias, values_[key], key + ": " + desc);
  }
  void flag(const std::string& key, const std::string& desc) {
    opts_[key] = app_->add_flag("--" + dashed(key), flags_[key], key + ": " + desc);
  }
  void spec_options() {
    option("d", "ambient dimension");
    option("n", "number of training samples");
    option("c", "aspect ratio d/n");
    option("scaling", "spike scaling: operator, frobenius or explicit");
    option("gamma", "operator-norm spike ratio, theta2 = gamma * tau2");
    option("theta2", "training spike variance (explicit scaling)");
    option("tau2", "training bulk variance");
    option("tau_eps2", "training label-noise variance");
    option("theta2_test", "test spike variance");
    option("tau2_test", "test bulk variance");
    option("tau_eps2_test", "test label-noise variance");
    option("alpha", "sets alpha_z = alpha_a");
    option("alpha_z", "training spike coefficient of the target");
    option("alpha_a", "training bulk coefficient of the target");
    option("alpha_z_test", "test spike coefficient of the target");
    option("alpha_a_test", "test bulk coefficient of the target");
    option("beta_norm2", "squared norm of beta*");
    option("align2", "squared alignment (beta*^T u)^2");
  }

  Entries entries() const {
    Entries e;
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw Error(ErrorKind::InvalidSpec, fmt::format("cannot read config file '{}'", config_path_));
      CLI::ConfigTOML reader;
      for (const auto& item : reader.from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty())
          throw Error(ErrorKind::InvalidSpec, fmt::format("config sections are not supported ('{}')", item.fullname()));
        if (!opts_.count(item.name))
          throw Error(ErrorKind::InvalidSpec, fmt::format("unknown config key '{}'", item.name));
        std::string joined;
        for (std::size_t i = 0; i < item.inputs.size(); ++i) joined += (i ? "," : "") + item.inputs[i];
        e[item.name] = joined;
      }
    }
    for (const auto& [key, opt] : opts_) {
      if (opt->count() == 0) continue;
      if (auto it = flags_.find(key); it != flags_.end())
        e[key] = it->second ? "true" : "false";
      else
        e[key] = values_.at(key);
    }
    return e;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> flags_;
  std::map<std::string, CLI::Option*> opts_;
};

std::string num(double v) { return fmt::format("{}", v); }

std::string get(const Entries& e, const std::string& key, const std::string& fallback) {
  auto it = e.find(key);
  return it == e.end() ? fallback : it->second;
}

bool get_bool(const Entries& e, const std::string& key, bool fallback) {
  auto it = e.find(key);
  return it == e.end() ? fallback : parse_bool(key, it->second);
}

std::size_t get_count(const Entries& e, const std::string& key, std::size_t fallback) {
  auto it = e.find(key);
  if (it == e.end()) return fallback;
  const auto v = parse_integer(key, it->second);
  if (v < 0) throw Error(ErrorKind::InvalidSpec, fmt::format("{} must be non-negative", key));
  return static_cast<std::size_t>(v);
}

unsigned get_threads(const Entries& e) { return static_cast<unsigned>(get_count(e, "threads", 0)); }

std::uint64_t get_seed(const Entries& e, std::uint64_t fallback) {
  auto it = e.find("master_seed");
  return it == e.end() ? fallback : parse_seed("master_seed", it->second);
}

ProblemSpec spec_of(const Entries& e) { return resolve_spec(spec_from_entries(e)); }

void print_terms(std::ostream& out, const RiskDecomposition& r) {
  out << "bias " << num(r.bias) << '\n'
      << "variance " << num(r.variance) << '\n'
      << "data_noise " << num(r.data_noise) << '\n'
      << "target_alignment " << num(r.target_alignment) << '\n';
}

nlohmann::json to_json(const RiskDecomposition& r) {
  return {{"bias", r.bias},   {"variance", r.variance}, {"data_noise", r.data_noise},
          {"target_alignment", r.target_alignment}, {"total", r.total}, {"excess", r.excess}};
}

int cmd_theory(const Entries& e, std::ostream& out) {
  const ProblemSpec spec = spec_of(e);
  const RiskDecomposition r = risk_general(spec, get_bool(e, "finite_d", false));
  out << "excess " << num(r.excess) << '\n';
  print_terms(out, r);
  return 0;
}

int cmd_decompose(const Entries& e, std::ostream& out) {
  const ProblemSpec spec = spec_of(e);
  const bool finite = get_bool(e, "finite_d", false);
  const Branch branch = branch_for(spec.c);
  const RiskDecomposition r = risk_general(spec, branch, finite);
  if (get_bool(e, "json", false)) {
    nlohmann::json j = to_json(r);
    j["c"] = spec.c;
    j["branch"] = std::string(to_string(branch));
    j["finite_d"] = finite;
    out << j.dump(2) << '\n';
    return 0;
  }
  out << "c " << num(spec.c) << '\n' << "branch " << to_string(branch) << '\n';
  out << "finite_d " << (finite ? "true" : "false") << '\n';
  print_terms(out, r);
  out << "total " << num(r.total) << '\n' << "excess " << num(r.excess) << '\n';
  return 0;
}

FitMethod parse_method(const std::string& s) {
  if (s == "gram") return FitMethod::Gram;
  if (s == "svd") return FitMethod::Svd;
  throw Error(ErrorKind::InvalidSpec, fmt::format("method '{}' is not gram or svd", s));
}

int cmd_simulate(const Entries& e, std::ostream& out) {
  const ProblemSpec spec = spec_of(e);
  MCOptions opt;
  opt.threads = get_threads(e);
  opt.method = parse_method(get(e, "method", "gram"));
  opt.fixed_u = get_bool(e, "fixed_u", false);
  const std::size_t trials = get_count(e, "trials", 100);
  const MCEstimate mc = monte_carlo_risk(spec, trials, get_seed(e, 0), opt);
  out << "trials " << mc.trials << '\n';
  out << "empirical_excess " << num(mc.mean) << " +- " << num(mc.std_error) << '\n';
  out << "empirical_bias " << num(mc.per_term.bias) << " +- " << num(mc.per_term_stderr.bias) << '\n';
  out << "empirical_variance " << num(mc.per_term.variance) << " +- " << num(mc.per_term_stderr.variance) << '\n';
  out << "empirical_data_noise " << num(mc.per_term.data_noise) << " +- " << num(mc.per_term_stderr.data_noise)
      << '\n';
  out << "empirical_target_alignment " << num(mc.per_term.target_alignment) << " +- "
      << num(mc.per_term_stderr.target_alignment) << '\n';
  if (std::abs(spec.c - 1.0) > kGuardBand) {
    const RiskDecomposition th = risk_general(spec, true);
    out << "theory_finite_d " << num(th.excess) << '\n';
    out << "z " << num((mc.mean - th.excess) / mc.std_error) << '\n';
  }
  return 0;
}

int cmd_sweep(const Entries& e, std::ostream& out) {
  SweepPlan plan = plan_from_entries(e);
  plan.threads = get_threads(e);
  if (plan.grid.empty()) throw Error(ErrorKind::InvalidPlan, "grid is required");
  const auto rows = run_sweep(plan);
  const std::string path = get(e, "output", "");
  if (path.empty()) {
    write_csv(out, rows);
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidSpec, fmt::format("cannot write '{}'", path));
    write_csv(f, rows);
    out << "wrote " << rows.size() << " rows to " << path << '\n';
  }
  return 0;
}

int cmd_phase(const Entries& e, std::ostream& out) {
  const std::string setting = get(e, "setting", "well-specified");
  const std::string scaling = get(e, "scaling", "operator");
  const bool misspec = setting == "misspec" || setting == "misspecified";
  if (!misspec && setting != "well-specified")
    throw Error(ErrorKind::InvalidSpec, fmt::format("setting '{}' is not well-specified or misspec", setting));
  if (scaling != "operator" && scaling != "frobenius")
    throw Error(ErrorKind::InvalidSpec, fmt::format("phase scaling '{}' is not operator or frobenius", scaling));
  const bool op = scaling == "operator";
  BenefitSetting bs = misspec ? (op ? BenefitSetting::MisspecifiedOperator : BenefitSetting::MisspecifiedFrobenius)
                              : (op ? BenefitSetting::WellSpecifiedOperator : BenefitSetting::WellSpecifiedFrobenius);
  std::optional<double> gamma;
  if (e.count("gamma")) gamma = parse_real("gamma", e.at("gamma"));
  Entries se = e;
  se.erase("setting");
  if (op && !gamma) se.erase("scaling");
  const ProblemSpec spec = spec_of(se);
  const BenefitRegion region = benefit_thresholds(bs, spec.c, gamma);
  out << "setting " << to_string(bs) << '\n' << "c " << num(spec.c) << '\n';
  out << "region " << region.describe() << '\n';
  if (region.kind == BenefitRegion::Kind::RatioInterval)
    out << "interval " << (region.closed ? "[" : "(") << num(region.lower) << ", " << num(region.upper)
        << (region.closed ? "]" : ")") << '\n';
  if (region.kind == BenefitRegion::Kind::GammaAbove) out << "gamma_threshold " << num(region.lower) << '\n';
  if (op && !gamma) return 0;
  const double coef = alignment_coefficient(spec, false);
  out << "coefficient " << num(coef) << (coef < 0.0 ? " beneficial" : " detrimental") << '\n';
  if (region.kind == BenefitRegion::Kind::RatioInterval && spec.alpha_a != 0.0) {
    const double ratio = spec.alpha_z / spec.alpha_a;
    out << "ratio " << num(ratio) << (region.contains(ratio) ? " inside" : " outside") << '\n';
  }
  return 0;
}

GrowthClass parse_growth(const Entries& e) {
  const std::string g = get(e, "growth", "constant");
  if (g == "constant") return ConstantGamma{parse_real("gamma", get(e, "gamma", "1"))};
  if (g == "intermediate") return Intermediate{};
  if (g == "quadratic") return QuadraticRate{parse_real("phi", get(e, "phi", "1"))};
  if (g == "super-quadratic") return SuperQuadratic{};
  if (g == "vanishing") return VanishingGamma{};
  throw Error(ErrorKind::InvalidSpec,
              fmt::format("growth '{}' is not constant, intermediate, quadratic, super-quadratic or vanishing", g));
}

AlignmentClass parse_alignment(const std::string& s) {
  if (s == "parallel") return AlignmentClass::Parallel;
  if (s == "orthogonal") return AlignmentClass::Orthogonal;
  if (s == "oblique") return AlignmentClass::Oblique;
  throw Error(ErrorKind::InvalidSpec, fmt::format("alignment '{}' is not parallel, orthogonal or oblique", s));
}

int cmd_classify(const Entries& e, std::ostream& out) {
  RegimeQuery q;
  const std::string scaling = get(e, "scaling", "operator");
  if (scaling == "operator")
    q.scaling = OperatorAsymptotic{parse_growth(e)};
  else if (scaling == "frobenius")
    q.scaling = FrobeniusAsymptotic{};
  else
    throw Error(ErrorKind::InvalidSpec, fmt::format("classify scaling '{}' is not operator or frobenius", scaling));
  q.alignment = parse_alignment(get(e, "alignment", "parallel"));
  q.tau2 = parse_real("tau2", get(e, "tau2", "1"));
  q.beta_norm2 = parse_real("beta_norm2", get(e, "beta_norm2", "1"));
  q.align2 = e.count("align2") ? parse_real("align2", e.at("align2")) : default_align2(q.alignment, q.beta_norm2);
  const std::string bulk = get(e, "bulk", "constant");
  if (bulk == "vanishing")
    q.bulk = BulkScale::Vanishing;
  else if (bulk != "constant")
    throw Error(ErrorKind::InvalidSpec, fmt::format("bulk '{}' is not constant or vanishing", bulk));

  auto real = [&](const char* k, const char* fallback) { return parse_real(k, get(e, k, fallback)); };
  const std::string alpha = get(e, "alpha", "1");
  const std::string setting = get(e, "setting", "well-specified");
  if (setting == "well-specified") {
    q.setting = WellSpecified{parse_real("alpha", alpha)};
  } else if (setting == "misspec" || setting == "misspecified") {
    q.setting = MisspecNoShift{real("alpha_z", alpha.c_str()), real("alpha_a", alpha.c_str())};
  } else if (setting == "misspec-shift") {
    const double az = real("alpha_z", alpha.c_str()), aa = real("alpha_a", alpha.c_str());
    q.setting = MisspecShift{az, aa, parse_real("alpha_z_test", get(e, "alpha_z_test", num(az))),
                             parse_real("alpha_a_test", get(e, "alpha_a_test", num(aa)))};
  } else if (setting == "spike-recovery") {
    q.setting = SpikeRecovery{real("alpha_z", alpha.c_str())};
  } else {
    throw Error(ErrorKind::InvalidSpec,
                fmt::format("setting '{}' is not well-specified, misspec, misspec-shift or spike-recovery", setting));
  }
  out << describe(classify_regime(q)) << '\n';
  return 0;
}

int cmd_rmt_check(const Entries& e, std::ostream& out) {
  const std::size_t instances = get_count(e, "instances", 20);
  const std::size_t trials = get_count(e, "trials", 50);
  const auto d = static_cast<std::int64_t>(get_count(e, "d", 1000));
  const std::uint64_t seed = get_seed(e, 0);
  const unsigned threads = get_threads(e);
  bool ok = true;

  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  for (const auto& [rows, cols] : {std::pair{30, 60}, std::pair{60, 30}}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
      Eigen::MatrixXd A(rows, cols);
      for (Eigen::Index k = 0; k < A.size(); ++k) A.data()[k] = N(rng) / std::sqrt(static_cast<double>(rows));
      Eigen::VectorXd u(rows), v(cols);
      for (auto& x : u) x = N(rng);
      for (auto& x : v) x = N(rng);
      u.normalize();
      v.normalize();
      const double eta = 0.1 + 9.9 * U(rng);
      const Eigen::MatrixXd P = meyer_pseudoinverse(eta, u, v, A);
      const Eigen::MatrixXd D = pseudoinverse(eta * u * v.transpose() + A);
      const Eigen::BDCSVD<Eigen::MatrixXd> svd(D);
      worst = std::max(worst, (P - D).cwiseAbs().maxCoeff() / svd.singularValues()(0));
    }
    ok = ok && worst <= 1e-8;
    out << fmt::format("meyer {}x{} instances {} max_normalized_error {}\n", rows, cols, instances, worst);
  }

  for (const double c : {0.5, 2.0}) {
    SpecInput in;
    in.d = d;
    in.c = c;
    in.scaling = OperatorNorm{c};
    const ProblemSpec spec = resolve_spec(in);
    const BuildingBlocks bb = estimate_building_blocks(spec, trials, derive_seed(seed, 1), threads);
    const LemmaMeans m = lemma_means(spec.c, bb.rho2, bb.eta, std::max(*spec.d, *spec.n));
    auto line = [&](const char* name, const BlockStat& s, double expected, double tol) {
      const double rel = std::abs(s.mean - expected) / std::abs(expected);
      ok = ok && rel <= tol;
      out << fmt::format("lemma c={} {} mean {} expected {} rel_error {} tol {}\n", num(spec.c), name, s.mean,
                         expected, rel, tol);
    };
    line("h_norm2", bb.h_norm2, m.h_norm2, 0.05);
    line("k_norm2", bb.k_norm2, m.k_norm2, 0.05);
    if (c > 1.0)
      line("s_norm2", bb.s_norm2, m.s_norm2, 0.02);
    else
      line("t_norm2", bb.t_norm2, m.t_norm2, 0.02);
    line("xi_over_eta", bb.xi_over_eta, m.xi_over_eta, 0.05);
  }

  for (const double mult : {4.0, 0.25}) {
    SpecInput in;
    in.d = d;
    in.c = 2.0;
    in.scaling = OperatorNorm{mult * bbp_threshold(2.0)};
    const ProblemSpec spec = resolve_spec(in);
    int hits = 0;
    for (std::uint64_t s = 0; s < 10; ++s)
      hits += spectrum_check(spec, derive_seed(seed, 100 + s)).outlier_present ? 1 : 0;
    const bool expect = mult > 1.0;
    const int correct = expect ? hits : 10 - hits;
    ok = ok && correct >= 9;
    out << fmt::format("bbp multiple {} outliers {}/10 correct {}/10\n", mult, hits, correct);
  }
  out << (ok ? "rmt-check PASS" : "rmt-check FAIL") << '\n';
  return ok ? 0 : 2;
}

int cmd_validate(const Entries& e, std::ostream& out) {
  const std::size_t trials = get_count(e, "trials", 300);
  const ValidationResult v = run_validation(trials, get_seed(e, 0), get_threads(e));
  std::size_t idx = 0;
  for (const auto& s : v.series)
    for (const auto& r : s.rows)
      out << fmt::format("{} c={} empirical={} stderr={} theory_finite_d={} z={}\n", s.name, num(r.c),
                         num(*r.empirical_mean), num(*r.empirical_stderr), num(*r.theory_finite_d),
                         num(v.report.z[idx++]));
  out << fmt::format("max_abs_z {} median_abs_z {} worst_point {} {}\n", num(v.report.max_abs_z),
                     num(v.report.median_abs_z), v.report.worst_point, v.report.pass ? "PASS" : "FAIL");
  const std::string path = get(e, "output", "");
  if (!path.empty()) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidSpec, fmt::format("cannot write '{}'", path));
    write_validation_csv(f, v);
  }
  return v.report.pass ? 0 : 2;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiked-covariance minimum-norm interpolation lab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");

  struct Sub {
    CLI::App* app;
    std::unique_ptr<Registry> reg;
    int (*fn)(const Entries&, std::ostream&);
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* desc, int (*fn)(const Entries&, std::ostream&)) -> Registry& {
    CLI::App* s = app.add_subcommand(name, desc);
    subs.push_back({s, std::make_unique<Registry>(s), fn});
    return *subs.back().reg;
  };

  {
    auto& r = add("theory", "excess risk and its four terms", cmd_theory);
    r.spec_options();
    r.flag("finite_d", "keep the O(1/d) corrections (needs d)");
  }
  {
    auto& r = add("decompose", "full risk decomposition", cmd_decompose);
    r.spec_options();
    r.flag("finite_d", "keep the O(1/d) corrections (needs d)");
    r.flag("json", "print JSON");
  }
  {
    auto& r = add("simulate", "Monte Carlo risk of the minimum-norm interpolator", cmd_simulate);
    r.spec_options();
    r.option("trials", "number of independent datasets");
    r.option("master_seed", "seed", "master seed");
    r.option("threads", "worker threads (default from SPIKELAB_THREADS)");
    r.option("method", "solver: gram or svd");
    r.flag("fixed_u", "keep the spike direction fixed across trials");
  }
  {
    auto& r = add("sweep", "theory and simulation over a grid, as CSV", cmd_sweep);
    r.spec_options();
    r.option("axis", "c-fixed-d, c-fixed-n, ratio or gamma");
    r.option("grid", "comma-separated increasing grid");
    r.option("trials", "Monte Carlo trials per point (0 = theory only)");
    r.option("master_seed", "seed", "master seed");
    r.option("emit_terms", "write the four theory terms (true/false)");
    r.option("gamma_tracks_c", "operator scaling with gamma = c (true/false)");
    r.option("threads", "worker threads (default from SPIKELAB_THREADS)");
    r.option("output", "CSV path (default standard output)");
  }
  {
    auto& r = add("phase", "alignment benefit region and coefficient", cmd_phase);
    r.spec_options();
    r.option("setting", "well-specified or misspec");
  }
  {
    auto& r = add("classify", "asymptotic overfitting regime", cmd_classify);
    r.option("scaling", "operator or frobenius");
    r.option("growth", "constant, intermediate, quadratic, super-quadratic or vanishing");
    r.option("gamma", "gamma for constant growth");
    r.option("phi", "gamma = phi c^2 for quadratic growth");
    r.option("setting", "well-specified, misspec, misspec-shift or spike-recovery");
    r.option("alignment", "parallel, orthogonal or oblique");
    r.option("alpha", "common target coefficient");
    r.option("alpha_z", "training spike coefficient");
    r.option("alpha_a", "training bulk coefficient");
    r.option("alpha_z_test", "test spike coefficient");
    r.option("alpha_a_test", "test bulk coefficient");
    r.option("tau2", "bulk variance");
    r.option("beta_norm2", "squared norm of beta*");
    r.option("align2", "squared alignment (default from the alignment class)");
    r.option("bulk", "bulk variance order: constant or vanishing");
  }
  {
    auto& r = add("rmt-check", "rank-one pseudoinverse identity, lemma means and outlier detection", cmd_rmt_check);
    r.option("d", "dimension for the lemma and spectrum checks");
    r.option("instances", "random instances per pseudoinverse branch");
    r.option("trials", "trials per lemma estimate");
    r.option("master_seed", "seed", "master seed");
    r.option("threads", "worker threads");
  }
  {
    auto& r = add("validate", "well-specified theory-vs-simulation grid", cmd_validate);
    r.option("trials", "Monte Carlo trials per point");
    r.option("master_seed", "seed", "master seed");
    r.option("threads", "worker threads");
    r.option("output", "CSV path for the grid rows");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      return s.fn(s.reg->entries(), out);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return e.numerical() ? 2 : 1;
    } catch (const CLI::Error& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 1;
}

}  // namespace spikelab::cli
