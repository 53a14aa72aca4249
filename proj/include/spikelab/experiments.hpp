#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/config.hpp"
#include "spikelab/model.hpp"

namespace spikelab {

enum class SweepAxis {
  CFixedD,  // vary n = d / c at the base d
  CFixedN,  // vary d = n c at the base n
  Ratio,    // vary alpha_z / alpha_a at fixed alpha_a
  Gamma,    // vary the operator-norm gamma
};

std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);

struct SweepPlan {
  SpecInput base;
  SweepAxis axis = SweepAxis::CFixedD;
  std::vector<double> grid;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  bool emit_terms = true;
  bool gamma_tracks_c = false;  // operator scaling with gamma = c at every grid point
  unsigned threads = 0;
};

// Plan keys accepted next to the spec keys: axis, grid, trials, master_seed, emit_terms, gamma_tracks_c.
const std::vector<std::string>& plan_keys();
SweepPlan plan_from_entries(const Entries& e);

struct SweepRow {
  double axis_value = 0.0;
  double c = 0.0;
  std::optional<std::int64_t> d;
  std::optional<std::int64_t> n;
  std::optional<double> empirical_mean;
  std::optional<double> empirical_stderr;
  std::optional<double> theory_finite_d;
  std::optional<double> theory_asymptotic;
  std::optional<double> bias;
  std::optional<double> variance;
  std::optional<double> data_noise;
  std::optional<double> target_alignment;
  std::optional<int> beneficial_flag;

  bool operator==(const SweepRow&) const = default;
};

// Spec used at grid point i.
ProblemSpec grid_spec(const SweepPlan& plan, std::size_t i);
std::vector<SweepRow> run_sweep(const SweepPlan& plan);

const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& is);
std::string format_real(double v);

struct CompareReport {
  double max_abs_z = 0.0;
  double median_abs_z = 0.0;
  std::size_t worst_point = 0;  // row index of max |z|
  bool pass = false;
  std::vector<double> z;
};

// z = (empirical - theory_finite_d) / stderr; passes when max |z| <= 4 and median |z| <= 2.
CompareReport compare_report(const std::vector<SweepRow>& rows);

// Well-specified grid: {operator gamma = c, Frobenius} x {aligned, orthogonal} x c in {0.5, 2, 4, 8},
// d = 1000, tau2 = 1, alpha = 1, tau_eps2 = 1.
struct ValidationSeries {
  std::string name;
  std::vector<SweepRow> rows;
};

struct ValidationResult {
  std::vector<ValidationSeries> series;
  CompareReport report;  // over all rows in series order
};

std::vector<std::pair<std::string, SweepPlan>> validation_plans(std::size_t trials, std::uint64_t master_seed,
                                                                unsigned threads = 0);
ValidationResult run_validation(std::size_t trials, std::uint64_t master_seed, unsigned threads = 0);
// The validation CSV: a leading series column followed by the sweep columns.
void write_validation_csv(std::ostream& os, const ValidationResult& v);

}  // namespace spikelab
