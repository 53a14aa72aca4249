#include <doctest.h>

#include <cmath>
#include <vector>

#include "spikelab/error.hpp"
#include "spikelab/model.hpp"
#include "spikelab/regime.hpp"
#include "spikelab/theory.hpp"

using namespace spikelab;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidSpec;
}

RegimeQuery query(AsymptoticScaling sc, AlignmentClass al, Setting st) {
  RegimeQuery q;
  q.scaling = sc;
  q.alignment = al;
  q.setting = st;
  q.tau2 = 0.7;
  q.beta_norm2 = 1.3;
  q.align2 = default_align2(al, q.beta_norm2);
  return q;
}

// Finite-c proportional-limit risk for the query at ratio c, noiseless.
double risk_at(const RegimeQuery& q, double c) {
  SpecInput in;
  in.c = c;
  in.tau2 = q.tau2;
  in.beta_norm2 = q.beta_norm2;
  in.align2 = q.align2;
  if (std::holds_alternative<FrobeniusAsymptotic>(q.scaling)) {
    in.scaling = FrobeniusNorm{};
  } else {
    const double g = std::visit(overloaded{
                                    [](const ConstantGamma& k) { return k.gamma0; },
                                    [&](const Intermediate&) { return std::pow(c, 1.5); },
                                    [&](const QuadraticRate& p) { return p.phi * c * c; },
                                    [&](const SuperQuadratic&) { return c * c * c; },
                                    [](const VanishingGamma&) { return 0.0; },
                                },
                                std::get<OperatorAsymptotic>(q.scaling).growth);
    in.scaling = OperatorNorm{g};
  }
  std::visit(overloaded{
                 [&](const WellSpecified& w) { in.alpha_z = in.alpha_a = w.alpha; },
                 [&](const MisspecNoShift& m) {
                   in.alpha_z = m.alpha_z;
                   in.alpha_a = m.alpha_a;
                 },
                 [&](const MisspecShift& m) {
                   in.alpha_z = m.alpha_z;
                   in.alpha_a = m.alpha_a;
                   in.alpha_z_test = m.alpha_z_test;
                   in.alpha_a_test = m.alpha_a_test;
                 },
                 [&](const SpikeRecovery& s) {
                   in.alpha_z = s.alpha_z;
                   in.alpha_a = 0.0;
                 },
             },
             q.setting);
  return risk_general(resolve_spec(in), false).excess;
}

std::vector<AsymptoticScaling> scalings() {
  return {FrobeniusAsymptotic{},
          OperatorAsymptotic{ConstantGamma{2.5}},
          OperatorAsymptotic{Intermediate{}},
          OperatorAsymptotic{QuadraticRate{0.8}},
          OperatorAsymptotic{SuperQuadratic{}}};
}

std::vector<Setting> settings() {
  return {WellSpecified{1.2}, MisspecNoShift{1.0, 2.0}, MisspecShift{1.0, 2.0, 1.5, 2.0},
          MisspecShift{1.0, 2.0, 1.0, 1.0}};
}

}  // namespace

TEST_CASE("golden cells") {
  auto label = [](AsymptoticScaling sc, AlignmentClass al, Setting st) {
    return classify_regime(query(sc, al, st)).label;
  };
  using A = AlignmentClass;
  using L = RegimeLabel;
  const WellSpecified ws{1.0};
  CHECK(label(FrobeniusAsymptotic{}, A::Parallel, ws) == L::Benign);
  CHECK(label(FrobeniusAsymptotic{}, A::Orthogonal, ws) == L::Tempered);
  CHECK(label(FrobeniusAsymptotic{}, A::Oblique, ws) == L::Tempered);
  CHECK(label(OperatorAsymptotic{ConstantGamma{1.0}}, A::Parallel, ws) == L::Tempered);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Parallel, ws) == L::Catastrophic);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Oblique, ws) == L::Catastrophic);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Orthogonal, ws) == L::Tempered);
  CHECK(label(OperatorAsymptotic{QuadraticRate{2.0}}, A::Parallel, ws) == L::Tempered);
  CHECK(label(OperatorAsymptotic{SuperQuadratic{}}, A::Parallel, ws) == L::Benign);
  CHECK(label(OperatorAsymptotic{SuperQuadratic{}}, A::Oblique, ws) == L::Tempered);

  const MisspecNoShift mn{1.0, 2.0};
  CHECK(label(FrobeniusAsymptotic{}, A::Parallel, mn) == L::Tempered);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Parallel, mn) == L::Catastrophic);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Orthogonal, mn) == L::Tempered);
  CHECK(label(OperatorAsymptotic{SuperQuadratic{}}, A::Parallel, mn) == L::Tempered);

  const MisspecShift zs{1.0, 2.0, 1.5, 2.0};
  CHECK(label(FrobeniusAsymptotic{}, A::Parallel, zs) == L::Catastrophic);
  CHECK(label(FrobeniusAsymptotic{}, A::Orthogonal, zs) == L::Tempered);
  CHECK(label(OperatorAsymptotic{ConstantGamma{1.0}}, A::Parallel, zs) == L::Tempered);
  CHECK(label(OperatorAsymptotic{QuadraticRate{1.0}}, A::Parallel, zs) == L::Catastrophic);
  CHECK(label(OperatorAsymptotic{SuperQuadratic{}}, A::Oblique, zs) == L::Catastrophic);

  // Test side well specified again: benign under Frobenius, never benign under operator scaling.
  const MisspecShift back{1.0, 2.0, 1.0, 1.0};
  CHECK(label(FrobeniusAsymptotic{}, A::Parallel, back) == L::Benign);
  const RegimeVerdict sq = classify_regime(query(OperatorAsymptotic{SuperQuadratic{}}, A::Parallel, back));
  CHECK(sq.label == L::Tempered);
  CHECK(sq.limit_value.value() == 0.0);

  const SpikeRecovery sr{1.0};
  CHECK(label(FrobeniusAsymptotic{}, A::Parallel, sr) == L::Tempered);
  CHECK_FALSE(classify_regime(query(FrobeniusAsymptotic{}, A::Parallel, sr)).limit_value.has_value());
  CHECK(label(OperatorAsymptotic{ConstantGamma{1.0}}, A::Parallel, sr) == L::Tempered);
  CHECK(label(OperatorAsymptotic{VanishingGamma{}}, A::Parallel, sr) == L::Benign);
  CHECK(label(OperatorAsymptotic{Intermediate{}}, A::Parallel, sr) == L::Catastrophic);
  CHECK(label(OperatorAsymptotic{SuperQuadratic{}}, A::Oblique, sr) == L::Catastrophic);
  RegimeQuery vb = query(FrobeniusAsymptotic{}, A::Parallel, sr);
  vb.bulk = BulkScale::Vanishing;
  CHECK(classify_regime(vb).label == L::Benign);
}

TEST_CASE("verdict text") {
  CHECK(describe(classify_regime(query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, WellSpecified{}))) ==
        "Benign, limit 0");
  CHECK(describe(classify_regime(
            query(OperatorAsymptotic{Intermediate{}}, AlignmentClass::Parallel, WellSpecified{}))) ==
        "Catastrophic, limit inf");
  CHECK(describe(classify_regime(query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, SpikeRecovery{}))) ==
        "Tempered, limit n/a");
}

TEST_CASE("limits agree with the proportional risk as c grows") {
  const std::vector<AlignmentClass> aligns{AlignmentClass::Parallel, AlignmentClass::Orthogonal,
                                           AlignmentClass::Oblique};
  int cells = 0;
  for (const auto& sc : scalings())
    for (const auto& st : settings())
      for (AlignmentClass al : aligns) {
        const RegimeQuery q = query(sc, al, st);
        const RegimeVerdict v = classify_regime(q);
        CAPTURE(describe(v));
        CAPTURE(cells);
        const double r2 = risk_at(q, 1e2), r3 = risk_at(q, 1e3), r4 = risk_at(q, 1e4);
        if (v.label == RegimeLabel::Catastrophic) {
          CHECK((std::isinf(r4) || (r4 > r3 && r3 > r2 && r4 > 3.0 * r2)));
        } else {
          REQUIRE(v.limit_value.has_value());
          const double lim = *v.limit_value;
          const double e2 = std::abs(r2 - lim), e3 = std::abs(r3 - lim), e4 = std::abs(r4 - lim);
          const double scale = std::max(1.0, std::abs(lim));
          CHECK(e4 <= 1e-2 * scale);
          if (e2 > 1e-12 * scale) CHECK(e4 < e2);
          CHECK(e4 <= e3 + 1e-12 * scale);
        }
        ++cells;
      }
  CHECK(cells == 60);
}

TEST_CASE("invalid and unsupported queries") {
  RegimeQuery q = query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, WellSpecified{});
  q.align2 = 0.3;
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(FrobeniusAsymptotic{}, AlignmentClass::Oblique, WellSpecified{});
  q.align2 = 0.0;
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, WellSpecified{});
  q.tau2 = 0.0;
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, MisspecNoShift{1.0, 1.0});
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, MisspecShift{1.0, 2.0, 1.0, 2.0});
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(OperatorAsymptotic{QuadraticRate{-1.0}}, AlignmentClass::Parallel, WellSpecified{});
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::InvalidSpec);
  q = query(OperatorAsymptotic{VanishingGamma{}}, AlignmentClass::Parallel, WellSpecified{});
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::UnsupportedCombination);
  q = query(FrobeniusAsymptotic{}, AlignmentClass::Parallel, WellSpecified{});
  q.bulk = BulkScale::Vanishing;
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::UnsupportedCombination);
  q = query(OperatorAsymptotic{Intermediate{}}, AlignmentClass::Parallel, SpikeRecovery{});
  q.bulk = BulkScale::Vanishing;
  CHECK(kind_of([&] { classify_regime(q); }) == ErrorKind::UnsupportedCombination);
}
