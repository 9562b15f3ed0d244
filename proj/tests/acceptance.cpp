// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include "property_suite.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>

using namespace flowmcg;

namespace {

struct Check {
  std::vector<std::string> problems;
  void expect(bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Substitution thue_morse() { return Substitution::from_strings({"0", "1"}, {"01", "10"}); }
Substitution fibonacci() { return Substitution::from_strings({"1", "2"}, {"12", "1"}); }
Substitution matui() { return oracle::catalog()[5].sub(); }

bool is_permutation_matrix(const IntMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    int row = 0, col = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[i][j] != 0 && m[i][j] != 1) return false;
      row += m[i][j] == 1;
      col += m[j][i] == 1;
    }
    if (row != 1 || col != 1) return false;
  }
  return true;
}

void thue_morse_end_to_end(Check& c) {
  auto t0 = Clock::now();
  McgOptions opt;
  opt.aut_radius = 1;
  Substitution s = thue_morse();
  McgReport r = assemble_mcg(s, opt);
  double dt = seconds_since(t0);
  // both images have length 2, so every column sum of the incidence matrix is 2
  c.expect(r.pf.lambda_element() == FieldElement::rational(r.pf.field, 2), "lambda is not exactly 2");
  c.expect(r.cr == CRVerdict::ExactCR, "CR verdict is " + to_string(r.cr));
  c.expect(r.quotient && r.quotient->order() == 2 && r.quotient->type == "Z/2", "automorphism quotient is not Z/2 at radius 1");
  c.expect(r.classes.classes.size() == 2, "expected 2 asymptotic classes");
  c.expect(is_identity_permutation(r.xi_action), "xi does not act trivially on the classes");
  c.expect(r.structure == "Z/2 x Z", "structure is '" + r.structure + "'");
  c.expect(dt < 10.0, "runtime " + std::to_string(dt) + " s");
}

void fibonacci_sturmian(Check& c) {
  auto t0 = Clock::now();
  Substitution s = fibonacci();
  McgReport r = assemble_mcg(s);
  std::size_t inf = infinitesimal_rank(s);
  double dt = seconds_since(t0);
  c.expect(r.pisot_number, "lambda not recognized as a Pisot number");
  c.expect(r.cr == CRVerdict::ProvedCR || r.cr == CRVerdict::ExactCR, "Pisot did not give CR");
  c.expect(r.quotient && r.quotient->order() == 1, "finite part is not trivial");
  c.expect(r.structure == "Z", "structure is '" + r.structure + "'");
  c.expect(inf == 0, "infinitesimal rank " + std::to_string(inf));
  c.expect(dt < 10.0, "runtime " + std::to_string(dt) + " s");
}

void quadratic_dichotomy(Check& c) {
  // 5x^2 - 5x + 1 has roots (5 ± √5)/10, both inside (0,1): not a Sturm number
  auto v = sturmian_classify({Integer(1), Integer(-5), Integer(5)}, RationalInterval{Rational(0), Rational(1, 2)});
  c.expect(v.kind == SturmianVerdictKind::TrivialMCG, "root of 5x^2-5x+1 classified " + to_string(v.kind));
  double conj = (5.0 + std::sqrt(5.0)) / 10.0;
  c.expect(v.conjugate_approx && std::abs(*v.conjugate_approx - conj) < 1e-12, "unexpected conjugate");
  // (√5 - 1)/2 has conjugate -(1+√5)/2 < 0
  auto g = sturmian_classify(QuadraticSurd{1, -1, 5, 2});
  c.expect(g.kind == SturmianVerdictKind::IsomorphicToZ, "golden surd classified " + to_string(g.kind));
}

void matui_rotation(Check& c) {
  auto t0 = Clock::now();
  Substitution s = matui();
  auto rep = search_automorphisms(s, 0, 12);
  auto q = shift_quotient(s, rep);
  c.expect(q.order() == 4 && q.contains_cyclic(4), "radius-0 quotient is " + q.type);
  std::optional<SlidingBlockCode> rot;
  for (std::size_t i = 0; i < rep.elements.size(); ++i)
    if (q.orders[q.class_of[i]] == 4) rot = rep.elements[i].code;
  c.expect(rot.has_value(), "no element of order 4");
  if (!rot) return;
  DirectLimitGroup g(s);
  InducedAction act = induced_action(automorphism_flow_code(s, *rot), g);
  c.expect(act.letter_matrix.has_value(), "no letter-class matrix");
  if (!act.letter_matrix) return;
  const IntMatrix& m = *act.letter_matrix;
  c.expect(is_permutation_matrix(m), "induced matrix on letter classes is not a permutation");
  c.expect(m != identity_matrix(m.size()), "induced permutation is trivial");
  // letters have equal frequency, so e0 - e1 has trace 0; only the group itself can tell it from 0
  GroupElement e0 = g.class_of_cylinder(Word{0}), e1 = g.class_of_cylinder(Word{1});
  c.expect(g.trace_value(g.sub(e0, e1)) == g.pf().zero(), "e0 - e1 has nonzero trace");
  c.expect(!g.element_equal(e0, e1), "e0 - e1 is zero in the group");
  c.expect(act.fixes_order_unit, "order unit not fixed");
  double dt = seconds_since(t0);
  c.expect(dt < 30.0, "runtime " + std::to_string(dt) + " s");
}

void odometers(Check& c) {
  auto r = odometer_mcg({}, {2, 3});
  c.expect(r.unit_rank == 2, "period [2,3] rank " + std::to_string(r.unit_rank));
  c.expect(r.presentation == "𝒪_P/⟨(1,1,…)⟩ ⋊ ℤ^2", "presentation '" + r.presentation + "'");
  c.expect(odometer_mcg({}, {2}).unit_rank == 1, "period [2] rank is not 1");
}

void trace_lattice(Check& c) {
  TraceLattice t = trace_image(thue_morse());
  c.expect(t.describe() == "Z[1/2]", "trace image described as " + t.describe());
  c.expect(t.contains(Rational(3, 8)), "3/8 rejected");
  c.expect(!t.contains(Rational(1, 3)), "1/3 accepted");
  Substitution f = fibonacci();
  PFData pf = pf_data(f);
  FieldElement m1 = cylinder_measure(f, f.alphabet().parse("1"));
  c.expect(m1 == pf.lambda_element() - pf.one(), "mu[1] is not lambda - 1");
  // ξ^12(1) spelled directly
  std::string x = "1";
  for (int k = 0; k < 12; ++k) {
    std::string y;
    for (char ch : x) y += ch == '1' ? "12" : "1";
    x = y;
  }
  double emp = oracle::count_occurrences(x, "1") / static_cast<double>(x.size());
  double exact = oracle::golden() - 1.0;
  c.expect(std::abs(emp - exact) / exact < 1e-4, "empirical frequency " + std::to_string(emp));
  c.expect(std::abs(oracle::value(m1) - exact) < 1e-15, "numeric value of mu[1]");
}

void scaling_factor(Check& c) {
  Substitution t = thue_morse(), f = fibonacci();
  auto st = substitution_flow_code(t), sf = substitution_flow_code(f);
  c.expect(r_mu(st) == FieldElement::rational(pf_data(t).field, 2), "r_mu(xi) is not 2 for Thue-Morse");
  c.expect(r_mu(sf) == pf_data(f).lambda_element(), "r_mu(xi) is not lambda for Fibonacci");
  auto swap = automorphism_flow_code(t, SlidingBlockCode::letter_map({1, 0}));
  auto idf = identity_flow_code(whole_space_system(f));
  auto sm = substitution_flow_code(matui());
  const std::vector<std::pair<const FlowCode*, const FlowCode*>> pairs{
      {&st, &st}, {&st, &swap}, {&swap, &st}, {&sf, &sf}, {&idf, &sf}, {&sm, &sm}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [a, b] = pairs[i];
    c.expect(r_mu(compose_flow_codes(*a, *b)) == r_mu(*a) * r_mu(*b), "multiplicativity fails on pair " + std::to_string(i));
  }
  for (const auto& [sub, radius] : std::vector<std::pair<Substitution, int>>{{t, 1}, {f, 1}, {matui(), 0}}) {
    auto rep = search_automorphisms(sub, radius, 12);
    for (const auto& a : rep.elements)
      c.expect(r_mu(automorphism_flow_code(sub, a.code)) == pf_data(sub).one(), "an automorphism has r_mu != 1");
  }
}

void kac(Check& c) {
  auto cat = oracle::catalog();
  const std::vector<std::pair<std::size_t, std::string>> cases{{0, "0"}, {0, "011"}, {1, "2"}, {1, "121"}, {2, "3"},
                                                               {3, "ab"}, {4, "ba"}, {5, "01"}};
  for (const auto& [idx, cyl] : cases) {
    Substitution s = cat[idx].sub();
    MeasureOracle mo(s);
    ReturnSystem sys = induce(s, CylinderSet::single(s.alphabet().parse(cyl)));
    c.expect(sys.kac_sum(mo) == mo.pf().one(), cat[idx].name + " [" + cyl + "]: Kac sum is not 1");
  }
}

void property_suite(Check& c) {
  auto t0 = Clock::now();
  for (auto [name, fn] : std::vector<std::pair<std::string, std::function<props::Verdict()>>>{
           {"complexity", [] { return props::complexity_properties(); }},
           {"composition", [] { return props::incidence_composition(); }},
           {"kernel", [] { return props::kernel_stabilization(); }},
           {"trace", [] { return props::trace_well_defined(); }},
           {"restriction", [] { return props::restriction_roundtrip(); }}}) {
    auto v = fn();
    c.expect(v.ok && v.checked > 0, name + ": " + v.failure);
  }
  double dt = seconds_since(t0);
  c.expect(dt < 120.0, "runtime " + std::to_string(dt) + " s");
}

void two_measures(Check& c) {
  std::vector<int> n{2, 2, 2, 2};
  auto spec = hierarchical_subshift(n);
  std::size_t len = 1;
  for (std::size_t i = 0; i < n.size(); ++i) {
    len *= static_cast<std::size_t>(n[i] + 1);
    c.expect(spec.levels[i].w0.size() == len && spec.levels[i].w1.size() == len,
             "stage " + std::to_string(i + 1) + " length is not the product of N+1");
  }
  // stage words w0 and w1 carry the two ergodic measures; the letter swap must exchange them
  const auto& last = spec.levels.back();
  auto act = action_on_measures(SlidingBlockCode::letter_map({1, 0}), {block_frequencies(last.w0, 27), block_frequencies(last.w1, 27)});
  c.expect(act.permutation == std::vector<std::size_t>{1, 0}, "involution does not swap the measures");
  for (double m : act.margins) c.expect(m > 0.1, "margin " + std::to_string(m));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"Thue-Morse end to end: lambda 2, ExactCR, Z/2 quotient, 2 classes, Z/2 x Z", thue_morse_end_to_end},
      {"Fibonacci: Pisot gives CR, trivial finite part, Z, no infinitesimals", fibonacci_sturmian},
      {"quadratic dichotomy: 5x^2-5x+1 trivial, golden surd Z", quadratic_dichotomy},
      {"Matui rotation: order 4 at radius 0, nontrivial permutation, order unit fixed", matui_rotation},
      {"odometers: [2,3] rank 2 with its presentation, [2] rank 1", odometers},
      {"trace lattice Z[1/2] and the Fibonacci cylinder measure", trace_lattice},
      {"scaling factor: eigenvalue, multiplicative, 1 on automorphisms", scaling_factor},
      {"Kac identity on induced systems", kac},
      {"property suite", property_suite},
      {"two-measure hierarchical example at N=[2,2,2,2]", two_measures},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    auto t0 = Clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.problems.push_back(std::string("exception: ") + e.what());
    }
    double dt = seconds_since(t0);
    bool ok = c.problems.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << std::setw(2) << i + 1 << "] " << criteria[i].first << " (" << std::fixed
              << std::setprecision(2) << dt << " s)";
    for (const auto& p : c.problems) std::cout << "\n       " << p;
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
