#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include "flowmcg/json_io.hpp"

using namespace flowmcg;

namespace {

Substitution thue_morse() { return Substitution::from_strings({"0", "1"}, {"01", "10"}); }
Substitution fib() { return Substitution::from_strings({"1", "2"}, {"12", "1"}); }
Substitution matui() { return oracle::catalog()[5].sub(); }

/// Return words to [w] read off a long sample: the gaps between consecutive occurrences.
std::set<std::string> sampled_return_words(const std::string& text, const std::string& w) {
  std::set<std::string> out;
  std::size_t prev = text.find(w);
  for (std::size_t p = text.find(w, prev + 1); p != std::string::npos; prev = p, p = text.find(w, p + 1))
    out.insert(text.substr(prev, p - prev));
  return out;
}

/// Whether a code maps every brute-force factor of length n to a factor (both read off samples).
bool maps_language(const SlidingBlockCode& code, const Substitution& s, const std::string& text, std::size_t n) {
  auto ok = oracle::factors(text, n);
  std::size_t win = 2 * static_cast<std::size_t>(code.radius());
  for (const auto& f : oracle::factors(text, n + win)) {
    if (f.find('|') != std::string::npos) continue;
    std::string img = s.alphabet().render(apply_code(code, s.alphabet().parse(f)));
    if (!ok.count(img)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("return words agree with a long sample", "[flow]") {
  for (const auto& [idx, cyl] : std::vector<std::pair<int, std::string>>{{0, "0"}, {0, "011"}, {1, "2"}, {1, "121"}, {2, "3"}}) {
    auto r = oracle::catalog()[static_cast<std::size_t>(idx)];
    Substitution s = r.sub();
    ReturnSystem sys = induce(s, CylinderSet::single(s.alphabet().parse(cyl)));
    std::set<std::string> lib;
    for (const auto& w : sys.return_words()) lib.insert(s.alphabet().render(w));
    INFO(r.name << " [" << cyl << "]");
    REQUIRE(lib == sampled_return_words(oracle::iterate(r, r.letters[0][0], 300000), cyl));
  }
}

TEST_CASE("scaling factor of the substitution flow code is the eigenvalue", "[flow]") {
  auto t = substitution_flow_code(thue_morse());
  REQUIRE(r_mu(t) == FieldElement::rational(pf_data(thue_morse()).field, 2));
  auto f = substitution_flow_code(fib());
  PFData pf = pf_data(fib());
  REQUIRE(r_mu(f) == pf.lambda_element());
  REQUIRE(oracle::value(r_mu(f)) == Catch::Approx(oracle::golden()));
  REQUIRE(r_mu(identity_flow_code(whole_space_system(fib()))) == pf.one());
}

TEST_CASE("scaling factor is multiplicative and invariant under restriction", "[flow]") {
  Substitution s = fib();
  auto f = substitution_flow_code(s);
  auto ff = compose_flow_codes(f, f);
  FieldElement l = pf_data(s).lambda_element();
  REQUIRE(r_mu(ff) == l * l);
  auto res = restrict_flow_code(f, CylinderSet::single(s.alphabet().parse("2")));
  REQUIRE(r_mu(res) == l);
  auto swap = automorphism_flow_code(thue_morse(), SlidingBlockCode::letter_map({1, 0}));
  REQUIRE(r_mu(swap) == pf_data(thue_morse()).one());
}

TEST_CASE("cocycle slopes are return-time ratios converging to the scaling factor", "[flow]") {
  Substitution s = fib();
  auto f = substitution_flow_code(s);
  auto prof = cocycle_slopes(f, two_sided_fixed_point(s, 4096), 0, 200);
  REQUIRE(prof.slopes.size() == 201);
  // the source is the whole space (return time 1); the target returns after |ξ(a)| symbols,
  // so the running mean tends to Σ_a u_a |ξ(a)| = λ
  double sum = 0;
  for (const auto& [k, q] : prof.slopes) {
    REQUIRE((q == 1 || q == 2));
    sum += to_double(q);
  }
  REQUIRE(sum / 201.0 == Catch::Approx(oracle::golden()).epsilon(0.05));
}

TEST_CASE("asymptotic classes of the worked examples", "[asymptotics]") {
  auto tmc = asymptotic_classes(thue_morse());
  REQUIRE(tmc.classes.size() == 2);
  for (const auto& c : tmc.classes) REQUIRE(c.size() == 2);
  REQUIRE(is_identity_permutation(action_of_substitution(thue_morse(), 1, tmc)));
  REQUIRE(action_of_code(SlidingBlockCode::letter_map({1, 0}), tmc) == std::vector<std::size_t>{1, 0});

  REQUIRE(asymptotic_classes(fib()).classes.size() == 1);
  auto tri = asymptotic_classes(oracle::catalog()[2].sub());
  REQUIRE(tri.classes.size() == 1);
  REQUIRE(tri.classes[0].size() == 3);
  REQUIRE(asymptotic_classes(matui()).classes.size() == 4);
  REQUIRE(asymptotic_classes(oracle::catalog()[4].sub()).classes.size() == 1);
}

TEST_CASE("leaves of a class are admissible and share their tail", "[asymptotics]") {
  for (const auto& r : oracle::catalog()) {
    Substitution s = r.sub();
    auto cs = asymptotic_classes(s);
    auto text_factors = oracle::factors(oracle::sample_text(r), 201);
    for (const auto& cls : cs.classes) {
      std::set<Symbol> lefts;
      for (std::size_t k : cls) {
        const Leaf& leaf = cs.leaves[k];
        Word w{leaf.left};
        const Word& ray = cs.rays[leaf.ray];
        w.insert(w.end(), ray.begin(), ray.begin() + 200);
        INFO(r.name << " leaf " << leaf.label(s.alphabet()));
        REQUIRE(text_factors.count(s.alphabet().render(w)));
        lefts.insert(leaf.left);
      }
      REQUIRE(lefts.size() >= 2);
    }
  }
}

TEST_CASE("automorphisms of Thue-Morse modulo the shift", "[automorphisms]") {
  Substitution s = thue_morse();
  std::string text = oracle::sample_text(oracle::catalog()[0]);
  for (int r : {0, 1}) {
    auto rep = search_automorphisms(s, r, 12);
    for (const auto& a : rep.elements) {
      REQUIRE(maps_language(a.code, s, text, 16));
      WordSet dom = admissible_blocks(s, static_cast<std::size_t>(2 * (a.code.radius() + a.inverse.radius()) + 1));
      auto id = compose_codes(a.code, a.inverse, &dom);
      Word probe = s.iterate(Word{0}, 8);
      Word out = apply_code(id, probe);
      std::size_t off = static_cast<std::size_t>(id.radius());
      REQUIRE(std::equal(out.begin(), out.end(), probe.begin() + static_cast<std::ptrdiff_t>(off)));
    }
    auto q = shift_quotient(s, rep);
    REQUIRE(q.order() == 2);
    REQUIRE(q.type == "Z/2");
  }
}

TEST_CASE("automorphism quotients of Fibonacci and Matui", "[automorphisms]") {
  REQUIRE(shift_quotient(fib(), search_automorphisms(fib(), 1, 12)).order() == 1);
  auto q = shift_quotient(matui(), search_automorphisms(matui(), 0, 8));
  REQUIRE(q.order() == 4);
  REQUIRE(q.type == "Z/4");
  REQUIRE(q.contains_cyclic(4));
}

TEST_CASE("mapping class group assembly", "[mcg]") {
  auto t = assemble_mcg(thue_morse());
  REQUIRE(t.cr == CRVerdict::ExactCR);
  REQUIRE(t.structure == "Z/2 x Z");
  auto f = assemble_mcg(fib());
  REQUIRE(f.structure == "Z");
  REQUIRE(f.quotient);
  REQUIRE(f.quotient->order() == 1);
}

TEST_CASE("Sturmian classification agrees with the conjugate", "[mcg]") {
  // (a + b sqrt D)/c with conjugate computed in doubles
  for (int a = -3; a <= 3; ++a)
    for (int b : {-1, 1, 2})
      for (int d : {2, 3, 5, 7})
        for (int c : {2, 3, 5, 7}) {
          double beta = (a + b * std::sqrt(d)) / c, conj = (a - b * std::sqrt(d)) / c;
          QuadraticSurd q{b, a, d, c};
          if (beta <= 0 || beta >= 1) {
            REQUIRE(sturmian_classify(q).kind == SturmianVerdictKind::NotApplicable);
            continue;
          }
          bool sturm = conj < 0 || conj > 1;
          INFO(a << " " << b << " " << d << " " << c);
          REQUIRE(sturmian_classify(q).kind == (sturm ? SturmianVerdictKind::IsomorphicToZ : SturmianVerdictKind::TrivialMCG));
        }
  REQUIRE(sturmian_classify_non_quadratic().kind == SturmianVerdictKind::TrivialMCG);
}

TEST_CASE("odometer unit rank counts distinct primes", "[mcg]") {
  REQUIRE(odometer_mcg({}, {2, 3}).unit_rank == 2);
  REQUIRE(odometer_mcg({}, {2}).unit_rank == 1);
  REQUIRE(odometer_mcg({5}, {2, 2, 3, 3}).unit_rank == 2);
  REQUIRE(odometer_mcg({}, {2, 3, 5, 7}).unit_rank == 4);
  REQUIRE_THROWS_AS(odometer_mcg({}, {4}), ValidationError);
}

TEST_CASE("hierarchical words follow the length recursion", "[mcg]") {
  auto spec = hierarchical_subshift({2, 3, 2});
  std::size_t len = 3;
  REQUIRE(spec.levels[0].w0.size() == len);
  for (std::size_t i = 1; i < 3; ++i) {
    len *= static_cast<std::size_t>(spec.n[i] + 1);
    REQUIRE(spec.levels[i].w0.size() == len);
  }
  REQUIRE(spec.product_bound == Rational(2, 3) * Rational(3, 4) * Rational(2, 3));
  REQUIRE(spec.levels.back().freq0 > spec.product_bound);
}

TEST_CASE("checklist of the linear-complexity criterion", "[mcg]") {
  auto f = virtually_abelian_report(fib());
  REQUIRE(f.window.measure_bound == 1);
  REQUIRE(f.infinitesimal_rank == 0);
  auto t = virtually_abelian_report(thue_morse());
  REQUIRE(t.infinitesimal_rank == 1);
  REQUIRE(t.asymptotic_classes == 2u);
}

TEST_CASE("substitution JSON parsing", "[json]") {
  auto s = substitution_from_json(nlohmann::json::parse(R"({"alphabet":["a","b"],"rules":{"a":"ab","b":["a"]}})"));
  REQUIRE(s.render() == Substitution::from_strings({"a", "b"}, {"ab", "a"}).render());
  REQUIRE_THROWS_AS(substitution_from_json(nlohmann::json::parse(R"({"alphabet":["a"],"rules":{"a":"aa"},"x":1})")),
                    ValidationError);
  REQUIRE_THROWS_AS(substitution_from_json(nlohmann::json::parse(R"({"alphabet":["a","b"],"rules":{"a":"ab"}})")),
                    ValidationError);
  Json m = mcg_json(thue_morse(), assemble_mcg(thue_morse()));
  REQUIRE(m["mcg"]["structure"] == "Z/2 x Z");
}
