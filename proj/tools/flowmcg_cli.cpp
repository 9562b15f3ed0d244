// flowmcg command-line front end. Writes JSON reports to stdout or --out.
// Exit codes: 0 success, 1 invalid input, 2 search budget exhausted, 3 internal inconsistency.

#include "flowmcg/flowmcg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

using namespace flowmcg;

namespace {

struct Common {
  std::string input;
  std::string out;
  int threads = 1;
};

Substitution load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("input is not valid JSON: ") + e.what());
  }
  return substitution_from_json(j);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ValidationError("cannot write '" + c.out + "'");
  f << text;
}

void emit(const Common& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

Integer parse_integer(const std::string& s) {
  static const std::regex re(R"(\s*([+-]?\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ValidationError("not an integer: '" + s + "'");
  return Integer(m[1].str());
}

Rational parse_rational(const std::string& s) {
  auto parts = split(s, '/');
  if (parts.size() == 1) return Rational(parse_integer(parts[0]));
  if (parts.size() != 2) throw ValidationError("not a rational: '" + s + "'");
  Integer d = parse_integer(parts[1]);
  if (d == 0) throw ValidationError("zero denominator in '" + s + "'");
  return Rational(parse_integer(parts[0]), d);
}

std::vector<unsigned long long> parse_naturals(const std::string& s) {
  std::vector<unsigned long long> out;
  for (const auto& x : split(s, ',')) {
    Integer z = parse_integer(x);
    if (z < 0) throw ValidationError("expected a natural number, got '" + x + "'");
    out.push_back(z.convert_to<unsigned long long>());
  }
  return out;
}

QuadraticSurd parse_surd(const std::string& s) {
  static const std::regex re(R"(\s*\(\s*([^,]+),([^,]+),([^,]+),([^,)]+)\)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ValidationError("malformed surd '" + s + "'; expected (b,a,D,c)");
  return QuadraticSurd{parse_integer(m[1]), parse_integer(m[2]), parse_integer(m[3]), parse_integer(m[4])};
}

/// "substitution", "identity" or "letter:<images in alphabet order>".
FlowCode flow_code_from_spec(const Substitution& sub, const std::string& spec) {
  if (spec == "substitution") return substitution_flow_code(sub);
  if (spec == "identity") return identity_flow_code(whole_space_system(sub));
  if (spec.rfind("letter:", 0) == 0) {
    auto labels = split(spec.substr(7), ',');
    if (static_cast<int>(labels.size()) != sub.size())
      throw ValidationError("letter map must list one image per symbol");
    std::vector<Symbol> img;
    for (const auto& l : labels) img.push_back(sub.alphabet().index(l));
    return automorphism_flow_code(sub, SlidingBlockCode::letter_map(img));
  }
  throw ValidationError("unknown code '" + spec + "' (use substitution, identity or letter:...)");
}

Json slopes_json(const CocycleProfile& p) {
  Json arr = Json::array();
  for (const auto& [k, s] : p.slopes) arr.push_back(Json{{"k", k}, {"slope", to_string(s)}});
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-equivalence invariants and mapping class groups of substitution subshifts"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* s, bool with_input) {
    if (with_input) s->add_option("input", c.input, "substitution JSON file")->required();
    s->add_option("--out", c.out, "write the report here instead of stdout");
    s->add_option("--threads", c.threads, "worker threads (reports are identical for any value)")->check(CLI::Range(1, 256));
  };

  McgOptions mopt;
  auto* analyze = app.add_subcommand("analyze", "full mapping class group report");
  add_common(analyze, true);
  analyze->add_option("--radius", mopt.aut_radius, "automorphism search radius")->check(CLI::Range(0, 4));
  analyze->add_option("--n-check", mopt.n_check, "language depth for automorphism checks")->check(CLI::Range(1, 64));
  analyze->add_option("--tail", mopt.tail_check, "tail comparison length for asymptotic classes")->check(CLI::Range(64, 1 << 20));

  std::size_t n = 4;
  auto* language = app.add_subcommand("language", "admissible words of a given length");
  add_common(language, true);
  language->add_option("--n", n, "word length")->check(CLI::Range(1, 64));

  std::size_t n_max = 20;
  auto* cx = app.add_subcommand("complexity", "complexity function P(1..n)");
  add_common(cx, true);
  cx->add_option("--n-max", n_max, "largest length")->check(CLI::Range(1, 256));

  auto* pf = app.add_subcommand("pf", "Perron-Frobenius data");
  add_common(pf, true);

  auto* cr = app.add_subcommand("cr", "CR verdict");
  add_common(cr, true);

  std::vector<std::string> members;
  auto* coinv = app.add_subcommand("coinvariants", "coinvariants group presentation");
  add_common(coinv, true);
  coinv->add_option("--member", members, "rationals to test against the trace image");

  std::string dot_path;
  std::size_t tail = 2048;
  auto* asy = app.add_subcommand("asymptotics", "asymptotic leaf classes");
  add_common(asy, true);
  asy->add_option("--dot", dot_path, "also write the class graph in DOT format");
  asy->add_option("--tail", tail, "tail comparison length")->check(CLI::Range(64, 1 << 20));

  int radius = 2, n_check = 12;
  auto* aut = app.add_subcommand("aut", "automorphism search and shift quotient");
  add_common(aut, true);
  aut->add_option("--radius", radius, "search radius")->check(CLI::Range(0, 4));
  aut->add_option("--n-check", n_check, "language depth")->check(CLI::Range(1, 64));

  std::string cylinder;
  int offset = 0, depth = 12;
  auto* ind = app.add_subcommand("induce", "return system to a cylinder");
  add_common(ind, true);
  ind->add_option("--cylinder", cylinder, "cylinder word")->required();
  ind->add_option("--offset", offset, "position of the word relative to the origin");
  ind->add_option("--depth", depth, "sample doublings")->check(CLI::Range(1, 20));

  auto* fc = app.add_subcommand("flowcode", "flow codes");
  fc->require_subcommand(1);
  std::string spec = "substitution", first, second;
  bool with_action = false;
  auto* fmake = fc->add_subcommand("make", "validate a flow code and report it");
  add_common(fmake, true);
  fmake->add_option("--code", spec, "substitution, identity or letter:i0,i1,... (image index of each symbol)");
  fmake->add_flag("--action", with_action, "include the induced action on coinvariants");
  auto* fcomp = fc->add_subcommand("compose", "second after first");
  add_common(fcomp, true);
  fcomp->add_option("--first", first)->required();
  fcomp->add_option("--second", second)->required();
  fcomp->add_flag("--action", with_action, "include the induced action on coinvariants");
  auto* frest = fc->add_subcommand("restrict", "restrict to a smaller cross section");
  add_common(frest, true);
  frest->add_option("--code", spec);
  frest->add_option("--cylinder", cylinder)->required();
  int k_min = 0, k_max = 10;
  auto* fslopes = fc->add_subcommand("slopes", "return-time cocycle slopes on a fixed point");
  add_common(fslopes, true);
  fslopes->add_option("--code", spec);
  fslopes->add_option("--kmin", k_min);
  fslopes->add_option("--kmax", k_max);
  auto* frmu = fc->add_subcommand("rmu", "measure ratio r_mu");
  add_common(frmu, true);
  frmu->add_option("--code", spec);

  std::string surd, minpoly, interval;
  bool non_quadratic = false;
  auto* st = app.add_subcommand("sturmian", "Sturmian dichotomy");
  add_common(st, false);
  auto* g_surd = st->add_option("--surd", surd, "(b,a,D,c) meaning (b*sqrt(D)+a)/c");
  auto* g_mp = st->add_option("--minpoly", minpoly, "integer coefficients c0,c1,c2");
  st->add_option("--interval", interval, "lo,hi isolating the root")->needs(g_mp);
  auto* g_nq = st->add_flag("--non-quadratic", non_quadratic, "beta is declared non-quadratic");
  g_surd->excludes(g_mp)->excludes(g_nq);
  g_mp->excludes(g_nq);

  std::string preperiod, period;
  auto* od = app.add_subcommand("odometer", "odometer mapping class group");
  add_common(od, false);
  od->add_option("--preperiod", preperiod, "primes, comma separated");
  od->add_option("--period", period, "primes, comma separated")->required();

  std::string levels;
  bool words = false;
  std::size_t measure_block = 0;
  auto* hi = app.add_subcommand("hierarchical", "two-measure hierarchical construction");
  add_common(hi, false);
  hi->add_option("--n", levels, "N_1,...,N_k")->required();
  hi->add_flag("--words", words, "include the stage words");
  hi->add_option("--measures", measure_block, "block length for the involution's action on the two measures");

  std::string hier;
  auto* ck = app.add_subcommand("checklist", "linear-complexity checklist");
  ck->add_option("input", c.input, "substitution JSON file");
  ck->add_option("--out", c.out);
  ck->add_option("--threads", c.threads)->check(CLI::Range(1, 256));
  ck->add_option("--hierarchical", hier, "N_1,...,N_k instead of a substitution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      Substitution sub = load(c.input);
      emit(c, mcg_json(sub, assemble_mcg(sub, mopt)));
    } else if (*language) {
      Substitution sub = load(c.input);
      std::vector<Word> ws;
      for (const auto& w : admissible_blocks(sub, n)) ws.push_back(w);
      emit(c, Json{{"n", n}, {"count", ws.size()}, {"words", words_json(sub.alphabet(), ws)}});
    } else if (*cx) {
      Substitution sub = load(c.input);
      Json p = Json::array();
      for (std::size_t k = 1; k <= n_max; ++k) p.push_back(complexity(sub, k));
      emit(c, Json{{"complexity", p}});
    } else if (*pf) {
      Substitution sub = load(c.input);
      require_primitive(sub);
      emit(c, pf_json(pf_data(sub)));
    } else if (*cr) {
      Substitution sub = load(c.input);
      PFData d = pf_data(sub);
      emit(c, Json{{"verdict", to_string(cr_check(sub))}, {"pisot", is_pisot(d)}, {"pisot_number", is_pisot_number(d)}});
    } else if (*coinv) {
      Substitution sub = load(c.input);
      DirectLimitGroup g(sub);
      Json j = coinvariants_json(g);
      if (!members.empty()) {
        TraceLattice lat(g.pf());
        Json m;
        for (const auto& s : members) m[s] = lat.contains(parse_rational(s));
        j["members"] = m;
      }
      emit(c, j);
    } else if (*asy) {
      Substitution sub = load(c.input);
      AsymptoticClassSet cs = asymptotic_classes(sub, tail);
      Json j = classes_json(cs, sub.alphabet());
      j["xi_action"] = permutation_json(action_of_substitution(sub, 1, cs));
      if (!dot_path.empty()) {
        std::ofstream f(dot_path);
        if (!f) throw ValidationError("cannot write '" + dot_path + "'");
        f << to_dot(cs, sub.alphabet());
      }
      emit(c, j);
    } else if (*aut) {
      Substitution sub = load(c.input);
      AutGroupReport rep = search_automorphisms(sub, radius, n_check);
      emit(c, aut_json(sub, rep, shift_quotient(sub, rep)));
    } else if (*ind) {
      Substitution sub = load(c.input);
      require_primitive(sub);
      ReturnSystem sys = induce(sub, CylinderSet::single(sub.alphabet().parse(cylinder), offset), depth);
      emit(c, return_system_json(sys, MeasureOracle(sub)));
    } else if (*fmake) {
      Substitution sub = load(c.input);
      FlowCode f = flow_code_from_spec(sub, spec);
      Json j = flow_code_json(f);
      if (with_action) j["induced_action"] = induced_action_json(induced_action(f, DirectLimitGroup(sub)));
      emit(c, j);
    } else if (*fcomp) {
      Substitution sub = load(c.input);
      FlowCode a = flow_code_from_spec(sub, first), b = flow_code_from_spec(sub, second);
      FlowCode ab = compose_flow_codes(a, b);
      Json j = flow_code_json(ab);
      j["multiplicative"] = r_mu(ab) == r_mu(a) * r_mu(b);
      if (with_action) j["induced_action"] = induced_action_json(induced_action(ab, DirectLimitGroup(sub)));
      emit(c, j);
    } else if (*frest) {
      Substitution sub = load(c.input);
      FlowCode f = flow_code_from_spec(sub, spec);
      emit(c, flow_code_json(restrict_flow_code(f, CylinderSet::single(sub.alphabet().parse(cylinder)))));
    } else if (*fslopes) {
      Substitution sub = load(c.input);
      FlowCode f = flow_code_from_spec(sub, spec);
      std::size_t half = 4096;
      emit(c, Json{{"slopes", slopes_json(cocycle_slopes(f, two_sided_fixed_point(sub, half), k_min, k_max))}});
    } else if (*frmu) {
      Substitution sub = load(c.input);
      emit(c, Json{{"r_mu", element_json(r_mu(flow_code_from_spec(sub, spec)))}});
    } else if (*st) {
      SturmianVerdict v;
      if (!surd.empty()) {
        v = sturmian_classify(parse_surd(surd));
      } else if (!minpoly.empty()) {
        std::vector<Integer> coeffs;
        for (const auto& x : split(minpoly, ',')) coeffs.push_back(parse_integer(x));
        auto ends = split(interval, ',');
        if (ends.size() != 2) throw ValidationError("--interval must be lo,hi");
        v = sturmian_classify(coeffs, RationalInterval{parse_rational(ends[0]), parse_rational(ends[1])});
      } else if (non_quadratic) {
        v = sturmian_classify_non_quadratic();
      } else {
        throw ValidationError("sturmian: give --surd, --minpoly with --interval, or --non-quadratic");
      }
      emit(c, sturmian_json(v));
    } else if (*od) {
      emit(c, odometer_json(odometer_mcg(parse_naturals(preperiod), parse_naturals(period))));
    } else if (*hi) {
      std::vector<int> ns;
      for (auto x : parse_naturals(levels)) ns.push_back(static_cast<int>(x));
      HierarchicalWordSpec spec_h = hierarchical_subshift(ns);
      Json j = hierarchical_json(spec_h, words);
      if (measure_block > 0) {
        const auto& last = spec_h.levels.back();
        auto act = action_on_measures(SlidingBlockCode::letter_map({1, 0}),
                                      {block_frequencies(last.w0, measure_block), block_frequencies(last.w1, measure_block)});
        j["involution_on_measures"] = Json{{"block_length", measure_block},
                                           {"permutation", permutation_json(act.permutation)},
                                           {"margins", act.margins}};
      }
      emit(c, j);
    } else if (*ck) {
      if (!hier.empty()) {
        std::vector<int> ns;
        for (auto x : parse_naturals(hier)) ns.push_back(static_cast<int>(x));
        emit(c, checklist_json(virtually_abelian_report(hierarchical_subshift(ns))));
      } else {
        if (c.input.empty()) throw ValidationError("checklist: give an input file or --hierarchical");
        emit(c, checklist_json(virtually_abelian_report(load(c.input))));
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ResourceError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 2;
  } catch (const InconsistencyError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
