#pragma once

// JSON input parsing and report rendering (nlohmann::ordered_json keeps key order stable).

#include "flowmcg/action.hpp"
#include "flowmcg/asymptotics.hpp"
#include "flowmcg/automorphisms.hpp"
#include "flowmcg/coinvariants.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/flow.hpp"
#include "flowmcg/mcg.hpp"
#include "flowmcg/substitution.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace flowmcg {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- input

inline Substitution substitution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("input must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "alphabet" && it.key() != "rules") throw ValidationError("unknown input key '" + it.key() + "'");
  if (!j.contains("alphabet") || !j["alphabet"].is_array()) throw ValidationError("input: 'alphabet' must be an array");
  if (!j.contains("rules") || !j["rules"].is_object()) throw ValidationError("input: 'rules' must be an object");
  std::vector<std::string> labels;
  for (const auto& x : j["alphabet"]) {
    if (!x.is_string()) throw ValidationError("input: alphabet entries must be strings");
    labels.push_back(x.get<std::string>());
  }
  Alphabet alpha(labels);
  std::vector<Word> images(labels.size());
  std::set<std::string> seen;
  for (auto it = j["rules"].begin(); it != j["rules"].end(); ++it) {
    Symbol a = alpha.index(it.key());
    seen.insert(it.key());
    const auto& v = it.value();
    Word w;
    if (v.is_string()) {
      w = alpha.parse(v.get<std::string>());
    } else if (v.is_array()) {
      std::vector<std::string> syms;
      for (const auto& s : v) {
        if (!s.is_string()) throw ValidationError("input: rule arrays must contain symbol strings");
        syms.push_back(s.get<std::string>());
      }
      w = alpha.parse(syms);
    } else {
      throw ValidationError("input: rule for '" + it.key() + "' must be a string or an array");
    }
    if (w.empty()) throw ValidationError("input: rule for '" + it.key() + "' has an empty image");
    images[static_cast<std::size_t>(a)] = std::move(w);
  }
  for (const auto& l : labels)
    if (!seen.count(l)) throw ValidationError("input: no rule for symbol '" + l + "'");
  return Substitution(std::move(alpha), std::move(images));
}

// ---------------------------------------------------------------- numbers

inline Json rational_json(const Rational& q) {
  if (denominator(q) == 1) {
    Integer z = numerator(q);
    if (z >= std::numeric_limits<long long>::min() && z <= std::numeric_limits<long long>::max())
      return Json(z.convert_to<long long>());
  }
  return Json(to_string(q));
}

/// {"minpoly":[c0,...,cn],"interval":[lo,hi],"approx":"..."} for the generator of a field.
inline Json algebraic_json(const FieldPtr& f, int digits = 20) {
  Json j;
  Json mp = Json::array();
  for (const auto& c : f->minpoly().coeffs()) mp.push_back(rational_json(c));
  j["minpoly"] = mp;
  RationalInterval iv = f->interval(Rational(1, 1000000000));
  j["interval"] = Json::array({to_string(iv.lo), to_string(iv.hi)});
  j["approx"] = FieldElement::generator(f).approx(digits);
  return j;
}

inline Json lambda_json(const PFData& pf) { return algebraic_json(pf.field); }

/// A field element as a polynomial in λ with its decimal value.
inline Json element_json(const FieldElement& x, int digits = 20) {
  Json j;
  j["expr"] = x.str();
  j["approx"] = x.approx(digits);
  return j;
}

// ---------------------------------------------------------------- reports

inline Json words_json(const Alphabet& a, const std::vector<Word>& ws) {
  Json arr = Json::array();
  for (const auto& w : ws) arr.push_back(a.render(w));
  return arr;
}

inline Json pf_json(const PFData& pf) {
  Json j;
  j["lambda"] = lambda_json(pf);
  Json cp = Json::array();
  for (const auto& c : pf.charpoly.coeffs()) cp.push_back(rational_json(c));
  j["charpoly"] = cp;
  Json u = Json::array(), w = Json::array();
  for (const auto& x : pf.u) u.push_back(element_json(x));
  for (const auto& x : pf.w) w.push_back(element_json(x));
  j["frequencies"] = u;
  j["right_eigenvector"] = w;
  j["pisot"] = is_pisot(pf);
  j["pisot_number"] = is_pisot_number(pf);
  return j;
}

inline Json permutation_json(const std::vector<std::size_t>& p) {
  Json arr = Json::array();
  for (auto x : p) arr.push_back(x);
  return arr;
}

inline Json classes_json(const AsymptoticClassSet& cs, const Alphabet& a) {
  Json j;
  j["stabilizing_power"] = cs.power;
  Json cls = Json::array();
  for (const auto& c : cs.classes) {
    Json leaves = Json::array();
    for (auto k : c) leaves.push_back(cs.leaves[k].label(a));
    cls.push_back(leaves);
  }
  j["count"] = cs.classes.size();
  j["classes"] = cls;
  j["certificate"] = cs.certificate();
  return j;
}

inline Json code_json(const SlidingBlockCode& c, const Alphabet& a) {
  Json j;
  j["radius"] = c.radius();
  Json rule;
  for (const auto& [w, s] : c.rule()) rule[a.render(w)] = a.label(s);
  j["rule"] = rule;
  return j;
}

inline Json aut_json(const Substitution& sub, const AutGroupReport& rep, const ShiftQuotient& q) {
  const Alphabet& a = sub.alphabet();
  Json j;
  Json els = Json::array();
  for (std::size_t i = 0; i < rep.elements.size(); ++i) {
    Json e = code_json(rep.elements[i].code, a);
    e["inverse"] = code_json(rep.elements[i].inverse, a);
    e["class"] = q.class_of[i];
    els.push_back(e);
  }
  j["elements"] = els;
  Json qj;
  qj["order"] = q.order();
  qj["type"] = q.type;
  qj["abelian"] = q.abelian;
  qj["identity"] = q.identity;
  qj["element_orders"] = permutation_json(q.orders);
  Json table = Json::array();
  for (const auto& row : q.table) table.push_back(permutation_json(row));
  qj["table"] = table;
  qj["window"] = q.window;
  j["quotient"] = qj;
  j["certificate"] = rep.certificate();
  return j;
}

inline Json coinvariants_json(const DirectLimitGroup& g) {
  CoinvariantsReport r = coinvariants_report(g);
  const auto& p = g.presentation();
  const Alphabet& a = g.substitution().alphabet();
  Json j;
  Json pres;
  pres["power"] = p.power;
  if (p.base_letter) pres["base_letter"] = a.label(*p.base_letter);
  pres["towers"] = words_json(a, p.towers);
  pres["identity_recoding"] = p.identity_recoding;
  Json tm = Json::array();
  for (const auto& row : g.transition()) {
    Json rj = Json::array();
    for (const auto& x : row) rj.push_back(rational_json(Rational(x)));
    tm.push_back(rj);
  }
  pres["transition"] = tm;
  j["presentation"] = pres;
  j["free_rank"] = r.free_rank;
  j["torsion"] = Json::array();
  Json shape = Json::array();
  for (const auto& s : r.eventual_shape) shape.push_back(rational_json(Rational(s)));
  j["eventual_smith_shape"] = shape;
  j["trace_image"] = r.trace_image;
  j["trace_image_rank"] = r.trace_image_rank;
  j["infinitesimal_rank"] = r.infinitesimal_rank;
  return j;
}

inline Json return_system_json(const ReturnSystem& sys, const MeasureOracle& mo) {
  const Alphabet& a = sys.substitution().alphabet();
  Json j;
  j["return_words"] = words_json(a, sys.return_words());
  Json times = Json::array(), meas = Json::array();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    times.push_back(sys.return_words()[i].size());
    meas.push_back(element_json(sys.event_measure(mo, static_cast<Symbol>(i))));
  }
  j["return_times"] = times;
  j["event_measures"] = meas;
  j["base_measure"] = element_json(sys.base_measure(mo));
  FieldElement kac = sys.kac_sum(mo);
  j["kac_sum"] = element_json(kac);
  j["kac_exact"] = kac == mo.pf().one();
  return j;
}

inline Json flow_code_json(const FlowCode& fc) {
  const Alphabet& a = fc.source.substitution().alphabet();
  Json j;
  j["kind"] = fc.kind;
  j["source_return_words"] = words_json(a, fc.source.return_words());
  j["target_return_words"] = words_json(a, fc.target.return_words());
  auto code_on = [&](const SlidingBlockCode& c, const ReturnSystem& from, const ReturnSystem& to) {
    Json cj;
    cj["radius"] = c.radius();
    Json rule;
    for (const auto& [w, s] : c.rule()) {
      std::string key;
      for (Symbol k : w) key += "(" + a.render(from.return_words().at(static_cast<std::size_t>(k))) + ")";
      rule[key] = a.render(to.return_words().at(static_cast<std::size_t>(s)));
    }
    cj["rule"] = rule;
    return cj;
  };
  j["code"] = code_on(fc.code, fc.source, fc.target);
  j["inverse"] = code_on(fc.inverse, fc.target, fc.source);
  j["r_mu"] = element_json(r_mu(fc));
  j["certificate"] = fc.certificate();
  return j;
}

inline Json induced_action_json(const InducedAction& act) {
  auto mat = [](const IntMatrix& m) {
    Json arr = Json::array();
    for (const auto& row : m) {
      Json r = Json::array();
      for (const auto& x : row) r.push_back(rational_json(Rational(x)));
      arr.push_back(r);
    }
    return arr;
  };
  Json j;
  j["level"] = act.level;
  j["tower_matrix"] = mat(act.tower_matrix);
  if (act.letter_matrix) j["letter_matrix"] = mat(*act.letter_matrix);
  j["fixes_order_unit"] = act.fixes_order_unit;
  j["unit_trace"] = element_json(act.unit_trace);
  return j;
}

inline Json mcg_json(const Substitution& sub, const McgReport& rep) {
  const Alphabet& a = sub.alphabet();
  Json j;
  j["substitution"] = sub.render();
  j["lambda"] = lambda_json(rep.pf);
  j["pisot"] = rep.pisot;
  j["pisot_number"] = rep.pisot_number;
  j["cr"] = to_string(rep.cr);
  Json z;
  z["r_mu_xi"] = element_json(rep.r_mu_xi);
  z["equals_lambda"] = rep.r_mu_xi == rep.pf.lambda_element();
  if (rep.relation) z["relation"] = Json::array({rep.relation->first, rep.relation->second});
  j["z_part"] = z;
  Json f;
  f["asymptotic_classes"] = classes_json(rep.classes, a);
  f["bound"] = rational_json(Rational(rep.finite_bound));
  f["xi_action"] = permutation_json(rep.xi_action);
  f["xi_action_trivial"] = is_identity_permutation(rep.xi_action);
  if (rep.aut && rep.quotient) {
    f["automorphisms"] = aut_json(sub, *rep.aut, *rep.quotient);
    Json acts = Json::array();
    for (const auto& p : rep.aut_class_actions) acts.push_back(permutation_json(p));
    f["automorphism_class_actions"] = acts;
  }
  f["group"] = rep.finite_part;
  j["finite_part"] = f;
  Json m;
  m["finite_part"] = rep.finite_part;
  m["z_part"] = "Z";
  m["product"] = rep.product;
  m["structure"] = rep.structure;
  j["mcg"] = m;
  j["caveats"] = rep.caveats;
  return j;
}

inline Json sturmian_json(const SturmianVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.kind);
  j["reason"] = v.reason;
  if (v.beta) {
    const auto& b = *v.beta;
    j["beta"] = {{"b", b.b.str()}, {"a", b.a.str()}, {"D", b.d.str()}, {"c", b.c.str()}};
    j["beta_approx"] = b.approx();
  }
  if (v.conjugate_approx) j["conjugate_approx"] = *v.conjugate_approx;
  return j;
}

inline Json odometer_json(const OdometerReport& r) {
  Json j;
  j["preperiod"] = r.preperiod;
  j["period"] = r.period;
  j["period_primes"] = r.period_primes;
  j["coinvariants"] = r.coinvariants;
  j["unit_rank"] = r.unit_rank;
  j["presentation"] = r.presentation;
  return j;
}

inline Json hierarchical_json(const HierarchicalWordSpec& s, bool include_words) {
  Json j;
  j["N"] = s.n;
  Json levels = Json::array();
  Alphabet bin = Alphabet::numbered(2);
  for (const auto& lv : s.levels) {
    Json l;
    l["length"] = lv.w0.size();
    if (include_words) {
      l["w0"] = bin.render(lv.w0);
      l["w1"] = bin.render(lv.w1);
    }
    l["freq0"] = to_string(lv.freq0);
    l["freq0_above_half"] = lv.freq0 > Rational(1, 2);
    levels.push_back(l);
  }
  j["levels"] = levels;
  j["product_bound"] = to_string(s.product_bound);
  return j;
}

inline Json checklist_json(const Checklist& c) {
  Json j;
  Json w;
  w["n_lo"] = c.window.n_lo;
  w["n_hi"] = c.window.n_hi;
  w["min_ratio"] = to_string(c.window.min_ratio);
  w["max_ratio"] = to_string(c.window.max_ratio);
  w["k"] = c.window.k;
  w["ergodic_measure_bound"] = c.window.measure_bound;
  j["complexity_window"] = w;
  if (c.asymptotic_classes) j["asymptotic_classes"] = *c.asymptotic_classes;
  if (c.infinitesimal_rank) j["infinitesimal_rank"] = *c.infinitesimal_rank;
  j["verdict"] = c.verdict;
  return j;
}

}  // namespace flowmcg
