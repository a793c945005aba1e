#include <json.hpp>

#include "banana/series.hpp"

namespace ban {

using nlohmann::ordered_json;

namespace {

ordered_json bound(std::int64_t x) {
  if (x >= kInf) return "inf";
  if (x <= -kInf) return "-inf";
  return x;
}

std::int64_t unbound(const ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw DomainError("bad bound '" + s + "'");
  }
  return j.get<std::int64_t>();
}

ordered_json rational(const Rational& r) {
  return ordered_json{{"numerator", r.get_num().get_str()}, {"denominator", r.get_den().get_str()}};
}

Rational rational(const ordered_json& j) {
  Integer n(j.at("numerator").get<std::string>()), d(j.at("denominator").get<std::string>());
  if (sgn(d) <= 0) throw DomainError("denominator must be positive");
  Rational r(n, d);
  r.canonicalize();
  if (r.get_den() != d) throw DomainError("rational not in lowest terms");
  return r;
}

}  // namespace

std::string to_json(const MultiSeries& a, int indent) {
  const Frame& f = a.frame();
  ordered_json doc;
  auto hull = a.hull();
  ordered_json vars = ordered_json::array();
  for (int v = 0; v < f.nvars(); ++v) {
    // Window: stored hull, widened upward to the cutoff of a grading that bounds
    // this variable alone.
    long lo = hull ? (*hull)[v].first : 0, hi = hull ? (*hull)[v].second : 0;
    for (int g = 0; g < f.ngrad(); ++g) {
      bool alone = f.weights[g][v] > 0;
      for (int u = 0; u < f.nvars(); ++u) alone = alone && (u == v || f.weights[g][u] == 0);
      if (alone && a.cutoffs()[g] < kInf) hi = std::max<long>(hi, a.cutoffs()[g] / f.weights[g][v]);
    }
    vars.push_back({{"name", f.vars[v].name},
                    {"exponent_denominator", f.vars[v].den},
                    {"window", {lo, hi}}});
  }
  doc["variables"] = vars;
  ordered_json grads = ordered_json::array();
  for (int g = 0; g < f.ngrad(); ++g)
    grads.push_back({{"weights", f.weights[g]},
                     {"cutoff", bound(a.cutoffs()[g])},
                     {"valuation", bound(a.vals()[g])},
                     {"default_cutoff", bound(f.cutoffs[g])}});
  doc["gradings"] = grads;
  ordered_json terms = ordered_json::array();
  for (const auto& [e, c] : a.terms()) {
    ordered_json t = {{"exponents", e}};
    t.update(rational(c));
    terms.push_back(t);
  }
  doc["terms"] = terms;
  doc["zeta3_multiple"] = rational(a.zeta3());
  return doc.dump(indent);
}

MultiSeries from_json(const std::string& text) {
  ordered_json doc = ordered_json::parse(text);
  std::vector<VarSpec> vars;
  for (const auto& v : doc.at("variables"))
    vars.push_back({v.at("name").get<std::string>(), v.at("exponent_denominator").get<int>()});
  std::vector<std::vector<int>> weights;
  std::vector<std::int64_t> cut, val, defaults;
  if (doc.contains("gradings")) {
    for (const auto& g : doc.at("gradings")) {
      weights.push_back(g.at("weights").get<std::vector<int>>());
      cut.push_back(unbound(g.at("cutoff")));
      val.push_back(unbound(g.at("valuation")));
      defaults.push_back(g.contains("default_cutoff") ? unbound(g.at("default_cutoff")) : cut.back());
    }
  } else {
    // Plain per-variable windows: one grading per variable bounding it from above.
    const auto& vs = doc.at("variables");
    for (std::size_t v = 0; v < vars.size(); ++v) {
      std::vector<int> w(vars.size(), 0);
      w[v] = 1;
      weights.push_back(w);
      cut.push_back(vs[v].at("window")[1].get<std::int64_t>());
      val.push_back(vs[v].at("window")[0].get<std::int64_t>());
      defaults.push_back(cut.back());
    }
  }
  FramePtr f = make_frame(vars, weights, defaults);
  std::vector<std::pair<Exps, Rational>> terms;
  for (const auto& t : doc.at("terms")) terms.emplace_back(t.at("exponents").get<Exps>(), rational(t));
  MultiSeries s = MultiSeries::from_terms(f, terms, cut, val);
  if (s.size() != terms.size()) throw DomainError("serialized term outside its known region");
  return s.with_zeta3(rational(doc.at("zeta3_multiple")));
}

}  // namespace ban
