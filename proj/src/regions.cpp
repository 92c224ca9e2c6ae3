#include "crng/regions.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "crng/linprog.hpp"

namespace crng {
namespace {

constexpr double kMargin = 1e-9;

std::vector<std::vector<std::string>> nonempty_subsets(const std::vector<std::string>& items) {
  std::vector<std::vector<std::string>> out;
  const size_t n = items.size();
  for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
    std::vector<std::string> subset;
    for (size_t i = 0; i < n; ++i)
      if (mask & (uint64_t{1} << i)) subset.push_back(items[i]);
    out.push_back(std::move(subset));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void require_independent(const JointPMF& p, const std::vector<std::vector<std::string>>& groups,
                         const char* what) {
  std::vector<std::string> all;
  double sum = 0;
  for (const auto& g : groups) {
    sum += p.entropy(g);
    all.insert(all.end(), g.begin(), g.end());
  }
  if (std::abs(p.entropy(all) - sum) > 1e-9)
    throw std::invalid_argument(std::string(what) +
                                ": the required independence factorization is violated");
}

// Canonical scaling for dedup: leading nonzero coefficient becomes +/-1.
void normalize_row(LinearInequality& ineq) {
  for (auto it = ineq.coeffs.begin(); it != ineq.coeffs.end();) {
    if (it->second.is_zero())
      it = ineq.coeffs.erase(it);
    else
      ++it;
  }
  if (ineq.coeffs.empty()) return;
  Rational lead = ineq.coeffs.begin()->second;
  if (lead.is_negative()) lead = -lead;
  if (lead == Rational(1)) return;
  for (auto& [name, c] : ineq.coeffs) c = c / lead;
  ineq.bound /= lead.to_double();
}

std::string coeff_key(const LinearInequality& ineq) {
  std::string key;
  for (const auto& [name, c] : ineq.coeffs) key += name + ":" + c.to_string() + ";";
  return key;
}

// Keep the tighter of parallel half-spaces, drop exact duplicates and
// tautologies (0 <= nonnegative bound).
std::vector<LinearInequality> dedupe(std::vector<LinearInequality> rows) {
  std::map<std::string, size_t> seen;
  std::vector<LinearInequality> out;
  for (auto& row : rows) {
    normalize_row(row);
    if (row.coeffs.empty()) {
      if (row.bound < -kMargin)
        throw std::logic_error("inequality system is trivially infeasible");
      continue;
    }
    const std::string key = coeff_key(row);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen[key] = out.size();
      out.push_back(std::move(row));
    } else if (row.bound < out[it->second].bound) {
      out[it->second] = std::move(row);
    }
  }
  return out;
}

// LP data for a polytope over its own variable order.
struct LpView {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::map<std::string, size_t> var_index;
};

LpView lp_view(const Polytope& poly) {
  LpView v;
  for (size_t i = 0; i < poly.variables.size(); ++i) v.var_index[poly.variables[i]] = i;
  for (const auto& ineq : poly.inequalities) {
    std::vector<double> row(poly.variables.size(), 0.0);
    for (const auto& [name, c] : ineq.coeffs) {
      auto it = v.var_index.find(name);
      if (it == v.var_index.end())
        throw std::invalid_argument("inequality references unknown variable " + name);
      row[it->second] = c.to_double();
    }
    v.a.push_back(std::move(row));
    v.b.push_back(ineq.bound);
  }
  return v;
}

enum class Implication { Implied, NotImplied, Unbounded, EmptySystem };

// Does `sys` imply coeffs.x <= bound? Decided by maximizing the left side.
Implication implies(const LpView& sys, const std::vector<double>& coeffs, double bound) {
  LpResult r = lp_maximize(sys.a, sys.b, coeffs);
  switch (r.status) {
    case LpStatus::Infeasible:
      return Implication::EmptySystem;  // empty set satisfies everything
    case LpStatus::Unbounded:
      return Implication::Unbounded;
    case LpStatus::Optimal:
      return r.value <= bound + kMargin ? Implication::Implied : Implication::NotImplied;
  }
  return Implication::NotImplied;
}

// inner subset of outer: every outer inequality is implied by inner's system.
bool region_contained(const Polytope& inner, const Polytope& outer) {
  LpView view = lp_view(inner);
  for (const auto& ineq : outer.inequalities) {
    std::vector<double> obj(inner.variables.size(), 0.0);
    for (const auto& [name, c] : ineq.coeffs) {
      auto it = view.var_index.find(name);
      if (it == view.var_index.end())
        throw std::invalid_argument("region comparison across different variables: " + name);
      obj[it->second] = c.to_double();
    }
    switch (implies(view, obj, ineq.bound)) {
      case Implication::Implied:
        continue;
      case Implication::EmptySystem:
        return true;  // empty inner set
      default:
        return false;
    }
  }
  return true;
}

}  // namespace

double LinearInequality::evaluate(const std::map<std::string, double>& point) const {
  double v = 0;
  for (const auto& [name, c] : coeffs) {
    auto it = point.find(name);
    if (it == point.end()) throw std::invalid_argument("point is missing variable " + name);
    v += c.to_double() * it->second;
  }
  return v;
}

bool Polytope::contains(const std::map<std::string, double>& point, double margin) const {
  for (const auto& ineq : inequalities)
    if (ineq.evaluate(point) > ineq.bound + margin) return false;
  return true;
}

std::string Polytope::pretty() const {
  std::ostringstream os;
  for (const auto& ineq : inequalities) {
    bool first = true;
    for (const auto& [name, c] : ineq.coeffs) {
      const double v = c.to_double();
      if (first) {
        if (v == -1)
          os << "-" << name;
        else if (v == 1)
          os << name;
        else
          os << v << " " << name;
        first = false;
      } else {
        os << (v < 0 ? " - " : " + ");
        const double av = std::abs(v);
        if (av != 1) os << av << " ";
        os << name;
      }
    }
    os << " <= " << ineq.bound;
    if (!ineq.provenance.empty()) os << "   [" << ineq.provenance << "]";
    os << "\n";
  }
  return os.str();
}

namespace {

// Shared builder for the conditional-entropy lower bounds on the auxiliary
// rates: one inequality per (decoder, nonempty decode subset).
void append_rate_lower_bounds(const JointPMF& p, const std::vector<DecoderSpec>& decoders,
                              std::vector<LinearInequality>* rows) {
  for (const auto& dec : decoders) {
    if (dec.decodes.empty()) throw std::invalid_argument("decoder with empty decode set");
    for (const auto& subset : nonempty_subsets(dec.decodes)) {
      std::vector<std::string> given = dec.side_info;
      for (const auto& s : dec.decodes)
        if (std::find(subset.begin(), subset.end(), s) == subset.end()) given.push_back(s);
      const double h = p.entropy(subset, given);
      LinearInequality ineq;
      for (const auto& s : subset) ineq.coeffs["r_" + s] = Rational(-1);
      ineq.bound = -h;
      ineq.provenance = "H(" + join(subset, ",") +
                        (given.empty() ? "" : "|" + join(given, ",")) + ") = " + std::to_string(h);
      rows->push_back(std::move(ineq));
    }
  }
}

}  // namespace

Polytope source_region(const JointPMF& p, const std::vector<DecoderSpec>& decoders) {
  Polytope poly;
  std::set<std::string> vars;
  for (const auto& dec : decoders)
    for (const auto& s : dec.decodes) vars.insert("r_" + s);
  poly.variables.assign(vars.begin(), vars.end());
  append_rate_lower_bounds(p, decoders, &poly.inequalities);
  poly.inequalities = dedupe(std::move(poly.inequalities));
  return poly;
}

Polytope channel_region_raw(const JointPMF& p, const std::vector<std::string>& messages,
                            const std::vector<DecoderSpec>& decoders, ChannelVariant variant,
                            const std::vector<std::vector<std::string>>& encoder_groups) {
  if (messages.empty()) throw std::invalid_argument("no messages");

  Polytope poly;
  for (const auto& s : messages) poly.variables.push_back("R_" + s);
  for (const auto& s : messages) poly.variables.push_back("r_" + s);

  // R_s >= 0 and r_s >= 0
  for (const auto& s : messages) {
    LinearInequality rpos;
    rpos.coeffs["R_" + s] = Rational(-1);
    rpos.bound = 0;
    poly.inequalities.push_back(rpos);
    LinearInequality apos;
    apos.coeffs["r_" + s] = Rational(-1);
    apos.bound = 0;
    poly.inequalities.push_back(apos);
  }

  append_rate_lower_bounds(p, decoders, &poly.inequalities);

  if (variant == ChannelVariant::General) {
    std::vector<std::vector<std::string>> singletons;
    for (const auto& s : messages) singletons.push_back({s});
    require_independent(p, singletons, "general channel region");
    for (const auto& s : messages) {
      const double h = p.entropy({s});
      LinearInequality ineq;
      ineq.coeffs["R_" + s] = Rational(1);
      ineq.coeffs["r_" + s] = Rational(1);
      ineq.bound = h;
      ineq.provenance = "H(" + s + ") = " + std::to_string(h);
      poly.inequalities.push_back(std::move(ineq));
    }
  } else {
    if (encoder_groups.empty())
      throw std::invalid_argument("disjoint variant needs the encoder partition");
    std::set<std::string> seen;
    for (const auto& g : encoder_groups)
      for (const auto& s : g)
        if (!seen.insert(s).second)
          throw std::invalid_argument("encoder groups must be disjoint: " + s);
    for (const auto& s : messages)
      if (!seen.count(s)) throw std::invalid_argument("message not covered by a group: " + s);
    require_independent(p, encoder_groups, "disjoint channel region");
    for (const auto& group : encoder_groups) {
      for (const auto& subset : nonempty_subsets(group)) {
        const double h = p.entropy(subset);
        LinearInequality ineq;
        for (const auto& s : subset) {
          ineq.coeffs["R_" + s] = Rational(1);
          ineq.coeffs["r_" + s] = Rational(1);
        }
        ineq.bound = h;
        ineq.provenance = "H(" + join(subset, ",") + ") = " + std::to_string(h);
        poly.inequalities.push_back(std::move(ineq));
      }
    }
  }
  poly.inequalities = dedupe(std::move(poly.inequalities));
  return poly;
}

Polytope fourier_motzkin(const Polytope& poly, const std::string& eliminate) {
  Polytope out;
  for (const auto& v : poly.variables)
    if (v != eliminate) out.variables.push_back(v);

  std::vector<LinearInequality> uppers, lowers;
  for (const auto& ineq : poly.inequalities) {
    auto it = ineq.coeffs.find(eliminate);
    if (it == ineq.coeffs.end() || it->second.is_zero()) {
      out.inequalities.push_back(ineq);
      out.inequalities.back().coeffs.erase(eliminate);
    } else if (it->second.is_negative()) {
      lowers.push_back(ineq);
    } else {
      uppers.push_back(ineq);
    }
  }

  for (const auto& up : uppers) {
    const Rational cu = up.coeffs.at(eliminate);
    for (const auto& lo : lowers) {
      const Rational cl = lo.coeffs.at(eliminate);  // negative
      // (-cl) * up + cu * lo eliminates the variable; both multipliers > 0
      const Rational mu = -cl;
      const Rational ml = cu;
      LinearInequality combined;
      for (const auto& [name, c] : up.coeffs)
        if (name != eliminate) combined.coeffs[name] = mu * c;
      for (const auto& [name, c] : lo.coeffs) {
        if (name == eliminate) continue;
        auto [it2, inserted] = combined.coeffs.try_emplace(name, ml * c);
        if (!inserted) it2->second = it2->second + ml * c;
      }
      combined.bound = mu.to_double() * up.bound + ml.to_double() * lo.bound;
      if (!up.provenance.empty() && !lo.provenance.empty())
        combined.provenance = up.provenance + " , " + lo.provenance;
      out.inequalities.push_back(std::move(combined));
    }
  }
  out.inequalities = dedupe(std::move(out.inequalities));
  return out;
}

Polytope remove_redundant(const Polytope& poly, std::vector<std::string>* warnings) {
  Polytope out;
  out.variables = poly.variables;
  out.inequalities = dedupe(poly.inequalities);

  // One pass, dropping as we go: testing row i against the currently
  // retained remainder keeps exactly one representative of mutually implied
  // rows and is order-deterministic.
  size_t i = 0;
  while (i < out.inequalities.size()) {
    Polytope rest;
    rest.variables = out.variables;
    for (size_t k = 0; k < out.inequalities.size(); ++k)
      if (k != i) rest.inequalities.push_back(out.inequalities[k]);
    if (rest.inequalities.empty()) break;

    LpView view = lp_view(rest);
    std::vector<double> obj(out.variables.size(), 0.0);
    for (const auto& [name, c] : out.inequalities[i].coeffs)
      obj[view.var_index.at(name)] = c.to_double();

    switch (implies(view, obj, out.inequalities[i].bound)) {
      case Implication::Implied:
        out.inequalities.erase(out.inequalities.begin() + static_cast<long>(i));
        break;
      case Implication::EmptySystem:
        // the remainder is already infeasible; keep the row and move on
        if (warnings) warnings->push_back("system infeasible while testing redundancy");
        ++i;
        break;
      case Implication::Unbounded:
        ++i;
        break;
      case Implication::NotImplied:
        ++i;
        break;
    }
  }
  return out;
}

bool polytope_equal(const Polytope& a, const Polytope& b) {
  std::vector<std::string> va = a.variables, vb = b.variables;
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  if (va != vb) throw std::invalid_argument("polytope variable sets differ");
  return region_contained(a, b) && region_contained(b, a);
}

Polytope eliminate_aux_rates(const Polytope& poly) {
  Polytope current = poly;
  std::vector<std::string> aux;
  for (const auto& v : current.variables)
    if (v.rfind("r_", 0) == 0) aux.push_back(v);
  for (const auto& v : aux) {
    current = fourier_motzkin(current, v);
    current = remove_redundant(current);
  }
  return current;
}

Polytope mac_explicit_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                             const std::string& z2, const std::string& y) {
  require_independent(p, {{z0}, {z1}, {z2}}, "MAC explicit region");
  Polytope poly;
  poly.variables = {"R_" + z0, "R_" + z1, "R_" + z2};

  auto add = [&poly](std::vector<std::pair<std::string, int>> terms, double bound,
                     std::string why) {
    LinearInequality ineq;
    for (auto& [v, c] : terms) ineq.coeffs[v] = Rational(c);
    ineq.bound = bound;
    ineq.provenance = std::move(why);
    poly.inequalities.push_back(std::move(ineq));
  };

  const std::string r0 = "R_" + z0, r1 = "R_" + z1, r2 = "R_" + z2;
  add({{r0, 1}}, p.mutual_information({z0}, {y}, {z1, z2}), "I(" + z0 + ";Y|" + z1 + z2 + ")");
  add({{r1, 1}}, p.mutual_information({z1}, {y}, {z0, z2}), "I(" + z1 + ";Y|" + z0 + z2 + ")");
  add({{r2, 1}}, p.mutual_information({z2}, {y}, {z0, z1}), "I(" + z2 + ";Y|" + z0 + z1 + ")");
  add({{r0, 1}, {r1, 1}}, p.mutual_information({z0, z1}, {y}, {z2}),
      "I(" + z0 + z1 + ";Y|" + z2 + ")");
  add({{r0, 1}, {r2, 1}}, p.mutual_information({z0, z2}, {y}, {z1}),
      "I(" + z0 + z2 + ";Y|" + z1 + ")");
  add({{r1, 1}, {r2, 1}}, p.mutual_information({z1, z2}, {y}, {z0}),
      "I(" + z1 + z2 + ";Y|" + z0 + ")");
  add({{r0, 1}, {r1, 1}, {r2, 1}}, p.mutual_information({z0, z1, z2}, {y}),
      "I(" + z0 + z1 + z2 + ";Y)");
  add({{r0, -1}}, 0, "");
  add({{r1, -1}}, 0, "");
  add({{r2, -1}}, 0, "");
  return poly;
}

Polytope bc_explicit_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                            const std::string& z2, const std::string& y1, const std::string& y2) {
  Polytope poly;
  poly.variables = {"R_" + z0, "R_" + z1, "R_" + z2};
  const std::string r0 = "R_" + z0, r1 = "R_" + z1, r2 = "R_" + z2;

  const double i0_1 = p.mutual_information({z0}, {z1, y1});
  const double i0_2 = p.mutual_information({z0}, {z2, y2});
  const double i1 = p.mutual_information({z1}, {z0, y1});
  const double i2 = p.mutual_information({z2}, {z0, y2});
  const double i1g0 = p.mutual_information({z1}, {y1}, {z0});
  const double i2g0 = p.mutual_information({z2}, {y2}, {z0});
  const double i0y1 = p.mutual_information({z0}, {y1});
  const double i0y2 = p.mutual_information({z0}, {y2});
  const double i12 = p.mutual_information({z1}, {z2});
  const double i12g0 = p.mutual_information({z1}, {z2}, {z0});
  const double i01y1 = p.mutual_information({z0, z1}, {y1});
  const double i02y2 = p.mutual_information({z0, z2}, {y2});

  auto add = [&poly](std::vector<std::pair<std::string, int>> terms, double bound,
                     std::string why) {
    LinearInequality ineq;
    for (auto& [v, c] : terms) ineq.coeffs[v] = Rational(c);
    ineq.bound = bound;
    ineq.provenance = std::move(why);
    poly.inequalities.push_back(std::move(ineq));
  };

  add({{r0, 1}}, i0_1, "I(Z0;Z1,Y1)");
  add({{r0, 1}}, i0_2, "I(Z0;Z2,Y2)");
  add({{r1, 1}}, i1, "I(Z1;Z0,Y1)");
  add({{r2, 1}}, i2, "I(Z2;Z0,Y2)");
  add({{r0, 1}, {r1, 1}}, i1g0 + i0y1, "I(Z1;Y1|Z0)+I(Z0;Y1)");
  add({{r0, 1}, {r1, 1}}, i1g0 + i0_2, "I(Z1;Y1|Z0)+I(Z0;Z2,Y2)");
  add({{r0, 1}, {r2, 1}}, i2g0 + i0y2, "I(Z2;Y2|Z0)+I(Z0;Y2)");
  add({{r0, 1}, {r2, 1}}, i2g0 + i0_1, "I(Z2;Y2|Z0)+I(Z0;Z1,Y1)");
  add({{r1, 1}, {r2, 1}}, i1 + i2 - i12, "I(Z1;Z0,Y1)+I(Z2;Z0,Y2)-I(Z1;Z2)");
  add({{r0, 1}, {r1, 1}, {r2, 1}}, i1g0 + i2g0 - i12g0 + i0y1,
      "I(Z1;Y1|Z0)+I(Z2;Y2|Z0)-I(Z1;Z2|Z0)+I(Z0;Y1)");
  add({{r0, 1}, {r1, 1}, {r2, 1}}, i1g0 + i2g0 - i12g0 + i0y2,
      "I(Z1;Y1|Z0)+I(Z2;Y2|Z0)-I(Z1;Z2|Z0)+I(Z0;Y2)");
  add({{r0, 2}, {r1, 1}, {r2, 1}}, i01y1 + i02y2 - i12g0,
      "I(Z0,Z1;Y1)+I(Z0,Z2;Y2)-I(Z1;Z2|Z0)");
  add({{r0, -1}}, 0, "");
  add({{r1, -1}}, 0, "");
  add({{r2, -1}}, 0, "");
  return poly;
}

Polytope marton_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                       const std::string& z2, const std::string& y1, const std::string& y2) {
  Polytope poly;
  poly.variables = {"R_" + z0, "R_" + z1, "R_" + z2};
  const std::string r0 = "R_" + z0, r1 = "R_" + z1, r2 = "R_" + z2;

  const double i0y1 = p.mutual_information({z0}, {y1});
  const double i0y2 = p.mutual_information({z0}, {y2});
  const double i1g0 = p.mutual_information({z1}, {y1}, {z0});
  const double i2g0 = p.mutual_information({z2}, {y2}, {z0});
  const double i12g0 = p.mutual_information({z1}, {z2}, {z0});
  const double i01y1 = p.mutual_information({z0, z1}, {y1});
  const double i02y2 = p.mutual_information({z0, z2}, {y2});

  auto add = [&poly](std::vector<std::pair<std::string, int>> terms, double bound,
                     std::string why) {
    LinearInequality ineq;
    for (auto& [v, c] : terms) ineq.coeffs[v] = Rational(c);
    ineq.bound = bound;
    ineq.provenance = std::move(why);
    poly.inequalities.push_back(std::move(ineq));
  };

  add({{r0, 1}}, i0y1, "I(Z0;Y1)");
  add({{r0, 1}}, i0y2, "I(Z0;Y2)");
  add({{r0, 1}, {r1, 1}}, i01y1, "I(Z0,Z1;Y1)");
  add({{r0, 1}, {r2, 1}}, i02y2, "I(Z0,Z2;Y2)");
  add({{r0, 1}, {r1, 1}, {r2, 1}}, i1g0 + i2g0 - i12g0 + i0y1,
      "I(Z1;Y1|Z0)+I(Z2;Y2|Z0)-I(Z1;Z2|Z0)+I(Z0;Y1)");
  add({{r0, 1}, {r1, 1}, {r2, 1}}, i1g0 + i2g0 - i12g0 + i0y2,
      "I(Z1;Y1|Z0)+I(Z2;Y2|Z0)-I(Z1;Z2|Z0)+I(Z0;Y2)");
  add({{r0, -1}}, 0, "");
  add({{r1, -1}}, 0, "");
  add({{r2, -1}}, 0, "");
  return poly;
}

RegionRelation compare_regions(const Polytope& a, const Polytope& b) {
  const bool a_in_b = region_contained(a, b);
  const bool b_in_a = region_contained(b, a);
  if (a_in_b && b_in_a) return RegionRelation::Equal;
  if (a_in_b) return RegionRelation::FirstInsideSecond;
  if (b_in_a) return RegionRelation::SecondInsideFirst;
  return RegionRelation::Incomparable;
}

}  // namespace crng
