#pragma once

#include <map>
#include <string>
#include <vector>

#include "crng/pmf.hpp"
#include "crng/rational.hpp"

namespace crng {

// One closed half-space: sum of coeff * var <= bound (bits). Coefficients are
// exact rationals; bounds are entropy combinations in double precision with a
// fixed 1e-9 decision margin everywhere downstream.
struct LinearInequality {
  std::map<std::string, Rational> coeffs;
  double bound = 0;
  std::string provenance;  // which entropy terms produced the bound, for printing

  double evaluate(const std::map<std::string, double>& point) const;
};

// H-representation of a rate-region polytope.
struct Polytope {
  std::vector<std::string> variables;
  std::vector<LinearInequality> inequalities;

  bool contains(const std::map<std::string, double>& point, double margin = 1e-9) const;
  std::string pretty() const;
};

// A decoder's view for region construction: which Z-variables it reproduces
// and which variables it observes as side information.
struct DecoderSpec {
  std::vector<std::string> decodes;
  std::vector<std::string> side_info;
};

// Source-coding region over the auxiliary rates {r_Z}: for every decoder j
// and nonempty subset D' of its decode set,
//   sum_{s in D'} r_s >= H(Z_D' | Y_j, Z_{D_j \ D'}).
Polytope source_region(const JointPMF& p, const std::vector<DecoderSpec>& decoders);

enum class ChannelVariant { General, Disjoint };

// Channel-coding region over {R_s} and {r_s} before elimination. The general
// variant requires the Z's in `messages` to be mutually independent under p
// and adds R_s + r_s <= H(Z_s) per message; the disjoint variant requires
// independence across encoder groups and adds, per encoder i and nonempty
// S' of its group, sum_{s in S'} [R_s + r_s] <= H(Z_S').
Polytope channel_region_raw(const JointPMF& p, const std::vector<std::string>& messages,
                            const std::vector<DecoderSpec>& decoders, ChannelVariant variant,
                            const std::vector<std::vector<std::string>>& encoder_groups = {});

// Exact projection: drops `eliminate` by combining every (upper, lower) pair.
Polytope fourier_motzkin(const Polytope& poly, const std::string& eliminate);

// Drops every inequality implied by the others (LP feasibility, 1e-9 margin).
// Unbounded-direction probes leave the inequality in place and add a warning.
Polytope remove_redundant(const Polytope& poly, std::vector<std::string>* warnings = nullptr);

// Mutual implication of the two H-representations via LP, 1e-9 margin.
bool polytope_equal(const Polytope& a, const Polytope& b);

// Eliminates all r_* variables and prunes; the standard pipeline for the
// regions the explicit constructors below are compared against.
Polytope eliminate_aux_rates(const Polytope& poly);

// Multiple-access configuration: messages Z0, Z1, Z2 (Z0 common), encoders
// S_1 = {Z0, Z1}, S_2 = {Z0, Z2}, one decoder with D = {Z0, Z1, Z2} seeing Y.
// The seven mutual-information inequalities plus nonnegativity.
Polytope mac_explicit_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                             const std::string& z2, const std::string& y);

// Broadcast configuration: one encoder with S = {Z0, Z1, Z2}, decoders
// D_1 = {Z0, Z1} seeing Y1 and D_2 = {Z0, Z2} seeing Y2. The eight-line
// inequality list (mins expanded), plus nonnegativity.
Polytope bc_explicit_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                            const std::string& z2, const std::string& y1, const std::string& y2);

// Marton inner region with common message, per-distribution inequality list.
Polytope marton_region(const JointPMF& p, const std::string& z0, const std::string& z1,
                       const std::string& z2, const std::string& y1, const std::string& y2);

// Pointwise containment report between two regions on the same variables.
enum class RegionRelation { Equal, FirstInsideSecond, SecondInsideFirst, Incomparable };
RegionRelation compare_regions(const Polytope& a, const Polytope& b);

}  // namespace crng
