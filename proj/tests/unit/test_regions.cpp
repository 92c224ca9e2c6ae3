#include <doctest.h>

#include <cmath>

#include "crng/linprog.hpp"
#include "crng/pmf.hpp"
#include "crng/regions.hpp"
#include "support/random_dists.hpp"

using crng_test::random_dyadic_pmf;
using crng_test::random_dyadic_kernel;
using crng_test::random_mac_joint;
using crng_test::random_bc_joint;

using namespace crng;

namespace {

LinearInequality row(std::vector<std::pair<std::string, int64_t>> coeffs, double bound) {
  LinearInequality ineq;
  for (auto& [v, c] : coeffs) ineq.coeffs[v] = Rational(c);
  ineq.bound = bound;
  return ineq;
}

Polytope mac_fm_region(const JointPMF& joint) {
  std::vector<DecoderSpec> decoders = {{{"Z0", "Z1", "Z2"}, {"Y"}}};
  const Polytope raw =
      channel_region_raw(joint, {"Z0", "Z1", "Z2"}, decoders, ChannelVariant::General);
  return eliminate_aux_rates(raw);
}

Polytope bc_fm_region(const JointPMF& joint) {
  std::vector<DecoderSpec> decoders = {{{"Z0", "Z1"}, {"Y1"}}, {{"Z0", "Z2"}, {"Y2"}}};
  const Polytope raw = channel_region_raw(joint, {"Z0", "Z1", "Z2"}, decoders,
                                          ChannelVariant::Disjoint, {{"Z0", "Z1", "Z2"}});
  return eliminate_aux_rates(raw);
}

}  // namespace

TEST_CASE("lp_maximize sanity") {
  // max x + y s.t. x <= 1, y <= 2, x + y <= 2.5, -x <= 0, -y <= 0
  LpResult r = lp_maximize({{1, 0}, {0, 1}, {1, 1}, {-1, 0}, {0, -1}}, {1, 2, 2.5, 0, 0}, {1, 1});
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-9));

  // unbounded: max x with only x >= 0
  CHECK(lp_maximize({{-1.0}}, {0.0}, {1.0}).status == LpStatus::Unbounded);

  // infeasible: x <= -1, -x <= 0
  CHECK(lp_maximize({{1.0}, {-1.0}}, {-1.0, 0.0}, {1.0}).status == LpStatus::Infeasible);

  // negative-rhs feasible system: x <= 3, -x <= -2 (x >= 2)
  r = lp_maximize({{1.0}, {-1.0}}, {3.0, -2.0}, {-1.0});
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("fourier_motzkin eliminates one pair") {
  Polytope poly;
  poly.variables = {"R", "r"};
  poly.inequalities.push_back(row({{"r", -1}}, -0.3));          // r >= 0.3
  poly.inequalities.push_back(row({{"R", 1}, {"r", 1}}, 1.0));  // R + r <= 1
  poly.inequalities.push_back(row({{"R", -1}}, 0.0));           // R >= 0

  const Polytope projected = fourier_motzkin(poly, "r");
  Polytope expected;
  expected.variables = {"R"};
  expected.inequalities.push_back(row({{"R", 1}}, 0.7));
  expected.inequalities.push_back(row({{"R", -1}}, 0.0));
  CHECK(polytope_equal(projected, expected));
}

TEST_CASE("fourier_motzkin drops an unconstrained variable cleanly") {
  Polytope poly;
  poly.variables = {"a", "b"};
  poly.inequalities.push_back(row({{"a", 1}}, 2.0));
  const Polytope projected = fourier_motzkin(poly, "b");
  CHECK(projected.variables == std::vector<std::string>{"a"});
  REQUIRE(projected.inequalities.size() == 1);
  CHECK(projected.inequalities[0].bound == doctest::Approx(2.0));
}

TEST_CASE("remove_redundant") {
  Polytope poly;
  poly.variables = {"R"};
  poly.inequalities.push_back(row({{"R", 1}}, 1.0));
  poly.inequalities.push_back(row({{"R", 1}}, 2.0));
  poly.inequalities.push_back(row({{"R", 1}}, 1.0));  // duplicate
  poly.inequalities.push_back(row({{"R", -1}}, 0.0));
  const Polytope cleaned = remove_redundant(poly);
  CHECK(cleaned.inequalities.size() == 2);
  Polytope expected;
  expected.variables = {"R"};
  expected.inequalities.push_back(row({{"R", 1}}, 1.0));
  expected.inequalities.push_back(row({{"R", -1}}, 0.0));
  CHECK(polytope_equal(cleaned, expected));
}

TEST_CASE("polytope_equal basics") {
  Polytope a;
  a.variables = {"R"};
  a.inequalities.push_back(row({{"R", 1}}, 1.0));
  a.inequalities.push_back(row({{"R", -1}}, 0.0));
  CHECK(polytope_equal(a, a));

  Polytope b = a;
  b.inequalities[0].bound = 0.9;
  CHECK_FALSE(polytope_equal(a, b));

  Polytope c;
  c.variables = {"S"};
  c.inequalities.push_back(row({{"S", 1}}, 1.0));
  CHECK_THROWS_AS(polytope_equal(a, c), std::invalid_argument);
}

TEST_CASE("source region reproduces Slepian-Wolf for the symmetric pair") {
  const JointPMF dsbs = make_dsbs("Z1", "Z2", 0.11);
  const Polytope region = source_region(dsbs, {{{"Z1", "Z2"}, {}}});
  CHECK(region.inequalities.size() == 3);

  const double h = binary_entropy(0.11);
  std::map<std::string, double> corner = {{"r_Z1", h}, {"r_Z2", 1.0}};
  CHECK(region.contains(corner, 1e-9));
  corner["r_Z1"] = h - 0.05;
  CHECK_FALSE(region.contains(corner, 1e-9));

  // bounds are the three conditional entropies
  for (const auto& ineq : region.inequalities) {
    if (ineq.coeffs.size() == 2)
      CHECK(-ineq.bound == doctest::Approx(1.0 + h).epsilon(1e-9));
  }
}

TEST_CASE("source region with several decoders and side information") {
  JointPMF joint = make_dsbs("Z1", "Z2", 0.11);
  joint = compose(joint, make_bsc("Z1", "Y1", 0.2));
  joint = compose(joint, make_bsc("Z2", "Y2", 0.3));
  const Polytope region =
      source_region(joint, {{{"Z1"}, {"Y1"}}, {{"Z2"}, {"Y2"}}});
  REQUIRE(region.inequalities.size() == 2);
  for (const auto& ineq : region.inequalities) {
    REQUIRE(ineq.coeffs.size() == 1);
    const std::string& var = ineq.coeffs.begin()->first;
    const double h = var == "r_Z1" ? joint.entropy({"Z1"}, {"Y1"})
                                   : joint.entropy({"Z2"}, {"Y2"});
    CHECK(-ineq.bound == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("source region degenerate cases") {
  SUBCASE("independent sources bound each rate by its own entropy") {
    const JointPMF p = product(make_bernoulli("Z1", 0.2), make_bernoulli("Z2", 0.3));
    const Polytope region = source_region(p, {{{"Z1", "Z2"}, {}}});
    std::map<std::string, double> point = {{"r_Z1", binary_entropy(0.2) + 1e-6},
                                           {"r_Z2", binary_entropy(0.3) + 1e-6}};
    CHECK(region.contains(point, 1e-9));
    point["r_Z1"] = binary_entropy(0.2) - 1e-3;
    CHECK_FALSE(region.contains(point, 1e-9));
  }
  SUBCASE("deterministic sources leave the nonnegative orthant") {
    const JointPMF p = JointPMF({{"Z1", 2}, {"Z2", 2}}, {1.0, 0.0, 0.0, 0.0});
    const Polytope region = source_region(p, {{{"Z1", "Z2"}, {}}});
    CHECK(region.contains({{"r_Z1", 0.0}, {"r_Z2", 0.0}}, 1e-9));
  }
}

TEST_CASE("point-to-point BSC region") {
  const JointPMF joint = compose(make_bernoulli("Z", 0.5), make_bsc("Z", "Y", 0.11));
  const Polytope raw =
      channel_region_raw(joint, {"Z"}, {{{"Z"}, {"Y"}}}, ChannelVariant::General);

  // before elimination: R >= 0, r >= h(0.11), R + r <= 1
  Polytope expected_raw;
  expected_raw.variables = {"R_Z", "r_Z"};
  expected_raw.inequalities.push_back(row({{"R_Z", -1}}, 0.0));
  expected_raw.inequalities.push_back(row({{"r_Z", -1}}, -binary_entropy(0.11)));
  expected_raw.inequalities.push_back(row({{"R_Z", 1}, {"r_Z", 1}}, 1.0));
  CHECK(raw.inequalities.size() == 3);
  CHECK(polytope_equal(raw, expected_raw));

  const Polytope region = eliminate_aux_rates(raw);
  Polytope expected;
  expected.variables = {"R_Z"};
  expected.inequalities.push_back(row({{"R_Z", 1}}, 1.0 - binary_entropy(0.11)));
  expected.inequalities.push_back(row({{"R_Z", -1}}, 0.0));
  CHECK(polytope_equal(region, expected));
}

TEST_CASE("degenerate channel collapses the rate to zero") {
  JointPMF joint = make_bernoulli("Z", 0.5);
  joint = compose(joint, make_bsc("Z", "Y", 0.5));  // output independent of input
  const Polytope region = eliminate_aux_rates(
      channel_region_raw(joint, {"Z"}, {{{"Z"}, {"Y"}}}, ChannelVariant::General));
  CHECK(region.contains({{"R_Z", 0.0}}, 1e-9));
  CHECK_FALSE(region.contains({{"R_Z", 0.01}}, 1e-9));
}

TEST_CASE("general variant rejects dependent auxiliaries") {
  const JointPMF dependent = compose(make_dsbs("Z0", "Z1", 0.1), make_bsc("Z0", "Y", 0.2));
  CHECK_THROWS_AS(
      channel_region_raw(dependent, {"Z0", "Z1"}, {{{"Z0", "Z1"}, {"Y"}}}, ChannelVariant::General),
      std::invalid_argument);
}

TEST_CASE("raw channel region inequality count") {
  Rng rng(5);
  const JointPMF joint = random_mac_joint(rng);
  const Polytope raw = channel_region_raw(joint, {"Z0", "Z1", "Z2"},
                                          {{{"Z0", "Z1", "Z2"}, {"Y"}}}, ChannelVariant::General);
  // 7 decoder subsets + 2|S| = 6 rate constraints; the three r >= 0 rows are
  // absorbed by the tighter singleton entropy bounds
  CHECK(raw.inequalities.size() == 13);
}

TEST_CASE("MAC: eliminated region equals the explicit seven-bound form") {
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const JointPMF joint = random_mac_joint(rng, trial % 2 ? 3 : 2);
    const Polytope fm = mac_fm_region(joint);
    const Polytope explicit_region = mac_explicit_region(joint, "Z0", "Z1", "Z2", "Y");
    CHECK(polytope_equal(fm, explicit_region));
  }
}

TEST_CASE("MAC elimination leaves 7 bounds plus 3 nonnegativity rows") {
  Rng rng(2222);
  for (int trial = 0; trial < 3; ++trial) {
    const Polytope fm = mac_fm_region(random_mac_joint(rng, 3));
    size_t nonneg = 0, bounds = 0;
    for (const auto& ineq : fm.inequalities) {
      bool negative_unit = ineq.coeffs.size() == 1 && ineq.coeffs.begin()->second.is_negative();
      if (negative_unit && std::abs(ineq.bound) < 1e-12)
        ++nonneg;
      else
        ++bounds;
    }
    CHECK(nonneg == 3);
    CHECK(bounds == 7);
  }
}

TEST_CASE("MAC explicit region on the binary adder") {
  JointPMF joint = make_uniform("Z0", 1);
  joint = product(joint, make_bernoulli("Z1", 0.5));
  joint = product(joint, make_bernoulli("Z2", 0.5));
  ConditionalKernel adder({{"Z1", 2}, {"Z2", 2}}, {{"Y", 3}},
                          {{1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}});
  joint = compose(joint, adder);
  const Polytope region = mac_explicit_region(joint, "Z0", "Z1", "Z2", "Y");
  double pair_bound = -1, sum_bound = -1;
  for (const auto& ineq : region.inequalities) {
    if (ineq.coeffs.size() == 2 && ineq.coeffs.count("R_Z1") && ineq.coeffs.count("R_Z2"))
      pair_bound = ineq.bound;
    if (ineq.coeffs.size() == 3) sum_bound = ineq.bound;
  }
  CHECK(pair_bound == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(sum_bound == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("MAC explicit region degenerate cases") {
  SUBCASE("degenerate private messages collapse to the common-rate segment") {
    JointPMF joint = make_bernoulli("Z0", 0.5);
    joint = product(joint, make_uniform("Z1", 1));
    joint = product(joint, make_uniform("Z2", 1));
    joint = compose(joint, ConditionalKernel::identity({{"Z0", 2}}, {"Y"}));
    const Polytope region = mac_explicit_region(joint, "Z0", "Z1", "Z2", "Y");
    CHECK(region.contains({{"R_Z0", 1.0}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(region.contains({{"R_Z0", 1.0 + 1e-6}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(region.contains({{"R_Z0", 0.0}, {"R_Z1", 1e-6}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(region.contains({{"R_Z0", 0.0}, {"R_Z1", 0.0}, {"R_Z2", 1e-6}}, 1e-9));
  }
  SUBCASE("all-degenerate messages leave the origin only") {
    JointPMF joint = make_uniform("Z0", 1);
    joint = product(joint, make_uniform("Z1", 1));
    joint = product(joint, make_uniform("Z2", 1));
    joint = product(joint, make_bernoulli("Y", 0.5));
    const Polytope region = mac_explicit_region(joint, "Z0", "Z1", "Z2", "Y");
    CHECK(region.contains({{"R_Z0", 0.0}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(region.contains({{"R_Z0", 1e-6}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
  }
}

TEST_CASE("MAC explicit region requires independent auxiliaries") {
  Rng rng(3);
  JointPMF joint = make_dsbs("Z0", "Z1", 0.2);
  joint = product(joint, make_bernoulli("Z2", 0.5));
  joint = compose(joint, random_dyadic_kernel({{"Z1", 2}, {"Z2", 2}}, {{"Y", 2}}, rng));
  CHECK_THROWS_AS(mac_explicit_region(joint, "Z0", "Z1", "Z2", "Y"), std::invalid_argument);
}

TEST_CASE("BC: eliminated region equals the explicit eight-line list") {
  Rng rng(1234);
  for (int trial = 0; trial < 3; ++trial) {
    const JointPMF joint = random_bc_joint(rng);
    const Polytope fm = bc_fm_region(joint);
    const Polytope explicit_region = bc_explicit_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    CHECK(polytope_equal(fm, explicit_region));
  }
}

TEST_CASE("broadcast degenerate cases") {
  SUBCASE("pure-noise broadcast pins the region to the origin") {
    Rng rng7(7), rng8(8);
    JointPMF joint = random_dyadic_pmf({{"Z0", 2}}, rng7);
    joint = product(joint, random_dyadic_pmf({{"Z1", 2}}, rng7));
    joint = product(joint, random_dyadic_pmf({{"Z2", 2}}, rng7));
    // independent outputs regardless of the auxiliaries
    joint = product(joint, random_dyadic_pmf({{"Y1", 2}, {"Y2", 2}}, rng8));
    const Polytope marton = marton_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    CHECK(marton.contains({{"R_Z0", 0.0}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(marton.contains({{"R_Z0", 0.01}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(marton.contains({{"R_Z0", 0.0}, {"R_Z1", 0.01}, {"R_Z2", 0.0}}, 1e-9));
  }
  SUBCASE("deterministic common path carries R0 = H(X) in both lists") {
    // Y1 = Y2 = X = Z0; Z1, Z2 degenerate
    JointPMF joint = make_bernoulli("Z0", 0.5);
    joint = product(joint, make_uniform("Z1", 1));
    joint = product(joint, make_uniform("Z2", 1));
    joint = compose(joint, ConditionalKernel::identity({{"Z0", 2}}, {"Y1"}));
    joint = compose(joint, ConditionalKernel::identity({{"Z0", 2}}, {"Y2"}));
    const Polytope bc = bc_explicit_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    const Polytope marton = marton_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    CHECK(bc.contains({{"R_Z0", 1.0}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK_FALSE(bc.contains({{"R_Z0", 1.0 + 1e-6}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK(marton.contains({{"R_Z0", 1.0}, {"R_Z1", 0.0}, {"R_Z2", 0.0}}, 1e-9));
    CHECK(compare_regions(bc, marton) != RegionRelation::Incomparable);
  }
}

TEST_CASE("marton comparison report runs on sampled distributions") {
  Rng rng(55);
  for (int trial = 0; trial < 3; ++trial) {
    const JointPMF joint = random_bc_joint(rng);
    const Polytope bc = bc_explicit_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    const Polytope marton = marton_region(joint, "Z0", "Z1", "Z2", "Y1", "Y2");
    // report-only: any relation is acceptable, the call must just succeed
    (void)compare_regions(bc, marton);
  }
}

TEST_CASE("fourier_motzkin is sound and complete on a lifted grid") {
  Rng rng(606);
  for (int trial = 0; trial < 6; ++trial) {
    Polytope poly;
    poly.variables = {"x", "y", "z"};
    const int rows_count = 4 + static_cast<int>(rng.below(4));
    for (int i = 0; i < rows_count; ++i) {
      LinearInequality ineq;
      for (const auto* v : {"x", "y", "z"}) {
        const int64_t c = static_cast<int64_t>(rng.below(5)) - 2;
        if (c != 0) ineq.coeffs[v] = Rational(c);
      }
      if (ineq.coeffs.empty()) ineq.coeffs["x"] = Rational(1);
      ineq.bound = static_cast<double>(rng.below(33)) / 16.0 - 0.5;
      poly.inequalities.push_back(std::move(ineq));
    }
    const Polytope projected = fourier_motzkin(poly, "z");

    for (double x = 0; x <= 1.0001; x += 0.05) {
      for (double y = 0; y <= 1.0001; y += 0.05) {
        // feasibility of the original system over z: interval intersection
        double lo = -1e18, hi = 1e18;
        bool feasible = true;
        for (const auto& ineq : poly.inequalities) {
          double ax = 0, cz = 0;
          for (const auto& [name, c] : ineq.coeffs) {
            if (name == "x") ax += c.to_double() * x;
            if (name == "y") ax += c.to_double() * y;
            if (name == "z") cz = c.to_double();
          }
          if (cz == 0) {
            feasible = feasible && ax <= ineq.bound + 1e-12;
          } else if (cz > 0) {
            hi = std::min(hi, (ineq.bound - ax) / cz);
          } else {
            lo = std::max(lo, (ineq.bound - ax) / cz);
          }
        }
        feasible = feasible && lo <= hi + 1e-12;
        const bool in_projection = projected.contains({{"x", x}, {"y", y}}, 1e-9);
        CHECK(in_projection == feasible);
      }
    }
  }
}

TEST_CASE("degrading the channel never enlarges the region") {
  Rng rng(77);
  const JointPMF joint = random_mac_joint(rng);
  // degrade: pass Y through a symmetric binary flip
  JointPMF degraded = compose(joint, make_bsc("Y", "Yd", 0.1));
  degraded = degraded.marginal({"Z0", "Z1", "Z2", "Yd"});

  std::vector<DecoderSpec> dec = {{{"Z0", "Z1", "Z2"}, {"Y"}}};
  std::vector<DecoderSpec> dec_d = {{{"Z0", "Z1", "Z2"}, {"Yd"}}};
  const Polytope region = eliminate_aux_rates(
      channel_region_raw(joint, {"Z0", "Z1", "Z2"}, dec, ChannelVariant::General));
  const Polytope region_d = eliminate_aux_rates(
      channel_region_raw(degraded, {"Z0", "Z1", "Z2"}, dec_d, ChannelVariant::General));

  for (double r0 = 0; r0 <= 1.0; r0 += 0.2)
    for (double r1 = 0; r1 <= 1.0; r1 += 0.2)
      for (double r2 = 0; r2 <= 1.0; r2 += 0.2) {
        std::map<std::string, double> p = {{"R_Z0", r0}, {"R_Z1", r1}, {"R_Z2", r2}};
        if (region_d.contains(p, 1e-9)) CHECK(region.contains(p, 1e-7));
      }
}
