#include <doctest.h>

#include <cmath>
#include <map>

#include "crng/channel_code.hpp"
#include "crng/ensemble.hpp"
#include "crng/stats.hpp"
#include "support/brute_channel.hpp"
#include "support/random_dists.hpp"

using namespace crng;

namespace {

// Point-to-point binary code: one message, Z = X through a BSC.
ChannelCodeSpec p2p_spec(int n, const FieldMatrix& f, const FieldMatrix& g,
                         const FieldVector& c, double flip) {
  ChannelCodeSpec spec;
  spec.n = n;
  spec.q = 2;
  spec.messages = {"Z"};
  spec.f = {f};
  spec.g = {g};
  spec.c = {c};
  spec.encoder_sources = {{0}};
  spec.z_prior_letter = make_bernoulli("Z", 0.5);
  spec.input_kernels = {ConditionalKernel::identity({{"Z", 2}}, {"X"})};
  spec.channel = make_bsc("X", "Y", flip);
  spec.decode_specs = {{{0}, {"Y"}}};
  return spec;
}

// Two private messages over a two-input channel, disjoint groups.
ChannelCodeSpec two_user_spec(int n, const FieldMatrix& f1, const FieldMatrix& g1,
                              const FieldVector& c1, const FieldMatrix& f2,
                              const FieldMatrix& g2, const FieldVector& c2,
                              const ConditionalKernel& channel) {
  ChannelCodeSpec spec;
  spec.n = n;
  spec.q = 2;
  spec.messages = {"Z1", "Z2"};
  spec.f = {f1, f2};
  spec.g = {g1, g2};
  spec.c = {c1, c2};
  spec.encoder_sources = {{0}, {1}};
  spec.z_prior_letter = product(make_bernoulli("Z1", 0.5), make_bernoulli("Z2", 0.5));
  spec.input_kernels = {ConditionalKernel::identity({{"Z1", 2}}, {"X1"}),
                        ConditionalKernel::identity({{"Z2", 2}}, {"X2"})};
  spec.channel = channel;
  spec.decode_specs = {{{0, 1}, {"Y"}}};
  return spec;
}

ConditionalKernel noisy_adder(double noise) {
  // Y = X1 + X2 with a symmetric mixing of mass `noise` to the neighbors
  std::vector<std::vector<double>> rows = {
      {1 - noise, noise, 0},
      {noise / 2, 1 - noise, noise / 2},
      {noise / 2, 1 - noise, noise / 2},
      {0, noise, 1 - noise},
  };
  return ConditionalKernel({{"X1", 2}, {"X2", 2}}, {{"Y", 3}}, std::move(rows));
}

}  // namespace

TEST_CASE("draw_pinned_vectors") {
  SUBCASE("zero map always pins zero") {
    ChannelCodeSpec spec = p2p_spec(3, FieldMatrix(2, 0, 3), FieldMatrix::identity(2, 3),
                                    FieldVector(2, 0), 0.1);
    Rng rng(4);
    const auto c = draw_pinned_vectors(spec, rng);
    CHECK(c[0].length() == 0);
  }
  SUBCASE("identity pushes the block law forward") {
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix::identity(2, 2), FieldMatrix(2, 0, 2),
                                    FieldVector(2, {0, 0}), 0.1);
    Rng rng(5);
    std::map<uint64_t, uint64_t> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[draw_pinned_vectors(spec, rng)[0].to_index()];
    std::vector<double> expected(4, draws / 4.0);
    std::vector<uint64_t> observed(4, 0);
    for (const auto& [idx, cnt] : counts) observed[idx] = cnt;
    CHECK(chi_square_gof_p_value(expected, observed) > 0.001);
  }
  SUBCASE("parity map histogram matches the coset masses") {
    ChannelCodeSpec spec = p2p_spec(4, FieldMatrix(2, {{1, 1, 1, 1}}),
                                    FieldMatrix::identity(2, 4), FieldVector(2, {0}), 0.1);
    Rng rng(6);
    uint64_t even = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) even += draw_pinned_vectors(spec, rng)[0][0] == 0;
    // uniform letters: both parities carry mass 1/2
    CHECK(chi_square_gof_p_value({draws / 2.0, draws / 2.0}, {even, draws - even}) > 0.001);
  }
}

TEST_CASE("encoder") {
  SUBCASE("full-rank stacked pair pins a unique block") {
    // f = first two coordinates, g = last; stacked = identity on GF(2)^3
    ChannelCodeSpec spec =
        p2p_spec(3, FieldMatrix(2, {{1, 0, 0}, {0, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
                 FieldVector(2, {1, 0}), 0.1);
    Rng rng(7);
    const EncodeOutcome out = encode(spec, 0, {FieldVector(2, {1})}, rng);
    REQUIRE_FALSE(out.failed);
    CHECK(out.aux[0] == FieldVector(2, {1, 0, 1}));
  }
  SUBCASE("contradictory pinning fails") {
    // f and g both read the first coordinate but demand different values
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, {{1, 0}}), FieldMatrix(2, {{1, 0}}),
                                    FieldVector(2, {0}), 0.1);
    Rng rng(8);
    const EncodeOutcome out = encode(spec, 0, {FieldVector(2, {1})}, rng);
    CHECK(out.failed);
  }
  SUBCASE("the two-element intersection is sampled uniformly") {
    ChannelCodeSpec spec = p2p_spec(3, FieldMatrix(2, {{1, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
                                    FieldVector(2, {1}), 0.1);
    Rng rng(9);
    // intersection of z1+z2=1, z3=1: {(1,0,1), (0,1,1)}
    std::map<uint64_t, uint64_t> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const EncodeOutcome out = encode(spec, 0, {FieldVector(2, {1})}, rng);
      REQUIRE_FALSE(out.failed);
      ++counts[out.aux[0].to_index()];
    }
    REQUIRE(counts.size() == 2);
    CHECK(counts.count(FieldVector(2, {1, 0, 1}).to_index()) == 1);
    CHECK(counts.count(FieldVector(2, {0, 1, 1}).to_index()) == 1);
    std::vector<double> expected(2, draws / 2.0);
    std::vector<uint64_t> observed;
    for (const auto& [idx, cnt] : counts) observed.push_back(cnt);
    CHECK(chi_square_gof_p_value(expected, observed) > 0.001);
  }
}

TEST_CASE("transmit") {
  ChannelCodeSpec spec = p2p_spec(4, FieldMatrix::identity(2, 4), FieldMatrix(2, 0, 4),
                                  FieldVector(2, {0, 0, 0, 0}), 0.0);
  Rng rng(10);
  const std::vector<uint32_t> x = {1, 0, 1, 1};
  CHECK(transmit(spec, {x}, rng) == SideBlock{1, 0, 1, 1});

  // flip rate of a BSC(0.11) at 1e4 letters
  ChannelCodeSpec noisy = p2p_spec(4, FieldMatrix::identity(2, 4), FieldMatrix(2, 0, 4),
                                   FieldVector(2, {0, 0, 0, 0}), 0.11);
  uint64_t flips = 0;
  const int rounds = 2500;  // 4 letters each
  for (int i = 0; i < rounds; ++i) {
    const SideBlock y = transmit(noisy, {x}, rng);
    for (int t = 0; t < 4; ++t) flips += y[static_cast<size_t>(t)] != x[static_cast<size_t>(t)];
  }
  CHECK(std::abs(flips / 10000.0 - 0.11) < 0.01);
}

TEST_CASE("decode through a noiseless pipeline returns the message") {
  // noiseless BSC, f + g stack to the identity
  ChannelCodeSpec spec =
      p2p_spec(3, FieldMatrix(2, {{1, 0, 0}, {0, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
               FieldVector(2, {1, 1}), 0.0);
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const TransmissionTrace trace = run_trial(spec, rng);
    REQUIRE_FALSE(trace.encoder_failed);
    REQUIRE(trace.decoded[0].size() == 1);
    CHECK(trace.decoded[0][0] == trace.messages[0]);
  }
}

TEST_CASE("zero-rate g decodes to the empty message") {
  ChannelCodeSpec spec = p2p_spec(2, FieldMatrix::identity(2, 2), FieldMatrix(2, 0, 2),
                                  FieldVector(2, {0, 1}), 0.2);
  Rng rng(12);
  const TransmissionTrace trace = run_trial(spec, rng);
  REQUIRE_FALSE(trace.encoder_failed);
  CHECK(trace.decoded[0][0].length() == 0);
  CHECK(end_to_end_error_exact(spec) == doctest::Approx(0.0));
}

TEST_CASE("induced channel") {
  SUBCASE("identity inputs reproduce the raw channel") {
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix::identity(2, 2), FieldMatrix(2, 0, 2),
                                    FieldVector(2, {0, 0}), 0.11);
    const ConditionalKernel induced = induced_channel(spec);
    CHECK(induced.prob({1}, {0}) == doctest::Approx(0.11).epsilon(1e-12));
    CHECK(induced.prob({0}, {0}) == doctest::Approx(0.89).epsilon(1e-12));
  }
  SUBCASE("constant inputs erase the auxiliaries") {
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix::identity(2, 2), FieldMatrix(2, 0, 2),
                                    FieldVector(2, {0, 0}), 0.11);
    spec.input_kernels = {ConditionalKernel({{"Z", 2}}, {{"X", 2}}, {{1, 0}, {1, 0}})};
    const ConditionalKernel induced = induced_channel(spec);
    CHECK(induced.prob({1}, {0}) == doctest::Approx(induced.prob({1}, {1})).epsilon(1e-12));

    const SourceCodeSpec source = induced_source_code(spec);
    CHECK(source.letter.mutual_information({"Z"}, {"Y"}) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("binary adder with identity inputs carries 1.5 bits") {
    ChannelCodeSpec spec = two_user_spec(
        2, FieldMatrix(2, {{1, 1}}), FieldMatrix(2, {{1, 0}}), FieldVector(2, {0}),
        FieldMatrix(2, {{0, 1}}), FieldMatrix(2, {{1, 0}}), FieldVector(2, {1}), noisy_adder(0));
    const SourceCodeSpec source = induced_source_code(spec);
    CHECK(source.letter.mutual_information({"Z1", "Z2"}, {"Y"}) ==
          doctest::Approx(1.5).epsilon(1e-9));
  }
}

TEST_CASE("a singleton group with an identity kernel transmits its own auxiliary") {
  ChannelCodeSpec spec = p2p_spec(3, FieldMatrix(2, {{1, 0, 0}}), FieldMatrix(2, {{0, 1, 0}}),
                                  FieldVector(2, {1}), 0.1);
  Rng rng(77);
  for (int i = 0; i < 10; ++i) {
    const TransmissionTrace trace = run_trial(spec, rng);
    REQUIRE_FALSE(trace.encoder_failed);
    for (int t = 0; t < spec.n; ++t)
      CHECK(trace.inputs[0][static_cast<size_t>(t)] == trace.auxiliaries[0][t]);
  }
}

TEST_CASE("common message wiring shares one auxiliary draw") {
  // S = {0, 1, 2}, S_1 = {0, 1}, S_2 = {0, 2}: X_i = (Z_0, Z_i)
  ChannelCodeSpec spec;
  spec.n = 2;
  spec.q = 2;
  spec.messages = {"Z0", "Z1", "Z2"};
  const FieldMatrix f(2, {{1, 0}});
  const FieldMatrix g(2, {{0, 1}});
  spec.f = {f, f, f};
  spec.g = {g, g, g};
  spec.c = {FieldVector(2, {0}), FieldVector(2, {1}), FieldVector(2, {0})};
  spec.encoder_sources = {{0, 1}, {0, 2}};
  spec.z_prior_letter = product(product(make_bernoulli("Z0", 0.5), make_bernoulli("Z1", 0.5)),
                                make_bernoulli("Z2", 0.5));
  spec.input_kernels = {
      ConditionalKernel::identity({{"Z0", 2}, {"Z1", 2}}, {"X1a", "X1b"}),
      ConditionalKernel::identity({{"Z0", 2}, {"Z2", 2}}, {"X2a", "X2b"})};
  // Y exposes everything: noiseless concatenation
  std::vector<Variable> xin = {{"X1a", 2}, {"X1b", 2}, {"X2a", 2}, {"X2b", 2}};
  spec.channel = ConditionalKernel::identity(xin, {"Y1", "Y2", "Y3", "Y4"});
  spec.decode_specs = {{{0, 1, 2}, {"Y1", "Y2", "Y3", "Y4"}}};

  Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    const TransmissionTrace trace = run_trial(spec, rng);
    if (trace.encoder_failed) continue;
    // the Z0 component inside X1 equals the Z0 component inside X2 at every t
    for (int t = 0; t < spec.n; ++t) {
      const uint32_t x1 = trace.inputs[0][static_cast<size_t>(t)];
      const uint32_t x2 = trace.inputs[1][static_cast<size_t>(t)];
      CHECK((x1 >> 1) == (x2 >> 1));  // leading bit is Z0 in both identity kernels
      CHECK((x1 >> 1) == trace.auxiliaries[0][t]);
    }
    // trace consistency: f(z) = c and g(z) = m
    for (size_t s = 0; s < 3; ++s) {
      CHECK(mat_vec_mul(spec.f[s], trace.auxiliaries[s]) == spec.c[s]);
      CHECK(mat_vec_mul(spec.g[s], trace.auxiliaries[s]) == trace.messages[s]);
    }
  }
}

TEST_CASE("end-to-end error") {
  SUBCASE("noiseless pipeline is perfect") {
    ChannelCodeSpec spec =
        p2p_spec(3, FieldMatrix(2, {{1, 0, 0}, {0, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
                 FieldVector(2, {0, 1}), 0.0);
    CHECK(end_to_end_error_exact(spec) == doctest::Approx(0.0));
  }
  SUBCASE("pure noise leaves guessing") {
    // f empty, g identity (2 bits), channel independent of the input
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, 0, 2), FieldMatrix::identity(2, 2),
                                    FieldVector(2, 0), 0.5);
    const double err = end_to_end_error_exact(spec);
    CHECK(err == doctest::Approx(1.0 - 0.25).epsilon(1e-12));
  }
  SUBCASE("exact agrees with Monte Carlo") {
    ChannelCodeSpec spec = p2p_spec(3, FieldMatrix(2, {{1, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
                                    FieldVector(2, {1}), 0.11);
    const double exact = end_to_end_error_exact(spec);
    Rng rng(14);
    const ErrorEstimate mc = end_to_end_error_mc(spec, 10000, rng);
    CHECK(exact >= mc.ci_low - 0.02);
    CHECK(exact <= mc.ci_high + 0.02);
  }
}

TEST_CASE("exact end-to-end error equals the brute-force sweep") {
  Rng rng(15);
  SUBCASE("point-to-point, parity f") {
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, {{1, 1}}), FieldMatrix(2, {{1, 0}}),
                                    FieldVector(2, {1}), 0.15);
    CHECK(end_to_end_error_exact(spec) ==
          doctest::Approx(crng_test::brute_force_end_to_end(spec)).epsilon(1e-12));
  }
  SUBCASE("point-to-point, rate-deficient g") {
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, 0, 2), FieldMatrix(2, {{1, 1}}),
                                    FieldVector(2, 0), 0.2);
    CHECK(end_to_end_error_exact(spec) ==
          doctest::Approx(crng_test::brute_force_end_to_end(spec)).epsilon(1e-12));
  }
  SUBCASE("two users over the noisy adder") {
    ChannelCodeSpec spec = two_user_spec(
        2, FieldMatrix(2, {{1, 1}}), FieldMatrix(2, {{1, 0}}), FieldVector(2, {0}),
        FieldMatrix(2, {{1, 0}}), FieldMatrix(2, {{0, 1}}), FieldVector(2, {1}),
        noisy_adder(0.1));
    CHECK(end_to_end_error_exact(spec) ==
          doctest::Approx(crng_test::brute_force_end_to_end(spec)).epsilon(1e-12));
  }
}

TEST_CASE("common-message wiring: exact error equals the brute-force sweep") {
  // S = {0,1,2}, S_1 = {0,1}, S_2 = {0,2}: overlapping groups, product prior
  ChannelCodeSpec spec;
  spec.n = 1;
  spec.q = 2;
  spec.messages = {"Z0", "Z1", "Z2"};
  const FieldMatrix empty(2, 0, 1);
  const FieldMatrix full(2, {{1}});
  spec.f = {empty, empty, empty};
  spec.g = {full, full, full};
  spec.c = {FieldVector(2, 0), FieldVector(2, 0), FieldVector(2, 0)};
  spec.encoder_sources = {{0, 1}, {0, 2}};
  spec.z_prior_letter = product(product(make_bernoulli("Z0", 0.5), make_bernoulli("Z1", 0.5)),
                                make_bernoulli("Z2", 0.5));
  spec.input_kernels = {ConditionalKernel::identity({{"Z0", 2}, {"Z1", 2}}, {"X1a", "X1b"}),
                        ConditionalKernel::identity({{"Z0", 2}, {"Z2", 2}}, {"X2a", "X2b"})};
  // noisy observation of all four input components
  Rng kernel_rng(2468);
  spec.channel = crng_test::random_dyadic_kernel(
      {{"X1a", 2}, {"X1b", 2}, {"X2a", 2}, {"X2b", 2}}, {{"Y", 4}}, kernel_rng);
  spec.decode_specs = {{{0, 1, 2}, {"Y"}}};

  const double exact = end_to_end_error_exact(spec);
  const double brute = crng_test::brute_force_end_to_end(spec);
  CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("error decomposition") {
  SUBCASE("full-rank stacked pair with a uniform prior has no penalty terms") {
    ChannelCodeSpec spec =
        p2p_spec(3, FieldMatrix(2, {{1, 0, 0}, {0, 1, 0}}), FieldMatrix(2, {{0, 0, 1}}),
                 FieldVector(2, {1, 0}), 0.11);
    const ErrorDecomposition dec = error_decomposition(spec);
    CHECK(dec.encoder_failure_mass == doctest::Approx(0.0));
    CHECK(dec.mismatch_tv == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a rank-deficient g leaves unreachable messages and mismatch") {
    // g has a zero row: half the message space is unreachable
    ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, {{1, 0}}),
                                    FieldMatrix(2, {{0, 1}, {0, 0}}), FieldVector(2, {0}), 0.1);
    const ErrorDecomposition dec = error_decomposition(spec);
    CHECK(dec.encoder_failure_mass == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dec.mismatch_tv > 0.0);
    // manual total variation: reachable m get coset mass 1/2 against uniform 1/4
    CHECK(dec.mismatch_tv == doctest::Approx(2 * 0.25 + 2 * 0.25).epsilon(1e-12));
  }
  SUBCASE("the decomposition upper-bounds the exact error") {
    Rng rng(16);
    for (int trial = 0; trial < 6; ++trial) {
      EnsembleSpec ens;
      ens.q = 2;
      const FieldMatrix f = sample_matrix(ens, 1, 2, rng);
      const FieldMatrix g = sample_matrix(ens, 1, 2, rng);
      FieldVector c(2, 1);
      c[0] = static_cast<uint32_t>(rng.below(2));
      ChannelCodeSpec spec = p2p_spec(2, f, g, c, 0.1 + 0.2 * rng.uniform());
      const double exact = end_to_end_error_exact(spec);
      const ErrorDecomposition dec = error_decomposition(spec);
      CHECK(exact <=
            dec.encoder_failure_mass + dec.decoding_mass + dec.mismatch_tv + 1e-12);
    }
  }
}

TEST_CASE("non-failed traces satisfy the pinning constraints") {
  Rng rng(404);
  EnsembleSpec ens;
  ens.q = 2;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(3));
    ChannelCodeSpec spec = two_user_spec(
        n, sample_matrix(ens, 1, n, rng), sample_matrix(ens, 1, n, rng),
        FieldVector(2, {static_cast<uint32_t>(rng.below(2))}), sample_matrix(ens, 1, n, rng),
        sample_matrix(ens, 1, n, rng), FieldVector(2, {static_cast<uint32_t>(rng.below(2))}),
        noisy_adder(0.15));
    for (int i = 0; i < 20; ++i) {
      const TransmissionTrace trace = run_trial(spec, rng);
      if (trace.encoder_failed) continue;
      for (size_t s = 0; s < 2; ++s) {
        CHECK(mat_vec_mul(spec.f[s], trace.auxiliaries[s]) == spec.c[s]);
        CHECK(mat_vec_mul(spec.g[s], trace.auxiliaries[s]) == trace.messages[s]);
      }
    }
  }
}

TEST_CASE("sampled messages are uniform") {
  ChannelCodeSpec spec = p2p_spec(2, FieldMatrix(2, 0, 2), FieldMatrix::identity(2, 2),
                                  FieldVector(2, 0), 0.3);
  Rng rng(17);
  std::vector<uint64_t> counts(4, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const TransmissionTrace trace = run_trial(spec, rng);
    ++counts[trace.messages[0].to_index()];
  }
  CHECK(chi_square_gof_p_value(std::vector<double>(4, draws / 4.0), counts) > 0.001);
}

TEST_CASE("spec validation rejects bad wiring") {
  ChannelCodeSpec spec = p2p_spec(2, FieldMatrix::identity(2, 2), FieldMatrix(2, 0, 2),
                                  FieldVector(2, {0, 0}), 0.1);
  spec.decode_specs[0].side_info = {"Nope"};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  ChannelCodeSpec bad = p2p_spec(2, FieldMatrix::identity(2, 3), FieldMatrix(2, 0, 2),
                                 FieldVector(2, {0, 0, 0}), 0.1);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
