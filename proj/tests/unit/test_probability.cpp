#include <doctest.h>

#include <cmath>

#include "crng/pmf.hpp"
#include "crng/spectral.hpp"

using namespace crng;

namespace {

// Random dense PMF with dyadic-ish weights, for property checks.
JointPMF random_pmf(const std::vector<Variable>& vars, Rng& rng) {
  uint64_t cells = 1;
  for (const auto& v : vars) cells *= v.size;
  std::vector<double> w(cells);
  double total = 0;
  for (auto& x : w) {
    x = static_cast<double>(1 + rng.below(64));
    total += x;
  }
  for (auto& x : w) x /= total;
  return JointPMF(vars, w);
}

}  // namespace

TEST_CASE("marginals") {
  const JointPMF pair = product(make_bernoulli("A", 0.5), make_bernoulli("B", 0.5));
  const JointPMF a = pair.marginal({"A"});
  CHECK(a.variables().size() == 1);
  CHECK(a.probs()[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(pair.marginal({"A", "B"}) == pair);

  const JointPMF dsbs = make_dsbs("Z1", "Z2", 0.11);
  CHECK(dsbs.marginal({"Z1"}).probs()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dsbs.marginal({"Z2"}).probs()[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(pair.marginal({"C"}), std::invalid_argument);
}

TEST_CASE("conditionals") {
  const JointPMF pair = product(make_bernoulli("A", 0.3), make_bernoulli("B", 0.5));
  const ConditionalKernel k = conditional(pair, {"A"}, {"B"});
  for (uint32_t b = 0; b < 2; ++b) {
    CHECK(k.prob({0}, {b}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(k.prob({1}, {b}) == doctest::Approx(0.3).epsilon(1e-12));
  }

  const JointPMF copy = make_dsbs("U", "V", 0.0);
  const ConditionalKernel ident = conditional(copy, {"V"}, {"U"});
  CHECK(ident.prob({0}, {0}) == doctest::Approx(1.0));
  CHECK(ident.prob({1}, {0}) == doctest::Approx(0.0));

  const ConditionalKernel dsbs = conditional(make_dsbs("Z1", "Z2", 0.11), {"Z1"}, {"Z2"});
  CHECK(dsbs.prob({0}, {0}) == doctest::Approx(0.89).epsilon(1e-12));
  CHECK(dsbs.prob({1}, {0}) == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(dsbs.prob({1}, {1}) == doctest::Approx(0.89).epsilon(1e-12));
}

TEST_CASE("zero-mass conditioning rows are flagged and uniform") {
  const JointPMF point = JointPMF({{"A", 2}, {"B", 2}}, {1.0, 0.0, 0.0, 0.0});
  const ConditionalKernel k = conditional(point, {"A"}, {"B"});
  CHECK_FALSE(k.row_flagged({0}));
  CHECK(k.row_flagged({1}));
  CHECK(k.prob({0}, {1}) == doctest::Approx(0.5));
}

TEST_CASE("entropy values") {
  CHECK(make_bernoulli("X", 0.5).entropy({"X"}) == doctest::Approx(1.0).epsilon(1e-12));
  const JointPMF dsbs = make_dsbs("Z1", "Z2", 0.11);
  CHECK(dsbs.entropy({"Z1"}, {"Z1"}) == doctest::Approx(0.0));  // self-conditioning
  CHECK(dsbs.entropy({"Z1"}, {"Z2"}) ==
        doctest::Approx(binary_entropy(0.11)).epsilon(1e-12));
}

TEST_CASE("mutual information") {
  const JointPMF pair = product(make_bernoulli("A", 0.3), make_bernoulli("B", 0.6));
  CHECK(pair.mutual_information({"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));

  const JointPMF copy = compose(make_bernoulli("X", 0.5),
                                ConditionalKernel::identity({{"X", 2}}, {"Xc"}));
  CHECK(copy.mutual_information({"X"}, {"Xc"}) == doctest::Approx(1.0).epsilon(1e-12));

  // binary adder: Y = X1 + X2 as an integer
  const JointPMF inputs = product(make_bernoulli("X1", 0.5), make_bernoulli("X2", 0.5));
  ConditionalKernel adder({{"X1", 2}, {"X2", 2}}, {{"Y", 3}},
                          {{1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}});
  const JointPMF joint = compose(inputs, adder);
  CHECK(joint.mutual_information({"X1", "X2"}, {"Y"}) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("compose") {
  const JointPMF z = make_bernoulli("Z", 0.5);
  SUBCASE("identity kernel duplicates a variable") {
    const JointPMF dup = compose(z, ConditionalKernel::identity({{"Z", 2}}, {"Z2"}));
    CHECK(dup.entropy({"Z2"}, {"Z"}) == doctest::Approx(0.0));
  }
  SUBCASE("noiseless BSC keeps the input") {
    const JointPMF joint = compose(z, make_bsc("Z", "Y", 0.0));
    CHECK(joint.entropy({"Y"}, {"Z"}) == doctest::Approx(0.0));
  }
  SUBCASE("BSC(0.11) information") {
    const JointPMF joint = compose(z, make_bsc("Z", "Y", 0.11));
    CHECK(joint.mutual_information({"Z"}, {"Y"}) ==
          doctest::Approx(1.0 - binary_entropy(0.11)).epsilon(1e-12));
  }
  SUBCASE("output name collisions rejected") {
    CHECK_THROWS_AS(compose(z, ConditionalKernel::identity({{"Z", 2}}, {"Z"})),
                    std::invalid_argument);
  }
}

TEST_CASE("block extension") {
  const JointPMF dsbs = make_dsbs("Z1", "Z2", 0.11);
  CHECK(dsbs.block_extend(1) == dsbs);

  const JointPMF b3 = dsbs.block_extend(3);
  double mass = 0;
  for (double x : b3.probs()) mass += x;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const double h = b3.entropy({"Z1_1", "Z1_2", "Z1_3"}, {"Z2_1", "Z2_2", "Z2_3"});
  CHECK(h == doctest::Approx(3.0 * binary_entropy(0.11)).epsilon(1e-9));

  CHECK_THROWS_AS(dsbs.block_extend(30), BudgetExceeded);
}

TEST_CASE("sampling") {
  SUBCASE("point mass always lands on its support") {
    const JointPMF point = JointPMF({{"A", 3}}, {0.0, 1.0, 0.0});
    Rng rng(5);
    for (int i = 0; i < 100; ++i) CHECK(point.sample(rng) == Outcome{1});
  }
  SUBCASE("frequency of a fair coin, 1e5 draws within 0.01") {
    const JointPMF coin = make_bernoulli("X", 0.5);
    Rng rng(17);
    uint64_t ones = 0;
    for (int i = 0; i < 100000; ++i) ones += coin.sample(rng)[0];
    CHECK(std::abs(ones / 100000.0 - 0.5) < 0.01);
  }
  SUBCASE("seeded draws are reproducible") {
    const JointPMF coin = make_bernoulli("X", 0.3);
    Rng a(123), b(123);
    for (int i = 0; i < 50; ++i) CHECK(coin.sample(a) == coin.sample(b));
  }
}

TEST_CASE("entropy properties on random tables") {
  Rng rng(808);
  for (int trial = 0; trial < 25; ++trial) {
    const JointPMF p = random_pmf({{"A", 2}, {"B", 3}, {"C", 2}}, rng);
    // conditioning reduces entropy
    CHECK(p.entropy({"A"}, {"B"}) <= p.entropy({"A"}) + 1e-9);
    CHECK(p.entropy({"A"}, {"B", "C"}) <= p.entropy({"A"}, {"B"}) + 1e-9);
    // chain rule
    CHECK(p.entropy({"A", "B"}) ==
          doctest::Approx(p.entropy({"A"}) + p.entropy({"B"}, {"A"})).epsilon(1e-9));
    // nonnegative information
    CHECK(p.mutual_information({"A"}, {"B"}, {"C"}) >= 0.0);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const JointPMF a = random_pmf({{"A", 3}}, rng);
    const JointPMF b = random_pmf({{"B", 4}}, rng);
    CHECK(product(a, b).mutual_information({"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("spectral estimates: exact cases") {
  Rng rng(99);
  const JointPMF point = JointPMF({{"U", 2}}, {1.0, 0.0});
  CHECK(spectral_entropy_estimate(point, SpectralQuantity::SupEntropyRate, {"U"}, {}, 16, 200,
                                  0.1, rng)
            .value == doctest::Approx(0.0));

  const JointPMF coin = make_bernoulli("U", 0.5);
  CHECK(spectral_entropy_estimate(coin, SpectralQuantity::SupEntropyRate, {"U"}, {}, 10, 200,
                                  0.1, rng)
            .value == doctest::Approx(1.0));
  CHECK(spectral_entropy_estimate(coin, SpectralQuantity::InfEntropyRate, {"U"}, {}, 10, 200,
                                  0.1, rng)
            .value == doctest::Approx(1.0));
}

TEST_CASE("spectral estimate matches the binomial quantile oracle, Bern(0.2)") {
  // oracle: the (1 - eps) quantile of (1/n) sum of self-informations, with
  // the count of ones binomial(n, 0.2)
  const int n = 400;
  const double p = 0.2, eps = 0.05;
  const double info1 = -std::log2(p), info0 = -std::log2(1.0 - p);
  // binomial upper quantile by direct summation
  std::vector<double> pmf(n + 1);
  {
    double logc = 0;  // log C(n, k)
    for (int k = 0; k <= n; ++k) {
      if (k > 0) logc += std::log(static_cast<double>(n - k + 1) / k);
      pmf[k] = std::exp(logc + k * std::log(p) + (n - k) * std::log(1 - p));
    }
  }
  int k_quantile = 0;
  double acc = 0;
  for (int k = 0; k <= n; ++k) {
    acc += pmf[k];
    if (acc >= 1.0 - eps) {
      k_quantile = k;
      break;
    }
  }
  const double oracle = (k_quantile * info1 + (n - k_quantile) * info0) / n;

  Rng rng(4242);
  const SpectralEstimate est = spectral_entropy_estimate(
      make_bernoulli("U", p), SpectralQuantity::SupEntropyRate, {"U"}, {}, n, 2000, eps, rng);
  CHECK(std::abs(est.value - oracle) < 0.012);  // quantile sampling noise only

  // convergence to the Shannon value with the default tail mass
  Rng rng2(4243);
  const SpectralEstimate sup = spectral_entropy_estimate(
      make_bernoulli("U", p), SpectralQuantity::SupEntropyRate, {"U"}, {}, n, 2000, 0.2, rng2);
  CHECK(std::abs(sup.value - binary_entropy(p)) < 0.05);
  Rng rng3(4244);
  const SpectralEstimate inf = spectral_entropy_estimate(
      make_bernoulli("U", p), SpectralQuantity::InfEntropyRate, {"U"}, {}, n, 2000, 0.2, rng3);
  CHECK(std::abs(inf.value - binary_entropy(p)) < 0.05);
}

TEST_CASE("conditional spectral quantities") {
  const JointPMF dsbs = make_dsbs("Z1", "Z2", 0.11);
  Rng rng(7);
  const SpectralEstimate cond = spectral_entropy_estimate(
      dsbs, SpectralQuantity::CondSupEntropyRate, {"Z1"}, {"Z2"}, 300, 1500, 0.2, rng);
  CHECK(std::abs(cond.value - binary_entropy(0.11)) < 0.06);

  Rng rng2(8);
  const SpectralEstimate info = spectral_entropy_estimate(
      dsbs, SpectralQuantity::InfInformationRate, {"Z1"}, {"Z2"}, 300, 1500, 0.2, rng2);
  CHECK(std::abs(info.value - (1.0 - binary_entropy(0.11))) < 0.06);

  CHECK_THROWS_AS(spectral_entropy_estimate(dsbs, SpectralQuantity::SupEntropyRate, {"Z1"},
                                            {"Z2"}, 10, 10, 0.1, rng2),
                  std::invalid_argument);
}
