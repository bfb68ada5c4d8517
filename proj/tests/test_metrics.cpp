#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "roisub/metrics.hpp"
#include "roisub/rng.hpp"

using namespace roisub;

namespace {

// Independent oracle: count (frame, threshold) hits and divide once.
double counting_auc(const std::vector<double>& ious) {
  std::size_t hits = 0;
  for (int i = 0; i < kThresholdCount; ++i)
    for (double v : ious)
      if (v > i / 20.0) ++hits;
  return static_cast<double>(hits) /
         (static_cast<double>(ious.size()) * static_cast<double>(kThresholdCount));
}

std::vector<double> random_ious(Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.uniform();
  return out;
}

}  // namespace

TEST_CASE("precision_at counts strict exceedances") {
  const std::vector<double> perfect{1, 1, 1, 1};
  CHECK(precision_at(perfect, 0.5) == 1.0);

  const std::vector<double> zeros{0, 0};
  CHECK(precision_at(zeros, 0.0) == 0.0);  // 0 > 0 is false

  const std::vector<double> mixed{0.3, 0.6, 0.9};
  CHECK(precision_at(mixed, 0.5) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(precision_at(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST_CASE("success curve shapes") {
  const auto grid = threshold_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);

  SUBCASE("perfect tracker: 20 ones then a zero") {
    const std::vector<double> perfect(10, 1.0);
    const SuccessCurve curve = success_curve(perfect);
    for (int i = 0; i < 20; ++i) CHECK(curve.precision[static_cast<std::size_t>(i)] == 1.0);
    CHECK(curve.precision[20] == 0.0);
  }

  SUBCASE("all-failed tracker is flat zero") {
    const std::vector<double> zeros(10, 0.0);
    for (double p : success_curve(zeros).precision) CHECK(p == 0.0);
  }

  SUBCASE("curves are non-increasing for any input") {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
      const SuccessCurve curve = success_curve(random_ious(rng, 17));
      for (std::size_t j = 1; j < curve.precision.size(); ++j)
        CHECK(curve.precision[j] <= curve.precision[j - 1]);
    }
  }
}

TEST_CASE("auc values") {
  const std::vector<double> perfect(10, 1.0);
  CHECK(auc(success_curve(perfect)) == doctest::Approx(20.0 / 21.0).epsilon(1e-15));
  CHECK(sequence_auc(perfect) == doctest::Approx(20.0 / 21.0).epsilon(1e-15));

  const std::vector<double> zeros(10, 0.0);
  CHECK(sequence_auc(zeros) == 0.0);

  // iou 0.5 clears thresholds 0.00 .. 0.45: ten grid points
  const std::vector<double> halves(6, 0.5);
  CHECK(sequence_auc(halves) == doctest::Approx(10.0 / 21.0).epsilon(1e-15));
}

TEST_CASE("sequence_auc equals the counting oracle exactly") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto ious = random_ious(rng, 10);
    CHECK(sequence_auc(ious) == counting_auc(ious));
  }
}

TEST_CASE("auc over the curve agrees with the counting form") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto ious = random_ious(rng, 23);
    CHECK(auc(success_curve(ious)) == doctest::Approx(sequence_auc(ious)).epsilon(1e-12));
  }
}

TEST_CASE("auc is monotone under pointwise dominance") {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    auto low = random_ious(rng, 15);
    auto high = low;
    for (double& v : high) v = std::min(1.0, v + rng.uniform() * (1.0 - v));
    CHECK(sequence_auc(high) >= sequence_auc(low));
    CHECK(sequence_auc(low) <= 20.0 / 21.0);  // strict inequality ceiling
  }
}

TEST_CASE("dataset_auc averages per sequence") {
  const std::vector<double> a(4, 1.0);
  const std::vector<double> b(4, 0.0);
  CHECK(dataset_auc({a}) == sequence_auc(a));
  CHECK(dataset_auc({a, b}) == doctest::Approx((sequence_auc(a) + sequence_auc(b)) / 2.0));
  CHECK(dataset_auc({a, b}) == dataset_auc({b, a}));
  CHECK_THROWS_AS(dataset_auc({}), std::invalid_argument);
}
