#include <bit>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ovoscope/error.hpp"
#include "ovoscope/eval.hpp"
#include "ovoscope/svm.hpp"
#include "qp_oracle.hpp"

using namespace ovoscope;

namespace {

std::vector<double> e1(double v) { return {v, 0, 0, 0, 0}; }

std::vector<LabeledSample> two_point() { return {{e1(1), 1}, {e1(-1), -1}}; }

TrainConfig with_c(double c) {
  TrainConfig cfg;
  cfg.c = c;
  return cfg;
}

double sum_alpha_y(const SvmModel& m, std::span<const LabeledSample> s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += m.alphas[j] * s[j].y;
  return sum;
}

}  // namespace

TEST_CASE("dual objective examples") {
  const auto s = two_point();
  CHECK(dual_objective(s, std::vector<double>{0, 0}) == 0.0);
  const std::vector<LabeledSample> one{{e1(1), 1}};
  CHECK(dual_objective(one, std::vector<double>{1}) == 0.5);
  // 1 - 1/2 (0.25 * 1 + 2 * 0.25 * 1 + 0.25 * 1)
  CHECK(dual_objective(s, std::vector<double>{0.5, 0.5}) == 0.5);
  CHECK_THROWS_AS(dual_objective(s, std::vector<double>{1}), InvalidArgument);
}

TEST_CASE("symmetric two-point problem has the analytic solution") {
  const auto s = two_point();
  const SvmModel m = train_smo(s, with_c(10));
  CHECK(m.converged);
  REQUIRE(m.weights.size() == 5);
  CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < 5; ++k) CHECK(std::abs(m.weights[k]) <= 1e-6);
  CHECK(std::abs(m.bias) <= 1e-6);
  CHECK(m.alphas[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.alphas[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.support_vectors.size() == 2);

  CHECK(std::abs(decision_value(m, e1(0))) <= 1e-6);
  CHECK(decision_value(m, e1(2)) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(decision_value(m, e1(-2)) == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(kkt_violation(m, s) <= 1e-9);
  CHECK(predict(m, s[0].x) == 1);
  CHECK(predict(m, s[1].x) == -1);
  CHECK(dual_objective(s, m.alphas) == doctest::Approx(0.5).epsilon(1e-12));

  // The oracle agrees on its own terms.
  const auto qp = testing::qp_solve(s, 10);
  CHECK(std::abs(static_cast<double>(qp.dual) - 0.5) <= 1e-9);
}

TEST_CASE("sign tie goes to the negative class") {
  SvmModel m;
  m.weights = {0.0, 0.0};
  m.bias = 0.0;
  CHECK(predict(m, std::vector<double>{3.0, -1.0}) == -1);
  CHECK(label_from_class(predict(m, std::vector<double>{0.0, 0.0})) == Label::Infertile);
  m.bias = 2.0;
  CHECK(label_from_class(predict(m, std::vector<double>{0.0, 0.0})) == Label::Fertile);
  m.bias = -2.0;
  CHECK(label_from_class(predict(m, std::vector<double>{0.0, 0.0})) == Label::Infertile);
  CHECK_THROWS_AS(predict(m, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("XOR is not linearly separable") {
  const std::vector<std::array<double, 2>> pts = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> xor_y = {-1, -1, 1, 1};

  // Oracle: every labelling a halfplane can realise on these points. Lines
  // through pairs of perturbed points plus both orientations cover them all.
  std::set<std::vector<int>> realisable;
  ovoscope::Rng rng(1);
  for (int trial = 0; trial < 20000; ++trial) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-2, 2);
    std::vector<int> lab;
    for (auto p : pts) lab.push_back(a * p[0] + b * p[1] + c > 0 ? 1 : -1);
    realisable.insert(lab);
  }
  CHECK(realisable.size() == 14);  // 16 labellings minus the two XOR ones
  CHECK(realisable.count(xor_y) == 0);
  std::size_t best = 0;
  for (const auto& lab : realisable) {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < 4; ++i) agree += lab[i] == xor_y[i];
    best = std::max(best, agree);
  }
  CHECK(best == 3);

  std::vector<LabeledSample> s;
  for (std::size_t i = 0; i < 4; ++i) s.push_back({{pts[i][0], pts[i][1], 0, 0, 0}, xor_y[i]});
  for (double c : {0.1, 1.0, 10.0, 100.0}) {
    const SvmModel m = train_smo(s, with_c(c));
    std::size_t correct = 0;
    for (const auto& smp : s) correct += predict(m, smp.x) == smp.y;
    CHECK(correct <= 3);
  }
}

TEST_CASE("SMO matches the QP oracle on small random problems") {
  ovoscope::Rng rng(2024);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(3), dim = 2 + rng.below(4);
    const double c = std::array{0.1, 1.0, 10.0}[rng.below(3)];
    const auto s = testing::random_problem(rng, n, dim);
    TrainConfig cfg = with_c(c);
    cfg.seed = static_cast<std::uint64_t>(trial);
    const SvmModel m = train_smo(s, cfg);
    CAPTURE(trial);
    CHECK(m.converged);
    const double dual = dual_objective(s, m.alphas);
    const double oracle = static_cast<double>(testing::qp_solve(s, c).dual);
    worst_gap = std::max(worst_gap, std::abs(dual - oracle) / (1 + std::abs(oracle)));
    CHECK(std::abs(dual - oracle) <= 1e-4 * (1 + std::abs(oracle)));
    CHECK(kkt_violation(m, s) <= cfg.kkt_tol);
    CHECK(sum_alpha_y(m, s) == 0.0);
    for (double a : m.alphas) {
      CHECK(a >= 0.0);
      CHECK(a <= c);
    }
    // w is the support-vector expansion
    for (std::size_t k = 0; k < dim; ++k) {
      double w = 0.0;
      for (std::size_t j = 0; j < n; ++j) w += m.alphas[j] * s[j].y * s[j].x[k];
      CHECK(std::abs(w - m.weights[k]) <= 1e-9);
    }
    for (const auto& smp : s) {
      CHECK(std::abs(decision_value(m, smp.x) - decision_value_sv(m, smp.x)) <= 1e-9);
    }
    // Every sample adds at most c * kkt_tol to the duality gap.
    const double primal = primal_objective(m, s);
    CHECK(primal >= dual - 1e-9);
    CHECK(primal - dual <= static_cast<double>(n) * c * cfg.kkt_tol + 1e-9);
  }
  MESSAGE("largest relative dual gap to oracle: " << worst_gap);
}

TEST_CASE("duality gap closes at a tight tolerance") {
  ovoscope::Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(3), dim = 2 + rng.below(4);
    const double c = std::array{0.1, 1.0, 10.0}[rng.below(3)];
    const auto s = testing::random_problem(rng, n, dim);
    TrainConfig cfg = with_c(c);
    cfg.kkt_tol = 1e-6;
    cfg.max_passes = 5000;
    const SvmModel m = train_smo(s, cfg);
    CHECK(m.converged);
    const double dual = dual_objective(s, m.alphas);
    const double primal = primal_objective(m, s);
    CHECK(primal >= dual - 1e-9);
    CHECK(primal - dual <= 1e-3 * (1 + std::abs(dual)));
  }
}

TEST_CASE("dual objective does not decrease as passes accumulate") {
  ovoscope::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_problem(rng, 30, 5);
    double prev = 0.0;
    for (std::size_t passes = 1; passes <= 12; ++passes) {
      TrainConfig cfg = with_c(1.0);
      cfg.max_passes = passes;
      cfg.seed = 3;
      const SvmModel m = train_smo(s, cfg);
      const double d = dual_objective(s, m.alphas);
      CHECK(d >= prev - 1e-12);
      prev = d;
      CHECK(sum_alpha_y(m, s) == 0.0);
    }
  }
}

TEST_CASE("running out of passes is reported, not thrown") {
  ovoscope::Rng rng(8);
  const auto s = testing::random_problem(rng, 60, 5);
  TrainConfig cfg = with_c(10.0);
  cfg.max_passes = 1;
  const SvmModel m = train_smo(s, cfg);
  CHECK_FALSE(m.converged);
  CHECK(m.passes == 1);
  CHECK(kkt_violation(m, s) > cfg.kkt_tol);
  // Random second indices make slow progress on heavily overlapping classes
  // with a large c; given enough passes the solver still gets there.
  cfg.max_passes = 5000;
  const SvmModel done = train_smo(s, cfg);
  CHECK(done.converged);
  CHECK(kkt_violation(done, s) <= cfg.kkt_tol);
}

TEST_CASE("training is deterministic for a seed") {
  ovoscope::Rng rng(9);
  const auto s = testing::random_problem(rng, 40, 5);
  TrainConfig cfg;
  cfg.seed = 77;
  const SvmModel a = train_smo(s, cfg), b = train_smo(s, cfg);
  CHECK(a.alphas == b.alphas);
  CHECK(std::bit_cast<std::uint64_t>(a.bias) == std::bit_cast<std::uint64_t>(b.bias));
}

TEST_CASE("untrained coefficients violate KKT on separable data") {
  SvmModel m;
  m.weights = {0.1, 0, 0, 0, 0};
  m.bias = 0.0;
  m.c = 1.0;
  const auto s = two_point();
  m.alphas = {0.0, 0.0};
  CHECK(kkt_violation(m, s) > 0.0);
  m.alphas = {0.0};
  CHECK_THROWS_AS(kkt_violation(m, s), InvalidArgument);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(train_smo(std::vector<LabeledSample>{{e1(1), 1}}, TrainConfig{}),
                  InvalidArgument);
  CHECK_THROWS_AS(train_smo(std::vector<LabeledSample>{{e1(1), 1}, {e1(2), 1}}, TrainConfig{}),
                  InvalidArgument);
  CHECK_THROWS_AS(train_smo(std::vector<LabeledSample>{{e1(1), 1}, {e1(NAN), -1}}, TrainConfig{}),
                  InvalidArgument);
  const std::vector<LabeledSample> ragged{{e1(1), 1}, {{1.0, 2.0}, -1}};
  CHECK_THROWS_AS(train_smo(ragged, TrainConfig{}), InvalidArgument);
  CHECK_THROWS_AS(train_smo(std::vector<LabeledSample>{{e1(1), 2}, {e1(2), -1}}, TrainConfig{}),
                  InvalidArgument);
  CHECK_THROWS_AS(train_smo(two_point(), with_c(0.0)), InvalidArgument);
  TrainConfig bad;
  bad.kkt_tol = 0.0;
  CHECK_THROWS_AS(train_smo(two_point(), bad), InvalidArgument);
}

TEST_CASE("predicted labels of the two-point problem survive a common rescaling") {
  const auto s = two_point();
  const SvmModel base = train_smo(s, with_c(10));
  for (double k : {0.01, 3.0, 1000.0}) {
    std::vector<LabeledSample> scaled = s;
    for (auto& smp : scaled) {
      for (auto& v : smp.x) v *= k;
    }
    // |w| scales by 1/k, so the matching penalty is c / k^2.
    const SvmModel m = train_smo(scaled, with_c(10 / (k * k)));
    for (double probe : {-3.0, -0.5, 0.5, 3.0}) {
      CHECK(predict(m, e1(probe * k)) == predict(base, e1(probe)));
    }
  }
}

TEST_CASE("standardized training") {
  ovoscope::Rng rng(10);
  std::vector<LabeledSample> s;
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2 ? 1 : -1;
    s.push_back({{5000 + 300.0 * y + rng.uniform(-50, 50), 7 + rng.uniform(-0.1, 0.1)}, y});
  }
  TrainConfig cfg;
  cfg.standardize = true;
  const SvmModel m = train_smo(s, cfg);
  REQUIRE(m.scaling.has_value());
  CHECK(m.converged);
  for (const auto& smp : s) CHECK(predict(m, smp.x) == smp.y);
  for (const auto& smp : s) {
    CHECK(std::abs(decision_value(m, smp.x) - decision_value_sv(m, smp.x)) <= 1e-9);
  }
}

TEST_CASE("model JSON round-trips bit for bit") {
  ovoscope::Rng rng(11);
  for (bool standardize : {false, true}) {
    const auto s = testing::random_problem(rng, 30, 5);
    TrainConfig cfg;
    cfg.standardize = standardize;
    const SvmModel m = train_smo(s, cfg);
    const std::string text = model_to_json(m);
    const SvmModel r = model_from_json(text);
    auto bits = [](const std::vector<double>& v) {
      std::vector<std::uint64_t> out;
      for (double d : v) out.push_back(std::bit_cast<std::uint64_t>(d));
      return out;
    };
    CHECK(bits(r.weights) == bits(m.weights));
    CHECK(std::bit_cast<std::uint64_t>(r.bias) == std::bit_cast<std::uint64_t>(m.bias));
    CHECK(r.c == m.c);
    REQUIRE(r.support_vectors.size() == m.support_vectors.size());
    for (std::size_t i = 0; i < r.support_vectors.size(); ++i) {
      CHECK(bits(r.support_vectors[i].x) == bits(m.support_vectors[i].x));
      CHECK(r.support_vectors[i].y == m.support_vectors[i].y);
      CHECK(std::bit_cast<std::uint64_t>(r.support_vectors[i].alpha) ==
            std::bit_cast<std::uint64_t>(m.support_vectors[i].alpha));
    }
    CHECK(r.scaling.has_value() == standardize);
    if (standardize) {
      CHECK(bits(r.scaling->means) == bits(m.scaling->means));
      CHECK(bits(r.scaling->scales) == bits(m.scaling->scales));
    }
    for (const auto& smp : s) CHECK(decision_value(r, smp.x) == decision_value(m, smp.x));
    CHECK(model_to_json(r) == text);
    CHECK(text.find("\"feature_order\"") != std::string::npos);
    CHECK(text.find("\"kurtosis\"") != std::string::npos);
  }
}

TEST_CASE("malformed model files are rejected") {
  CHECK_THROWS_AS(model_from_json("{"), InvalidArgument);
  CHECK_THROWS_AS(model_from_json("[]"), InvalidArgument);
  CHECK_THROWS_AS(model_from_json(R"({"weights": [1], "bias": 0, "c": 1, "standardize": false,
      "support_vectors": [], "feature_order": ["a", "b"]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(model_from_json(R"({"weights": [1], "bias": 0, "c": 1, "standardize": false,
      "support_vectors": [{"x": [1], "y": 3, "alpha": 1}], "feature_order": ["a"]})"),
                  InvalidArgument);
  CHECK_NOTHROW(model_from_json(R"({"weights": [1], "bias": 0, "c": 1, "standardize": false,
      "support_vectors": [], "feature_order": ["a"]})"));
}
