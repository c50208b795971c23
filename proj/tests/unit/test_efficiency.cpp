#include "doctest.h"

#include "externet/efficiency.hpp"
#include "externet/errors.hpp"
#include "externet/lindahl.hpp"
#include "support/oracles.hpp"

using namespace externet;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

EconomySpec reciprocal_log(double w12 = 1.0, double w21 = 1.0) {
  return EconomySpec::linear_log(0.0, Matrix::Zero(2, 2), m2(0, w12, w21, 0));
}

Matrix hub_network() {
  Matrix B(4, 4);
  B << 0, 0, 7, 0.5,
       5, 0, 6, 0.5,
       0, 0, 0, 0.5,
       0.5, 0.5, 0.5, 0;
  return B;
}

}  // namespace

TEST_CASE("classify_interior on the reciprocal log economy") {
  const auto spec = reciprocal_log();
  const auto efficient = classify_interior(spec, {1.0, 1.0});
  CHECK(efficient.verdict == Verdict::Efficient);
  CHECK(efficient.rho == doctest::Approx(1.0));
  REQUIRE(efficient.weights);
  CHECK((*efficient.weights)(0) == doctest::Approx(0.5));
  CHECK_FALSE(efficient.direction);

  const auto up = classify_interior(spec, {0.5, 0.5});
  CHECK(up.verdict == Verdict::ImprovableUp);
  CHECK(up.rho == doctest::Approx(2.0));
  REQUIRE(up.direction);
  CHECK((up.direction->array() > 0).all());

  const auto down = classify_interior(spec, {2.0, 2.0});
  CHECK(down.verdict == Verdict::ImprovableDown);
  CHECK(down.rho == doctest::Approx(0.5));
  CHECK((down.direction->array() < 0).all());

  CHECK_THROWS_AS(classify_interior(spec, {0.0, 1.0}), DomainError);
}

TEST_CASE("classify_interior rejects reducible benefits") {
  const auto spec = EconomySpec::linear_log(0.0, Matrix::Zero(2, 2), m2(0, 1, 0, 0));
  CHECK_THROWS_AS(classify_interior(spec, {1.0, 1.0}), NotIrreducible);
}

TEST_CASE("classify_status_quo") {
  const auto fig = classify_status_quo(EconomySpec::raw_benefits(hub_network()));
  CHECK(fig.verdict == Verdict::StatusQuoImprovable);
  CHECK(fig.rho > 1.0);
  REQUIRE(fig.direction);
  CHECK((fig.direction->array() > 0).all());

  const auto half = classify_status_quo(EconomySpec::raw_benefits(m2(0, 0.5, 0.5, 0)));
  CHECK(half.verdict == Verdict::StatusQuoEfficient);
  CHECK(half.rho == doctest::Approx(0.5));

  Matrix without4 = hub_network();
  without4.row(3).setZero();
  without4.col(3).setZero();
  const auto acyclic = classify_status_quo(EconomySpec::raw_benefits(without4));
  CHECK(acyclic.verdict == Verdict::StatusQuoEfficient);
  CHECK(acyclic.rho == 0.0);

  const auto logs = classify_status_quo(reciprocal_log());
  CHECK(logs.verdict == Verdict::StatusQuoImprovable);
  CHECK(std::isnan(logs.rho));
  CHECK_FALSE(logs.notes.empty());

  const auto knife = classify_status_quo(EconomySpec::raw_benefits(m2(0, 1, 1, 0)));
  CHECK(knife.verdict == Verdict::StatusQuoEfficient);
  CHECK_FALSE(knife.notes.empty());
}

TEST_CASE("improvement_direction satisfies the first-order Pareto inequality") {
  const auto spec = reciprocal_log();
  const auto up = improvement_direction(spec, {0.5, 0.5});
  CHECK(up.direction(0) == doctest::Approx(0.5));
  CHECK(up.direction(1) == doctest::Approx(0.5));
  CHECK(up.min_gain > 0.0);

  const auto down = improvement_direction(spec, {2.0, 2.0});
  CHECK(down.direction(0) == doctest::Approx(-0.5));
  CHECK(down.min_gain > 0.0);

  Matrix cycle = Matrix::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 2.0;
  const auto cyc = improvement_direction(EconomySpec::raw_benefits(cycle), ActionProfile::ones(3));
  for (int i = 0; i < 3; ++i) CHECK(cyc.direction(i) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(improvement_direction(spec, {1.0, 1.0}), AtEfficiency);
}

TEST_CASE("verify_improvement") {
  const auto spec = reciprocal_log();
  const Vector half = Vector::Constant(2, 0.5);
  CHECK(verify_improvement(spec, {0.5, 0.5}, half, 0.1).passed);
  CHECK_FALSE(verify_improvement(spec, {1.0, 1.0}, half, 0.1).passed);
  const auto zero = verify_improvement(spec, {1.0, 1.0}, Vector::Zero(2), 0.1);
  CHECK_FALSE(zero.passed);
  CHECK(zero.utility_changes.isZero(0.0));
}

TEST_CASE("pareto_weights") {
  const auto sym = pareto_weights(reciprocal_log(), {1.0, 1.0});
  CHECK(sym.theta(0) == doctest::Approx(0.5));
  CHECK(sym.foc_residual <= 1e-12);

  // B(2,1) = [[0, 2/1], [1/2, 0]]: rho = 1 and theta = (1/3, 2/3)
  const auto skew = pareto_weights(reciprocal_log(2.0, 1.0), {2.0, 1.0});
  CHECK(skew.theta(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(skew.theta(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(skew.foc_residual <= 1e-10);

  Matrix cycle = Matrix::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1.0;
  const auto cyc = pareto_weights(EconomySpec::raw_benefits(cycle), ActionProfile::ones(3));
  for (int i = 0; i < 3; ++i) CHECK(cyc.theta(i) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(pareto_weights(reciprocal_log(), {0.5, 0.5}), NotEfficient);
}

TEST_CASE("core_check_bruteforce on the reciprocal log economy") {
  const auto spec = reciprocal_log();
  CoreCheckOptions opts;
  opts.grid = 21;
  opts.radius = 3.0;
  const auto at_lindahl = core_check_bruteforce(spec, {1.0, 1.0}, opts);
  CHECK(at_lindahl.blocking.empty());
  CHECK(at_lindahl.coalitions_checked == 3);
  CHECK(at_lindahl.note.find("not a proof") != std::string::npos);

  const auto low = core_check_bruteforce(spec, {0.1, 0.1}, opts);
  REQUIRE(low.blocking.size() == 1);
  CHECK(low.blocking.front().members == std::vector<std::size_t>{0, 1});
  CHECK((low.blocking.front().gains.array() > 0).all());

  // a singleton blocks iff u_i(0 for everyone) beats u_i(a); with logs it never does
  for (const auto& b : low.blocking) CHECK(b.members.size() > 1);

  Matrix H = Matrix::Ones(7, 7) - Matrix::Identity(7, 7);
  const auto big = EconomySpec::linear_log(0.0, Matrix::Zero(7, 7), H);
  CHECK_THROWS_AS(core_check_bruteforce(big, ActionProfile::ones(7), opts), TooManyAgents);
}

TEST_CASE("core_check_bruteforce: singleton blocks under linear utilities") {
  // u_1 = -a_1 + 0.1 a_2: at a = (1, 0.5) agent 1 is better off alone at 0
  const auto raw = EconomySpec::raw_benefits(m2(0, 0.1, 3.0, 0));
  CoreCheckOptions opts;
  opts.grid = 5;
  opts.radius = 2.0;
  const auto r = core_check_bruteforce(raw, {1.0, 0.5}, opts);
  bool singleton_one = false;
  for (const auto& b : r.blocking) singleton_one |= b.members == std::vector<std::size_t>{0};
  CHECK(singleton_one);
}

TEST_CASE("property: efficiency diagnosis round trip on random family economies") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 8;
    const auto e = testing::random_family(gen, n);
    const auto spec = EconomySpec::linear_log(e.alpha, e.G, e.H);
    const auto cert = solve_centrality(spec);
    const Vector& a = cert.a_star.values();
    CHECK(classify_interior(spec, cert.a_star).verdict == Verdict::Efficient);
    CHECK(pareto_weights(spec, cert.a_star).foc_residual <= 1e-8);

    const ActionProfile low(0.9 * a);
    const ActionProfile high(1.1 * a);
    CHECK(classify_interior(spec, low).verdict == Verdict::ImprovableUp);
    CHECK(classify_interior(spec, high).verdict == Verdict::ImprovableDown);

    for (const auto& p : {low, high}) {
      const auto dir = improvement_direction(spec, p);
      CHECK(dir.min_gain > 0.0);
      for (double delta : {1e-2, 1e-3, 1e-4}) {
        CHECK(verify_improvement(spec, p, dir.direction, delta).passed);
      }
    }
  }
}

TEST_CASE("property: no blocking coalition at solved Lindahl points") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    const auto e = testing::random_family(gen, n);
    const auto spec = EconomySpec::linear_log(e.alpha, e.G, e.H);
    const auto cert = solve_centrality(spec);
    CoreCheckOptions opts;
    opts.grid = 15;
    opts.radius = 3.0 * cert.a_star.values().maxCoeff();
    CHECK(core_check_bruteforce(spec, cert.a_star, opts).blocking.empty());
  }
}
