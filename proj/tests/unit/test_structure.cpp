#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "externet/errors.hpp"
#include "externet/spectral.hpp"
#include "externet/structure.hpp"
#include "support/oracles.hpp"

using namespace externet;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

Matrix hub_network() {
  Matrix B(4, 4);
  B << 0, 0, 7, 0.5,
       5, 0, 6, 0.5,
       0, 0, 0, 0.5,
       0.5, 0.5, 0.5, 0;
  return B;
}

Matrix near_block(double eps) {
  Matrix M(4, 4);
  M << 0, 1, eps, 0,
       1, 0, 0, eps,
       eps, 0, 0, 1,
       0, eps, 1, 0;
  return M;
}

}  // namespace

TEST_CASE("remove_agent zeroes a row and a column") {
  const BenefitsMatrix B{hub_network(), Vector::Zero(4)};
  const Matrix R = remove_agent(B, 3).values;
  CHECK(R.rows() == 4);
  CHECK(R.row(3).isZero(0.0));
  CHECK(R.col(3).isZero(0.0));
  CHECK(R(1, 2) == 6.0);
  CHECK_THROWS_AS(remove_agent(B, 4), IndexOutOfRange);
}

TEST_CASE("essential_agents on the four-agent hub network") {
  const auto r = essential_agents(EconomySpec::raw_benefits(hub_network()));
  CHECK(r.rho_full == doctest::Approx(2.16615).epsilon(1e-5));
  CHECK(r.essential == std::vector<std::size_t>{3});
  CHECK(r.marginal.empty());
  REQUIRE(r.per_agent.size() == 4);
  CHECK(r.per_agent[3].rho_without == 0.0);

  CHECK(r.per_agent[0].rho_without == doctest::Approx(1.2896).epsilon(1e-4));
  CHECK(r.per_agent[1].rho_without == doctest::Approx(1.3428).epsilon(1e-4));
  CHECK(r.per_agent[2].rho_without == doctest::Approx(1.2310).epsilon(1e-4));
  for (std::size_t i = 0; i < 3; ++i) {
    Matrix R = hub_network();
    R.row(static_cast<Eigen::Index>(i)).setZero();
    R.col(static_cast<Eigen::Index>(i)).setZero();
    CHECK(r.per_agent[i].rho_without == doctest::Approx(testing::dense_spectral_radius(R)).epsilon(1e-10));
    CHECK(r.per_agent[i].rho_without > 1.0);
  }

  CHECK_THROWS_AS(
      essential_agents(EconomySpec::linear_log(0.0, Matrix::Zero(2, 2), m2(0, 1, 1, 0))),
      UndefinedAtZero);
}

TEST_CASE("property: essential set is permutation equivariant") {
  std::vector<int> perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  const auto base = essential_agents(hub_network());
  do {
    Eigen::PermutationMatrix<Eigen::Dynamic> P(4);
    for (int k = 0; k < 4; ++k) P.indices()(k) = perm[static_cast<std::size_t>(k)];
    const Matrix permuted = P * hub_network() * P.transpose();
    const auto r = essential_agents(permuted);
    REQUIRE(r.essential.size() == 1);
    CHECK(r.essential.front() == static_cast<std::size_t>(perm[3]));
    CHECK(r.rho_full == doctest::Approx(base.rho_full).epsilon(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("separation_bound on the reciprocal log economy") {
  const auto spec = EconomySpec::linear_log(0.0, Matrix::Zero(2, 2), m2(0, 1, 1, 0));
  const auto cert = solve_centrality(spec);
  const auto r = separation_bound(spec, cert, {0});
  CHECK(r.bound == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.complement == std::vector<std::size_t>{1});
  CHECK(r.cross_terms.size() == 2);

  const auto doubled = EconomySpec::linear_log(0.0, Matrix::Zero(2, 2), m2(0, 2, 2, 0));
  CHECK(separation_bound(doubled, solve_centrality(doubled), {0}).bound == doctest::Approx(4.0));

  CHECK_THROWS_AS(separation_bound(spec, cert, {}), BadPartition);
  CHECK_THROWS_AS(separation_bound(spec, cert, {0, 1}), BadPartition);
  CHECK_THROWS_AS(separation_bound(spec, cert, {2}), BadPartition);
  CHECK_THROWS_AS(separation_bound(spec, ActionProfile{0.5, 0.5}, cert.theta, {0}), NotEfficient);
}

TEST_CASE("property: separation bound symmetry, block diagonal zero, monotonicity") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 6;
    const auto e = testing::random_family(gen, n);
    const auto spec = EconomySpec::linear_log(e.alpha, e.G, e.H);
    const auto cert = solve_centrality(spec);
    std::vector<std::size_t> M, Mc;
    for (int i = 0; i < n; ++i) (i % 2 == 0 ? M : Mc).push_back(static_cast<std::size_t>(i));
    const double b = separation_bound(spec, cert, M).bound;
    CHECK(b == separation_bound(spec, cert, Mc).bound);
    CHECK(b > 0.0);

    // every cross term is nonnegative and they sum to the bound
    const auto terms = separation_bound(spec, cert, M).cross_terms;
    double sum = 0.0;
    for (const auto& t : terms) {
      CHECK(t.value >= 0.0);
      sum += t.value;
    }
    CHECK(sum == doctest::Approx(b).epsilon(1e-12));
  }

  // two disconnected reciprocal pairs
  Matrix H = Matrix::Zero(4, 4);
  H(0, 1) = H(1, 0) = 1.0;
  H(2, 3) = H(3, 2) = 2.0;
  const auto blocks = EconomySpec::linear_log(0.0, Matrix::Zero(4, 4), H);
  const ActionProfile a{1.0, 1.0, 2.0, 2.0};
  const Vector theta = Vector::Constant(4, 0.25);
  CHECK(separation_bound(blocks, a, theta, {0, 1}).bound == 0.0);
  CHECK(separation_bound(blocks, a, theta, {0, 2}).bound > 0.0);
}

TEST_CASE("property: separation bound is monotone in cross benefits") {
  // scaling cross weights of a symmetric economy by c < 1 keeps theta and a* uniform
  for (double c : {1.0, 0.5, 0.25, 0.1}) {
    Matrix H = Matrix::Zero(4, 4);
    H(0, 1) = H(1, 0) = H(2, 3) = H(3, 2) = 1.0;
    H(0, 2) = H(2, 0) = H(1, 3) = H(3, 1) = c;
    const auto spec = EconomySpec::linear_log(0.0, Matrix::Zero(4, 4), H);
    const auto cert = solve_centrality(spec);
    const double b = separation_bound(spec, cert, {0, 1}).bound;
    CHECK(b == doctest::Approx(4.0 * c).epsilon(1e-9));
  }
}

TEST_CASE("suggest_partition") {
  const auto near = suggest_partition({near_block(0.01), Vector::Zero(4)});
  CHECK(near.partition == std::vector<std::size_t>{0, 1});
  CHECK_FALSE(near.degenerate);
  CHECK(near.lambda2 == doctest::Approx(0.99).epsilon(1e-6));

  const auto pair = suggest_partition({m2(0, 1, 1, 0), Vector::Zero(2)});
  CHECK(pair.partition == std::vector<std::size_t>{0});

  // all-equal coupling: the second eigenspace is degenerate; any split is a
  // valid sign pattern of some vector in it, so only check it is proper
  const Matrix full = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  const auto eq = suggest_partition({full, Vector::Zero(4)});
  CHECK_FALSE(eq.partition.empty());
  CHECK(eq.partition.size() < 4);
  CHECK(eq.partition.front() == 0);
  CHECK(eq.gap == doctest::Approx(testing::dense_subdominant_magnitude(full)).epsilon(1e-6));
}

TEST_CASE("property: suggest_partition follows the oracle's second eigenvector") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> eps(0.001, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    // two random dense blocks weakly coupled
    const int k = 2 + trial % 3;
    const int n = 2 * k;
    Matrix M = testing::random_network(gen, n, 1.0, false, 0.5, 1.5);
    const double e = eps(gen);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if ((i < k) != (j < k)) M(i, j) *= e;
      }
    }
    const auto s = suggest_partition({M, Vector::Zero(n)});
    std::vector<std::size_t> expected(static_cast<std::size_t>(k));
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(s.partition == expected);

    const Vector v = testing::dense_second_real_vector(M);
    for (int i = 1; i < n; ++i) CHECK(((v(i) > 0) == (v(0) > 0)) == (i < k));
  }
}
