#include "externet/lindahl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "externet/efficiency.hpp"
#include "externet/errors.hpp"
#include "externet/spectral.hpp"

namespace externet {

ActionProfile solve_family_closed_form(double alpha, const Matrix& G, const Matrix& H,
                                       const Tolerances& tol) {
  if (G.rows() != G.cols() || H.rows() != H.cols() || G.rows() != H.rows()) {
    throw DimensionError("G and H must be square and of equal size");
  }
  const double rho = spectral_radius(G, tol);
  if (alpha * rho >= 1.0 - 1e-9) {
    throw SpectralBound("alpha * rho(G) = " + std::to_string(alpha * rho) + " is not below 1");
  }
  const Vector h = H.rowwise().sum();
  std::vector<std::size_t> zero;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (!(h(i) > 0.0)) zero.push_back(static_cast<std::size_t>(i));
  }
  if (!zero.empty()) {
    throw NonPositive("h_i = sum_j H_ij must be positive for every agent", zero);
  }

  const auto n = G.rows();
  const Matrix A = Matrix::Identity(n, n) - alpha * G;
  const auto lu = A.partialPivLu();
  Vector a = lu.solve(h);
  a += lu.solve(h - A * a);  // one step of iterative refinement

  const double residual = (a - h - alpha * (G * a)).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw NoConvergence("closed-form linear solve is inaccurate", 1, residual, to_std(a));
  }
  return ActionProfile(a);
}

Matrix lindahl_prices(const EconomySpec& spec, const ActionProfile& a_star, const Vector& theta,
                      const Tolerances& tol) {
  if (!a_star.interior()) throw DomainError("a* must be interior");
  if (theta.size() != a_star.values().size()) throw DimensionError("theta length does not match a*");
  if (!(theta.array() > 0.0).all()) throw DomainError("theta must be positive");
  const Matrix Jn = normalized_jacobian(jacobian(spec, a_star, tol), tol);
  return theta.asDiagonal() * Jn;
}

namespace {

double budget_residual(const Matrix& P, const Vector& a) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double expense = 0.0;
    double income = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (j == i) continue;
      expense += P(i, j) * a(j);
      income += P(j, i);
    }
    worst = std::max(worst, std::abs(expense - a(i) * income));
  }
  return worst;
}

double centrality_residual(const Matrix& B, const Vector& a) {
  return (B * a - a).cwiseAbs().maxCoeff();
}

}  // namespace

LindahlCertificate make_certificate(const EconomySpec& spec, const ActionProfile& a_star,
                                    const Vector& theta, const Matrix& P, const Tolerances& tol) {
  LindahlCertificate cert;
  cert.a_star = a_star;
  cert.theta = theta;
  cert.P = P;
  const Matrix B = benefits_at(spec, a_star, tol).values;
  cert.residual_centrality = centrality_residual(B, a_star.values());
  cert.residual_budget = budget_residual(P, a_star.values());
  cert.residual_price = (P * a_star.values()).cwiseAbs().maxCoeff();
  cert.residual_rho = std::abs(spectral_radius(B, tol) - 1.0);
  return cert;
}

namespace {

class CentralitySolver {
 public:
  CentralitySolver(const EconomySpec& spec, const SolveOptions& opts, const Tolerances& tol)
      : spec_(spec), opts_(opts), tol_(tol) {}

  // F(a) = B(a) a - a. Throws on profiles outside the domain.
  Vector residual(const Vector& a) const {
    return benefits_at(spec_, ActionProfile(a), tol_).values * a - a;
  }

  std::optional<Vector> try_residual(const Vector& a) const {
    if (!(a.array() > 0.0).all()) return std::nullopt;
    try {
      return residual(a);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Tracks the best iterate seen across all attempts.
  void consider(const Vector& a, double res) {
    if (res < best_residual_) {
      best_residual_ = res;
      best_ = a;
    }
  }

  std::optional<Vector> newton(Vector a) {
    auto F = try_residual(a);
    if (!F) return std::nullopt;
    const auto n = a.size();
    for (std::size_t k = 0; k < opts_.max_newton; ++k, ++iterations_) {
      const double res = F->cwiseAbs().maxCoeff();
      consider(a, res);
      if (res <= tol_.fix) return a;

      Matrix JF(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double h = std::min(tol_.fd_step * std::max(1.0, a(j)), 0.5 * a(j));
        Vector up = a;
        Vector down = a;
        up(j) += h;
        down(j) -= h;
        auto Fu = try_residual(up);
        auto Fd = try_residual(down);
        if (!Fu || !Fd) return std::nullopt;
        JF.col(j) = (*Fu - *Fd) / (2.0 * h);
      }
      const Vector step = JF.colPivHouseholderQr().solve(-*F);
      if (!step.allFinite()) return std::nullopt;

      bool accepted = false;
      double t = 1.0;
      for (std::size_t halving = 0; halving <= opts_.max_halvings; ++halving, t *= 0.5) {
        const Vector candidate = a + t * step;
        auto Fc = try_residual(candidate);
        if (Fc && Fc->cwiseAbs().maxCoeff() < res) {
          a = candidate;
          F = std::move(Fc);
          accepted = true;
          break;
        }
      }
      if (!accepted) return std::nullopt;
    }
    const double res = F->cwiseAbs().maxCoeff();
    consider(a, res);
    return res <= tol_.fix ? std::optional<Vector>(a) : std::nullopt;
  }

  std::optional<Vector> fixed_point(Vector a) {
    const double w = opts_.damping;
    for (std::size_t k = 0; k < opts_.max_fixed_point; ++k, ++iterations_) {
      auto F = try_residual(a);
      if (!F) {
        left_domain_ = true;
        return std::nullopt;
      }
      const double res = F->cwiseAbs().maxCoeff();
      consider(a, res);
      if (res <= tol_.fix) return a;
      a += w * *F;  // (1 - w) a + w B(a) a
    }
    return std::nullopt;
  }

  double best_residual() const { return best_residual_; }
  const Vector& best() const { return best_; }
  std::size_t iterations() const { return iterations_; }
  bool left_domain() const { return left_domain_; }

 private:
  const EconomySpec& spec_;
  const SolveOptions& opts_;
  const Tolerances& tol_;
  double best_residual_ = std::numeric_limits<double>::infinity();
  Vector best_;
  std::size_t iterations_ = 0;
  bool left_domain_ = false;
};

LindahlCertificate certify(const EconomySpec& spec, const Vector& a, const Tolerances& tol) {
  const ActionProfile profile(a);
  const Vector theta = pareto_weights(spec, profile, tol).theta;
  return make_certificate(spec, profile, theta, lindahl_prices(spec, profile, theta, tol), tol);
}

LindahlCertificate solve_constant_benefits(const EconomySpec& spec, const Matrix& B0,
                                           const SolveOptions& opts, const Tolerances& tol) {
  const double rho = spectral_radius(B0, tol);
  if (std::abs(rho - 1.0) > tol.pareto) {
    throw NoSolution("benefits are profile-independent with rho = " + std::to_string(rho) +
                     " != 1, so a = 0 is the only solution of B a = a");
  }
  if (!is_irreducible(B0)) throw NotIrreducible("constant benefits matrix is reducible");
  const PerronPair pp = perron_pair(B0, tol);
  const double scale = opts.init ? opts.init->values().sum() : static_cast<double>(spec.agents());
  LindahlCertificate cert = certify(spec, pp.right * scale, tol);
  cert.scale_free = true;
  cert.iterations = pp.iterations;
  cert.method = "perron";
  return cert;
}

}  // namespace

LindahlCertificate solve_centrality(const EconomySpec& spec, const SolveOptions& opts,
                                    const Tolerances& tol) {
  const auto n = static_cast<Eigen::Index>(spec.agents());
  if (opts.init) {
    if (opts.init->values().size() != n) throw DimensionError("init has the wrong length");
    if (!opts.init->interior()) throw DomainError("init must be interior");
  }
  if (const auto* raw = spec.raw_payload()) return solve_constant_benefits(spec, raw->B0, opts, tol);

  Vector init = Vector::Ones(n);
  if (opts.init) {
    init = opts.init->values();
  } else if (const auto* p = spec.linear_log_payload()) {
    try {
      init = solve_family_closed_form(p->alpha, p->G, p->H, tol).values();
    } catch (const Error&) {
      // no closed form (some h_i = 0); start from ones
    }
  }

  CentralitySolver solver(spec, opts, tol);
  auto attempt = [&](const Vector& start) -> std::optional<std::pair<Vector, const char*>> {
    if (auto a = solver.newton(start)) return std::make_pair(*a, "newton");
    if (auto a = solver.fixed_point(start)) return std::make_pair(*a, "fixed-point");
    return std::nullopt;
  };

  auto solved = attempt(init);
  if (!solved && opts.seed) {
    std::mt19937_64 gen(*opts.seed);
    const double level = std::max(init.mean(), 1e-3);
    std::uniform_real_distribution<double> unif(0.25 * level, 4.0 * level);
    for (std::size_t r = 0; r < opts.restarts && !solved; ++r) {
      Vector start(n);
      for (Eigen::Index i = 0; i < n; ++i) start(i) = unif(gen);
      solved = attempt(start);
    }
  }
  if (!solved) {
    if (solver.left_domain() && solver.best().size() == 0) {
      throw LeftDomain("iterates could not be kept interior");
    }
    throw NoConvergence("centrality solver did not reach tolerance", solver.iterations(),
                        solver.best_residual(), to_std(solver.best()));
  }

  LindahlCertificate cert = certify(spec, solved->first, tol);
  cert.iterations = solver.iterations();
  cert.method = solved->second;
  return cert;
}

LindahlVerification verify_lindahl(const EconomySpec& spec, const LindahlCertificate& cert,
                                   const Tolerances& tol) {
  LindahlVerification out;
  const Vector& a = cert.a_star.values();
  const auto n = a.size();
  if (cert.P.rows() != n || cert.P.cols() != n || cert.theta.size() != n) {
    throw DimensionError("certificate dimensions are inconsistent");
  }

  const JacobianMatrix J = jacobian(spec, cert.a_star, tol);
  const Matrix B = benefits_matrix(J, tol).values;

  out.budget.value = std::max(budget_residual(cert.P, a), (cert.P * a).cwiseAbs().maxCoeff());
  out.budget.tolerance = tol.budget;
  out.budget.passed = out.budget.value <= tol.budget;

  double mrs = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(J.values(i, k)) <= tol.sing) continue;
      if (cert.P(i, k) == 0.0) {
        mrs = std::numeric_limits<double>::infinity();
        continue;
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        const double dev =
            std::abs(cert.P(i, j) / cert.P(i, k) - J.values(i, j) / J.values(i, k));
        mrs = std::max(mrs, dev);
      }
    }
  }
  out.mrs.value = mrs;
  out.mrs.tolerance = tol.mrs;
  out.mrs.passed = mrs <= tol.mrs;

  out.rho.value = std::abs(spectral_radius(B, tol) - 1.0);
  out.rho.tolerance = tol.pareto;
  out.rho.passed = out.rho.value <= tol.pareto;

  out.centrality.value = centrality_residual(B, a);
  out.centrality.tolerance = tol.fix;
  out.centrality.passed = out.centrality.value <= tol.fix;

  out.passed = out.budget.passed && out.mrs.passed && out.rho.passed && out.centrality.passed;
  out.notes.push_back(
      "agent optimality is checked through first-order conditions (price ratios equal MRS, "
      "budgets exhausted), which suffices under concave utilities");
  if (!(cert.theta.array() > 0.0).all()) out.notes.push_back("weights are not strictly positive");
  return out;
}

}  // namespace externet
