#include "externet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "externet/errors.hpp"

namespace externet {
namespace {

void require_nonnegative_square(const Matrix& M) {
  if (M.rows() != M.cols()) {
    throw DimensionError("matrix must be square, got " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()));
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (!std::isfinite(M(i, j)) || M(i, j) < 0.0) {
        throw DomainError("matrix entries must be finite and nonnegative",
                          {static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
    }
  }
}

// Tarjan's algorithm on the digraph with an edge j -> i whenever M_ij > 0.
// Components are emitted in reverse topological order of the condensation.
class TarjanScc {
 public:
  explicit TarjanScc(const Matrix& M)
      : M_(M), n_(static_cast<std::size_t>(M.rows())), index_(n_, kUnvisited), low_(n_, 0),
        on_stack_(n_, false) {}

  std::vector<std::vector<std::size_t>> run() {
    for (std::size_t v = 0; v < n_; ++v) {
      if (index_[v] == kUnvisited) visit(v);
    }
    std::reverse(components_.begin(), components_.end());
    return components_;
  }

 private:
  static constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

  // Iterative DFS; recursion depth would otherwise be n.
  void visit(std::size_t root) {
    struct Frame {
      std::size_t v;
      std::size_t next;
    };
    std::vector<Frame> frames{{root, 0}};
    open(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      const std::size_t v = f.v;
      bool descended = false;
      while (f.next < n_) {
        const std::size_t w = f.next++;
        // edge v -> w exists when w benefits from v, i.e. M(w, v) > 0
        if (M_(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(v)) <= 0.0) continue;
        if (index_[w] == kUnvisited) {
          open(w);
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack_[w]) low_[v] = std::min(low_[v], index_[w]);
      }
      if (descended) continue;
      if (low_[v] == index_[v]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack_.back();
          stack_.pop_back();
          on_stack_[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components_.push_back(std::move(component));
      }
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().v;
        low_[parent] = std::min(low_[parent], low_[v]);
      }
    }
  }

  void open(std::size_t v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
  }

  const Matrix& M_;
  std::size_t n_;
  std::size_t counter_ = 0;
  std::vector<std::size_t> index_;
  std::vector<std::size_t> low_;
  std::vector<bool> on_stack_;
  std::vector<std::size_t> stack_;
  std::vector<std::vector<std::size_t>> components_;
};

bool component_has_cycle(const Matrix& M, const std::vector<std::size_t>& component) {
  if (component.size() > 1) return true;
  const auto v = static_cast<Eigen::Index>(component.front());
  return M(v, v) > 0.0;
}

Matrix principal_submatrix(const Matrix& M, const std::vector<std::size_t>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix S(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      S(a, b) = M(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                  static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
    }
  }
  return S;
}

struct CollatzWielandt {
  double lower;
  double upper;
};

CollatzWielandt collatz_wielandt(const Vector& Ax, const Vector& x) {
  const Vector ratio = Ax.cwiseQuotient(x);
  return {ratio.minCoeff(), ratio.maxCoeff()};
}

struct RightPerron {
  double radius = 0.0;
  Vector vector;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Right Perron vector of an irreducible nonnegative matrix.
//
// Shifted power iteration on A + sigma I warms up the iterate; Noda's
// inverse iteration, shifted by the Collatz-Wielandt upper bound, then
// finishes it. The shift alone converges far too slowly on imprimitive
// matrices whose peripheral eigenvalues sit at distance ~sigma.
RightPerron right_perron(const Matrix& A, const Tolerances& tol) {
  const auto n = A.rows();
  RightPerron out;
  if (n == 1) {
    out.radius = A(0, 0);
    out.vector = Vector::Ones(1);
    return out;
  }

  const std::size_t cap = tol.iteration_cap(static_cast<std::size_t>(n));
  const double sigma = tol.shift * A.maxCoeff();
  const std::size_t warmup = std::min<std::size_t>(cap, 20 + static_cast<std::size_t>(n));

  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector Ax = A * x;

  auto converged = [&](const Vector& v, const Vector& Av, double& rho, double& residual) {
    const CollatzWielandt cw = collatz_wielandt(Av, v);
    rho = 0.5 * (cw.lower + cw.upper);
    residual = (Av - rho * v).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rho);
    return residual <= tol.eig * scale && (cw.upper - cw.lower) <= tol.eig * scale;
  };

  double rho = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;

  for (; it < warmup; ++it) {
    if (converged(x, Ax, rho, residual)) {
      out = {rho, x, it, residual};
      return out;
    }
    Vector y = Ax + sigma * x;
    x = y / y.sum();
    Ax = A * x;
  }

  const Matrix I = Matrix::Identity(n, n);
  for (; it < cap; ++it) {
    if (converged(x, Ax, rho, residual)) {
      out = {rho, x, it, residual};
      return out;
    }
    const double upper = collatz_wielandt(Ax, x).upper;
    const Vector y = (upper * I - A).partialPivLu().solve(x);
    if (!y.allFinite() || y.minCoeff() <= 0.0) {
      // shift hit the eigenvalue to machine precision; x is as good as it gets
      break;
    }
    x = y / y.sum();
    Ax = A * x;
  }

  if (converged(x, Ax, rho, residual)) {
    out = {rho, x, it, residual};
    return out;
  }
  throw NoConvergence("Perron iteration did not reach tolerance", it, residual, to_std(x));
}

}  // namespace

std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("matrix must be square");
  return TarjanScc(M).run();
}

bool is_irreducible(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("matrix must be square");
  if (M.rows() == 0) return false;
  return strongly_connected_components(M).size() == 1;
}

bool has_acyclic_support(const Matrix& M) {
  for (const auto& component : strongly_connected_components(M)) {
    if (component_has_cycle(M, component)) return false;
  }
  return true;
}

double spectral_radius(const Matrix& M, const Tolerances& tol) {
  require_nonnegative_square(M);
  double radius = 0.0;
  for (const auto& component : strongly_connected_components(M)) {
    if (!component_has_cycle(M, component)) continue;
    const RightPerron p = right_perron(principal_submatrix(M, component), tol);
    radius = std::max(radius, p.radius);
  }
  return radius;
}

PerronPair perron_pair(const Matrix& M, const Tolerances& tol) {
  require_nonnegative_square(M);
  if (!is_irreducible(M)) throw NotIrreducible("matrix is reducible");

  const RightPerron r = right_perron(M, tol);
  const RightPerron l = right_perron(M.transpose(), tol);

  PerronPair out;
  out.right = r.vector;
  out.left = l.vector;
  out.iterations = r.iterations + l.iterations;
  out.radius = out.left.dot(M * out.right) / out.left.dot(out.right);
  const double right_res = (M * out.right - out.radius * out.right).cwiseAbs().maxCoeff();
  const double left_res =
      (M.transpose() * out.left - out.radius * out.left).cwiseAbs().maxCoeff();
  out.residual = std::max(right_res, left_res);
  return out;
}

std::vector<double> cycle_value_estimate(const Matrix& M, std::size_t lmax) {
  require_nonnegative_square(M);
  if (lmax == 0) throw DomainError("lmax must be at least 1");

  std::vector<double> values;
  values.reserve(lmax);
  // M^l = power * exp(log_scale)
  Matrix power = Matrix::Identity(M.rows(), M.cols());
  double log_scale = 0.0;
  bool vanished = false;
  for (std::size_t l = 1; l <= lmax; ++l) {
    if (vanished) {
      values.push_back(0.0);
      continue;
    }
    power = power * M;
    const double c = power.maxCoeff();
    if (c <= 0.0) {
      vanished = true;
      values.push_back(0.0);
      continue;
    }
    power /= c;
    log_scale += std::log(c);
    const double trace = power.trace();
    values.push_back(trace > 0.0 ? std::exp((std::log(trace) + log_scale) / static_cast<double>(l))
                                 : 0.0);
  }
  return values;
}

std::vector<double> trailing_max(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw DomainError("window must be at least 1");
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t first = k + 1 >= window ? k + 1 - window : 0;
    out[k] = *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(first),
                               values.begin() + static_cast<std::ptrdiff_t>(k) + 1);
  }
  return out;
}

namespace {

void orient(Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8 * scale) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SubdominantEstimate subdominant_magnitude(const Matrix& M, const Tolerances& tol) {
  const PerronPair pp = perron_pair(M, tol);
  const auto n = M.rows();
  SubdominantEstimate out;
  if (n == 1) {
    out.vector = Vector::Ones(1);
    return out;
  }

  const Matrix D = M - pp.radius * (pp.right * pp.left.transpose()) / pp.left.dot(pp.right);
  const double dscale = std::max(1.0, D.cwiseAbs().maxCoeff());

  std::mt19937 gen(0x5eedu);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(gen);
  x.normalize();

  const std::size_t cap = tol.iteration_cap(static_cast<std::size_t>(n));
  double last_residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < cap; ++it) {
    const Vector y = D * x;
    const double ynorm = y.norm();
    if (ynorm <= 1e-14 * dscale) {
      out.magnitude = 0.0;
      out.vector = x;
      out.iterations = it;
      orient(out.vector);
      return out;
    }
    const double lambda = x.dot(y);
    last_residual = (y - lambda * x).norm();
    if (last_residual <= tol.eig * std::max(1.0, std::abs(lambda))) {
      out.magnitude = std::abs(lambda);
      out.vector = x;
      out.iterations = it;
      orient(out.vector);
      return out;
    }

    // A rotating pair (or a +-lambda tie) never settles; try the two-step
    // fit D^2 x = a D x + b x, whose roots are the dominant eigenvalues.
    if (it >= 100 && it % 25 == 0) {
      const Vector z = D * y;
      Matrix basis(n, 2);
      basis.col(0) = y;
      basis.col(1) = x;
      const Eigen::Vector2d coeff = basis.colPivHouseholderQr().solve(z);
      const double fit = (z - basis * coeff).norm();
      if (fit <= std::sqrt(tol.eig) * std::max(1e-300, z.norm())) {
        const double a = coeff(0);
        const double b = coeff(1);
        const double disc = a * a + 4.0 * b;
        if (disc < 0.0) {
          out.magnitude = std::sqrt(-b);
          out.complex_pair = true;
        } else {
          const double root = std::sqrt(disc);
          out.magnitude = std::max(std::abs(0.5 * (a + root)), std::abs(0.5 * (a - root)));
        }
        out.vector = x;
        out.iterations = it;
        orient(out.vector);
        return out;
      }
    }
    x = y / ynorm;
  }
  throw NoConvergence("subdominant power iteration did not settle", cap, last_residual, to_std(x));
}

}  // namespace externet
