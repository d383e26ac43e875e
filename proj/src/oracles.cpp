#include "opscale/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "opscale/errors.hpp"

namespace opscale::oracle {

namespace {

bool try_augment(int u, const std::vector<std::vector<int>>& adj,
                 std::vector<int>& match_right, std::vector<char>& visited) {
  for (int v : adj[u]) {
    if (visited[v]) continue;
    visited[v] = 1;
    if (match_right[v] < 0 ||
        try_augment(match_right[v], adj, match_right, visited)) {
      match_right[v] = u;
      return true;
    }
  }
  return false;
}

}  // namespace

int maximum_matching(const BipartiteGraph& g) {
  if (g.n < 0) throw DimensionError("graph size must be nonnegative");
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& [u, v] : g.edges) {
    if (u < 0 || u >= g.n || v < 0 || v >= g.n) {
      throw PreconditionError("edge endpoint out of range");
    }
    adj[u].push_back(v);
  }
  std::vector<int> match_right(g.n, -1);
  int matched = 0;
  for (int u = 0; u < g.n; ++u) {
    std::vector<char> visited(g.n, 0);
    if (try_augment(u, adj, match_right, visited)) ++matched;
  }
  return matched;
}

bool perfect_matching_exists(const BipartiteGraph& g) {
  return maximum_matching(g) == g.n;
}

CPOperator matching_operator(const BipartiteGraph& g) {
  if (g.n < 1) throw DimensionError("graph must have at least one vertex");
  std::vector<QMat> kraus;
  for (const auto& [u, v] : g.edges) {
    if (u < 0 || u >= g.n || v < 0 || v >= g.n) {
      throw PreconditionError("edge endpoint out of range");
    }
    QMat e = QMat::zero(g.n, g.n);
    e(u, v) = 1;
    kraus.push_back(std::move(e));
  }
  if (kraus.empty()) kraus.push_back(QMat::zero(g.n, g.n));
  return CPOperator(std::move(kraus));
}

Rational brute_force_permanent(const QMat& a) {
  a.require_square("permanent");
  int n = a.rows();
  if (n > 8) throw PreconditionError("permanent oracle is limited to n <= 8");
  Rational total = 0;
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    Rational product = 1;
    for (int i = 0; i < n && product != 0; ++i) {
      Rational row_sum = 0;
      for (int j = 0; j < n; ++j) {
        if (subset & (1u << j)) row_sum += a(i, j);
      }
      product *= row_sum;
    }
    int bits = __builtin_popcount(subset);
    if ((n - bits) % 2 == 0) {
      total += product;
    } else {
      total -= product;
    }
  }
  return total;
}

namespace {

// Determinant of a mathematically positive semidefinite matrix as the
// product of Cholesky pivots. A plain LU determinant cancels catastrophically
// at ill-conditioned evaluation points and can come out hugely negative,
// which a minimizer then chases. PSD inputs cannot have a negative pivot, so
// a non-positive one only means the point is numerically degenerate; nullopt
// tells the caller to discard it rather than trust a cancelled value.
std::optional<double> psd_det(std::vector<std::vector<double>> m) {
  int n = static_cast<int>(m.size());
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    double pivot = m[k][k];
    for (int j = 0; j < k; ++j) pivot -= m[k][j] * m[k][j];
    if (!(pivot > 0.0)) return std::nullopt;
    det *= pivot;
    double root = std::sqrt(pivot);
    m[k][k] = root;
    for (int i = k + 1; i < n; ++i) {
      double s = m[i][k];
      for (int j = 0; j < k; ++j) s -= m[i][j] * m[k][j];
      m[i][k] = s / root;
    }
  }
  return det;
}

struct CapacityObjective {
  int n;
  std::vector<std::vector<std::vector<double>>> kraus;  // [s][i][j]

  // params: first n entries are log diagonal of L, then strict lower triangle
  // row by row. X = L L^T normalized to det 1.
  double operator()(const std::vector<double>& params) const {
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) {
      double p = params[i];
      if (std::fabs(p) > 40.0) return std::numeric_limits<double>::infinity();
      l[i][i] = std::exp(p);
      log_det += p;
    }
    int idx = n;
    for (int i = 1; i < n; ++i) {
      for (int j = 0; j < i; ++j) l[i][j] = params[idx++];
    }
    double scale = std::exp(-2.0 * log_det / n);
    std::vector<std::vector<double>> x(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k <= std::min(i, j); ++k) s += l[i][k] * l[j][k];
        x[i][j] = s * scale;
      }
    }
    std::vector<std::vector<double>> tx(n, std::vector<double>(n, 0.0));
    for (const auto& a : kraus) {
      // A * X * A^T accumulated entrywise
      std::vector<std::vector<double>> ax(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
          if (a[i][k] == 0.0) continue;
          for (int j = 0; j < n; ++j) ax[i][j] += a[i][k] * x[k][j];
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += ax[i][k] * a[j][k];
          tx[i][j] += s;
        }
      }
    }
    std::optional<double> det = psd_det(std::move(tx));
    if (!det || !std::isfinite(*det)) {
      return std::numeric_limits<double>::infinity();
    }
    return *det;
  }
};

double nelder_mead(const CapacityObjective& f, std::vector<double> start,
                   int max_evals) {
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  int dim = static_cast<int>(start.size());
  std::vector<std::vector<double>> pts(dim + 1, start);
  std::vector<double> vals(dim + 1);
  for (int i = 0; i < dim; ++i) pts[i + 1][i] += 0.25;
  int evals = 0;
  for (int i = 0; i <= dim; ++i) {
    vals[i] = f(pts[i]);
    ++evals;
  }
  while (evals < max_evals) {
    std::vector<int> order(dim + 1);
    for (int i = 0; i <= dim; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    {
      std::vector<std::vector<double>> np(dim + 1);
      std::vector<double> nv(dim + 1);
      for (int i = 0; i <= dim; ++i) {
        np[i] = pts[order[i]];
        nv[i] = vals[order[i]];
      }
      pts = std::move(np);
      vals = std::move(nv);
    }
    if (std::isfinite(vals[0]) &&
        vals[dim] - vals[0] <= 1e-13 * (std::fabs(vals[0]) + 1e-100)) {
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) centroid[j] += pts[i][j];
    }
    for (int j = 0; j < dim; ++j) centroid[j] /= dim;

    auto blend = [&](double w) {
      std::vector<double> p(dim);
      for (int j = 0; j < dim; ++j) {
        p[j] = centroid[j] + w * (pts[dim][j] - centroid[j]);
      }
      return p;
    };
    std::vector<double> reflected = blend(-alpha);
    double fr = f(reflected);
    ++evals;
    if (fr < vals[0]) {
      std::vector<double> expanded = blend(-alpha * gamma);
      double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        pts[dim] = expanded;
        vals[dim] = fe;
      } else {
        pts[dim] = reflected;
        vals[dim] = fr;
      }
      continue;
    }
    if (fr < vals[dim - 1]) {
      pts[dim] = reflected;
      vals[dim] = fr;
      continue;
    }
    std::vector<double> contracted = blend(fr < vals[dim] ? -rho : rho);
    double fc = f(contracted);
    ++evals;
    if (fc < std::min(fr, vals[dim])) {
      pts[dim] = contracted;
      vals[dim] = fc;
      continue;
    }
    for (int i = 1; i <= dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        pts[i][j] = pts[0][j] + sigma * (pts[i][j] - pts[0][j]);
      }
      vals[i] = f(pts[i]);
      ++evals;
    }
  }
  double best = vals[0];
  for (double v : vals) best = std::min(best, v);
  return best;
}

}  // namespace

double brute_force_capacity(const CPOperator& t, int starts,
                            std::uint64_t seed) {
  int n = t.n();
  if (n > 4) throw PreconditionError("capacity oracle is limited to n <= 4");
  CapacityObjective obj;
  obj.n = n;
  for (const auto& a : t.kraus()) {
    std::vector<std::vector<double>> af(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) af[i][j] = to_double(a(i, j));
    }
    obj.kraus.push_back(std::move(af));
  }
  int dim = n * (n + 1) / 2;
  if (n == 1) {
    return obj(std::vector<double>(1, 0.0));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  const double widths[] = {0.5, 1.0, 2.0};
  for (int s = 0; s < starts; ++s) {
    std::vector<double> start(dim, 0.0);
    if (s > 0) {
      double w = widths[s % 3];
      for (double& p : start) p = w * gauss(rng);
    }
    best = std::min(best, nelder_mead(obj, std::move(start), 500 * dim));
  }
  return best;
}

Rational plain_gauss_det(QMat a) {
  a.require_square("determinant");
  int n = a.rows();
  Rational det = 1;
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int i = k; i < n; ++i) {
      if (a(i, k) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) return Rational(0);
    if (pivot != k) {
      for (int j = k; j < n; ++j) std::swap(a(pivot, j), a(k, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational factor = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return det;
}

bool blowup_nonsingular(const LinearMatrixPencil& p, int trials,
                        std::uint64_t seed) {
  p.validate();
  if (!p.is_square()) {
    throw DimensionError("blow-up oracle requires a square pencil");
  }
  int n = p.rows;
  int d = std::max(1, n - 1);
  long bound = 2L * n * n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-bound, bound);
  for (int t = 0; t < trials; ++t) {
    std::map<std::string, QMat> subst;
    for (const auto& v : p.vars) {
      QMat b(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) b(i, j) = Rational(dist(rng));
      }
      subst.emplace(v, std::move(b));
    }
    if (plain_gauss_det(eval_pencil(p, subst, d)) != 0) return true;
  }
  return false;
}

}  // namespace opscale::oracle
