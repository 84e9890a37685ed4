#include "obstacle/pdas.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace obstacle {

double ComplementaritySystem::residual(int i, const Vector& x) const {
  double s = -pairs[i].offset;
  for (const auto& [j, a] : pairs[i].row) s += a * x[j];
  return s;
}

SparseMatrix ComplementaritySystem::matrix_for(const std::vector<char>& active) const {
  std::vector<Triplet> t;
  t.reserve(K.nonZeros() + 4 * pairs.size());
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (active[i])
      for (const auto& [j, a] : p.row) t.emplace_back(p.slot, j, a);
    else
      t.emplace_back(p.slot, p.lambda, 1.0);
  }
  SparseMatrix A(K.rows(), K.cols());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

Vector ComplementaritySystem::rhs_for(const std::vector<char>& active) const {
  Vector b = rhs;
  for (std::size_t i = 0; i < pairs.size(); ++i) b[pairs[i].slot] = active[i] ? pairs[i].offset : 0.0;
  return b;
}

namespace {

// Matrix with the union pattern of both row variants, plus value slots.
struct SwitchableMatrix {
  SparseMatrix A;
  struct Slot {
    std::vector<std::pair<int, double>> entries;  // (value index, coefficient when active)
    int lambda_pos = -1;
  };
  std::vector<Slot> slots;

  explicit SwitchableMatrix(const ComplementaritySystem& s) {
    std::vector<Triplet> t;
    t.reserve(s.K.nonZeros() + 4 * s.pairs.size());
    for (int k = 0; k < s.K.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s.K, k); it; ++it)
        t.emplace_back(it.row(), it.col(), it.value());
    for (const auto& p : s.pairs) {
      for (const auto& [j, a] : p.row) t.emplace_back(p.slot, j, 0.0);
      t.emplace_back(p.slot, p.lambda, 0.0);
    }
    A.resize(s.K.rows(), s.K.cols());
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    auto pos = [&](int r, int c) {
      const int* inner = A.innerIndexPtr();
      const int b = A.outerIndexPtr()[c], e = A.outerIndexPtr()[c + 1];
      const int* it = std::lower_bound(inner + b, inner + e, r);
      return static_cast<int>(it - inner);
    };
    slots.resize(s.pairs.size());
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
      const auto& p = s.pairs[i];
      // merge duplicate columns of the residual row
      std::vector<std::pair<int, double>> e;
      for (const auto& [j, a] : p.row) e.emplace_back(pos(p.slot, j), a);
      std::sort(e.begin(), e.end());
      for (const auto& q : e) {
        if (!slots[i].entries.empty() && slots[i].entries.back().first == q.first)
          slots[i].entries.back().second += q.second;
        else
          slots[i].entries.push_back(q);
      }
      slots[i].lambda_pos = pos(p.slot, p.lambda);
    }
  }

  void set(const std::vector<char>& active) {
    double* v = A.valuePtr();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (const auto& [k, a] : slots[i].entries) v[k] = 0;
      v[slots[i].lambda_pos] = 0;
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (active[i])
        for (const auto& [k, a] : slots[i].entries) v[k] += a;
      else
        v[slots[i].lambda_pos] += 1.0;
    }
  }
};

}  // namespace

PdasResult solve_pdas(const ComplementaritySystem& sys, const PdasConfig& cfg) {
  if (!(cfg.c > 0) || cfg.max_iterations < 1) throw Error("invalid PDAS configuration");
  const int m = sys.num_pairs();
  SwitchableMatrix S(sys);
  LUSolver lu;
  lu.analyze(S.A);

  PdasResult res;
  std::vector<char> active(m, 0);
  std::set<std::vector<char>> seen;
  bool pivoting = false;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    seen.insert(active);
    S.set(active);
    lu.factorize(S.A);
    const Vector b = sys.rhs_for(active);
    res.x = certified_solve(lu, S.A, b, cfg.tol);
    res.iterations = k + 1;
    res.active_sizes.push_back(static_cast<int>(std::count(active.begin(), active.end(), 1)));

    std::vector<char> next(m, 0);
    for (int i = 0; i < m; ++i) {
      const auto& p = sys.pairs[i];
      next[i] = res.x[p.lambda] - cfg.c * sys.residual(i, res.x) / p.scale > 0 ? 1 : 0;
    }
    if (cfg.log) {
      double rmin = 0, lmin = 0;
      for (int i = 0; i < m; ++i) {
        rmin = std::min(rmin, sys.residual(i, res.x) / sys.pairs[i].scale);
        lmin = std::min(lmin, res.x[sys.pairs[i].lambda]);
      }
      *cfg.log << "pdas " << k << " |A|=" << res.active_sizes.back() << " min r=" << rmin
               << " min lambda=" << lmin << '\n';
    }
    if (!pivoting && next == active) {
      res.active = std::move(active);
      return res;
    }
    if (!pivoting && seen.count(next)) {
      if (!cfg.pivot_on_cycle)
        throw NoConvergence("PDAS cycle detected after " + std::to_string(k + 1) + " iterations");
      pivoting = true;
      if (cfg.log) *cfg.log << "pdas cycle at " << k << ", switching to single pivots\n";
    }
    if (pivoting) {
      // flip the first index violating its sign condition beyond round-off
      const double lam_tol = 1e-12 * std::max(1.0, res.x.cwiseAbs().maxCoeff());
      int flip = -1;
      for (int i = 0; i < m && flip < 0; ++i) {
        const auto& p = sys.pairs[i];
        if (active[i] ? res.x[p.lambda] < -lam_tol : sys.residual(i, res.x) / p.scale < -1e-12) flip = i;
      }
      if (flip < 0) {
        res.active = std::move(active);
        return res;
      }
      next = active;
      next[flip] = !next[flip];
      if (seen.count(next)) throw NoConvergence("PDAS cycle detected after " + std::to_string(k + 1) + " iterations");
    }
    active = std::move(next);
  }
  throw NoConvergence("PDAS reached the iteration limit");
}

}  // namespace obstacle
