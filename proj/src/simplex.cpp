#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace udset::detail {

namespace {
constexpr long double kTol = 1e-13L;
}

Simplex::Simplex(const std::vector<Row>& A, const Row& b, const Row& c)
    : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), B_(m_), N_(n_ + 1), D_(m_ + 2, Row(n_ + 2, 0)) {
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
  for (int i = 0; i < m_; ++i) {
    B_[i] = n_ + i;
    D_[i][n_] = -1;
    D_[i][n_ + 1] = b[i];
  }
  for (int j = 0; j < n_; ++j) {
    N_[j] = j;
    D_[m_][j] = -c[j];
  }
  N_[n_] = -1;
  D_[m_ + 1][n_] = 1;
}

void Simplex::pivot(int r, int s) {
  const long double inv = 1 / D_[r][s];
  for (int i = 0; i < m_ + 2; ++i) {
    if (i == r || D_[i][s] == 0) continue;
    const long double f = D_[i][s] * inv;
    for (int j = 0; j < n_ + 2; ++j) D_[i][j] -= D_[r][j] * f;
    D_[i][s] = -f;
  }
  for (int j = 0; j < n_ + 2; ++j) D_[r][j] *= inv;
  D_[r][s] = inv;
  std::swap(B_[r], N_[s]);
}

bool Simplex::run(int phase) {
  const int x = m_ + phase - 1;
  for (;;) {
    // Bland: lowest-labelled improving column.
    int s = -1;
    for (int j = 0; j <= n_; ++j) {
      if (N_[j] == -phase) continue;
      if (D_[x][j] < -kTol && (s == -1 || N_[j] < N_[s])) s = j;
    }
    if (s == -1) return true;
    int r = -1;
    for (int i = 0; i < m_; ++i) {
      if (D_[i][s] <= kTol) continue;
      if (r == -1) {
        r = i;
        continue;
      }
      const long double lhs = D_[i][n_ + 1] * D_[r][s];
      const long double rhs = D_[r][n_ + 1] * D_[i][s];
      if (lhs < rhs || (lhs == rhs && B_[i] < B_[r])) r = i;
    }
    if (r == -1) return false;
    pivot(r, s);
  }
}

Simplex::Status Simplex::solve(Row& x) {
  int r = 0;
  for (int i = 1; i < m_; ++i)
    if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
  if (m_ > 0 && D_[r][n_ + 1] < -kTol) {
    pivot(r, n_);
    run(2);
    if (D_[m_ + 1][n_ + 1] < -1e-11L) {
      infeasibility_ = -D_[m_ + 1][n_ + 1];
      return Status::Infeasible;
    }
    for (int i = 0; i < m_; ++i) {
      if (B_[i] != -1) continue;
      int s = 0;
      for (int j = 1; j <= n_; ++j)
        if (s == -1 || D_[i][j] < D_[i][s] || (D_[i][j] == D_[i][s] && N_[j] < N_[s])) s = j;
      pivot(i, s);
    }
  }
  const bool bounded = run(1);
  x.assign(n_, 0);
  for (int i = 0; i < m_; ++i)
    if (B_[i] < n_ && B_[i] >= 0) x[B_[i]] = D_[i][n_ + 1];
  objective_ = D_[m_][n_ + 1];
  return bounded ? Status::Optimal : Status::Unbounded;
}

}  // namespace udset::detail
