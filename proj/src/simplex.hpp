#pragma once

#include <vector>

namespace udset::detail {

// Dense two-phase simplex in long double: maximize c.x subject to A x <= b,
// x >= 0. Entering and leaving variables follow Bland's rule.
class Simplex {
 public:
  using Row = std::vector<long double>;

  Simplex(const std::vector<Row>& A, const Row& b, const Row& c);

  enum class Status { Optimal, Infeasible, Unbounded };

  Status solve(Row& x);
  long double objective() const { return objective_; }
  // After Infeasible: the phase-one optimum (negative).
  long double infeasibility() const { return infeasibility_; }

 private:
  void pivot(int r, int s);
  bool run(int phase);

  int m_;
  int n_;
  std::vector<int> B_;
  std::vector<int> N_;
  std::vector<Row> D_;
  long double objective_ = 0;
  long double infeasibility_ = 0;
};

}  // namespace udset::detail
