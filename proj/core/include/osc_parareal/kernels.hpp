#pragma once

#include <vector>

namespace osc {

// k(x) = x^{q+1} (1-x)^{q+1} Q(x) on [0,1], zero elsewhere, with deg Q = p
// chosen so that  int_0^1 k(1-s) s^j ds = 1/(j+1)  for j = 0..p.
class FilterKernel {
 public:
  FilterKernel() = default;

  static FilterKernel constant();

  double operator()(double s) const;

  bool is_constant() const { return constant_; }
  int smoothness() const { return q_; }
  int moments() const { return p_; }
  // Coefficients of Q in the monomial basis, lowest degree first.
  const std::vector<double>& q_coefficients() const { return q_coeffs_; }
  // Coefficients of k itself in the monomial basis (degree 2q+2+p).
  std::vector<double> expanded_coefficients() const;

 private:
  friend FilterKernel make_kernel(int q, int p);
  bool constant_ = true;
  int q_ = -1;
  int p_ = 0;
  std::vector<double> q_coeffs_;
};

FilterKernel make_kernel(int q, int p);
inline FilterKernel make_constant_kernel() { return FilterKernel::constant(); }
inline double eval_kernel(const FilterKernel& k, double s) { return k(s); }

}  // namespace osc
