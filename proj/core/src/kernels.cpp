#include "osc_parareal/kernels.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

#include "osc_parareal/state.hpp"

namespace osc {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int n) {
  cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// B(a,b) for positive integers.
cpp_rational beta_int(int a, int b) {
  return cpp_rational(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1));
}

std::vector<cpp_rational> solve_exact(std::vector<std::vector<cpp_rational>> a,
                                      std::vector<cpp_rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw Error("singular kernel moment system");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      cpp_rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<cpp_rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace

FilterKernel FilterKernel::constant() { return FilterKernel{}; }

FilterKernel make_kernel(int q, int p) {
  if (q < 0 || p < 0) throw ConfigurationError("kernel needs q >= 0 and p >= 0");
  const int n = p + 1;
  std::vector<std::vector<cpp_rational>> a(n, std::vector<cpp_rational>(n));
  std::vector<cpp_rational> b(n);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) a[j][m] = beta_int(q + 2 + m, q + 2 + j);
    b[j] = cpp_rational(1, j + 1);
  }
  auto c = solve_exact(std::move(a), std::move(b));
  FilterKernel k;
  k.constant_ = false;
  k.q_ = q;
  k.p_ = p;
  for (const auto& ci : c) k.q_coeffs_.push_back(ci.convert_to<double>());
  return k;
}

double FilterKernel::operator()(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) return 0.0;
  if (constant_) return 1.0;
  double poly = 0.0;
  for (auto it = q_coeffs_.rbegin(); it != q_coeffs_.rend(); ++it) poly = poly * s + *it;
  const double w = s * (1.0 - s);
  return std::pow(w, q_ + 1) * poly;
}

std::vector<double> FilterKernel::expanded_coefficients() const {
  if (constant_) return {1.0};
  // (x - x^2)^{q+1}
  std::vector<double> base{1.0};
  for (int i = 0; i <= q_; ++i) {
    std::vector<double> next(base.size() + 2, 0.0);
    for (std::size_t j = 0; j < base.size(); ++j) {
      next[j + 1] += base[j];
      next[j + 2] -= base[j];
    }
    base = std::move(next);
  }
  std::vector<double> out(base.size() + q_coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = 0; j < q_coeffs_.size(); ++j) out[i + j] += base[i] * q_coeffs_[j];
  return out;
}

}  // namespace osc
