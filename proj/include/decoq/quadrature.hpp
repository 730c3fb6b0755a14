#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace decoq {

namespace detail {

template <typename T>
T adaptive_simpson_rec(const std::function<T(double)>& f, double a, double b,
                       T fa, T fm, T fb, T whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const T sum = left + right;
  if (depth <= 0) throw std::runtime_error("quadrature: recursion limit, integral not converging");
  if (std::abs(sum - whole) <= 15.0 * tol) return sum + (sum - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance. T is double or complex<double>.
template <typename T>
T integrate(const std::function<T(double)>& f, double a, double b, double abs_tol,
            int max_depth = 60) {
  if (!(b > a)) return T{};
  const T fa = f(a);
  const T fb = f(b);
  const T fm = f(0.5 * (a + b));
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec<T>(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Relative-tolerance wrapper: a coarse pass sets the absolute scale.
template <typename T>
T integrate_rel(const std::function<T(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) return T{};
  const T coarse = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  double scale = std::abs(coarse);
  if (scale == 0.0) scale = 1e-300;
  return integrate<T>(f, a, b, rel_tol * scale);
}

// Sine integral Si(x) = int_0^x sin(t)/t dt. Series for small x, quadrature above.
inline double sine_integral(double x) {
  if (x < 0) return -sine_integral(-x);
  if (x == 0) return 0.0;
  if (x < 2.0) {
    double term = x;
    double sum = x;
    const double x2 = x * x;
    for (int n = 1; n < 40; ++n) {
      term *= -x2 / (2.0 * n * (2.0 * n + 1.0));
      const double add = term / (2.0 * n + 1.0);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return integrate<double>([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; },
                           0.0, x, 1e-13);
}

// Bisection for a monotone-increasing objective. Returns x with |f(x)| tolerance
// expressed through the caller's predicate; here we solve f(x) = target.
inline double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                                double target, double rel_tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > target || fhi < target)
    throw std::runtime_error("bisect: target not bracketed");
  double mid = lo;
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm - target) <= rel_tol * std::abs(target)) return mid;
    if (fm < target)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace decoq
