#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace becprobe::numeric {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

enum class GridSpacing { linear, logarithmic };

inline std::vector<double> make_grid(double a, double b, std::size_t n, GridSpacing spacing) {
  if (n < 2) throw std::invalid_argument("make_grid: need at least two points");
  if (!(b > a)) throw std::invalid_argument("make_grid: empty interval");
  if (spacing == GridSpacing::logarithmic && !(a > 0.0)) {
    throw std::invalid_argument("make_grid: logarithmic grid needs a > 0");
  }
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = spacing == GridSpacing::linear ? a + (b - a) * f : a * std::pow(b / a, f);
  }
  g.front() = a;
  g.back() = b;
  return g;
}

/// Brackets [x_i, x_j] over sampled values where the sign flips. Exact zeros
/// are skipped, so every bracket satisfies values(lo) * values(hi) < 0.
inline std::vector<Bracket> sign_change_brackets(const std::vector<double>& xs,
                                                 const std::vector<double>& values) {
  if (xs.size() != values.size()) throw std::invalid_argument("sign_change_brackets: size mismatch");
  std::vector<Bracket> out;
  std::size_t last = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (values[i] == 0.0 || std::isnan(values[i])) continue;
    if (last != xs.size() && (values[last] < 0.0) != (values[i] < 0.0)) {
      out.push_back({xs[last], xs[i]});
    }
    last = i;
  }
  return out;
}

template <class F>
std::vector<Bracket> find_sign_changes(F&& f, double a, double b, std::size_t initial_grid,
                                       GridSpacing spacing = GridSpacing::linear) {
  const auto xs = make_grid(a, b, initial_grid, spacing);
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = f(xs[i]);
  return sign_change_brackets(xs, v);
}

/// Root inside a sign-change bracket. Illinois-modified regula falsi with a
/// bisection fallback whenever the bracket fails to halve; the iterate never
/// leaves the bracket.
template <class F>
double refine_root(F&& f, Bracket bracket, double rel_tol = 1e-12, int max_iter = 200) {
  double a = bracket.lo;
  double b = bracket.hi;
  if (a > b) std::swap(a, b);
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!(fa * fb < 0.0)) throw std::invalid_argument("refine_root: bracket does not change sign");
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double width = b - a;
    if (width <= rel_tol * std::max(std::abs(a), std::abs(b)) || width <= 1e-300) break;
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc < 0.0) == (fa < 0.0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    // Force a bisection step if the secant made little progress.
    if (b - a > 0.5 * width) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if (fm == 0.0) return m;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
        fb = fm;
      }
      side = 0;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace becprobe::numeric
