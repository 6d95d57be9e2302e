#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature with an oscillation-aware
// initial partition and a mapped tail for semi-infinite domains.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

namespace becprobe::numeric {

enum class QuadratureStatus {
  converged,
  budget_exhausted,   ///< tolerance not reached; value is the best estimate
  roundoff_limited,   ///< panels too narrow to refine further; best estimate
  integrand_failure,  ///< integrand returned NaN or Inf
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  QuadratureStatus status = QuadratureStatus::converged;

  bool converged() const { return status == QuadratureStatus::converged; }
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::size_t max_evaluations = 4'000'000;
  /// Widest allowed initial panel. Non-positive means (b - a) / 8.
  double max_panel_width = 0.0;
};

namespace detail {

// Kronrod abscissae (descending, last is the centre) and weights; Gauss weights
// for the embedded 7-point rule on the odd-indexed abscissae.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool mapped = false;  // integrates over u in (a, b) of f(x0 + u/(1-u)) / (1-u)^2

  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
class PanelEvaluator {
 public:
  PanelEvaluator(F& f, double map_origin) : f_(f), origin_(map_origin) {}

  std::size_t evaluations() const { return evaluations_; }
  bool failed() const { return failed_; }

  Panel evaluate(double a, double b, bool mapped) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = eval(centre, mapped);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      f1[j] = eval(centre - dx, mapped);
      f2[j] = eval(centre + dx, mapped);
      const double s = f1[j] + f2[j];
      kronrod += kWgk[j] * s;
      abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
      if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
      asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    Panel p{a, b, kronrod * half, 0.0, mapped};
    const double resasc = asc * std::abs(half);
    const double resabs = abs_sum * std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    // QUADPACK error scaling.
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
      err = std::max(50.0 * eps * resabs, err);
    }
    p.error = err;
    return p;
  }

 private:
  double eval(double x, bool mapped) {
    ++evaluations_;
    double y;
    if (mapped) {
      const double w = 1.0 - x;
      y = f_(origin_ + x / w) / (w * w);
    } else {
      y = f_(x);
    }
    if (!std::isfinite(y)) {
      failed_ = true;
      return 0.0;
    }
    return y;
  }

  F& f_;
  double origin_;
  std::size_t evaluations_ = 0;
  bool failed_ = false;
};

inline double tolerance(const QuadratureOptions& o, double value) {
  return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

template <class F>
QuadratureResult refine(PanelEvaluator<F>& ev, std::vector<Panel> panels, const QuadratureOptions& o) {
  QuadratureResult r;
  if (ev.failed()) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.abs_error_estimate = std::numeric_limits<double>::infinity();
    r.evaluations = ev.evaluations();
    r.status = QuadratureStatus::integrand_failure;
    return r;
  }
  double total = 0.0;
  double error = 0.0;
  for (const auto& p : panels) {
    total += p.value;
    error += p.error;
  }
  std::priority_queue<Panel> heap(std::less<Panel>{}, std::move(panels));
  std::vector<Panel> frozen;  // too narrow to split
  double frozen_error = 0.0;
  QuadratureStatus status = QuadratureStatus::converged;

  while (error > tolerance(o, total)) {
    if (heap.empty()) {
      status = QuadratureStatus::roundoff_limited;
      break;
    }
    if (ev.evaluations() + 30 > o.max_evaluations) {
      status = QuadratureStatus::budget_exhausted;
      break;
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 64.0 * 2.2e-16 * scale) {
      frozen_error += worst.error;
      frozen.push_back(worst);
      if (error - frozen_error <= 0.5 * tolerance(o, total)) {
        status = QuadratureStatus::roundoff_limited;
        break;
      }
      continue;
    }
    const Panel left = ev.evaluate(worst.a, mid, worst.mapped);
    const Panel right = ev.evaluate(mid, worst.b, worst.mapped);
    if (ev.failed()) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.abs_error_estimate = std::numeric_limits<double>::infinity();
      r.evaluations = ev.evaluations();
      r.status = QuadratureStatus::integrand_failure;
      return r;
    }
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Final sums in a fixed order, compensated.
  std::vector<Panel> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) {
    return x.mapped != y.mapped ? !x.mapped : x.a < y.a;
  });
  double sum = 0.0;
  double comp = 0.0;
  double err_sum = 0.0;
  for (const auto& p : all) {
    const double t = sum + p.value;
    comp += std::abs(sum) >= std::abs(p.value) ? (sum - t) + p.value : (p.value - t) + sum;
    sum = t;
    err_sum += p.error;
  }
  r.value = sum + comp;
  r.abs_error_estimate = err_sum;
  r.evaluations = ev.evaluations();
  r.status = status;
  if (status == QuadratureStatus::converged && err_sum > tolerance(o, r.value)) {
    // Incremental bookkeeping drifted; the compensated totals decide.
    r.status = QuadratureStatus::budget_exhausted;
  }
  return r;
}

}  // namespace detail

/// Breakpoints on [a, b] such that no panel is wider than half the local
/// oscillation period pi / rate(x), nor wider than max_width.
template <class Rate>
std::vector<double> oscillation_partition(double a, double b, Rate&& rate, double max_width,
                                          std::size_t max_panels = 1'000'000) {
  if (!(b > a)) throw std::invalid_argument("oscillation_partition: empty interval");
  if (!(max_width > 0.0)) max_width = b - a;
  std::vector<double> points{a};
  double x = a;
  while (x < b) {
    auto width_at = [&](double at) {
      const double w = rate(at);
      return w > 0.0 ? std::min(max_width, std::numbers::pi / w) : max_width;
    };
    double h = width_at(x);
    h = std::min(h, width_at(std::min(b, x + h)));
    h = std::max(h, 1e-9 * (b - a));
    x = (x + h >= b || points.size() >= max_panels) ? b : x + h;
    points.push_back(x);
  }
  return points;
}

/// Adaptive integral of f over [a, b] with initial panels from `breakpoints`.
template <class F>
QuadratureResult integrate_partitioned(F&& f, const std::vector<double>& breakpoints,
                                       const QuadratureOptions& o = {}) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  detail::PanelEvaluator<std::remove_reference_t<F>> ev(f, 0.0);
  std::vector<detail::Panel> panels;
  panels.reserve(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    panels.push_back(ev.evaluate(breakpoints[i], breakpoints[i + 1], false));
  }
  return detail::refine(ev, std::move(panels), o);
}

/// Adaptive integral over a finite interval. `rate` gives the local angular
/// frequency of the integrand's oscillation (rad per unit x).
template <class F, class Rate>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& o, Rate&& rate) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, o, rate);
    r.value = -r.value;
    return r;
  }
  const double width = o.max_panel_width > 0.0 ? o.max_panel_width : (b - a) / 8.0;
  return integrate_partitioned(f, oscillation_partition(a, b, rate, width, o.max_evaluations / 30), o);
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& o = {}) {
  return integrate(std::forward<F>(f), a, b, o, [](double) { return 0.0; });
}

struct SemiInfiniteOptions : QuadratureOptions {
  /// Split point: [0, split] gets the oscillation-aware partition, the tail
  /// [split, inf) is mapped onto [0, 1). Choose where the integrand's envelope
  /// has decayed to negligible size.
  double split = 10.0;
};

/// Integral of f over [0, inf). f must decay beyond `split` (Gaussian or
/// exponential envelope).
template <class F, class Rate>
QuadratureResult integrate_semi_infinite(F&& f, const SemiInfiniteOptions& o, Rate&& rate) {
  if (!(o.split > 0.0)) throw std::invalid_argument("integrate_semi_infinite: split must be > 0");
  detail::PanelEvaluator<std::remove_reference_t<F>> ev(f, o.split);
  const double width = o.max_panel_width > 0.0 ? o.max_panel_width : o.split / 8.0;
  const auto points = oscillation_partition(0.0, o.split, rate, width, o.max_evaluations / 30);
  std::vector<detail::Panel> panels;
  panels.reserve(points.size() + 4);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    panels.push_back(ev.evaluate(points[i], points[i + 1], false));
  }
  // u in [0, 1) maps to x = split + u/(1-u).
  const std::array<double, 5> tail = {0.0, 0.5, 0.75, 0.9, 1.0};
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
    panels.push_back(ev.evaluate(tail[i], tail[i + 1], true));
  }
  return detail::refine(ev, std::move(panels), o);
}

template <class F>
QuadratureResult integrate_semi_infinite(F&& f, const SemiInfiniteOptions& o = {}) {
  return integrate_semi_infinite(std::forward<F>(f), o, [](double) { return 0.0; });
}

}  // namespace becprobe::numeric
