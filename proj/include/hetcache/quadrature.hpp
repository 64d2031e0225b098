#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace hetcache {

/// Integrand sample with an auxiliary channel integrated on the same nodes
/// but excluded from error control (used to carry propagated error bounds).
struct QuadratureSample {
  double value = 0.0;
  double aux = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  /// Integral of the auxiliary channel.
  double aux = 0.0;
  /// Integral of |f|, used to scale propagated relative errors.
  double abs_value = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  QuadratureResult& operator+=(const QuadratureResult& o) noexcept {
    value += o.value;
    error += o.error;
    aux += o.aux;
    abs_value += o.abs_value;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// 15-point Kronrod abscissae (non-negative half) with the embedded 7-point
// Gauss rule on the odd positions.
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error, abs_value, aux;
};

template <class F>
QuadratureSample sample(F& f, double x) {
  if constexpr (std::is_same_v<std::decay_t<decltype(f(x))>, QuadratureSample>)
    return f(x);
  else
    return {static_cast<double>(f(x)), 0.0};
}

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const QuadratureSample sc = sample(f, c);
  const double fc = sc.value;
  double kron = fc * kKronrodW[7];
  double gauss = fc * kGaussW[3];
  double abs_kron = std::abs(fc) * kKronrodW[7];
  double aux = sc.aux * kKronrodW[7];
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodX[j];
    const QuadratureSample s1 = sample(f, c - dx);
    const QuadratureSample s2 = sample(f, c + dx);
    f1[j] = s1.value;
    f2[j] = s2.value;
    aux += kKronrodW[j] * (s1.aux + s2.aux);
    kron += kKronrodW[j] * (f1[j] + f2[j]);
    abs_kron += kKronrodW[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussW[j / 2] * (f1[j] + f2[j]);
  }
  // QUADPACK error heuristic.
  const double mean = 0.5 * kron;
  double asc = kKronrodW[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodW[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  asc *= std::abs(h);
  double err = std::abs((kron - gauss) * h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double resabs = abs_kron * std::abs(h);
  constexpr double kEps = 2.220446049250313e-16;
  if (resabs > 5.0e-292) err = std::max(err, 50.0 * kEps * resabs);
  return {a, b, kron * h, err, resabs, aux * h};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Bisects the segment with the largest error until
/// error <= max(abs_tol, rel_tol |value|) or the subdivision budget runs out.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol,
                                    int max_subdivisions = 400) {
  QuadratureResult out;
  if (a == b) return out;
  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(max_subdivisions) + 1);
  auto by_error = [](const detail::Segment& x, const detail::Segment& y) {
    return x.error < y.error;
  };
  heap.push_back(detail::gk15(f, a, b));
  out.evaluations = 15;
  double value = heap.front().value;
  double error = heap.front().error;
  int splits = 0;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (splits >= max_subdivisions) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Segment left = detail::gk15(f, worst.a, mid);
    const detail::Segment right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++splits;
  }
  // Re-sum to shed drift from the incremental updates.
  value = 0.0;
  error = 0.0;
  double abs_value = 0.0;
  double aux = 0.0;
  for (const auto& s : heap) {
    value += s.value;
    error += s.error;
    abs_value += s.abs_value;
    aux += s.aux;
  }
  out.value = value;
  out.error = error;
  out.abs_value = abs_value;
  out.aux = aux;
  return out;
}

}  // namespace hetcache
