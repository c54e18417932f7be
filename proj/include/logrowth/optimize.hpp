#pragma once

/// \file
/// One-dimensional search: golden-section maximization, grid multi-start
/// and bisection for monotone functions. Templated on the number type so
/// the same code runs in double or Real.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "logrowth/numeric.hpp"

namespace logrowth {

template <class T>
struct Extremum {
  T arg;
  T value;
};

/// Golden-section search for a maximum of f on [lo, hi]; exact for
/// unimodal f, a local maximum otherwise. Endpoints are compared too.
template <class T, class F>
Extremum<T> golden_section_max(F&& f, T lo, T hi, int iterations = 170) {
  using std::sqrt;
  const T inv_phi = (sqrt(T(5)) - T(1)) / T(2);
  T a = lo, b = hi;
  T c = b - inv_phi * (b - a);
  T d = a + inv_phi * (b - a);
  T fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && c < d; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  Extremum<T> best = fc >= fd ? Extremum<T>{c, fc} : Extremum<T>{d, fd};
  for (const T& end : {lo, hi}) {
    T v = f(end);
    if (v > best.value) best = {end, v};
  }
  return best;
}

/// Indices of the `count` largest local maxima of a sampled sequence,
/// cyclic when `periodic` (the neighbor of the last sample is the first).
inline std::vector<std::size_t> top_local_maxima(const std::vector<double>& values, std::size_t count,
                                                 bool periodic) {
  std::size_t n = values.size();
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_left = periodic || i > 0;
    bool has_right = periodic || i + 1 < n;
    double left = has_left ? values[(i + n - 1) % n] : -INFINITY;
    double right = has_right ? values[(i + 1) % n] : -INFINITY;
    if (values[i] >= left && values[i] >= right) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (peaks.size() > count) peaks.resize(count);
  if (peaks.empty() && n > 0) {
    peaks.push_back(static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin()));
  }
  return peaks;
}

/// Root of an increasing function on [lo, hi] (f(lo) < 0 < f(hi)).
template <class T, class F>
T bisect_increasing(F&& f, T lo, T hi, int iterations) {
  for (int i = 0; i < iterations; ++i) {
    T mid = (lo + hi) / T(2);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < T(0)) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / T(2);
}

}  // namespace logrowth
