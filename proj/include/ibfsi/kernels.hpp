// Regularized delta-function kernels for Eulerian/Lagrangian coupling.
//
// Three one-dimensional kernels phi(r), combined as tensor products
//   delta_h(x) = phi(x1/h) phi(x2/h) / h^2.
// All satisfy sum_i phi(s - i) = 1 (partition of unity) and
// sum_i (s - i) phi(s - i) = 0 (zero first moment) for every real s,
// and are even and continuous.
#pragma once

#include <array>
#include <cmath>
#include <string_view>

namespace ibfsi {

enum class KernelKind {
  ib2, // 2-point hat, support |r| <= 1
  ib3, // 3-point smoothed kernel, support |r| <= 1.5
  ib4, // 4-point kernel, support |r| <= 2
};

// Throws std::invalid_argument for anything but "ib2"/"ib3"/"ib4".
KernelKind kernel_from_name(std::string_view name);
const char* kernel_name(KernelKind kind);

constexpr int kernel_width(KernelKind kind) {
  switch (kind) {
  case KernelKind::ib2: return 2;
  case KernelKind::ib3: return 3;
  default:              return 4;
  }
}

constexpr double kernel_radius(KernelKind kind) {
  switch (kind) {
  case KernelKind::ib2: return 1.0;
  case KernelKind::ib3: return 1.5;
  default:              return 2.0;
  }
}

namespace detail {
// sqrt argument guards: smooth branches can dip a few ulp below zero at the
// breakpoints.
template <class T> inline T safe_sqrt(T v) { return std::sqrt(v < T(0) ? T(0) : v); }
} // namespace detail

template <class T> inline T kernel_phi2(T r) {
  r = std::abs(r);
  return r < T(1) ? T(1) - r : T(0);
}

template <class T> inline T kernel_phi3(T r) {
  r = std::abs(r);
  if (r <= T(0.5))
    return (T(1) + detail::safe_sqrt(T(1) - T(3) * r * r)) / T(3);
  if (r <= T(1.5)) {
    const T q = T(1) - r;
    return (T(5) - T(3) * r - detail::safe_sqrt(T(1) - T(3) * q * q)) / T(6);
  }
  return T(0);
}

template <class T> inline T kernel_phi4(T r) {
  r = std::abs(r);
  if (r <= T(1))
    return (T(3) - T(2) * r + detail::safe_sqrt(T(1) + T(4) * r - T(4) * r * r)) / T(8);
  if (r <= T(2))
    return (T(5) - T(2) * r - detail::safe_sqrt(T(-7) + T(12) * r - T(4) * r * r)) / T(8);
  return T(0);
}

template <class T> inline T kernel_phi(KernelKind kind, T r) {
  switch (kind) {
  case KernelKind::ib2: return kernel_phi2(r);
  case KernelKind::ib3: return kernel_phi3(r);
  default:              return kernel_phi4(r);
  }
}

template <class T> inline T kernel_delta2(KernelKind kind, T dx1, T dx2, T h) {
  return kernel_phi(kind, dx1 / h) * kernel_phi(kind, dx2 / h) / (h * h);
}

// One-dimensional kernel stencil centered at fractional grid index s on an
// axis holding entries 0..n-1.  Indices in [start, start+count) are unwrapped:
// on periodic axes the caller wraps them modulo n; on non-periodic axes
// out-of-range entries have been clipped away and the surviving weights
// renormalized to unit sum (near-boundary substitute for shifted kernels).
struct Stencil1D {
  int start = 0;
  int count = 0;
  std::array<double, 4> w{};

  double sum() const {
    double s = 0;
    for (int j = 0; j < count; ++j) s += w[j];
    return s;
  }
};

Stencil1D kernel_stencil(KernelKind kind, double s, int n, bool periodic);

} // namespace ibfsi
