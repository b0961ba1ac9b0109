#include "ibfsi/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ibfsi {

KernelKind kernel_from_name(std::string_view name) {
  if (name == "ib2") return KernelKind::ib2;
  if (name == "ib3") return KernelKind::ib3;
  if (name == "ib4") return KernelKind::ib4;
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected ib2, ib3 or ib4)");
}

const char* kernel_name(KernelKind kind) {
  switch (kind) {
  case KernelKind::ib2: return "ib2";
  case KernelKind::ib3: return "ib3";
  default:              return "ib4";
  }
}

Stencil1D kernel_stencil(KernelKind kind, double s, int n, bool periodic) {
  const int    width = kernel_width(kind);
  const double rad   = kernel_radius(kind);
  Stencil1D    st;
  st.start = static_cast<int>(std::ceil(s - rad));
  st.count = width;
  for (int j = 0; j < width; ++j)
    st.w[j] = kernel_phi(kind, s - (st.start + j));
  if (periodic) return st;

  // Clip entries outside [0, n) and renormalize the survivors.
  int    put = 0;
  double sum = 0;
  int    first = st.start;
  bool   have_first = false;
  for (int j = 0; j < width; ++j) {
    const int i = st.start + j;
    if (i < 0 || i >= n) continue;
    if (!have_first) { first = i; have_first = true; }
    st.w[put++] = st.w[j];
    sum += st.w[j];
  }
  st.start = first;
  st.count = put;
  if (put == 0 || sum <= 0)
    throw std::domain_error("kernel stencil lies entirely outside the domain");
  for (int j = 0; j < put; ++j) st.w[j] /= sum;
  return st;
}

} // namespace ibfsi
