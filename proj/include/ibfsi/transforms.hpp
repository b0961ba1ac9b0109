// Fast-transform building blocks for the saddle solvers: orthogonal
// trigonometric bases that diagonalize the 1D second difference under the
// grid's ghost closures, a 2D complex FFT for fully periodic grids, and a
// small banded LU for the per-mode direct solves.
#pragma once

#include "ibfsi/types.hpp"

#include <unsupported/Eigen/FFT>

namespace ibfsi {

// Basis family along one axis. e_k diagonalizes the second difference
// (e(j-1) - 2 e(j) + e(j+1)) with eigenvalue 2 cos(theta_k) - 2 under the
// matching closure:
//   dct2: cell-centered entries, even-mirror ghost (homogeneous Neumann)
//   dst2: cell-centered entries, odd-mirror ghost (homogeneous Dirichlet)
//   dst1: face entries with both boundary faces pinned to zero (the len
//         unknowns are the interior faces of len+1 cells)
//   dft:  periodic wrap; real basis 1, cos(2 pi k j/N), sin(2 pi k j/N)
//         ordered by wavenumber (cos before sin), eigenvalue per entry
enum class TrigKind { dct2, dst2, dst1, dft };

class TrigTransform {
public:
  TrigTransform(TrigKind kind, int len);

  int      len() const { return len_; }
  int      modes() const { return len_; } // one mode per entry for all kinds
  TrigKind kind() const { return kind_; }
  Real     theta(int k) const;
  // basis entry e_k(j), j = 0..len-1 indexes the stored entries
  Real basis(int k, int j) const;

  // values(l, j) = sum_k coeffs(l, k) basis(k, j); one transform per row l.
  void analyze(const MatX& values, MatX& coeffs) const;
  void synthesize(const MatX& coeffs, MatX& values) const;

private:
  TrigKind kind_;
  int      len_;
  int      ext_; // FFT length of the symmetric extension
  mutable Eigen::FFT<Real> fft_;
  mutable VecX             rbuf_;        // real extension buffer
  mutable Eigen::VectorXcd cbuf_, wbuf_; // spectral buffers
  Eigen::VectorXcd         tw_fwd_, tw_inv_;
  VecX                     inv_norm_;
};

// Unnormalized-forward / scaled-inverse 2D DFT of row-major real fields,
// spectrum S(k1, k2).
class Fft2 {
public:
  Fft2(int n1, int n2);
  void forward(const VecX& data, Eigen::MatrixXcd& spec) const;
  void inverse(const Eigen::MatrixXcd& spec, VecX& data) const;

private:
  int                      n1_, n2_;
  mutable Eigen::FFT<Real> fft_;
  mutable Eigen::VectorXcd row_in_, row_out_;
};

// Banded LU with partial pivoting, LAPACK-style storage with kl extra rows
// for pivoting fill. Matrix entries are set through operator() before
// factor(); out-of-band writes throw.
class BandedLU {
public:
  BandedLU(int n, int kl, int ku);

  Real& operator()(int i, int j);
  void  factor(); // throws std::runtime_error on numerical singularity
  void  solve(Eigen::Ref<VecX> x) const;
  int   size() const { return n_; }

private:
  int             n_, kl_, ku_;
  MatX            ab_; // (2kl+ku+1) x n, A(i,j) at ab_(kl+ku+i-j, j)
  Eigen::VectorXi piv_;
  bool            factored_ = false;
};

} // namespace ibfsi
