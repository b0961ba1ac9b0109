#include "ibfsi/transforms.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ibfsi {

using Cplx = std::complex<Real>;

// The three bases are handled through one scheme: extend the data
// symmetrically to length 2N, take a real FFT, and read the sine/cosine sums
// off twiddled spectral entries. Synthesis evaluates sum_k c_k e_k(j) through
// a zero-padded inverse FFT. N = len for the cell-centered kinds, len+1 for
// dst1 (pinned boundary faces are not stored).
TrigTransform::TrigTransform(TrigKind kind, int len) : kind_(kind), len_(len) {
  if (len < 1) throw std::invalid_argument("transform length must be positive");
  if (kind == TrigKind::dft) {
    ext_ = len;
    rbuf_.resize(ext_);
    cbuf_.resize(ext_);
    wbuf_.resize(ext_);
    return;
  }
  const int N = kind == TrigKind::dst1 ? len + 1 : len;
  ext_        = 2 * N;
  rbuf_.resize(ext_);
  cbuf_.resize(ext_);
  wbuf_.resize(ext_);
  tw_fwd_.resize(len);
  tw_inv_.resize(len);
  inv_norm_.resize(len);
  const Cplx I(0, 1);
  for (int k = 0; k < len; ++k) {
    switch (kind_) {
    case TrigKind::dct2:
      tw_fwd_[k]   = Real(0.5) * std::exp(-I * (M_PI * k / ext_));
      tw_inv_[k]   = std::exp(I * (M_PI * k / ext_));
      inv_norm_[k] = k == 0 ? Real(1) / N : Real(2) / N;
      break;
    case TrigKind::dst2: {
      const int f  = k + 1;
      tw_fwd_[k]   = Real(0.5) * I * std::exp(-I * (M_PI * f / ext_));
      tw_inv_[k]   = std::exp(I * (M_PI * f / ext_));
      inv_norm_[k] = f == N ? Real(1) / N : Real(2) / N;
      break;
    }
    case TrigKind::dst1: {
      const int f  = k + 1;
      tw_fwd_[k]   = Real(0.5) * I;
      tw_inv_[k]   = std::exp(I * (M_PI * f / N));
      inv_norm_[k] = Real(2) / N;
      break;
    }
    case TrigKind::dft: break; // handled above
    }
  }
}

Real TrigTransform::theta(int k) const {
  if (kind_ == TrigKind::dft) return 2 * M_PI * ((k + 1) / 2) / len_;
  const int N = kind_ == TrigKind::dst1 ? len_ + 1 : len_;
  const int f = kind_ == TrigKind::dct2 ? k : k + 1;
  return M_PI * f / N;
}

Real TrigTransform::basis(int k, int j) const {
  if (kind_ == TrigKind::dft) {
    const Real ph = 2 * M_PI * ((k + 1) / 2) * j / len_;
    return k == 0 ? Real(1) : (k % 2 ? std::cos(ph) : std::sin(ph));
  }
  const int N = kind_ == TrigKind::dst1 ? len_ + 1 : len_;
  switch (kind_) {
  case TrigKind::dct2: return std::cos(M_PI * k * (j + 0.5) / N);
  case TrigKind::dst2: return std::sin(M_PI * (k + 1) * (j + 0.5) / N);
  default:             return std::sin(M_PI * (k + 1) * (j + 1) / N);
  }
}

void TrigTransform::analyze(const MatX& values, MatX& coeffs) const {
  const int nl = static_cast<int>(values.rows());
  coeffs.resize(nl, len_);
  if (kind_ == TrigKind::dft) {
    const int n = len_;
    for (int l = 0; l < nl; ++l) {
      for (int j = 0; j < n; ++j) wbuf_[j] = values(l, j);
      fft_.fwd(cbuf_.data(), wbuf_.data(), n);
      coeffs(l, 0) = cbuf_[0].real() / n;
      for (int m = 1; m < n; ++m) {
        const int k = (m + 1) / 2;
        if (m % 2)
          coeffs(l, m) = (2 * k == n ? cbuf_[k].real() : 2 * cbuf_[k].real()) / n;
        else
          coeffs(l, m) = -2 * cbuf_[k].imag() / n;
      }
    }
    return;
  }
  for (int l = 0; l < nl; ++l) {
    rbuf_.setZero();
    if (kind_ == TrigKind::dct2) {
      for (int j = 0; j < len_; ++j) {
        rbuf_[j]            = values(l, j);
        rbuf_[ext_ - 1 - j] = values(l, j);
      }
    } else if (kind_ == TrigKind::dst2) {
      for (int j = 0; j < len_; ++j) {
        rbuf_[j]            = values(l, j);
        rbuf_[ext_ - 1 - j] = -values(l, j);
      }
    } else {
      for (int j = 0; j < len_; ++j) {
        rbuf_[j + 1]        = values(l, j);
        rbuf_[ext_ - 1 - j] = -values(l, j);
      }
    }
    fft_.fwd(cbuf_.data(), rbuf_.data(), ext_);
    for (int k = 0; k < len_; ++k) {
      const int f  = kind_ == TrigKind::dct2 ? k : k + 1;
      coeffs(l, k) = (tw_fwd_[k] * cbuf_[f]).real() * inv_norm_[k];
    }
  }
}

void TrigTransform::synthesize(const MatX& coeffs, MatX& values) const {
  const int nl = static_cast<int>(coeffs.rows());
  values.resize(nl, len_);
  if (kind_ == TrigKind::dft) {
    const int n = len_;
    for (int l = 0; l < nl; ++l) {
      wbuf_.setZero();
      wbuf_[0] = Real(n) * coeffs(l, 0);
      for (int m = 1; m < n; ++m) {
        const int k = (m + 1) / 2;
        if (m % 2) {
          if (2 * k == n)
            wbuf_[k] += Real(n) * coeffs(l, m);
          else {
            wbuf_[k] += Cplx(Real(0.5) * n * coeffs(l, m), 0);
            wbuf_[n - k] += Cplx(Real(0.5) * n * coeffs(l, m), 0);
          }
        } else {
          wbuf_[k] += Cplx(0, -Real(0.5) * n * coeffs(l, m));
          wbuf_[n - k] += Cplx(0, Real(0.5) * n * coeffs(l, m));
        }
      }
      fft_.inv(cbuf_.data(), wbuf_.data(), n);
      for (int j = 0; j < n; ++j) values(l, j) = cbuf_[j].real();
    }
    return;
  }
  const bool want_imag = kind_ != TrigKind::dct2;
  const int  off       = kind_ == TrigKind::dct2 ? 0 : 1;
  for (int l = 0; l < nl; ++l) {
    wbuf_.setZero();
    for (int k = 0; k < len_; ++k) wbuf_[k + off] = coeffs(l, k) * tw_inv_[k];
    fft_.inv(cbuf_.data(), wbuf_.data(), ext_);
    for (int j = 0; j < len_; ++j) {
      const Cplx v = cbuf_[j] * Real(ext_);
      values(l, j) = want_imag ? v.imag() : v.real();
    }
  }
}

Fft2::Fft2(int n1, int n2) : n1_(n1), n2_(n2) {
  row_in_.resize(n2);
  row_out_.resize(n2);
}

void Fft2::forward(const VecX& data, Eigen::MatrixXcd& spec) const {
  spec.resize(n1_, n2_);
  for (int j = 0; j < n2_; ++j)
    fft_.fwd(spec.col(j).data(), data.data() + static_cast<std::ptrdiff_t>(j) * n1_,
             n1_);
  for (int i = 0; i < n1_; ++i) {
    for (int j = 0; j < n2_; ++j) row_in_[j] = spec(i, j);
    fft_.fwd(row_out_.data(), row_in_.data(), n2_);
    for (int j = 0; j < n2_; ++j) spec(i, j) = row_out_[j];
  }
}

void Fft2::inverse(const Eigen::MatrixXcd& spec, VecX& data) const {
  Eigen::MatrixXcd work = spec;
  for (int i = 0; i < n1_; ++i) {
    for (int j = 0; j < n2_; ++j) row_in_[j] = work(i, j);
    fft_.inv(row_out_.data(), row_in_.data(), n2_);
    for (int j = 0; j < n2_; ++j) work(i, j) = row_out_[j];
  }
  data.resize(static_cast<std::ptrdiff_t>(n1_) * n2_);
  Eigen::VectorXcd col(n1_);
  for (int j = 0; j < n2_; ++j) {
    fft_.inv(col.data(), work.col(j).data(), n1_);
    for (int i = 0; i < n1_; ++i) data[static_cast<std::ptrdiff_t>(j) * n1_ + i] = col[i].real();
  }
}

BandedLU::BandedLU(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
  ab_ = MatX::Zero(2 * kl + ku + 1, n);
  piv_.resize(n);
}

Real& BandedLU::operator()(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || i - j > kl_ || j - i > ku_)
    throw std::out_of_range("entry outside the declared band");
  return ab_(kl_ + ku_ + i - j, j);
}

void BandedLU::factor() {
  // Gaussian elimination with row pivoting confined to the band; the upper
  // bandwidth grows to kl+ku from row interchanges.
  const int kw = kl_ + ku_; // effective upper bandwidth after pivoting
  for (int j = 0; j < n_; ++j) {
    int  p    = j;
    Real pmax = std::abs(ab_(kl_ + ku_, j));
    for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i) {
      const Real v = std::abs(ab_(kl_ + ku_ + i - j, j));
      if (v > pmax) { pmax = v; p = i; }
    }
    if (!(pmax > 0)) throw std::runtime_error("banded matrix is singular");
    piv_[j] = p;
    if (p != j) {
      for (int c = j; c <= std::min(n_ - 1, j + kw); ++c)
        std::swap(ab_(kl_ + ku_ + j - c, c), ab_(kl_ + ku_ + p - c, c));
    }
    const Real d = ab_(kl_ + ku_, j);
    for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i) {
      const Real m             = ab_(kl_ + ku_ + i - j, j) / d;
      ab_(kl_ + ku_ + i - j, j) = m;
      for (int c = j + 1; c <= std::min(n_ - 1, j + kw); ++c)
        ab_(kl_ + ku_ + i - c, c) -= m * ab_(kl_ + ku_ + j - c, c);
    }
  }
  factored_ = true;
}

void BandedLU::solve(Eigen::Ref<VecX> x) const {
  if (!factored_) throw std::logic_error("solve before factor");
  const int kw = kl_ + ku_;
  for (int j = 0; j < n_; ++j) {
    if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
    const Real xj = x[j];
    for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i)
      x[i] -= ab_(kl_ + ku_ + i - j, j) * xj;
  }
  for (int j = n_ - 1; j >= 0; --j) {
    Real s = x[j];
    for (int c = j + 1; c <= std::min(n_ - 1, j + kw); ++c)
      s -= ab_(kl_ + ku_ + j - c, c) * x[c];
    x[j] = s / ab_(kl_ + ku_, j);
  }
}

} // namespace ibfsi
