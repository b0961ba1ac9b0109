#include "doctest.h"
#include "ibfsi/transforms.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace ibfsi;

namespace {

MatX random_rows(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MatX m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

// Dense 1D second-difference operator with the closure each basis encodes.
MatX closure_operator(TrigKind kind, int len) {
  MatX A = MatX::Zero(len, len);
  for (int j = 0; j < len; ++j) {
    A(j, j) = -2;
    if (j > 0) A(j, j - 1) = 1;
    if (j < len - 1) A(j, j + 1) = 1;
  }
  if (kind == TrigKind::dct2) {
    A(0, 0) += 1; // ghost = u_0
    A(len - 1, len - 1) += 1;
  } else if (kind == TrigKind::dst2) {
    A(0, 0) -= 1; // ghost = -u_0
    A(len - 1, len - 1) -= 1;
  } else if (kind == TrigKind::dft) {
    A(0, len - 1) += 1; // periodic wrap
    A(len - 1, 0) += 1;
  }
  // dst1: pinned zero beyond both ends, nothing to add
  return A;
}

} // namespace

TEST_CASE("trig transforms match the direct sums and round trip") {
  for (TrigKind kind : {TrigKind::dct2, TrigKind::dst2, TrigKind::dst1, TrigKind::dft}) {
    for (int len : {5, 8, 12, 17}) {
      TrigTransform t(kind, len);
      MatX x = random_rows(3, len, 100 + len);
      MatX c, back;
      t.analyze(x, c);

      // brute-force analysis: solve the least-squares system via the basis
      MatX E(len, len);
      for (int k = 0; k < len; ++k)
        for (int j = 0; j < len; ++j) E(j, k) = t.basis(k, j);
      for (int l = 0; l < 3; ++l) {
        VecX ref = E.fullPivLu().solve(x.row(l).transpose());
        for (int k = 0; k < len; ++k)
          CHECK(c(l, k) == doctest::Approx(ref[k]).epsilon(1e-10));
      }

      t.synthesize(c, back);
      CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("bases diagonalize the closured second difference") {
  for (TrigKind kind : {TrigKind::dct2, TrigKind::dst2, TrigKind::dst1, TrigKind::dft}) {
    const int     len = 9;
    TrigTransform t(kind, len);
    MatX          A = closure_operator(kind, len);
    for (int k = 0; k < t.modes(); ++k) {
      VecX e(len);
      for (int j = 0; j < len; ++j) e[j] = t.basis(k, j);
      VecX       Ae     = A * e;
      const Real lambda = 2 * std::cos(t.theta(k)) - 2;
      CHECK((Ae - lambda * e).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("2D FFT round trip and single-mode spectrum") {
  const int n1 = 12, n2 = 8;
  Fft2      fft(n1, n2);
  VecX      data(n1 * n2);
  std::mt19937 rng(4u);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& v : data) v = d(rng);

  Eigen::MatrixXcd S;
  fft.forward(data, S);
  VecX back;
  fft.inverse(S, back);
  CHECK((back - data).cwiseAbs().maxCoeff() < 1e-12);

  // pure cosine mode lands on the conjugate pair (2,3) and (n1-2, n2-3)
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      data[j * n1 + i] =
          std::cos(2 * M_PI * (2.0 * i / n1 + 3.0 * j / n2));
  fft.forward(data, S);
  CHECK(std::abs(S(2, 3) - std::complex<double>(n1 * n2 / 2.0, 0)) < 1e-9);
  CHECK(std::abs(S(n1 - 2, n2 - 3) - std::complex<double>(n1 * n2 / 2.0, 0)) < 1e-9);
  S(2, 3) = S(n1 - 2, n2 - 3) = 0;
  CHECK(S.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("banded LU agrees with dense LU and pivots through zero diagonals") {
  std::mt19937 rng(21u);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int n = 40, kl = 3, ku = 2;

  MatX     A = MatX::Zero(n, n);
  BandedLU lu(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
      const Real v = d(rng) + (i == j ? 0.0 : 0.0);
      A(i, j)      = v;
      lu(i, j)     = v;
    }
  // saddle-like zero diagonal entries force pivoting
  for (int i = 10; i < 14; ++i) {
    A(i, i) = 0;
    lu(i, i) = 0;
  }
  lu.factor();
  VecX b(n);
  for (auto& v : b) v = d(rng);
  VecX x = b;
  lu.solve(x);
  VecX ref = A.fullPivLu().solve(b);
  CHECK((x - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff() + 1e-12);

  CHECK_THROWS(lu(0, ku + 1)); // outside the band

  BandedLU sing(4, 1, 1);
  sing(0, 0) = 1;
  CHECK_THROWS(sing.factor());
}
