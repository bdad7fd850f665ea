#include "mor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace mor {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonStableMatrix: return "NonStableMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorKind::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NonStableSystem: return "NonStableSystem";
    case ErrorKind::InfiniteNorm: return "InfiniteNorm";
    case ErrorKind::NotInWeightedH2: return "NotInWeightedH2";
    case ErrorKind::NonConvergedQuadrature: return "NonConvergedQuadrature";
    case ErrorKind::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorKind::UnstableReducedModel: return "UnstableReducedModel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

namespace linalg {
namespace {

std::string shape(const char* name, Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << name << " is " << r << "x" << c;
  return os.str();
}

template <typename M>
void require_square(const M& m, const char* name) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::DimensionMismatch,
         shape(name, m.rows(), m.cols()) + ", expected square");
  }
}

template <typename M>
void require_finite(const M& m, const char* name) {
  if (!m.allFinite()) {
    fail(ErrorKind::DimensionMismatch, std::string(name) + " has non-finite entries");
  }
}

}  // namespace

double cond2(const Mat& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double max_real_part(const Mat& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Mat> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

CMat solve_sylvester(const CMat& M1, const CMat& M2, const CMat& N) {
  require_square(M1, "M1");
  require_square(M2, "M2");
  const Eigen::Index n1 = M1.rows();
  const Eigen::Index n2 = M2.rows();
  if (N.rows() != n1 || N.cols() != n2) {
    fail(ErrorKind::DimensionMismatch,
         shape("N", N.rows(), N.cols()) + ", expected " + std::to_string(n1) + "x" +
             std::to_string(n2));
  }
  if (n1 == 0 || n2 == 0) return CMat::Zero(n1, n2);

  Eigen::ComplexSchur<CMat> s1(M1), s2(M2);
  const CMat& U1 = s1.matrixU();
  const CMat& T1 = s1.matrixT();
  const CMat& U2 = s2.matrixU();
  const CMat& T2 = s2.matrixT();

  const double scale = std::max({M1.norm(), M2.norm(), 1e-300});
  const double pivot_tol = 1e-12 * scale;

  CMat F = U1.adjoint() * N * U2;
  CMat Y(n1, n2);
  CMat L(n1, n1);
  for (Eigen::Index j = 0; j < n2; ++j) {
    CVec rhs = -F.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= T2(k, j) * Y.col(k);
    L = T1.triangularView<Eigen::Upper>();
    L.diagonal().array() += T2(j, j);
    for (Eigen::Index i = 0; i < n1; ++i) {
      if (std::abs(L(i, i)) <= pivot_tol) {
        fail(ErrorKind::SingularOperator,
             "Sylvester operator is singular: spectra of M1 and -M2 intersect");
      }
    }
    Y.col(j) = L.triangularView<Eigen::Upper>().solve(rhs);
  }
  return U1 * Y * U2.adjoint();
}

Mat solve_sylvester(const Mat& M1, const Mat& M2, const Mat& N) {
  require_finite(M1, "M1");
  require_finite(M2, "M2");
  require_finite(N, "N");
  CMat X = solve_sylvester(CMat(M1.cast<cplx>()), CMat(M2.cast<cplx>()),
                           CMat(N.cast<cplx>()));
  return X.real();
}

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  require_square(A, "A");
  require_square(Q, "Q");
  if (Q.rows() != A.rows()) {
    fail(ErrorKind::DimensionMismatch,
         shape("Q", Q.rows(), Q.cols()) + " does not match " +
             shape("A", A.rows(), A.cols()));
  }
  if (A.rows() == 0) return Mat(0, 0);
  const double lmax = max_real_part(A);
  if (!(lmax < 0.0)) {
    std::ostringstream os;
    os << "A has an eigenvalue with real part " << lmax;
    fail(ErrorKind::NonStableMatrix, os.str());
  }
  Mat P = solve_sylvester(A, Mat(A.transpose()), Q);
  return 0.5 * (P + P.transpose());
}

Mat kron_oracle_sylvester(const Mat& M1, const Mat& M2, const Mat& N) {
  require_square(M1, "M1");
  require_square(M2, "M2");
  const Eigen::Index n1 = M1.rows();
  const Eigen::Index n2 = M2.rows();
  if (N.rows() != n1 || N.cols() != n2) {
    fail(ErrorKind::DimensionMismatch, shape("N", N.rows(), N.cols()));
  }
  if (n1 * n2 > 400) {
    fail(ErrorKind::SizeLimitExceeded,
         "Kronecker oracle limited to 400 unknowns, got " + std::to_string(n1 * n2));
  }
  const Eigen::Index nn = n1 * n2;
  if (nn == 0) return Mat::Zero(n1, n2);
  Mat K = Mat::Zero(nn, nn);
  // vec is column-major: vec(M1 X) = (I kron M1) vec X, vec(X M2) = (M2^T kron I) vec X
  for (Eigen::Index j = 0; j < n2; ++j) {
    K.block(j * n1, j * n1, n1, n1) += M1;
    for (Eigen::Index k = 0; k < n2; ++k) {
      K.block(j * n1, k * n1, n1, n1).diagonal().array() += M2(k, j);
    }
  }
  Eigen::FullPivLU<Mat> lu(K);
  if (lu.rcond() < 1e-14) {
    fail(ErrorKind::SingularOperator, "Kronecker system is numerically singular");
  }
  Vec rhs = -Eigen::Map<const Vec>(N.data(), nn);
  Vec x = lu.solve(rhs);
  return Eigen::Map<Mat>(x.data(), n1, n2);
}

SpectralDecomposition spectral(const Mat& A, double cond_limit) {
  require_square(A, "A");
  require_finite(A, "A");
  const Eigen::Index n = A.rows();
  SpectralDecomposition out;
  if (n == 0) {
    out.eigenvalues.resize(0);
    out.R.resize(0, 0);
    return out;
  }
  Eigen::EigenSolver<Mat> es(A, true);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::DefectiveMatrix, "eigenvalue iteration did not converge");
  }
  CVec lam = es.eigenvalues();
  CMat R = es.eigenvectors();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (lam(a).real() != lam(b).real()) return lam(a).real() < lam(b).real();
    return lam(a).imag() < lam(b).imag();
  });
  out.eigenvalues.resize(n);
  out.R.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = lam(order[k]);
    CVec r = R.col(order[k]);
    out.R.col(k) = r / r.norm();
  }

  Eigen::JacobiSVD<CMat> svd(out.R);
  const auto& s = svd.singularValues();
  const double c = s(n - 1) > 0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();
  if (!(c <= cond_limit)) {
    std::ostringstream os;
    os << "eigenvector matrix condition number " << c << " exceeds " << cond_limit;
    fail(ErrorKind::DefectiveMatrix, os.str());
  }
  return out;
}

Mat kernel_basis(const Mat& M, double rank_tol) {
  const Eigen::Index cols = M.cols();
  if (cols == 0) return Mat(0, 0);
  if (M.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double thresh =
      rank_tol * smax * static_cast<double>(std::max(M.rows(), M.cols()));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh && s(i) > 0.0) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

Mat orth(const Mat& V, double drop_tol) {
  Mat Q(V.rows(), V.cols());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Vec v = V.col(j);
    const double v0 = v.norm();
    if (v0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < k; ++i) v -= Q.col(i).dot(v) * Q.col(i);
    }
    const double nv = v.norm();
    if (nv <= drop_tol * v0) continue;
    Q.col(k++) = v / nv;
  }
  return Q.leftCols(k);
}

std::pair<Mat, Mat> biorthonormalize(const Mat& Vraw, const Mat& Wraw, double cond_limit) {
  if (Vraw.rows() != Wraw.rows() || Vraw.cols() != Wraw.cols()) {
    fail(ErrorKind::DimensionMismatch,
         shape("Vraw", Vraw.rows(), Vraw.cols()) + " vs " +
             shape("Wraw", Wraw.rows(), Wraw.cols()));
  }
  Mat Vq = orth(Vraw, 1e-13);
  Mat Wq = orth(Wraw, 1e-13);
  if (Vq.cols() != Vraw.cols() || Wq.cols() != Wraw.cols()) {
    fail(ErrorKind::RankDeficient, "projection basis is column-rank deficient");
  }
  Mat M = Wq.transpose() * Vq;
  const double c = cond2(M);
  if (!(c <= cond_limit)) {
    std::ostringstream os;
    os << "W^T V has condition number " << c;
    fail(ErrorKind::RankDeficient, os.str());
  }
  Mat Wr = M.partialPivLu().solve(Mat(Wq.transpose())).transpose();
  return {Vq, Wr};
}

}  // namespace linalg
}  // namespace mor
