#include "relmetro/gaussian.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/fpclassify.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace relmetro {

template <class T>
BasicGaussianState<T>::BasicGaussianState(Matrix<T> covariance)
    : BasicGaussianState(covariance, Vector<T>::Zero(covariance.rows())) {}

template <class T>
BasicGaussianState<T>::BasicGaussianState(Matrix<T> covariance, Vector<T> moments)
    : first_moments(std::move(moments)), cov(std::move(covariance)) {
  if (cov.rows() != cov.cols() || cov.rows() == 0 || cov.rows() % 2 != 0)
    throw InvalidState(fmt::format("covariance must be square with even dimension, got {}x{}", cov.rows(),
                                   cov.cols()));
  if (first_moments.size() != cov.rows())
    throw InvalidState(fmt::format("first moments have length {}, expected {}", first_moments.size(), cov.rows()));
  num_modes = static_cast<int>(cov.rows() / 2);
}

template <class T>
BasicGaussianState<T> BasicGaussianState<T>::vacuum(int modes) {
  if (modes < 1) throw InvalidState("vacuum needs at least one mode");
  return BasicGaussianState(Matrix<T>::Identity(2 * modes, 2 * modes));
}

template <class T>
bool BasicGaussianState<T>::has_zero_moments() const {
  for (Eigen::Index i = 0; i < first_moments.size(); ++i)
    if (first_moments(i) != T(0)) return false;
  return true;
}

template <class T>
Matrix<T> symplectic_form(int num_modes) {
  if (num_modes < 1) throw InvalidState("symplectic form needs at least one mode");
  Matrix<T> om = Matrix<T>::Zero(2 * num_modes, 2 * num_modes);
  for (int i = 0; i < num_modes; ++i) {
    om(2 * i, 2 * i + 1) = T(1);
    om(2 * i + 1, 2 * i) = T(-1);
  }
  return om;
}

template <class T>
BasicGaussianState<T> initial_product_squeezed(double r_k, double r_kprime) {
  if (!std::isfinite(r_k) || !std::isfinite(r_kprime)) throw InvalidState("squeezing parameters must be finite");
  using std::exp;
  const T rk(r_k), rkp(r_kprime);
  Matrix<T> cov = Matrix<T>::Zero(4, 4);
  cov(0, 0) = exp(2 * rk);
  cov(1, 1) = exp(-2 * rk);
  cov(2, 2) = exp(2 * rkp);
  cov(3, 3) = exp(-2 * rkp);
  return BasicGaussianState<T>(cov);
}

template <class T>
BasicGaussianState<T> partial_trace(const BasicGaussianState<T>& state, const std::vector<int>& keep_modes) {
  if (keep_modes.empty()) throw ModeOutOfRange("partial trace needs at least one mode to keep");
  std::set<int> seen;
  for (int m : keep_modes) {
    if (m < 1 || m > state.num_modes)
      throw ModeOutOfRange(fmt::format("mode {} outside 1..{}", m, state.num_modes));
    if (!seen.insert(m).second) throw ModeOutOfRange(fmt::format("mode {} listed twice", m));
  }
  const auto n = static_cast<Eigen::Index>(2 * keep_modes.size());
  Matrix<T> cov(n, n);
  Vector<T> d(n);
  for (std::size_t a = 0; a < keep_modes.size(); ++a) {
    const int ia = 2 * (keep_modes[a] - 1);
    d(2 * a) = state.first_moments(ia);
    d(2 * a + 1) = state.first_moments(ia + 1);
    for (std::size_t b = 0; b < keep_modes.size(); ++b) {
      const int ib = 2 * (keep_modes[b] - 1);
      cov.template block<2, 2>(2 * a, 2 * b) = state.cov.template block<2, 2>(ia, ib);
    }
  }
  return BasicGaussianState<T>(cov, d);
}

template <class T>
Matrix<T> balanced_covariance(const Matrix<T>& cov) {
  using std::sqrt;
  const Eigen::Index modes = cov.rows() / 2;
  Matrix<T> b = Matrix<T>::Zero(cov.rows(), cov.cols());
  for (Eigen::Index j = 0; j < modes; ++j) {
    Eigen::Matrix<T, 2, 2> a = cov.template block<2, 2>(2 * j, 2 * j);
    a(0, 1) = a(1, 0) = (a(0, 1) + a(1, 0)) / 2;
    const T det = a.determinant();
    const T tr = a.trace();
    if (!(det > 0) || !(tr > 0)) {
      // Not positive definite; leave the block alone so the caller sees the violation.
      b.template block<2, 2>(2 * j, 2 * j).setIdentity();
      continue;
    }
    const T sdet = sqrt(det);
    // sqrt of a 2x2 SPD matrix: (A + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
    Eigen::Matrix<T, 2, 2> root = a;
    root(0, 0) += sdet;
    root(1, 1) += sdet;
    root /= sqrt(tr + 2 * sdet);
    b.template block<2, 2>(2 * j, 2 * j) = sqrt(sdet) * root.inverse();
  }
  return b * cov * b.transpose();
}

template <class T>
T purity(const BasicGaussianState<T>& state) {
  using std::sqrt;
  const Matrix<T> bal = balanced_covariance(state.cov);
  const T det = bal.partialPivLu().determinant();
  if (!(det > 0)) throw InvalidState(fmt::format("covariance determinant {} is not positive", to_double(det)));
  return T(1) / sqrt(det);
}

template <class T>
PhysicalityReport check_physical(const BasicGaussianState<T>& state, const NumericPolicy& policy) {
  using std::abs;
  PhysicalityReport rep;
  const Matrix<T>& c = state.cov;
  T asym(0);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) asym = std::max<T>(asym, abs(c(i, j) - c(j, i)));
  rep.symmetry_violation = to_double(asym);
  if (!(rep.symmetry_violation <= policy.symmetry_tol)) {
    rep.physical = false;
    rep.violations.push_back(fmt::format("symmetry: max |cov - cov^T| = {:.3e}", rep.symmetry_violation));
  }

  Matrix<T> sym = (c + c.transpose()) / 2;
  bool nonfinite = false;
  for (Eigen::Index i = 0; i < sym.size(); ++i) nonfinite = nonfinite || !boost::math::isfinite(sym(i));
  if (nonfinite) {
    rep.physical = false;
    rep.min_uncertainty_eigenvalue = -std::numeric_limits<double>::infinity();
    rep.violations.push_back("covariance has non-finite entries");
    return rep;
  }

  // Eigenvalues of the Hermitian cov + iΩ via the real embedding [[σ, -Ω], [Ω, σ]].
  const Matrix<T> bal = balanced_covariance(sym);
  const Matrix<T> om = symplectic_form<T>(state.num_modes);
  const Eigen::Index n = bal.rows();
  Matrix<T> emb(2 * n, 2 * n);
  emb.topLeftCorner(n, n) = bal;
  emb.topRightCorner(n, n) = -om;
  emb.bottomLeftCorner(n, n) = om;
  emb.bottomRightCorner(n, n) = bal;
  Eigen::SelfAdjointEigenSolver<Matrix<T>> es(emb, Eigen::EigenvaluesOnly);
  rep.min_uncertainty_eigenvalue = to_double(es.eigenvalues().minCoeff());
  if (!(rep.min_uncertainty_eigenvalue >= -policy.uncertainty_tol)) {
    rep.physical = false;
    rep.violations.push_back(
        fmt::format("uncertainty: smallest eigenvalue of cov + iΩ is {:.3e}", rep.min_uncertainty_eigenvalue));
  }
  return rep;
}

#define RELMETRO_INSTANTIATE_GAUSSIAN(T)                                                                  \
  template struct BasicGaussianState<T>;                                                                   \
  template Matrix<T> symplectic_form<T>(int);                                                              \
  template BasicGaussianState<T> initial_product_squeezed<T>(double, double);                              \
  template BasicGaussianState<T> partial_trace<T>(const BasicGaussianState<T>&, const std::vector<int>&);  \
  template Matrix<T> balanced_covariance<T>(const Matrix<T>&);                                             \
  template T purity<T>(const BasicGaussianState<T>&);                                                      \
  template PhysicalityReport check_physical<T>(const BasicGaussianState<T>&, const NumericPolicy&);

RELMETRO_INSTANTIATE_GAUSSIAN(double)
RELMETRO_INSTANTIATE_GAUSSIAN(Precise)

}  // namespace relmetro
