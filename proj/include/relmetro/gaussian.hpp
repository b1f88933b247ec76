#pragma once

#include "relmetro/errors.hpp"
#include "relmetro/numeric.hpp"

#include <string>
#include <vector>

namespace relmetro {

/// Gaussian state of `num_modes` bosonic modes.
///
/// Quadratures are interleaved (x1, p1, x2, p2, ...) and the vacuum has
/// cov = identity.
template <class T>
struct BasicGaussianState {
  int num_modes = 0;
  Vector<T> first_moments;
  Matrix<T> cov;

  BasicGaussianState() = default;
  BasicGaussianState(Matrix<T> covariance);
  BasicGaussianState(Matrix<T> covariance, Vector<T> moments);

  static BasicGaussianState vacuum(int modes);

  bool has_zero_moments() const;

  template <class U>
  BasicGaussianState<U> cast() const {
    return BasicGaussianState<U>(cov.template cast<U>(), first_moments.template cast<U>());
  }
};

using GaussianState = BasicGaussianState<double>;
using PreciseGaussianState = BasicGaussianState<Precise>;

/// Block-diagonal Ω = ⊕ [[0,1],[-1,0]].
template <class T = double>
Matrix<T> symplectic_form(int num_modes);

/// Two single-mode squeezed vacua: diag(e^{2r_k}, e^{-2r_k}, e^{2r_k'}, e^{-2r_k'}).
template <class T = double>
BasicGaussianState<T> initial_product_squeezed(double r_k, double r_kprime);

/// Keep the listed modes (1-based) in the given order.
template <class T>
BasicGaussianState<T> partial_trace(const BasicGaussianState<T>& state, const std::vector<int>& keep_modes);

/// 1/sqrt(det cov), evaluated on the locally balanced covariance.
template <class T>
T purity(const BasicGaussianState<T>& state);

/// Apply a local symplectic per mode so that every diagonal 2x2 block becomes
/// a multiple of the identity. Determinants and the sign structure of
/// cov + iΩ are unchanged, but the conditioning of squeezed states improves.
template <class T>
Matrix<T> balanced_covariance(const Matrix<T>& cov);

struct PhysicalityReport {
  bool physical = true;
  double symmetry_violation = 0.0;
  double min_uncertainty_eigenvalue = 0.0;
  std::vector<std::string> violations;
};

template <class T>
PhysicalityReport check_physical(const BasicGaussianState<T>& state,
                                 const NumericPolicy& policy = numeric_policy());

}  // namespace relmetro
