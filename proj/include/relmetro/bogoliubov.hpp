#pragma once

#include "relmetro/gaussian.hpp"
#include "relmetro/numeric.hpp"

#include <optional>

namespace relmetro {

/// α, β of a Bogoliubov transformation over a truncated mode set.
/// Entry [m][n] (0-based) couples output mode m+1 to input mode n+1.
struct BogoliubovCoefficients {
  int n_modes = 0;
  ComplexMatrix alpha;
  ComplexMatrix beta;
  bool exact = false;
};

/// α = diag(G) + h α1 + h² α2,  β = h β1 + h² β2.
struct BogoliubovSeries {
  int n_modes = 0;
  ComplexVector G;
  ComplexMatrix alpha1;
  ComplexMatrix beta1;
  std::optional<ComplexMatrix> alpha2;
  std::optional<ComplexMatrix> beta2;

  /// G = 1 and every correction zero.
  static BogoliubovSeries trivial(int n_modes);

  bool has_second_order() const { return alpha2.has_value() && beta2.has_value(); }

  /// Throws InvalidState if |G| != 1, shapes disagree, or the first-order diagonal is nonzero.
  void validate(double tol = 1e-12) const;
};

struct SymplecticTransform {
  Eigen::MatrixXd matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  /// max |S Ω Sᵀ - Ω|
  double defect() const;
};

/// [[Re(α-β), Im(α+β)], [-Im(α-β), Re(α+β)]]
Eigen::Matrix2d m_block(Complex alpha_mn, Complex beta_mn);

SymplecticTransform assemble_symplectic(const BogoliubovCoefficients& coeffs);

/// Same assembly carried out in scalar type T.
template <class T>
Matrix<T> assemble_symplectic_as(const BogoliubovCoefficients& coeffs);

BogoliubovCoefficients evaluate_series(const BogoliubovSeries& series, double h);

/// max |S Ω Sᵀ - Ω| for any real even-dimensional S.
double symplectic_defect(const Eigen::MatrixXd& s);

struct IdentityResiduals {
  double unitarity = 0.0;  ///< max |αα† - ββ† - 1|
  double symmetry = 0.0;   ///< max |αβᵀ - (αβᵀ)ᵀ|
  bool holds = false;
};

/// For coefficients flagged exact the tolerance is the policy's exact_identity_tol.
/// For truncated series the residuals are reported and `holds` compares against `tol`.
IdentityResiduals check_bogoliubov_identities(const BogoliubovCoefficients& coeffs, double tol);
IdentityResiduals check_bogoliubov_identities(const BogoliubovCoefficients& coeffs,
                                              const NumericPolicy& policy = numeric_policy());

/// Add the second-order terms implied by the group structure of the first-order generator:
/// with A = Ḡ α1 and B = Ḡ β1, α2 = G (A² + B B̄) / 2 and β2 = G (A B + B Ā) / 2.
/// The symplectic defect of the completed series is O(h⁴) instead of O(h²).
BogoliubovSeries complete_second_order(const BogoliubovSeries& series);

/// Rows k and k' of S(h) as real 2x2 blocks in scalar type T, cached for repeated evaluation.
template <class T>
class ReducedRows {
 public:
  ReducedRows(const BogoliubovSeries& series, int k, int kprime);

  /// Blocks M_{i n}(h) for i in {k, k'} (0 or 1) and all n.
  Eigen::Matrix<T, 2, 2> block(int i, int n, const T& h) const;

  int n_modes() const { return n_modes_; }
  int k() const { return k_; }
  int kprime() const { return kprime_; }

 private:
  int n_modes_;
  int k_;
  int kprime_;
  std::vector<Eigen::Matrix<T, 2, 2>> s0_, s1_, s2_;
};

/// Fast path: covariance of modes k, k' after the transformation, assuming every other
/// mode starts in vacuum. Only the rows of S belonging to k and k' are formed (O(N)).
template <class T>
BasicGaussianState<T> transform_reduced(const BasicGaussianState<T>& initial, const BogoliubovSeries& series,
                                        const T& h, int k, int kprime);

template <class T>
BasicGaussianState<T> transform_reduced(const BasicGaussianState<T>& initial, const ReducedRows<T>& rows,
                                        const T& h);

/// Ground truth: embed into the full 2N x 2N covariance, apply S σ Sᵀ, trace down to k, k'.
template <class T>
BasicGaussianState<T> transform_full_oracle(const BasicGaussianState<T>& initial_kkprime,
                                            const BogoliubovSeries& series, const T& h, int k, int kprime);

}  // namespace relmetro
