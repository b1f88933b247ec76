#include "relmetro/bogoliubov.hpp"

#include <fmt/format.h>

#include <cmath>

namespace relmetro {

namespace {

void check_modes(int n_modes, int k, int kprime) {
  if (k < 1 || k > n_modes || kprime < 1 || kprime > n_modes)
    throw ModeOutOfRange(fmt::format("modes ({}, {}) outside the truncation 1..{}", k, kprime, n_modes));
  if (k == kprime) throw ModeOutOfRange(fmt::format("modes must differ, got k = k' = {}", k));
}

template <class T>
Eigen::Matrix<T, 2, 2> m_block_as(Complex a, Complex b) {
  const T ar(a.real()), ai(a.imag()), br(b.real()), bi(b.imag());
  Eigen::Matrix<T, 2, 2> m;
  m << ar - br, ai + bi, -(ai - bi), ar + br;
  return m;
}

template <class T>
Eigen::Matrix<T, 2, 2> phase_block(Complex g) {
  using std::cos;
  using std::sin;
  const T theta(std::arg(g));
  Eigen::Matrix<T, 2, 2> m;
  const T c = cos(theta), s = sin(theta);
  m << c, s, -s, c;
  return m;
}

template <class T>
Matrix<T> series_symplectic(const BogoliubovSeries& series, const T& h) {
  const int n = series.n_modes;
  Matrix<T> s = Matrix<T>::Zero(2 * n, 2 * n);
  const bool second = series.has_second_order();
  for (int m = 0; m < n; ++m) {
    for (int q = 0; q < n; ++q) {
      Eigen::Matrix<T, 2, 2> blk = h * m_block_as<T>(series.alpha1(m, q), series.beta1(m, q));
      if (second) blk += h * h * m_block_as<T>((*series.alpha2)(m, q), (*series.beta2)(m, q));
      if (m == q) blk += phase_block<T>(series.G(m));
      s.template block<2, 2>(2 * m, 2 * q) = blk;
    }
  }
  return s;
}

}  // namespace

BogoliubovSeries BogoliubovSeries::trivial(int n_modes) {
  if (n_modes < 1) throw InvalidState("series needs at least one mode");
  BogoliubovSeries s;
  s.n_modes = n_modes;
  s.G = ComplexVector::Ones(n_modes);
  s.alpha1 = ComplexMatrix::Zero(n_modes, n_modes);
  s.beta1 = ComplexMatrix::Zero(n_modes, n_modes);
  return s;
}

void BogoliubovSeries::validate(double tol) const {
  if (n_modes < 1) throw InvalidState("series needs at least one mode");
  if (G.size() != n_modes || alpha1.rows() != n_modes || alpha1.cols() != n_modes || beta1.rows() != n_modes ||
      beta1.cols() != n_modes)
    throw InvalidState("series matrices do not match n_modes");
  if (alpha2.has_value() != beta2.has_value()) throw InvalidState("second order needs both alpha2 and beta2");
  if (alpha2 && (alpha2->rows() != n_modes || alpha2->cols() != n_modes || beta2->rows() != n_modes ||
                 beta2->cols() != n_modes))
    throw InvalidState("second-order matrices do not match n_modes");
  for (int m = 0; m < n_modes; ++m) {
    if (std::abs(std::abs(G(m)) - 1.0) > tol)
      throw InvalidState(fmt::format("|G_{}| = {} is not 1", m + 1, std::abs(G(m))));
    if (alpha1(m, m) != Complex(0) || beta1(m, m) != Complex(0))
      throw InvalidState(fmt::format("first-order diagonal entry {} is nonzero", m + 1));
  }
}

double SymplecticTransform::defect() const { return symplectic_defect(matrix); }

Eigen::Matrix2d m_block(Complex alpha_mn, Complex beta_mn) { return m_block_as<double>(alpha_mn, beta_mn); }

template <class T>
Matrix<T> assemble_symplectic_as(const BogoliubovCoefficients& coeffs) {
  const int n = coeffs.n_modes;
  if (coeffs.alpha.rows() != n || coeffs.alpha.cols() != n || coeffs.beta.rows() != n || coeffs.beta.cols() != n)
    throw InvalidState("coefficient matrices must be square and of size n_modes");
  Matrix<T> s(2 * n, 2 * n);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q)
      s.template block<2, 2>(2 * m, 2 * q) = m_block_as<T>(coeffs.alpha(m, q), coeffs.beta(m, q));
  return s;
}

SymplecticTransform assemble_symplectic(const BogoliubovCoefficients& coeffs) {
  return SymplecticTransform{assemble_symplectic_as<double>(coeffs)};
}

BogoliubovCoefficients evaluate_series(const BogoliubovSeries& series, double h) {
  if (!(h >= 0)) throw InvalidState(fmt::format("h must be non-negative, got {}", h));
  BogoliubovCoefficients c;
  c.n_modes = series.n_modes;
  c.alpha = h * series.alpha1;
  c.alpha.diagonal() += series.G;
  c.beta = h * series.beta1;
  if (series.has_second_order()) {
    c.alpha += h * h * *series.alpha2;
    c.beta += h * h * *series.beta2;
  }
  c.exact = (h == 0.0);
  return c;
}

double symplectic_defect(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) throw InvalidState("symplectic matrix must be square, even");
  const Eigen::MatrixXd om = symplectic_form<double>(static_cast<int>(s.rows() / 2));
  return (s * om * s.transpose() - om).cwiseAbs().maxCoeff();
}

IdentityResiduals check_bogoliubov_identities(const BogoliubovCoefficients& coeffs, double tol) {
  IdentityResiduals r;
  const ComplexMatrix& a = coeffs.alpha;
  const ComplexMatrix& b = coeffs.beta;
  const ComplexMatrix u = a * a.adjoint() - b * b.adjoint() - ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix p = a * b.transpose();
  r.unitarity = u.cwiseAbs().maxCoeff();
  r.symmetry = (p - p.transpose()).cwiseAbs().maxCoeff();
  r.holds = r.unitarity <= tol && r.symmetry <= tol;
  return r;
}

IdentityResiduals check_bogoliubov_identities(const BogoliubovCoefficients& coeffs, const NumericPolicy& policy) {
  return check_bogoliubov_identities(coeffs, policy.exact_identity_tol);
}

BogoliubovSeries complete_second_order(const BogoliubovSeries& series) {
  series.validate();
  BogoliubovSeries out = series;
  const ComplexMatrix gbar = series.G.conjugate().asDiagonal();
  const ComplexMatrix a = gbar * series.alpha1;
  const ComplexMatrix b = gbar * series.beta1;
  const ComplexMatrix g = series.G.asDiagonal();
  out.alpha2 = g * (a * a + b * b.conjugate()) / 2.0;
  out.beta2 = g * (a * b + b * a.conjugate()) / 2.0;
  return out;
}

template <class T>
ReducedRows<T>::ReducedRows(const BogoliubovSeries& series, int k, int kprime)
    : n_modes_(series.n_modes), k_(k), kprime_(kprime) {
  check_modes(series.n_modes, k, kprime);
  const int n = n_modes_;
  s0_.assign(2 * n, Eigen::Matrix<T, 2, 2>::Zero());
  s1_.assign(2 * n, Eigen::Matrix<T, 2, 2>::Zero());
  s2_.assign(2 * n, Eigen::Matrix<T, 2, 2>::Zero());
  const int rows[2] = {k - 1, kprime - 1};
  for (int i = 0; i < 2; ++i) {
    const int m = rows[i];
    s0_[i * n + m] = phase_block<T>(series.G(m));
    for (int q = 0; q < n; ++q) {
      s1_[i * n + q] = m_block_as<T>(series.alpha1(m, q), series.beta1(m, q));
      if (series.has_second_order()) s2_[i * n + q] = m_block_as<T>((*series.alpha2)(m, q), (*series.beta2)(m, q));
    }
  }
}

template <class T>
Eigen::Matrix<T, 2, 2> ReducedRows<T>::block(int i, int n, const T& h) const {
  const int idx = i * n_modes_ + n;
  return s0_[idx] + h * (s1_[idx] + h * s2_[idx]);
}

template <class T>
BasicGaussianState<T> transform_reduced(const BasicGaussianState<T>& initial, const ReducedRows<T>& rows,
                                        const T& h) {
  if (initial.num_modes != 2) throw InvalidState("transform_reduced expects a two-mode initial state");
  const int n = rows.n_modes();
  const int idx[2] = {rows.k() - 1, rows.kprime() - 1};

  std::vector<Eigen::Matrix<T, 2, 2>> m(2 * n);
  for (int i = 0; i < 2; ++i)
    for (int q = 0; q < n; ++q) m[i * n + q] = rows.block(i, q, h);

  Matrix<T> out = Matrix<T>::Zero(4, 4);
  Vector<T> d = Vector<T>::Zero(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix<T, 2, 2> c = Eigen::Matrix<T, 2, 2>::Zero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          c += m[i * n + idx[a]] * initial.cov.template block<2, 2>(2 * a, 2 * b) *
               m[j * n + idx[b]].transpose();
      for (int q = 0; q < n; ++q) {
        if (q == idx[0] || q == idx[1]) continue;
        c += m[i * n + q] * m[j * n + q].transpose();
      }
      out.template block<2, 2>(2 * i, 2 * j) = c;
    }
    for (int a = 0; a < 2; ++a)
      d.template segment<2>(2 * i) += m[i * n + idx[a]] * initial.first_moments.template segment<2>(2 * a);
  }
  out = (out + out.transpose()) / 2;
  return BasicGaussianState<T>(out, d);
}

template <class T>
BasicGaussianState<T> transform_reduced(const BasicGaussianState<T>& initial, const BogoliubovSeries& series,
                                        const T& h, int k, int kprime) {
  return transform_reduced(initial, ReducedRows<T>(series, k, kprime), h);
}

template <class T>
BasicGaussianState<T> transform_full_oracle(const BasicGaussianState<T>& initial_kkprime,
                                            const BogoliubovSeries& series, const T& h, int k, int kprime) {
  check_modes(series.n_modes, k, kprime);
  if (initial_kkprime.num_modes != 2) throw InvalidState("oracle expects a two-mode initial state");
  const int n = series.n_modes;
  const int idx[2] = {k - 1, kprime - 1};
  Matrix<T> full = Matrix<T>::Identity(2 * n, 2 * n);
  Vector<T> d = Vector<T>::Zero(2 * n);
  for (int a = 0; a < 2; ++a) {
    d.template segment<2>(2 * idx[a]) = initial_kkprime.first_moments.template segment<2>(2 * a);
    for (int b = 0; b < 2; ++b)
      full.template block<2, 2>(2 * idx[a], 2 * idx[b]) = initial_kkprime.cov.template block<2, 2>(2 * a, 2 * b);
  }
  const Matrix<T> s = series_symplectic<T>(series, h);
  Matrix<T> out = s * full * s.transpose();
  out = (out + out.transpose()) / 2;
  const Vector<T> dout = s * d;
  return partial_trace(BasicGaussianState<T>(out, dout), {k, kprime});
}

#define RELMETRO_INSTANTIATE_BOGOLIUBOV(T)                                                                       \
  template Matrix<T> assemble_symplectic_as<T>(const BogoliubovCoefficients&);                                    \
  template class ReducedRows<T>;                                                                                  \
  template BasicGaussianState<T> transform_reduced<T>(const BasicGaussianState<T>&, const ReducedRows<T>&,        \
                                                      const T&);                                                  \
  template BasicGaussianState<T> transform_reduced<T>(const BasicGaussianState<T>&, const BogoliubovSeries&,      \
                                                      const T&, int, int);                                        \
  template BasicGaussianState<T> transform_full_oracle<T>(const BasicGaussianState<T>&, const BogoliubovSeries&,  \
                                                          const T&, int, int);

RELMETRO_INSTANTIATE_BOGOLIUBOV(double)
RELMETRO_INSTANTIATE_BOGOLIUBOV(Precise)

}  // namespace relmetro
