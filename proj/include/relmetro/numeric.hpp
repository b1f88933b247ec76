#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace relmetro {

/// 50 significant digits. Used wherever squeezing pushes covariance entries
/// towards e^{2r} and the fidelity formula cancels ~e^{4r}.
using Precise = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                              boost::multiprecision::et_off>;

}  // namespace relmetro

// Eigen's generic hypot asks NumTraits for infinity(), which the Boost adaptor of this
// vintage does not provide.
namespace Eigen::internal {
template <>
inline relmetro::Precise positive_real_hypot<relmetro::Precise>(const relmetro::Precise& x,
                                                                const relmetro::Precise& y) {
  return sqrt(x * x + y * y);
}
}  // namespace Eigen::internal

namespace relmetro {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Tolerances and step ladders shared by every module.
///
/// The process-wide value is read once from the environment variable
/// `RELMETRO_NUMERIC_POLICY` (a JSON object whose keys are the field names
/// below); unspecified keys keep their defaults.
struct NumericPolicy {
  double symmetry_tol = 1e-12;
  double uncertainty_tol = 1e-10;
  double exact_identity_tol = 1e-8;
  double branch_clamp = 1e-10;
  int n_max = 50;
  std::vector<double> dh_ladder = {1e-4, 5e-5, 2.5e-5};
  double plateau_rel = 1e-3;
  double validity_threshold = 1e-2;

  static NumericPolicy from_json(const std::string& text);
  static NumericPolicy from_json(const std::string& text, NumericPolicy base);
  std::string to_json() const;
};

inline constexpr const char* kNumericPolicyEnv = "RELMETRO_NUMERIC_POLICY";

/// Process-wide policy (environment override applied on first use).
const NumericPolicy& numeric_policy();

template <class T>
inline T to_scalar(double x) {
  return T(x);
}

template <class T>
inline double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

}  // namespace relmetro
