#ifndef FMSCAT_COMMON_HPP
#define FMSCAT_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmscat {

using Complex = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / PI; }

/// Bad user input (masses, channels, mismatched lists). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (non-convergence, singular matrix, overflow). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Resource guard violations (dimension overflow).
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Natural cubic spline through uniformly or non-uniformly spaced samples.
/// Used for radial channel functions that must be evaluated off-grid.
template <typename T>
class CubicSpline {
public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<T> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n)
      throw std::invalid_argument("CubicSpline: need >=3 matching samples");
    m_.assign(n, T{});
    // solve tridiagonal system for second derivatives, natural BCs
    std::vector<double> diag(n, 0.0), sub(n, 0.0);
    std::vector<T> rhs(n, T{});
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      sub[i] = hl / 6.0;
      diag[i] = (hl + hr) / 3.0;
      rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    // forward elimination (skip natural-boundary rows)
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * (x_[i] - x_[i - 1]) / 6.0;
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      T upper = (i + 2 < n) ? m_[i + 1] * ((x_[i + 1] - x_[i]) / 6.0) : T{};
      m_[i] = (rhs[i] - upper) / diag[i];
      if (i == 1) break;
    }
  }

  T operator()(double x) const {
    const std::size_t n = x_.size();
    if (x < x_.front() - 1e-12 || x > x_.back() + 1e-12)
      throw NumericError("CubicSpline: evaluation outside sampled range, x=" +
                         std::to_string(x));
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[hi] - x_[lo];
    const double A = (x_[hi] - x) / h, B = (x - x_[lo]) / h;
    return A * y_[lo] + B * y_[hi] +
           ((A * A * A - A) * m_[lo] + (B * B * B - B) * m_[hi]) * (h * h / 6.0);
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }
  bool valid() const { return x_.size() >= 3; }

private:
  std::vector<double> x_;
  std::vector<T> y_;
  std::vector<T> m_;
};

/// FNV-1a 64-bit hash, stable across runs and builds. Used for config hashes.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace fmscat

#endif
