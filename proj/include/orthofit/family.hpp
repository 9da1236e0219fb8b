#pragma once

/// Parametric null families. Each family exposes the analytic ingredients the
/// score machinery needs: cdf, density, log-density, quantile, cumulative
/// hazard, the parameter score d/dtheta log f, and the cdf gradient dF/dtheta.
///
/// Supported families: exponential(rate), gamma(shape, scale) and
/// weibull(shape, scale). Support is [0, inf) for all three; cdf and cumhaz
/// accept any real x and clamp below the support to 0.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "orthofit/error.hpp"
#include "orthofit/specfun.hpp"

namespace orthofit {

using theta_vector = Eigen::VectorXd;
using vec = Eigen::VectorXd;

namespace detail {
/// log(1 - e^{-a}) for a > 0, stable near both ends.
inline double log1mexp(double a) {
  return a > M_LN2 ? std::log1p(-std::exp(-a)) : std::log(-std::expm1(-a));
}
}  // namespace detail

class family {
 public:
  virtual ~family() = default;

  virtual std::string_view name() const noexcept = 0;
  /// Number of parameters p.
  virtual int dim() const noexcept = 0;
  double support_lower() const noexcept { return 0.0; }
  virtual bool admissible(const theta_vector& th) const noexcept = 0;

  virtual double cdf(const theta_vector& th, double x) const = 0;
  virtual double pdf(const theta_vector& th, double x) const = 0;
  virtual double log_pdf(const theta_vector& th, double x) const = 0;
  /// Inverse cdf at s in (0,1).
  virtual double quantile(const theta_vector& th, double s) const = 0;
  /// Cumulative hazard Lambda(x) = -log(1 - F(x)); 0 at and below the support
  /// lower bound. Throws a saturation error where 1-F underflows and no
  /// closed form is available.
  virtual double cumhaz(const theta_vector& th, double x) const = 0;
  /// Score l(x) = d/dtheta log f(x), a p-vector.
  virtual vec score(const theta_vector& th, double x) const = 0;
  /// Gradient dF(x)/dtheta, a p-vector.
  virtual vec cdf_grad(const theta_vector& th, double x) const = 0;
  /// Gradient dLambda(x)/dtheta = cdf_grad / (1-F), a p-vector. Overridden
  /// where a closed form avoids the survival division entirely.
  virtual vec cumhaz_grad(const theta_vector& th, double x) const {
    const double surv = 1.0 - cdf(th, x);
    if (surv < 1e-300) {
      throw numeric_error(std::string(name()) + ": survival saturated in cumhaz_grad");
    }
    return cdf_grad(th, x) / surv;
  }
  /// Scale-sensible starting point for MLE given the mean of the outcome column.
  virtual theta_vector default_init(double mean_obs) const = 0;

 protected:
  void require_admissible(const theta_vector& th) const {
    if (th.size() != dim() || !admissible(th)) {
      throw validation_error(std::string(name()) + ": parameter outside the admissible region");
    }
  }
  static void require_unit_interval(double s) {
    if (!(s > 0.0) || !(s < 1.0)) {
      throw validation_error("quantile: probability must lie strictly inside (0,1)");
    }
  }
  static void require_in_support(double x) {
    if (!(x >= 0.0)) throw validation_error("value outside the family support [0, inf)");
  }
};

/// Exponential with rate theta > 0: F(x) = 1 - e^{-theta x}.
class exponential_family final : public family {
 public:
  std::string_view name() const noexcept override { return "exponential"; }
  int dim() const noexcept override { return 1; }
  bool admissible(const theta_vector& th) const noexcept override {
    return th.size() == 1 && th[0] > 0.0 && std::isfinite(th[0]);
  }

  double cdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : -std::expm1(-th[0] * x);
  }
  double pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x < 0.0 ? 0.0 : th[0] * std::exp(-th[0] * x);
  }
  double log_pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    require_in_support(x);
    return std::log(th[0]) - th[0] * x;
  }
  double quantile(const theta_vector& th, double s) const override {
    require_admissible(th);
    require_unit_interval(s);
    return -std::log1p(-s) / th[0];
  }
  double cumhaz(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : th[0] * x;
  }
  vec score(const theta_vector& th, double x) const override {
    require_admissible(th);
    require_in_support(x);
    vec g(1);
    g[0] = 1.0 / th[0] - x;
    return g;
  }
  vec cdf_grad(const theta_vector& th, double x) const override {
    require_admissible(th);
    vec g(1);
    g[0] = x <= 0.0 ? 0.0 : x * std::exp(-th[0] * x);
    return g;
  }
  vec cumhaz_grad(const theta_vector& th, double x) const override {
    require_admissible(th);
    vec g(1);
    g[0] = std::max(x, 0.0);  // d(theta x)/dtheta
    return g;
  }
  theta_vector default_init(double mean_obs) const override {
    theta_vector th(1);
    th[0] = mean_obs > 0.0 ? 1.0 / mean_obs : 1.0;
    return th;
  }
};

/// Gamma with shape k > 0 and scale sigma > 0: F(x) = P(k, x/sigma).
class gamma_family final : public family {
 public:
  std::string_view name() const noexcept override { return "gamma"; }
  int dim() const noexcept override { return 2; }
  bool admissible(const theta_vector& th) const noexcept override {
    return th.size() == 2 && th[0] > 0.0 && th[1] > 0.0 && th.allFinite();
  }

  double cdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : gamma_p(th[0], x / th[1]);
  }
  double pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : std::exp(log_pdf_unchecked(th, x));
  }
  double log_pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (!(x > 0.0)) throw validation_error("gamma: log-density requires x > 0");
    return log_pdf_unchecked(th, x);
  }
  double quantile(const theta_vector& th, double s) const override {
    require_admissible(th);
    require_unit_interval(s);
    return quantile_impl(th, s);
  }
  double cumhaz(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (x <= 0.0) return 0.0;
    const double surv = 1.0 - cdf(th, x);
    if (surv < 1e-300) throw numeric_error("gamma: survival saturated, cumulative hazard overflow");
    return -std::log(surv);
  }
  vec score(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (!(x > 0.0)) throw validation_error("gamma: score requires x > 0");
    vec g(2);
    g[0] = std::log(x / th[1]) - digamma(th[0]);
    g[1] = (x / th[1] - th[0]) / th[1];
    return g;
  }
  vec cdf_grad(const theta_vector& th, double x) const override {
    require_admissible(th);
    vec g(2);
    if (x <= 0.0) {
      g.setZero();
      return g;
    }
    // dF/dshape has no elementary closed form; central difference suffices
    // for the diagnostics that consume it.
    const double h = 1e-6 * std::max(1.0, th[0]);
    g[0] = (gamma_p(th[0] + h, x / th[1]) - gamma_p(th[0] - h, x / th[1])) / (2.0 * h);
    g[1] = -x * pdf(th, x) / th[1];
    return g;
  }
  theta_vector default_init(double mean_obs) const override {
    theta_vector th(2);
    th[0] = 1.0;
    th[1] = mean_obs > 0.0 ? mean_obs : 1.0;
    return th;
  }

 private:
  static double log_pdf_unchecked(const theta_vector& th, double x) {
    const double k = th[0], sigma = th[1];
    return (k - 1.0) * std::log(x) - x / sigma - std::lgamma(k) - k * std::log(sigma);
  }
  /// Safeguarded Newton on the cdf with a maintained bisection bracket.
  double quantile_impl(const theta_vector& th, double s) const {
    const double k = th[0], sigma = th[1];
    // Wilson-Hilferty starting point; crude but inside the bracket basin.
    const double z = inverse_normal_cdf(s);
    const double wh = 1.0 - 1.0 / (9.0 * k) + z / (3.0 * std::sqrt(k));
    double x = k * sigma * wh * wh * wh;
    if (!(x > 0.0) || !std::isfinite(x)) x = k * sigma;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
      const double f = gamma_p(k, x / sigma) - s;
      // Converge on the cdf residual: a step-size criterion fires too early
      // where the density is enormous (small quantiles of small shapes).
      if (std::abs(f) <= 1e-12) return x;
      if (f > 0.0) hi = std::min(hi, x);
      else lo = std::max(lo, x);
      const double d = pdf(th, x);
      double next = d > 0.0 ? x - f / d : x;
      if (!(next > lo) || !(next < hi)) {
        next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(2.0 * x, 1e-12);
      }
      if (next == x) return x;  // bracket at double resolution
      x = next;
    }
    throw numeric_error("gamma: quantile iteration failed to converge");
  }
  /// Acklam-style rational approximation, plenty for a Newton starting point.
  static double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
      const double q = std::sqrt(-2.0 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) return -inverse_normal_cdf(1.0 - p);
    const double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
};

/// Weibull with shape k > 0 and scale lambda > 0: F(x) = 1 - e^{-(x/lambda)^k}.
class weibull_family final : public family {
 public:
  std::string_view name() const noexcept override { return "weibull"; }
  int dim() const noexcept override { return 2; }
  bool admissible(const theta_vector& th) const noexcept override {
    return th.size() == 2 && th[0] > 0.0 && th[1] > 0.0 && th.allFinite();
  }

  double cdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / th[1], th[0]));
  }
  double pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (x <= 0.0) return 0.0;
    const double k = th[0], lam = th[1];
    const double r = x / lam;
    return (k / lam) * std::pow(r, k - 1.0) * std::exp(-std::pow(r, k));
  }
  double log_pdf(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (!(x > 0.0)) throw validation_error("weibull: log-density requires x > 0");
    const double k = th[0], lam = th[1];
    const double logr = std::log(x / lam);
    return std::log(k / lam) + (k - 1.0) * logr - std::exp(k * logr);
  }
  double quantile(const theta_vector& th, double s) const override {
    require_admissible(th);
    require_unit_interval(s);
    return th[1] * std::pow(-std::log1p(-s), 1.0 / th[0]);
  }
  double cumhaz(const theta_vector& th, double x) const override {
    require_admissible(th);
    return x <= 0.0 ? 0.0 : std::pow(x / th[1], th[0]);
  }
  vec score(const theta_vector& th, double x) const override {
    require_admissible(th);
    if (!(x > 0.0)) throw validation_error("weibull: score requires x > 0");
    const double k = th[0], lam = th[1];
    const double logr = std::log(x / lam);
    const double rk = std::exp(k * logr);
    vec g(2);
    g[0] = 1.0 / k + logr * (1.0 - rk);
    g[1] = (k / lam) * (rk - 1.0);
    return g;
  }
  vec cdf_grad(const theta_vector& th, double x) const override {
    require_admissible(th);
    vec g(2);
    if (x <= 0.0) {
      g.setZero();
      return g;
    }
    const double k = th[0], lam = th[1];
    const double logr = std::log(x / lam);
    const double rk = std::exp(k * logr);
    const double surv = std::exp(-rk);
    g[0] = surv * rk * logr;
    g[1] = -surv * rk * k / lam;
    return g;
  }
  vec cumhaz_grad(const theta_vector& th, double x) const override {
    require_admissible(th);
    vec g(2);
    if (x <= 0.0) {
      g.setZero();
      return g;
    }
    const double k = th[0], lam = th[1];
    const double logr = std::log(x / lam);
    const double rk = std::exp(k * logr);  // Lambda(x) = (x/lambda)^k
    g[0] = rk * logr;
    g[1] = -rk * k / lam;
    return g;
  }
  theta_vector default_init(double mean_obs) const override {
    theta_vector th(2);
    th[0] = 1.0;
    th[1] = mean_obs > 0.0 ? mean_obs : 1.0;
    return th;
  }
};

inline std::shared_ptr<const family> make_family(std::string_view name) {
  if (name == "exponential") return std::make_shared<exponential_family>();
  if (name == "gamma") return std::make_shared<gamma_family>();
  if (name == "weibull") return std::make_shared<weibull_family>();
  throw validation_error("unknown family '" + std::string(name) +
                         "' (expected exponential, gamma, or weibull)");
}

}  // namespace orthofit
