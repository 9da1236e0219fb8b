#pragma once

/// Scheme-specific evaluable scores. For a parametric family F_theta and an
/// indicator test function phi_t = 1{. <= t}, the engine computes
///
///   g_indicator : the conditional score g_{phi_t}(z, theta), mean zero under
///                 the null at theta_0 for every t;
///   loglik / loglik_score : the per-row conditional log-likelihood and its
///                 parameter gradient, feeding the MLE and the projection.
///
/// Closed forms (continuous F, Lambda = -log(1-F)):
///   complete         g = 1{x<=t} - F(t)
///   complete-hazard  g = 1{x<=t} - Lambda(min(x,t))
///   ltrc             g = d*1{y<=t} - [Lambda(min(t,y)) - Lambda(u)]+
///   dt               g = 1{x<=t} - [F(min(t,v)) - F(u)]+ / (F(v) - F(u))
///   cs               g = 1{c<=t} * (d - F(c))
///
/// Everything routes through cdf/cumhaz and their parameter gradients, so the
/// survival ratios stay stable deep in the tails.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "orthofit/error.hpp"
#include "orthofit/family.hpp"
#include "orthofit/sample.hpp"

namespace orthofit {

struct engine_options {
  /// Current status only: weight the indicator by {F(c)(1-F(c))}^{-1/2},
  /// which reproduces the Koul-Yi style Cramer-von-Mises weighting.
  bool cs_weight = false;
};

class score_engine {
 public:
  score_engine(scheme_id scheme, std::shared_ptr<const family> fam, theta_vector th,
               engine_options opt = {})
      : scheme_(scheme), fam_(std::move(fam)), theta_(std::move(th)), opt_(opt) {
    if (!fam_) throw validation_error("score_engine: null family");
    if (!fam_->admissible(theta_)) {
      throw validation_error("score_engine: parameter outside the admissible region");
    }
    if (fam_->name() != "exponential" && scheme_ != scheme_id::complete) {
      throw validation_error("score_engine: family '" + std::string(fam_->name()) +
                             "' is only supported with the complete scheme");
    }
    if (opt_.cs_weight && scheme_ != scheme_id::current_status) {
      throw validation_error("score_engine: cs_weight applies to the current-status scheme only");
    }
  }

  scheme_id scheme() const noexcept { return scheme_; }
  const family& fam() const noexcept { return *fam_; }
  const std::shared_ptr<const family>& fam_ptr() const noexcept { return fam_; }
  const theta_vector& params() const noexcept { return theta_; }
  const engine_options& options() const noexcept { return opt_; }

  double g_indicator(const observed_sample& s, std::size_t i, double t) const {
    switch (scheme_) {
      case scheme_id::complete:
        return ind(s.x[i] <= t) - fam_->cdf(theta_, t);
      case scheme_id::complete_hazard:
        return ind(s.x[i] <= t) - fam_->cumhaz(theta_, std::min(s.x[i], t));
      case scheme_id::ltrc: {
        const double lam = fam_->cumhaz(theta_, std::min(t, s.y[i])) - fam_->cumhaz(theta_, s.u[i]);
        return s.delta[i] * ind(s.y[i] <= t) - std::max(lam, 0.0);
      }
      case scheme_id::double_trunc:
        return ind(s.x[i] <= t) - dt_window_ratio(t, s.u[i], s.v[i]);
      case scheme_id::current_status: {
        if (t < s.c[i]) return 0.0;
        const double g = s.delta[i] - fam_->cdf(theta_, s.c[i]);
        return opt_.cs_weight ? g * cs_weight_at(s.c[i]) : g;
      }
    }
    throw numeric_error("g_indicator: unreachable scheme");
  }

  double loglik(const observed_sample& s, std::size_t i) const {
    switch (scheme_) {
      case scheme_id::complete:
      case scheme_id::complete_hazard:
        return fam_->log_pdf(theta_, s.x[i]);
      case scheme_id::ltrc:
        // d log f(y) + (1-d) log(1-F(y)) - log(1-F(u)).
        return (s.delta[i] ? fam_->log_pdf(theta_, s.y[i])
                           : -fam_->cumhaz(theta_, s.y[i])) +
               fam_->cumhaz(theta_, s.u[i]);
      case scheme_id::double_trunc: {
        // log f(x) - log(F(v) - F(u)), written through the cumulative hazard:
        // F(v) - F(u) = e^{-Lu} (1 - e^{-(Lv - Lu)}).
        const double lu = fam_->cumhaz(theta_, s.u[i]);
        const double lv = fam_->cumhaz(theta_, s.v[i]);
        require_window(lu, lv);
        return fam_->log_pdf(theta_, s.x[i]) + lu - detail::log1mexp(lv - lu);
      }
      case scheme_id::current_status: {
        const double cdfv = fam_->cdf(theta_, s.c[i]);
        return s.delta[i] ? std::log(cdfv) : -fam_->cumhaz(theta_, s.c[i]);
      }
    }
    throw numeric_error("loglik: unreachable scheme");
  }

  vec loglik_score(const observed_sample& s, std::size_t i) const {
    switch (scheme_) {
      case scheme_id::complete:
      case scheme_id::complete_hazard:
        return fam_->score(theta_, s.x[i]);
      case scheme_id::ltrc: {
        vec g = fam_->cumhaz_grad(theta_, s.u[i]);
        if (s.delta[i]) g += fam_->score(theta_, s.y[i]);
        else g -= fam_->cumhaz_grad(theta_, s.y[i]);
        return g;
      }
      case scheme_id::double_trunc: {
        const double den = dt_window_den(s.u[i], s.v[i]);
        vec g = fam_->score(theta_, s.x[i]);
        g -= (fam_->cdf_grad(theta_, s.v[i]) - fam_->cdf_grad(theta_, s.u[i])) / den;
        return g;
      }
      case scheme_id::current_status: {
        // s(c) (d - F(c)) with s(c) = dLambda/dtheta / F(c), the stable form
        // of dF/dtheta / {F (1-F)}.
        const double cdfv = fam_->cdf(theta_, s.c[i]);
        if (!(cdfv > 0.0)) {
          throw numeric_error("current status: inspection time at the support boundary");
        }
        return fam_->cumhaz_grad(theta_, s.c[i]) * ((s.delta[i] - cdfv) / cdfv);
      }
    }
    throw numeric_error("loglik_score: unreachable scheme");
  }

  /// Hazard score h(y) = d/dtheta log( f(y) / (1-F(y)) ); appears in the
  /// analytic orthogonalization term for LTRC.
  vec hazard_score(double y) const {
    return fam_->score(theta_, y) + fam_->cumhaz_grad(theta_, y);
  }

  /// Abscissae at which t -> g_indicator(z_i, t) has kinks or jumps; their
  /// F-images partition (0,1) into panels on which quadrature is smooth.
  std::vector<double> jump_abscissae(const observed_sample& s) const {
    std::vector<double> out;
    switch (scheme_) {
      case scheme_id::complete:
      case scheme_id::complete_hazard:
        out = s.x;
        break;
      case scheme_id::ltrc:
        out.reserve(2 * s.n());
        out.insert(out.end(), s.y.begin(), s.y.end());
        out.insert(out.end(), s.u.begin(), s.u.end());
        break;
      case scheme_id::double_trunc:
        out.reserve(3 * s.n());
        out.insert(out.end(), s.x.begin(), s.x.end());
        out.insert(out.end(), s.u.begin(), s.u.end());
        out.insert(out.end(), s.v.begin(), s.v.end());
        break;
      case scheme_id::current_status:
        out = s.c;
        break;
    }
    return out;
  }

  /// F(v) - F(u), with the degenerate-window guard shared by every
  /// double-truncation code path.
  double dt_window_den(double u, double v) const {
    const double lu = fam_->cumhaz(theta_, u);
    const double lv = fam_->cumhaz(theta_, v);
    return require_window(lu, lv);
  }

 private:
  static double ind(bool b) noexcept { return b ? 1.0 : 0.0; }

  double require_window(double lu, double lv) const {
    const double den = std::exp(-lu) * (-std::expm1(-(lv - lu)));
    if (!(den >= 1e-12)) {
      throw numeric_error("double truncation: degenerate window, F(v) - F(u) < 1e-12");
    }
    return den;
  }

  /// [F(min(t,v)) - F(u)]+ / (F(v) - F(u)); the common survival factor
  /// e^{-Lambda(u)} cancels between numerator and denominator.
  double dt_window_ratio(double t, double u, double v) const {
    const double lu = fam_->cumhaz(theta_, u);
    const double lv = fam_->cumhaz(theta_, v);
    require_window(lu, lv);
    if (t >= v) return 1.0;
    const double lt = fam_->cumhaz(theta_, std::min(t, v));
    if (lt <= lu) return 0.0;
    return std::expm1(-(lt - lu)) / std::expm1(-(lv - lu));
  }

  double cs_weight_at(double c) const {
    const double cdfv = fam_->cdf(theta_, c);
    const double surv = std::exp(-fam_->cumhaz(theta_, c));
    const double prod = cdfv * surv;
    if (!(prod > 0.0)) {
      throw numeric_error("current status: degenerate weight at the support boundary");
    }
    return 1.0 / std::sqrt(prod);
  }

  scheme_id scheme_;
  std::shared_ptr<const family> fam_;
  theta_vector theta_;
  engine_options opt_;
};

}  // namespace orthofit
