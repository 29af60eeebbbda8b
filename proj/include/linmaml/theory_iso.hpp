#pragma once

#include "linmaml/core.hpp"
#include "linmaml/model.hpp"

namespace linmaml {

// Closed-form average test loss with its additive decomposition. `value` is
// always the exact sum of the four components.
struct TheoryLoss {
    double value = 0.0;
    Regime regime = Regime::Over;
    double noise = 0.0;           // sigma^2 term incl. the alpha_r^2 p / n_r inflation
    double task_variance = 0.0;   // nu^2 (or Sigma_w) contribution
    double overfitting = 0.0;     // |omega0 - w0|^2 contribution (overparameterized only)
    double data_dependent = 0.0;  // meta-training variance propagated through h^r / h^t
};

// (1 - alpha)^2 + alpha^2 (p+1)/n; the scalar propagating one inner step
// through isotropic Gaussian data. Strictly positive for all real alpha.
double h_factor(double alpha, int n, int p);

// Average test loss, overparameterized regime (p > n_v m), remainder dropped.
TheoryLoss loss_overparam(const HyperParams& hp);

// Average test loss, underparameterized regime (p < n_v m), remainder dropped.
TheoryLoss loss_underparam(const HyperParams& hp);

struct RateExtrema {
    double alpha_minus;   // argmin of the alpha_t-dependent factor, always negative
    double alpha_plus;    // argmax, always positive
    double alpha_r_star;  // argmin over alpha_r of the closed-form loss
};

// Stationary points of the overparameterized loss in alpha_t:
// alpha^± = -(n_t+1)/(2p) ± sqrt(((n_t+1)/(2p))^2 + n_t/p).
RateExtrema alpha_t_extrema(const HyperParams& hp);

// Exact argmin over alpha_r (the loss is quadratic in alpha_r). Lies in
// (0, 1/(1 + (p+1)/n_r)] with the bound attained only at sigma = 0.
// Throws "flat objective" when sigma = nu = 0 and omega0 = w0.
double alpha_r_optimum(const HyperParams& hp, Regime regime);

// Slope of the underparameterized loss in alpha_t at zero, as printed:
// sigma^2 p / (n_v m).
double d_loss_d_alpha_t_at_zero(const HyperParams& hp);

// Central finite difference of loss_underparam at alpha_t = 0 (step 1e-6).
// Matches the printed value when alpha_r = 0; at nonzero alpha_r it carries
// an extra h^r factor (see the compare report).
double d_loss_d_alpha_t_at_zero_fd(const HyperParams& hp);

}  // namespace linmaml
