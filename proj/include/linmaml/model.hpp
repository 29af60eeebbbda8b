#pragma once

#include <cstdint>

#include "linmaml/core.hpp"
#include "linmaml/rng.hpp"

namespace linmaml {

// All scalar experiment knobs plus the task-mean and initialization vectors.
// Counts are per task: n_t training / n_v validation points for each of the
// m meta-training tasks, n_r target / n_s test points for a test task.
struct HyperParams {
    int n_t = 1;
    int n_v = 1;
    int n_r = 1;
    int n_s = 50;
    int m = 1;
    int p = 1;
    double alpha_t = 0.0;  // inner-loop rate during meta-training, may be negative
    double alpha_r = 0.0;  // adaptation rate at test time
    double sigma = 0.0;    // label-noise std
    double nu = 0.0;       // task-variability std
    Vector w0;             // task mean, length p
    Vector omega0;         // outer-loop initial condition, length p

    long total_validation() const { return static_cast<long>(n_v) * m; }

    void validate() const;

    // Over iff p > n_v*m, Under iff p < n_v*m; the boundary is rejected.
    Regime regime() const;
};

// Convenience for the common zero-mean setups.
HyperParams make_hyperparams(int n_t, int n_v, int n_r, int m, int p, double alpha_t,
                             double alpha_r, double sigma, double nu, int n_s = 50);

// Input/weight second- and fourth-moment description. Isotropic kind stores
// no matrices; General kind carries (Sigma, Sigma_w, F) plus their symmetric
// square-root factors used during sampling.
struct CovarianceSpec {
    enum class Kind { Isotropic, General };

    Kind kind = Kind::Isotropic;
    Matrix sigma_x;       // p x p input covariance
    Matrix sigma_w;       // p x p weight covariance
    Matrix f_matrix;      // p x p fourth-moment matrix
    Matrix sqrt_sigma_x;  // symmetric PSD square roots, fixed at construction
    Matrix sqrt_sigma_w;

    static CovarianceSpec isotropic();
    static CovarianceSpec general(Matrix sigma_x, Matrix sigma_w, Matrix f_matrix);

    void check_dimension(int p) const;
};

// Symmetric PSD square root via eigendecomposition. Eigenvalues below -1e-10
// are rejected, values in [-1e-10, 0] are clamped to zero.
Matrix symmetric_sqrt(const Matrix& psd);

// Throws unless max|M - M^T| <= tol.
void require_symmetric(const Matrix& m, const char* what, double tol = 1e-10);

// One meta-training task: generating parameter plus training/validation splits.
struct TaskData {
    Vector w;
    Matrix x_train;
    Vector y_train;
    Matrix x_val;
    Vector y_val;
};

// One meta-test task: target (adaptation) and test splits from one fresh w'.
struct TestTaskData {
    Vector w_prime;
    Matrix x_target;
    Vector y_target;
    Matrix x_test;
    Vector y_test;
};

// Draw order is fixed (w, X, z per split) so identical (hp, cov, stream key)
// reproduce bit-identical samples. In General mode w is zero-mean with
// covariance Sigma_w; hp.w0 and hp.nu are not consulted.
TaskData sample_task(const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng);
TestTaskData sample_test_task(const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng);

// General-kind spec with Sigma = I, Sigma_w = (nu^2/p) I, F = (p+2) I.
CovarianceSpec materialize_isotropic(const HyperParams& hp);

}  // namespace linmaml
