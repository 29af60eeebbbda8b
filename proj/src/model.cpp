#include "linmaml/model.hpp"

#include <cmath>

namespace linmaml {

void HyperParams::validate() const {
    if (n_t < 1 || n_v < 1 || n_r < 1 || n_s < 1 || m < 1 || p < 1)
        throw std::invalid_argument("hyperparams: all counts must be >= 1");
    if (sigma < 0.0 || nu < 0.0)
        throw std::invalid_argument("hyperparams: sigma and nu must be >= 0");
    if (!std::isfinite(alpha_t) || !std::isfinite(alpha_r))
        throw std::invalid_argument("hyperparams: learning rates must be finite");
    if (w0.size() != p || omega0.size() != p)
        throw std::invalid_argument("hyperparams: w0 and omega0 must have length p");
}

Regime HyperParams::regime() const {
    const long k = total_validation();
    if (p > k) return Regime::Over;
    if (p < k) return Regime::Under;
    throw std::invalid_argument("regime boundary p == n_v*m unsupported");
}

HyperParams make_hyperparams(int n_t, int n_v, int n_r, int m, int p, double alpha_t,
                             double alpha_r, double sigma, double nu, int n_s) {
    HyperParams hp;
    hp.n_t = n_t;
    hp.n_v = n_v;
    hp.n_r = n_r;
    hp.n_s = n_s;
    hp.m = m;
    hp.p = p;
    hp.alpha_t = alpha_t;
    hp.alpha_r = alpha_r;
    hp.sigma = sigma;
    hp.nu = nu;
    hp.w0 = Vector::Zero(p);
    hp.omega0 = Vector::Zero(p);
    return hp;
}

void require_symmetric(const Matrix& m, const char* what, double tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": not square");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol)
        throw std::invalid_argument(std::string(what) + ": asymmetry " + std::to_string(asym) +
                                    " exceeds tolerance");
}

Matrix symmetric_sqrt(const Matrix& psd) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(psd);
    if (eig.info() != Eigen::Success)
        throw std::invalid_argument("symmetric_sqrt: eigendecomposition failed");
    Vector lambda = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < -1e-10)
            throw std::invalid_argument("symmetric_sqrt: matrix not positive semidefinite");
        if (lambda[i] < 0.0) lambda[i] = 0.0;
    }
    return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

CovarianceSpec CovarianceSpec::isotropic() {
    CovarianceSpec cov;
    cov.kind = Kind::Isotropic;
    return cov;
}

CovarianceSpec CovarianceSpec::general(Matrix sigma_x, Matrix sigma_w, Matrix f_matrix) {
    require_symmetric(sigma_x, "sigma_x");
    require_symmetric(sigma_w, "sigma_w");
    require_symmetric(f_matrix, "f_matrix");
    if (sigma_w.rows() != sigma_x.rows() || f_matrix.rows() != sigma_x.rows())
        throw std::invalid_argument("covariance: sigma_x, sigma_w, f_matrix dimensions differ");
    CovarianceSpec cov;
    cov.kind = Kind::General;
    cov.sqrt_sigma_x = symmetric_sqrt(sigma_x);
    cov.sqrt_sigma_w = symmetric_sqrt(sigma_w);
    cov.sigma_x = std::move(sigma_x);
    cov.sigma_w = std::move(sigma_w);
    cov.f_matrix = std::move(f_matrix);
    return cov;
}

void CovarianceSpec::check_dimension(int p) const {
    if (kind == Kind::Isotropic) return;
    if (sigma_x.rows() != p)
        throw std::invalid_argument("covariance dimension does not match p");
}

namespace {

Vector draw_w(const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng) {
    if (cov.kind == CovarianceSpec::Kind::Isotropic)
        return hp.w0 + (hp.nu / std::sqrt(static_cast<double>(hp.p))) * rng.gaussian_vector(hp.p);
    return cov.sqrt_sigma_w * rng.gaussian_vector(hp.p);
}

Matrix draw_inputs(int rows, const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng) {
    Matrix g = rng.gaussian_matrix(rows, hp.p);
    if (cov.kind == CovarianceSpec::Kind::Isotropic) return g;
    // row_i = sqrt(Sigma) * g_i; sqrt is symmetric.
    return g * cov.sqrt_sigma_x;
}

Vector draw_labels(const Matrix& x, const Vector& w, double sigma, RngStream& rng) {
    return x * w + sigma * rng.gaussian_vector(x.rows());
}

}  // namespace

TaskData sample_task(const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng) {
    hp.validate();
    cov.check_dimension(hp.p);
    TaskData t;
    t.w = draw_w(hp, cov, rng);
    t.x_train = draw_inputs(hp.n_t, hp, cov, rng);
    t.y_train = draw_labels(t.x_train, t.w, hp.sigma, rng);
    t.x_val = draw_inputs(hp.n_v, hp, cov, rng);
    t.y_val = draw_labels(t.x_val, t.w, hp.sigma, rng);
    return t;
}

TestTaskData sample_test_task(const HyperParams& hp, const CovarianceSpec& cov, RngStream& rng) {
    hp.validate();
    cov.check_dimension(hp.p);
    TestTaskData t;
    t.w_prime = draw_w(hp, cov, rng);
    t.x_target = draw_inputs(hp.n_r, hp, cov, rng);
    t.y_target = draw_labels(t.x_target, t.w_prime, hp.sigma, rng);
    t.x_test = draw_inputs(hp.n_s, hp, cov, rng);
    t.y_test = draw_labels(t.x_test, t.w_prime, hp.sigma, rng);
    return t;
}

CovarianceSpec materialize_isotropic(const HyperParams& hp) {
    if (hp.p < 1) throw std::invalid_argument("materialize_isotropic: p must be >= 1");
    const int p = hp.p;
    const double nu2p = hp.nu * hp.nu / static_cast<double>(p);
    return CovarianceSpec::general(Matrix::Identity(p, p), nu2p * Matrix::Identity(p, p),
                                   static_cast<double>(p + 2) * Matrix::Identity(p, p));
}

}  // namespace linmaml
