#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "linmaml/core.hpp"

namespace linmaml {

// Normalized Wishart-moment scalars, all rational functions of (n, p).
// mu2 scales E[(X^T X)^2], mu3 the cube, mu4 the fourth power; mu11, mu21,
// mu22 scale the traced products. For n = p = 1 they recover the scalar
// Gaussian moments E x^4 = 3, E x^6 = 15, E x^8 = 105.
struct MomentSet {
    double mu2;
    double mu3;
    double mu4;
    double mu11;
    double mu21;  // identical rational function for both traced third-order products
    double mu22;
};

MomentSet moment_set(int n, int p);

// Order-4 polynomials in alpha_t assembling the underparameterized loss.
struct GPolynomials {
    double g1;
    double g2;
    double g3;
    double g4;
};

GPolynomials g_polynomials(double alpha_t, const MomentSet& ms);

// Expressions the Monte Carlo moment oracle can estimate, for X an n x p
// standard Gaussian matrix. The last two take a fixed symmetric C (n x n)
// or D (p x p).
enum class MomentExpr {
    XtX,
    XtX2,
    XtX3,
    XtX4,
    XtXTrXtX,
    XtX2TrXtX,
    XtXTrXtX2,
    XtX2TrXtX2,
    XtCX,
    XtXDXtX,
};

const char* moment_expr_name(MomentExpr expr);
std::optional<MomentExpr> parse_moment_expr(std::string_view name);

struct MomentEstimate {
    Matrix mean;       // entrywise sample mean, p x p
    Matrix std_error;  // entrywise standard error of the mean
    long samples = 0;
};

// Entrywise sample mean and standard error over `samples` independent draws.
// Parallelizes across fixed-size batches with per-batch stream keys and a
// fixed-order reduction, so the result does not depend on `threads`.
MomentEstimate mc_moment(int n, int p, MomentExpr expr, long samples, std::uint64_t seed,
                         const Matrix* c_matrix = nullptr, const Matrix* d_matrix = nullptr,
                         int threads = 1);

// Closed-form expectation of `expr` from the Wishart-moment identities.
Matrix moment_closed_form(int n, int p, MomentExpr expr, const Matrix* c_matrix = nullptr,
                          const Matrix* d_matrix = nullptr);

// One validation row: closed form vs Monte Carlo for a single identity.
struct MomentCheck {
    MomentExpr expr;
    Matrix closed_form;
    MomentEstimate estimate;
    double max_z;  // max over entries of |closed - mc| / SE
};

// Estimates all eight power/trace identities in a single sampling pass
// (they share the powers of X^T X).
std::vector<MomentCheck> lemma_moment_suite(int n, int p, long samples, std::uint64_t seed,
                                            int threads = 1);

}  // namespace linmaml
