#include "linmaml/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>

#include "linmaml/model.hpp"
#include "linmaml/rng.hpp"

namespace linmaml {

MomentSet moment_set(int n_, int p_) {
    if (n_ < 1 || p_ < 1) throw std::invalid_argument("moment_set: n and p must be >= 1");
    const double n = n_, p = p_;
    MomentSet ms;
    ms.mu2 = (n + p + 1.0) / n;
    ms.mu3 = (n * n + p * p + 3.0 * n * p + 3.0 * n + 3.0 * p + 4.0) / (n * n);
    ms.mu4 = (n * n * n + p * p * p + 6.0 * n * n * p + 6.0 * n * p * p + 6.0 * n * n +
              6.0 * p * p + 17.0 * n * p + 21.0 * n + 21.0 * p + 20.0) /
             (n * n * n);
    ms.mu11 = (n * n * p + 2.0 * n) / (n * n * p);
    ms.mu21 = (n * n * p + n * p * p + n * p + 4.0 * n + 4.0 * p + 4.0) / (n * n * p);
    ms.mu22 = (n * n * n * p + n * p * p * p + 2.0 * n * n * p * p + 2.0 * n * n * p +
               2.0 * n * p * p + 8.0 * n * n + 8.0 * p * p + 21.0 * n * p + 20.0 * n +
               20.0 * p + 20.0) /
              (n * n * n * p);
    return ms;
}

GPolynomials g_polynomials(double a, const MomentSet& ms) {
    if (!std::isfinite(a)) throw std::invalid_argument("g_polynomials: alpha_t must be finite");
    const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2;
    GPolynomials g;
    g.g1 = 1.0 - 2.0 * a * ms.mu2 + a2 * ms.mu3;
    g.g2 = 1.0 - 2.0 * a * ms.mu11 + a2 * ms.mu21;
    g.g3 = 1.0 - 4.0 * a + 6.0 * a2 * ms.mu2 - 4.0 * a3 * ms.mu3 + a4 * ms.mu4;
    g.g4 = 1.0 - 4.0 * a + 2.0 * a2 * ms.mu2 + 4.0 * a2 * ms.mu11 - 4.0 * a3 * ms.mu21 +
           a4 * ms.mu22;
    return g;
}

const char* moment_expr_name(MomentExpr expr) {
    switch (expr) {
        case MomentExpr::XtX: return "XtX";
        case MomentExpr::XtX2: return "(XtX)^2";
        case MomentExpr::XtX3: return "(XtX)^3";
        case MomentExpr::XtX4: return "(XtX)^4";
        case MomentExpr::XtXTrXtX: return "XtX*Tr(XtX)";
        case MomentExpr::XtX2TrXtX: return "(XtX)^2*Tr(XtX)";
        case MomentExpr::XtXTrXtX2: return "XtX*Tr((XtX)^2)";
        case MomentExpr::XtX2TrXtX2: return "(XtX)^2*Tr((XtX)^2)";
        case MomentExpr::XtCX: return "XtCX";
        case MomentExpr::XtXDXtX: return "XtX*D*XtX";
    }
    return "?";
}

std::optional<MomentExpr> parse_moment_expr(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(MomentExpr::XtXDXtX); ++i) {
        const auto expr = static_cast<MomentExpr>(i);
        if (name == moment_expr_name(expr)) return expr;
    }
    return std::nullopt;
}

Matrix moment_closed_form(int n_, int p_, MomentExpr expr, const Matrix* c_matrix,
                          const Matrix* d_matrix) {
    if (n_ < 1 || p_ < 1) throw std::invalid_argument("moment_closed_form: n, p must be >= 1");
    const double n = n_, p = p_;
    const Matrix eye = Matrix::Identity(p_, p_);
    switch (expr) {
        case MomentExpr::XtX: return n * eye;
        case MomentExpr::XtX2: return n * (n + p + 1.0) * eye;
        case MomentExpr::XtX3:
            return n * (n * n + p * p + 3.0 * n * p + 3.0 * n + 3.0 * p + 4.0) * eye;
        case MomentExpr::XtX4:
            return n *
                   (n * n * n + p * p * p + 6.0 * n * n * p + 6.0 * n * p * p + 6.0 * n * n +
                    6.0 * p * p + 17.0 * n * p + 21.0 * n + 21.0 * p + 20.0) *
                   eye;
        case MomentExpr::XtXTrXtX: return (n * n * p + 2.0 * n) * eye;
        case MomentExpr::XtX2TrXtX:
        case MomentExpr::XtXTrXtX2:
            return n * (n * n * p + n * p * p + n * p + 4.0 * n + 4.0 * p + 4.0) * eye;
        case MomentExpr::XtX2TrXtX2:
            return n *
                   (n * n * n * p + n * p * p * p + 2.0 * n * n * p * p + 2.0 * n * n * p +
                    2.0 * n * p * p + 8.0 * n * n + 8.0 * p * p + 21.0 * n * p + 20.0 * n +
                    20.0 * p + 20.0) *
                   eye;
        case MomentExpr::XtCX: {
            if (!c_matrix) throw std::invalid_argument("XtCX requires a C matrix");
            require_symmetric(*c_matrix, "C");
            if (c_matrix->rows() != n_) throw std::invalid_argument("C must be n x n");
            return c_matrix->trace() * eye;
        }
        case MomentExpr::XtXDXtX: {
            if (!d_matrix) throw std::invalid_argument("XtX*D*XtX requires a D matrix");
            require_symmetric(*d_matrix, "D");
            if (d_matrix->rows() != p_) throw std::invalid_argument("D must be p x p");
            return n * (n + 1.0) * (*d_matrix) + n * d_matrix->trace() * eye;
        }
    }
    throw std::invalid_argument("unknown moment expression");
}

namespace {

constexpr long kBatchSize = 8192;

struct Accumulator {
    Matrix sum;
    Matrix sumsq;
    void init(int p) {
        sum = Matrix::Zero(p, p);
        sumsq = Matrix::Zero(p, p);
    }
    void add(const Matrix& v) {
        sum += v;
        sumsq += v.cwiseProduct(v);
    }
    void merge(const Accumulator& other) {
        sum += other.sum;
        sumsq += other.sumsq;
    }
};

MomentEstimate finalize(const Accumulator& acc, long samples) {
    MomentEstimate est;
    est.samples = samples;
    est.mean = acc.sum / static_cast<double>(samples);
    if (samples > 1) {
        // sample variance = (sumsq - N*mean^2) / (N-1), floored at 0 against rounding
        Matrix var = (acc.sumsq - static_cast<double>(samples) * est.mean.cwiseProduct(est.mean)) /
                     static_cast<double>(samples - 1);
        est.std_error = var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(static_cast<double>(samples));
    } else {
        est.std_error = Matrix::Constant(est.mean.rows(), est.mean.cols(),
                                         std::numeric_limits<double>::infinity());
    }
    return est;
}

// Runs fn(batch_index, batch_samples, stream) over all batches, threaded,
// with per-batch accumulators merged in batch order.
template <typename PerBatch>
void for_each_batch(long samples, std::uint64_t seed, int threads, PerBatch fn) {
    const long n_batches = (samples + kBatchSize - 1) / kBatchSize;
    const int n_threads = std::max(1, std::min<long>(threads, n_batches));
    auto worker = [&](long first, long last) {
        for (long b = first; b < last; ++b) {
            const long count = std::min<long>(kBatchSize, samples - b * kBatchSize);
            RngStream rng(seed, static_cast<std::uint64_t>(b), stream_tag::kMoments);
            fn(b, count, rng);
        }
    };
    if (n_threads == 1) {
        worker(0, n_batches);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (n_batches + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const long first = t * chunk;
        const long last = std::min(n_batches, first + chunk);
        if (first < last) pool.emplace_back(worker, first, last);
    }
    for (auto& th : pool) th.join();
}

double max_z_score(const Matrix& closed, const MomentEstimate& est) {
    double max_z = 0.0;
    for (Eigen::Index j = 0; j < closed.cols(); ++j) {
        for (Eigen::Index i = 0; i < closed.rows(); ++i) {
            const double diff = std::abs(closed(i, j) - est.mean(i, j));
            const double se = est.std_error(i, j);
            const double z = se > 0.0 ? diff / se
                                      : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            max_z = std::max(max_z, z);
        }
    }
    return max_z;
}

}  // namespace

MomentEstimate mc_moment(int n, int p, MomentExpr expr, long samples, std::uint64_t seed,
                         const Matrix* c_matrix, const Matrix* d_matrix, int threads) {
    if (n < 1 || p < 1) throw std::invalid_argument("mc_moment: n, p must be >= 1");
    if (samples < 2) throw std::invalid_argument("mc_moment: need at least 2 samples");
    // validates C/D up front
    moment_closed_form(n, p, expr, c_matrix, d_matrix);

    const long n_batches = (samples + kBatchSize - 1) / kBatchSize;
    std::vector<Accumulator> partial(n_batches);
    for (auto& acc : partial) acc.init(p);

    for_each_batch(samples, seed, threads, [&](long b, long count, RngStream& rng) {
        Matrix x(n, p), xtx(p, p), tmp(p, p), val(p, p);
        for (long s = 0; s < count; ++s) {
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.gaussian();
            xtx.noalias() = x.transpose() * x;
            switch (expr) {
                case MomentExpr::XtX: val = xtx; break;
                case MomentExpr::XtX2: val.noalias() = xtx * xtx; break;
                case MomentExpr::XtX3:
                    tmp.noalias() = xtx * xtx;
                    val.noalias() = tmp * xtx;
                    break;
                case MomentExpr::XtX4:
                    tmp.noalias() = xtx * xtx;
                    val.noalias() = tmp * tmp;
                    break;
                case MomentExpr::XtXTrXtX: val = xtx * xtx.trace(); break;
                case MomentExpr::XtX2TrXtX:
                    tmp.noalias() = xtx * xtx;
                    val = tmp * xtx.trace();
                    break;
                case MomentExpr::XtXTrXtX2:
                    tmp.noalias() = xtx * xtx;
                    val = xtx * tmp.trace();
                    break;
                case MomentExpr::XtX2TrXtX2:
                    tmp.noalias() = xtx * xtx;
                    val = tmp * tmp.trace();
                    break;
                case MomentExpr::XtCX: val.noalias() = x.transpose() * (*c_matrix) * x; break;
                case MomentExpr::XtXDXtX: val.noalias() = xtx * (*d_matrix) * xtx; break;
            }
            partial[b].add(val);
        }
    });

    Accumulator total;
    total.init(p);
    for (const auto& acc : partial) total.merge(acc);
    return finalize(total, samples);
}

std::vector<MomentCheck> lemma_moment_suite(int n, int p, long samples, std::uint64_t seed,
                                            int threads) {
    if (n < 1 || p < 1) throw std::invalid_argument("lemma_moment_suite: n, p must be >= 1");
    if (samples < 2) throw std::invalid_argument("lemma_moment_suite: need at least 2 samples");

    constexpr int kExprs = 8;
    const long n_batches = (samples + kBatchSize - 1) / kBatchSize;
    std::vector<std::array<Accumulator, kExprs>> partial(n_batches);
    for (auto& batch : partial)
        for (auto& acc : batch) acc.init(p);

    for_each_batch(samples, seed, threads, [&](long b, long count, RngStream& rng) {
        Matrix x(n, p), p1(p, p), p2(p, p), p3(p, p), p4(p, p);
        auto& acc = partial[b];
        for (long s = 0; s < count; ++s) {
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.gaussian();
            p1.noalias() = x.transpose() * x;
            p2.noalias() = p1 * p1;
            p3.noalias() = p2 * p1;
            p4.noalias() = p2 * p2;
            const double t1 = p1.trace();
            const double t2 = p2.trace();
            acc[0].add(p1);
            acc[1].add(p2);
            acc[2].add(p3);
            acc[3].add(p4);
            acc[4].add(p1 * t1);
            acc[5].add(p2 * t1);
            acc[6].add(p1 * t2);
            acc[7].add(p2 * t2);
        }
    });

    static constexpr MomentExpr kOrder[kExprs] = {
        MomentExpr::XtX,       MomentExpr::XtX2,      MomentExpr::XtX3,      MomentExpr::XtX4,
        MomentExpr::XtXTrXtX,  MomentExpr::XtX2TrXtX, MomentExpr::XtXTrXtX2, MomentExpr::XtX2TrXtX2,
    };
    std::vector<MomentCheck> checks;
    checks.reserve(kExprs);
    for (int e = 0; e < kExprs; ++e) {
        Accumulator total;
        total.init(p);
        for (const auto& batch : partial) total.merge(batch[e]);
        MomentCheck check;
        check.expr = kOrder[e];
        check.closed_form = moment_closed_form(n, p, kOrder[e]);
        check.estimate = finalize(total, samples);
        check.max_z = max_z_score(check.closed_form, check.estimate);
        checks.push_back(std::move(check));
    }
    return checks;
}

}  // namespace linmaml
