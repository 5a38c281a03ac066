#include "latcode/sphere_decoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace latcode {

namespace {

using MatI64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Textbook LLL on columns (delta = 0.99). Double precision is ample for the
// small integer-like bases used here, and the search below stays exact for
// any basis; reduction only trims the enumeration tree.
void lll_reduce(Eigen::MatrixXd& basis, MatI64& transform, double delta) {
    const int n = static_cast<int>(basis.cols());
    Eigen::MatrixXd ortho = basis;
    Eigen::MatrixXd mu = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd norms(n);

    auto recompute = [&]() {
        ortho = basis;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                mu(i, j) = basis.col(i).dot(ortho.col(j)) / norms(j);
                ortho.col(i) -= mu(i, j) * ortho.col(j);
            }
            norms(i) = ortho.col(i).squaredNorm();
        }
    };
    recompute();

    int k = 1;
    int guard = 0;
    const int guard_limit = 10000 * n * n;
    while (k < n) {
        if (++guard > guard_limit) break;  // fall back to current (valid) basis
        bool changed = false;
        for (int j = k - 1; j >= 0; --j) {
            const auto q = std::llround(mu(k, j));
            if (q != 0) {
                basis.col(k) -= static_cast<double>(q) * basis.col(j);
                transform.col(k) -= q * transform.col(j);
                changed = true;
            }
        }
        if (changed) recompute();
        if (norms(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1)) {
            ++k;
        } else {
            basis.col(k).swap(basis.col(k - 1));
            transform.col(k).swap(transform.col(k - 1));
            recompute();
            k = std::max(k - 1, 1);
        }
    }
}

bool lex_less(const VecI64& a, const VecI64& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

}  // namespace

SphereDecoder::SphereDecoder(const Eigen::MatrixXd& generator) {
    if (generator.rows() != generator.cols() || generator.rows() < 1) {
        throw std::invalid_argument("sphere decoder requires a square generator matrix");
    }
    n_ = static_cast<int>(generator.rows());
    reduced_ = generator;
    transform_ = MatI64::Identity(n_, n_);
    lll_reduce(reduced_, transform_, 0.99);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(reduced_);
    q_ = qr.householderQ();
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n_; ++i) {
        if (std::abs(r_(i, i)) < 1e-12) {
            throw std::invalid_argument("sphere decoder requires a full-rank generator");
        }
        if (r_(i, i) < 0.0) {  // normalize to a positive diagonal
            r_.row(i) = -r_.row(i);
            q_.col(i) = -q_.col(i);
        }
    }
}

VecI64 SphereDecoder::nearest_coeffs(const Eigen::VectorXd& y) const {
    const int n = n_;
    const Eigen::VectorXd target = q_.transpose() * y;

    // Depth-first Schnorr-Euchner enumeration. Levels run n-1 (outermost
    // triangular row) down to 0; acc[k] is the squared distance contributed
    // by levels k..n-1, resid[k] the scalar target at level k given the
    // choices above it. The first leaf visited is the Babai point.
    std::vector<double> acc(n + 1, 0.0);
    std::vector<double> resid(n, 0.0);
    std::vector<std::int64_t> x(n, 0), step(n, 1);

    VecI64 best_reduced = VecI64::Zero(n);
    VecI64 best_original = VecI64::Zero(n);
    double best_cost = std::numeric_limits<double>::infinity();
    bool have_best = false;

    auto enter_level = [&](int k) {
        double t = target[k];
        for (int j = k + 1; j < n; ++j) t -= r_(k, j) * static_cast<double>(x[j]);
        resid[k] = t;
        const double center = t / r_(k, k);
        x[k] = std::llround(center);
        step[k] = (center >= static_cast<double>(x[k])) ? 1 : -1;
        const double miss = t - r_(k, k) * static_cast<double>(x[k]);
        acc[k] = acc[k + 1] + miss * miss;
    };

    auto advance_level = [&](int k) {  // zig-zag to the next candidate outward
        x[k] += step[k];
        step[k] = -step[k] - (step[k] > 0 ? 1 : -1);
        const double miss = resid[k] - r_(k, k) * static_cast<double>(x[k]);
        acc[k] = acc[k + 1] + miss * miss;
    };

    int k = n - 1;
    enter_level(k);
    while (true) {
        // <= keeps equal-cost branches alive so exact ties reach the leaf
        // and resolve by lexicographic comparison.
        if (!have_best || acc[k] <= best_cost) {
            if (k > 0) {
                enter_level(--k);
                continue;
            }
            VecI64 reduced(n);
            for (int i = 0; i < n; ++i) reduced[i] = x[i];
            VecI64 original = transform_ * reduced;
            if (!have_best || acc[0] < best_cost ||
                (acc[0] == best_cost && lex_less(original, best_original))) {
                best_cost = acc[0];
                best_reduced = reduced;
                best_original = original;
                have_best = true;
            }
            advance_level(0);
        } else {
            if (++k == n) break;
            advance_level(k);
        }
    }
    return best_original;
}

}  // namespace latcode
