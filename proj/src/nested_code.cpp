#include "latcode/nested_code.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace latcode {

namespace {

constexpr std::int64_t kEntryGuard = std::int64_t{1} << 40;

void check_entries(const MatI64& m, const char* where) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > kEntryGuard) {
                throw std::runtime_error(std::string("integer overflow guard tripped in ") + where);
            }
        }
    }
}

}  // namespace

SmithResult smith_normal_form(const MatI64& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("smith_normal_form expects a square matrix");
    }
    const int n = static_cast<int>(matrix.rows());
    MatI64 a = matrix;
    MatI64 u = MatI64::Identity(n, n);
    MatI64 u_inv = MatI64::Identity(n, n);

    // Row ops touch U (and inversely U^{-1}); column ops only reshape A,
    // since the discarded V never enters the message map.
    auto swap_rows = [&](int i, int j) {
        a.row(i).swap(a.row(j));
        u.row(i).swap(u.row(j));
        u_inv.col(i).swap(u_inv.col(j));
    };
    auto add_row = [&](int dst, int src, std::int64_t q) {  // row_dst += q * row_src
        a.row(dst) += q * a.row(src);
        u.row(dst) += q * u.row(src);
        u_inv.col(src) -= q * u_inv.col(dst);
    };
    auto negate_row = [&](int i) {
        a.row(i) = -a.row(i);
        u.row(i) = -u.row(i);
        u_inv.col(i) = -u_inv.col(i);
    };

    for (int t = 0; t < n; ++t) {
        while (true) {
            // Smallest nonzero pivot in the trailing block.
            int pi = -1, pj = -1;
            std::int64_t pv = std::numeric_limits<std::int64_t>::max();
            for (int i = t; i < n; ++i) {
                for (int j = t; j < n; ++j) {
                    const std::int64_t v = std::abs(a(i, j));
                    if (v != 0 && v < pv) {
                        pv = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if (pi < 0) {
                throw std::invalid_argument("smith_normal_form: matrix is singular");
            }
            if (pi != t) swap_rows(t, pi);
            if (pj != t) a.col(t).swap(a.col(pj));
            if (a(t, t) < 0) negate_row(t);

            bool clean = true;
            for (int i = t + 1; i < n; ++i) {
                if (a(i, t) != 0) {
                    const std::int64_t q = a(i, t) / a(t, t);
                    if (q != 0) add_row(i, t, -q);
                    if (a(i, t) != 0) clean = false;  // remainder: rerun pivot search
                }
            }
            for (int j = t + 1; j < n; ++j) {
                if (a(t, j) != 0) {
                    const std::int64_t q = a(t, j) / a(t, t);
                    if (q != 0) a.col(j) -= q * a.col(t);
                    if (a(t, j) != 0) clean = false;
                }
            }
            check_entries(a, "smith_normal_form");
            if (!clean) continue;

            // Pivot must divide the whole trailing block; fold offending
            // rows into row t until it does.
            bool divides = true;
            for (int i = t + 1; i < n && divides; ++i) {
                for (int j = t + 1; j < n && divides; ++j) {
                    if (a(i, j) % a(t, t) != 0) {
                        add_row(t, i, 1);
                        divides = false;
                    }
                }
            }
            if (divides) break;
        }
    }

    SmithResult out;
    out.diag.resize(n);
    for (int t = 0; t < n; ++t) out.diag[t] = a(t, t);
    out.u = u;
    out.u_inv = u_inv;
    check_entries(u, "smith_normal_form (U)");
    check_entries(u_inv, "smith_normal_form (U^-1)");
    if (((u * u_inv) - MatI64::Identity(n, n)).cwiseAbs().maxCoeff() != 0) {
        throw std::runtime_error("smith_normal_form: transform bookkeeping failed");
    }
    return out;
}

namespace {

// Is M*Z^n a sublattice? Exactly when G^{-1} * M is an integer matrix.
bool nesting_holds(const LatticeSpec& lat, std::int64_t m_scale, MatI64* b_out) {
    const Eigen::MatrixXd b_real = lat.generator_inverse() * static_cast<double>(m_scale);
    MatI64 b(lat.dimension(), lat.dimension());
    for (int i = 0; i < b_real.rows(); ++i) {
        for (int j = 0; j < b_real.cols(); ++j) {
            const double v = b_real(i, j);
            const double r = std::round(v);
            if (std::abs(v - r) > 1e-9) return false;
            b(i, j) = static_cast<std::int64_t>(r);
        }
    }
    if (b_out) *b_out = b;
    return true;
}

}  // namespace

NestedCode::NestedCode(LatticeSpec coding, std::int64_t m_scale)
    : coding_(std::move(coding)), m_scale_(m_scale) {
    if (m_scale_ < 1) throw std::invalid_argument("shaping scale M must be >= 1");
    MatI64 b;
    if (!nesting_holds(coding_, m_scale_, &b)) {
        std::ostringstream msg;
        msg << "shaping lattice " << m_scale_ << "*Z^" << coding_.dimension()
            << " is not a sublattice of '" << coding_.name()
            << "' (M * e_i must all be lattice points)";
        throw std::invalid_argument(msg.str());
    }
    const SmithResult snf = smith_normal_form(b);
    radices_ = snf.diag;
    unimodular_ = snf.u;
    unimodular_inv_ = snf.u_inv;

    long double size = 1.0L;
    for (int i = 0; i < radices_.size(); ++i) size *= static_cast<long double>(radices_[i]);
    if (size > static_cast<long double>(std::uint64_t{1} << 62)) {
        throw std::invalid_argument("codebook larger than 2^62 points is not supported");
    }
    codebook_size_ = static_cast<std::uint64_t>(size + 0.5L);
    rate_ = std::log2(static_cast<double>(codebook_size_)) / coding_.dimension();

    // Cross-check the group order against the volume ratio M^n / det(L).
    const double expected =
        coding_.dimension() * std::log2(static_cast<double>(m_scale_)) -
        std::log2(coding_.volume());
    if (std::abs(expected - std::log2(static_cast<double>(codebook_size_))) > 1e-6) {
        throw std::runtime_error("codebook size disagrees with volume ratio");
    }
}

NestedCode NestedCode::with_scale(const LatticeSpec& coding, std::int64_t m_scale) {
    return NestedCode(coding, m_scale);
}

NestedCode NestedCode::from_rate(const LatticeSpec& coding, double rate) {
    const int n = coding.dimension();
    if (rate <= 0.0) throw std::invalid_argument("rate must be positive");
    const double m_real = std::exp2(rate + std::log2(coding.volume()) / n);
    const std::int64_t m_scale = std::llround(m_real);

    auto rate_of = [&](std::int64_t m) {
        return std::log2(static_cast<double>(m)) - std::log2(coding.volume()) / n;
    };
    const bool integral = std::abs(m_real - static_cast<double>(m_scale)) < 1e-6;
    if (integral && m_scale >= 1 && nesting_holds(coding, m_scale, nullptr)) {
        return NestedCode(coding, m_scale);
    }

    // Collect nearby achievable operating points for the error message.
    std::vector<double> nearby;
    for (std::int64_t m = std::max<std::int64_t>(1, m_scale - 3); m <= m_scale + 3; ++m) {
        if (nesting_holds(coding, m, nullptr)) nearby.push_back(rate_of(m));
    }
    std::ostringstream msg;
    msg << "rate " << rate << " is not achievable on lattice '" << coding.name()
        << "' with hypercube shaping";
    if (!nearby.empty()) {
        msg << "; nearest achievable rates:";
        for (double r : nearby) msg << ' ' << r;
    }
    throw std::invalid_argument(msg.str());
}

Eigen::VectorXd NestedCode::shaping_mod(const Eigen::VectorXd& x) const {
    const double m = static_cast<double>(m_scale_);
    Eigen::VectorXd r(x.size());
    for (int i = 0; i < x.size(); ++i) {
        r[i] = x[i] - m * std::floor(x[i] / m + 0.5);  // window [-M/2, M/2)
    }
    return r;
}

Eigen::VectorXd NestedCode::encode(const Message& msg) const {
    const int n = dimension();
    if (msg.size() != n) throw std::invalid_argument("encode: message dimension mismatch");
    for (int i = 0; i < n; ++i) {
        if (msg[i] < 0 || msg[i] >= radices_[i]) {
            std::ostringstream err;
            err << "encode: message component " << i << " = " << msg[i]
                << " outside [0, " << radices_[i] << ")";
            throw std::invalid_argument(err.str());
        }
    }
    const VecI64 coeffs = unimodular_inv_ * msg;
    return shaping_mod(coding_.generator() * coeffs.cast<double>());
}

Message NestedCode::decode_index(const Eigen::VectorXd& point) const {
    return message_of_coeffs(coding_.coeffs_of(point, 1e-9));
}

Message NestedCode::message_of_coeffs(const VecI64& coeffs) const {
    if (coeffs.size() != dimension()) {
        throw std::invalid_argument("message_of_coeffs: coefficient size mismatch");
    }
    const VecI64 mixed = unimodular_ * coeffs;
    Message msg(dimension());
    for (int i = 0; i < dimension(); ++i) {
        const std::int64_t d = radices_[i];
        msg[i] = ((mixed[i] % d) + d) % d;
    }
    return msg;
}

Message NestedCode::random_message(SubstreamRng& rng) const {
    Message msg(dimension());
    for (int i = 0; i < dimension(); ++i) {
        msg[i] = (radices_[i] > 1)
                     ? static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(radices_[i])))
                     : 0;
    }
    return msg;
}

double NestedCode::average_power(PowerMode mode) const {
    const double m = static_cast<double>(m_scale_);
    if (mode == PowerMode::SecondMoment) return m * m / 12.0;

    if (codebook_size_ > (std::uint64_t{1} << 24)) {
        throw std::invalid_argument(
            "empirical power requires enumerating the codebook, permitted only up to 2^24 "
            "codewords");
    }
    const int n = dimension();
    Message msg = Message::Zero(n);
    double total = 0.0;
    for (std::uint64_t k = 0; k < codebook_size_; ++k) {
        total += encode(msg).squaredNorm();
        for (int i = 0; i < n; ++i) {  // mixed-radix increment
            if (++msg[i] < radices_[i]) break;
            msg[i] = 0;
        }
    }
    return total / (static_cast<double>(codebook_size_) * n);
}

}  // namespace latcode
