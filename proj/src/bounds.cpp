#include "latcode/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace latcode {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

// Kahan-compensated sum of exp(k*ln t - lgamma(k+1) - t) over k descending
// from `k_max` in unit steps (k may be half-integral). Computing each term
// in log space keeps large-t evaluations in range; descending order adds
// the small tail terms first.
double poisson_tail_series(double k_max, double t) {
    if (k_max < 0.0) return 0.0;
    if (t == 0.0) return (k_max == std::floor(k_max) && k_max >= 0.0) ? 1.0 : 0.0;
    const double log_t = std::log(t);
    double sum = 0.0, comp = 0.0;
    for (double k = k_max; k >= -0.5; k -= 1.0) {
        if (k < 0.0) break;  // k == -0.0 guard for half-integer ladders
        const double term = std::exp(k * log_t - std::lgamma(k + 1.0) - t);
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

void check_sigma(double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
}

}  // namespace

const char* bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::Covering: return "covering";
        case BoundKind::Effective: return "effective";
        case BoundKind::Asymptotic: return "asymptotic";
        case BoundKind::Tarokh: return "tarokh";
    }
    return "?";
}

double gauss_ball_survival(int dims, double radius, double sigma2) {
    if (dims < 1) throw std::invalid_argument("gauss_ball_survival needs dims >= 1");
    if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
    check_sigma(sigma2);
    const double t = radius * radius / (2.0 * sigma2);
    if (dims % 2 == 0) {
        // e^-t * sum_{k=0}^{dims/2-1} t^k / k!
        return poisson_tail_series(dims / 2 - 1, t);
    }
    // erfc(sqrt(t)) + e^-t * sum over half-integer k = 1/2, ..., dims/2-1
    return std::erfc(std::sqrt(t)) + poisson_tail_series(0.5 * dims - 1.0, t);
}

double ps_closed_form(int n, double radius, double sigma2) {
    if (n < 2) throw std::invalid_argument("ps_closed_form needs n >= 2");
    if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
    check_sigma(sigma2);
    const double t = radius * radius / (2.0 * sigma2);
    if (n % 2 == 1) {
        // odd n: 1 - e^-t * sum_{k=0}^{(n-3)/2} t^k / k!
        return 1.0 - poisson_tail_series((n - 3) / 2, t);
    }
    // even n: 1 - erfc(sqrt(t)) - e^-t * (t^(1/2)/(1/2)! + ... + t^((n-3)/2)/((n-3)/2)!)
    return 1.0 - std::erfc(std::sqrt(t)) - poisson_tail_series(0.5 * (n - 3), t);
}

namespace {

BoundResult cone_integral(const BoundQuery& q, BoundKind kind) {
    if (q.n < 2) throw std::invalid_argument("cone bounds need n >= 2");
    if (!(q.radius > 0.0)) throw std::invalid_argument("radius must be positive");
    if (!(q.power_per_dim > 0.0)) throw std::invalid_argument("power_per_dim must be positive");
    check_sigma(q.sigma2);
    const double np = q.n * q.power_per_dim;
    if (!(q.radius * q.radius < np)) {
        throw std::invalid_argument(
            "cone bounds require radius^2 < n * power_per_dim (the sphere must not "
            "contain the origin)");
    }

    const double sigma = std::sqrt(q.sigma2);
    const double axis = std::sqrt(np);
    const double slope = q.radius / std::sqrt(np - q.radius * q.radius);

    // Error probability = E_u[ survival(n-1, f(sigma*u)) ], u standard
    // normal. Integrating the survival side directly keeps tiny results
    // accurate in absolute terms.
    auto integrand = [&](double u) {
        const double f = slope * std::abs(sigma * u + axis);
        const double phi = kInvSqrt2Pi * std::exp(-0.5 * u * u);
        return phi * gauss_ball_survival(q.n - 1, f, q.sigma2);
    };

    const double span = 12.0;  // Gaussian tail beyond 12 sigma is ~1e-32
    const double vertex_u = -axis / sigma;  // kink of |.| in u units
    std::vector<double> knots = {-span, span};
    if (vertex_u > -span && vertex_u < span) knots.insert(knots.begin() + 1, vertex_u);

    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double piece_err = 0.0;
        total += gk::integrate(integrand, knots[i], knots[i + 1], 15, 1e-12, &piece_err);
        err += piece_err;
    }
    const double tail = std::erfc(span / std::numbers::sqrt2);  // mass outside [-span, span]

    BoundResult out;
    out.kind = kind;
    out.value = std::clamp(total, 0.0, 1.0);
    out.quadrature_abs_err = err + tail;
    return out;
}

}  // namespace

BoundResult covering_bound(const BoundQuery& query) {
    return cone_integral(query, BoundKind::Covering);
}

BoundResult effective_estimate(const BoundQuery& query) {
    return cone_integral(query, BoundKind::Effective);
}

BoundResult asymptotic_bound(int n, double radius, double sigma2) {
    if (n < 2) throw std::invalid_argument("asymptotic_bound needs n >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    BoundResult out;
    out.kind = BoundKind::Asymptotic;
    out.value = std::clamp(gauss_ball_survival(n - 1, radius, sigma2), 0.0, 1.0);
    out.quadrature_abs_err = 0.0;
    return out;
}

BoundResult tarokh_bound(int n, double effective_radius, double sigma2) {
    if (n < 1) throw std::invalid_argument("tarokh_bound needs n >= 1");
    if (!(effective_radius > 0.0)) throw std::invalid_argument("radius must be positive");
    BoundResult out;
    out.kind = BoundKind::Tarokh;
    out.value = std::clamp(gauss_ball_survival(n, effective_radius, sigma2), 0.0, 1.0);
    out.quadrature_abs_err = 0.0;
    return out;
}

}  // namespace latcode
