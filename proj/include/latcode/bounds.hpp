// bounds.hpp -- closed-form and quadrature word-error-rate bounds.
//
// Setting: x is a fixed vector with |x|^2 = n * P, observed as y = x + z
// with z ~ N(0, sigma2 * I_n). A scaling-search decoder succeeds whenever
// the line {a*y : a real} passes within distance r of x. The decodable
// region is therefore the double cone tangent to the radius-r sphere
// centered at x, with vertex at the origin-facing distance sqrt(n*P); its
// cross-section radius at signed axial offset z from x is
//
//   f(z) = r * |z + sqrt(n*P)| / sqrt(n*P - r^2),        (needs r^2 < n*P)
//
// and the miss probability is the Gaussian average over z of the chance
// that the remaining (n-1)-dimensional noise lands outside the radius-f(z)
// cross-section.
//
//   covering_bound    r = covering radius: true lower bound on the error
//                     probability of ANY decoder of this structure.
//   effective_estimate r = effective radius: same integral, an estimate.
//   asymptotic_bound  the n*P -> infinity limit (cone becomes a cylinder).
//   tarokh_bound      P(|z| > r) in n dimensions: the classic sphere lower
//                     bound evaluated at the effective radius.

#pragma once

#include <string>

namespace latcode {

enum class BoundKind { Covering, Effective, Asymptotic, Tarokh };

const char* bound_kind_name(BoundKind kind);

struct BoundQuery {
    int n = 0;                 // ambient dimension, >= 2
    double radius = 0.0;       // sphere radius r > 0
    double power_per_dim = 0.0;  // P, with r^2 < n*P
    double sigma2 = 0.0;       // noise variance per dimension
};

struct BoundResult {
    double value = 0.0;              // clamped to [0, 1]
    double quadrature_abs_err = 0.0;  // 0 for closed forms
    BoundKind kind = BoundKind::Covering;
};

// P(|z| > r) for z standard-normal in `dims` dimensions scaled by sigma;
// evaluated by the finite chi-square tail series with t = r^2 / (2 sigma2).
double gauss_ball_survival(int dims, double radius, double sigma2);

// Probability that an (n-1)-dimensional Gaussian cross-section lands inside
// a ball of radius r (closed form; complementary to gauss_ball_survival at
// dims = n-1).
double ps_closed_form(int n, double radius, double sigma2);

BoundResult covering_bound(const BoundQuery& query);
BoundResult effective_estimate(const BoundQuery& query);

// Large-power limit of the cone integral: 1 - ps_closed_form(n, r, sigma2).
BoundResult asymptotic_bound(int n, double radius, double sigma2);

BoundResult tarokh_bound(int n, double effective_radius, double sigma2);

}  // namespace latcode
