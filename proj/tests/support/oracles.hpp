// Independent reference implementations used to cross-check the library:
// brute-force nearest-point searches by bounded enumeration, a coset
// enumeration for the 16-dimensional Reed-Muller construction, and radial
// quadrature for Gaussian ball probabilities. These deliberately avoid the
// library's fast algorithms.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "latcode/lattice.hpp"

namespace oracle {

// Nearest point of D_n = {z integer, sum(z) even} by enumerating the
// integer box within L-inf distance 2 of y (the optimum always lies there).
Eigen::VectorXd dn_nearest(const Eigen::VectorXd& y);

// Nearest point of E8 = D8 union (D8 + 1/2) by per-coset box enumeration.
Eigen::VectorXd e8_nearest(const Eigen::VectorXd& y);

// Nearest point of the hexagonal lattice with basis (1,0), (1/2, sqrt3/2),
// by enumerating integer coefficient pairs near the solved coordinates.
Eigen::VectorXd a2_nearest(const Eigen::VectorXd& y);

// Exact nearest point of the 16-dim Reed-Muller lattice via enumeration of
// all 2^20 cosets modulo 4Z^16 (per-coordinate distance tables).
class Bw16CosetOracle {
  public:
    Bw16CosetOracle();
    Eigen::VectorXd nearest(const Eigen::VectorXd& y) const;

    // Number of minimal-norm lattice vectors and that minimal squared norm.
    std::pair<std::int64_t, double> kissing() const;

  private:
    // Coset representatives r in {0,1,2,3}^16: r = c1 + 2*c2 with c1 in the
    // first-order and c2 in the third-order binary Reed-Muller code.
    std::vector<std::array<std::uint8_t, 16>> rm1_;
    std::vector<std::array<std::uint8_t, 16>> rm3_;
};

// P(|z| <= r) for z standard-normal-like in `dims` dimensions with variance
// sigma2 per coordinate, by adaptive quadrature of the radial density.
double ball_probability_radial(int dims, double radius, double sigma2);

}  // namespace oracle
