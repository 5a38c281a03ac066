// sphere_decoder.hpp -- exact closest-point search for arbitrary generators.
//
// Preprocessing: LLL reduction of the generator (speed only; correctness
// does not depend on it), then QR so the residual accumulates one
// coordinate per level. Search: depth-first Schnorr-Euchner enumeration
// seeded with the Babai point, zig-zagging outward per level and shrinking
// the radius on every improvement. Exact ties prefer the lexicographically
// smaller coefficient vector (in the original, unreduced basis).

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "latcode/lattice.hpp"

namespace latcode {

class SphereDecoder {
  public:
    explicit SphereDecoder(const Eigen::MatrixXd& generator);

    // Integer coefficients (original basis) of the nearest lattice point.
    VecI64 nearest_coeffs(const Eigen::VectorXd& y) const;

    const Eigen::MatrixXd& reduced_basis() const { return reduced_; }

  private:
    int n_;
    Eigen::MatrixXd reduced_;           // G * T, LLL-reduced columns
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> transform_;  // T
    Eigen::MatrixXd q_;                 // orthonormal factor of reduced_
    Eigen::MatrixXd r_;                 // upper triangular, positive diagonal
};

}  // namespace latcode
