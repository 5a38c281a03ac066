// lattice.hpp -- lattice descriptions and nearest-point quantizers.
//
// A lattice is the integer span of the columns of a full-rank generator
// matrix G. Built-in families use fixed scalings (column basis vectors):
//
//   name   n        det|G|      covering radius      quantizer
//   ----   -----    --------    ------------------   -------------------------
//   zn     any>=1   1           sqrt(n)/2            coordinate-wise rounding
//   a2     2        sqrt(3)/2   1/sqrt(3)            two rectangular cosets
//   dn     any>=2   2           1 (n<=3), sqrt(n)/2  round-all, flip worst coord
//   e8     8        1           1                    best of two dn-type cosets
//   bw16   16       4096        sqrt(6)              reduced-basis sphere search
//
// zn is the cubic lattice; a2 the hexagonal lattice with unit minimum
// distance; dn the checkerboard (even coordinate sum) lattice; e8 the
// unimodular Gosset lattice (d8 plus its half-integer coset); bw16 the
// Barnes-Wall lattice assembled from the Reed-Muller codes RM(1,4) and
// RM(3,4) as x = c1 + 2*c2 + 4*z, giving minimum squared norm 8.
// Covering radii of e8 and bw16 are fixed constants of these scalings and
// are re-verified against a deep-hole search in the test suite.
//
// Rounding ties (half-integers in zn-type steps) round away from zero.
// Exact two-point ties elsewhere resolve to the lexicographically smaller
// integer coefficient vector.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace latcode {

using VecI64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

class SphereDecoder;

// A lattice point carries both its real coordinates and its integer
// coefficients in the generator basis (coords == G * coeffs).
struct LatticePoint {
    Eigen::VectorXd coords;
    VecI64 coeffs;
};

class LatticeSpec {
  public:
    enum class Family { Zn, A2, Dn, E8, Bw16, Custom };

    // Built-in constructors. `dimension` applies to zn/dn only.
    static LatticeSpec zn(int dimension);
    static LatticeSpec a2();
    static LatticeSpec dn(int dimension);
    static LatticeSpec e8();
    static LatticeSpec bw16();

    // `name` is one of zn/a2/dn/e8/bw16 (zn/dn require `dimension` > 0).
    static LatticeSpec builtin(const std::string& name, int dimension = 0);

    // Arbitrary full-rank generator; quantized by generic sphere search.
    static LatticeSpec custom(std::string name, const Eigen::MatrixXd& generator);

    // Plain-text generator file: n, then n*n row-major reals.
    static LatticeSpec from_file(const std::string& path);

    const std::string& name() const { return name_; }
    Family family() const { return family_; }
    int dimension() const { return n_; }
    const Eigen::MatrixXd& generator() const { return gen_; }
    const Eigen::MatrixXd& generator_inverse() const { return gen_inv_; }

    // |det G|: volume of the fundamental (Voronoi) cell.
    double volume() const { return volume_; }

    // Radius of the ball whose volume equals the Voronoi cell volume.
    double effective_radius() const { return effective_radius_; }

    // Known exact covering radius; throws for custom lattices (use
    // estimate_covering_radius for a search-based lower estimate).
    double covering_radius() const;
    bool has_covering_radius() const { return covering_radius_.has_value(); }

    // Nearest lattice point to y (ties per the header rules).
    LatticePoint quantize(const Eigen::VectorXd& y) const;

    // y reduced into the fundamental Voronoi region: y - quantize(y).
    Eigen::VectorXd mod(const Eigen::VectorXd& y) const;

    LatticePoint point_from_coeffs(const VecI64& coeffs) const;

    // Integer coefficients of a vector already known to lie in the lattice
    // (|G*b - x| <= tol required; throws otherwise).
    VecI64 coeffs_of(const Eigen::VectorXd& x, double tol = 1e-9) const;

  private:
    LatticeSpec() = default;
    void finish_setup();

    std::string name_;
    Family family_ = Family::Custom;
    int n_ = 0;
    Eigen::MatrixXd gen_;
    Eigen::MatrixXd gen_inv_;
    double volume_ = 0.0;
    double effective_radius_ = 0.0;
    std::optional<double> covering_radius_;
    std::shared_ptr<const SphereDecoder> searcher_;  // bw16 / custom only
};

// Radius of an n-ball of the given volume.
double effective_radius_from_volume(int n, double volume);

// Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1).
double unit_ball_volume(int n);

struct DeepHoleSearchOptions {
    int restarts = 200;          // random ascent starts
    int steps = 120;             // subgradient-ascent steps per start
    std::uint64_t seed = 1;
    // Extra promising start points (e.g. known deep-hole candidates).
    std::vector<Eigen::VectorXd> candidates;
};

// Randomized lower estimate of the covering radius: subgradient ascent on
// dist(y, lattice) from random starts and supplied candidates, then a
// circumcenter polish on the equidistant nearest-neighbor set.
double estimate_covering_radius(const LatticeSpec& lattice, const DeepHoleSearchOptions& opts);

}  // namespace latcode
