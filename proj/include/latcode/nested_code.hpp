// nested_code.hpp -- nested lattice codes with hypercube shaping.
//
// Codewords are the points of a coding lattice L reduced into the cube
// [-M/2, M/2)^n, i.e. coset leaders of L / M*Z^n. This requires the shaping
// lattice M*Z^n to be a sublattice of L. Messages index the quotient group
// through its invariant-factor decomposition: the integer matrix
// B = G^{-1} * M satisfies U*B*V = diag(d_1..d_n) for unimodular U, V, and
// the map m -> G * (U^{-1} m) mod M*Z^n is a bijection from
// Z_{d_1} x ... x Z_{d_n} onto the codebook.
//
//   rate  R = (1/n) log2(M^n / det L) = (1/n) log2(prod d_i)
//   power P = M^2 / 12 per dimension (second moment of the shaping cube)

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "latcode/lattice.hpp"
#include "latcode/rng.hpp"

namespace latcode {

using Message = VecI64;
using MatI64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class PowerMode { SecondMoment, Empirical };

class NestedCode {
  public:
    // Solve M from the rate equation; throws (naming the nearest achievable
    // rates) when no integer M with M*Z^n inside the lattice matches `rate`.
    static NestedCode from_rate(const LatticeSpec& coding, double rate);

    // Explicit shaping scale M >= 1; throws unless M*Z^n is a sublattice.
    static NestedCode with_scale(const LatticeSpec& coding, std::int64_t m_scale);

    const LatticeSpec& lattice() const { return coding_; }
    int dimension() const { return coding_.dimension(); }
    std::int64_t shaping_scale() const { return m_scale_; }
    double rate() const { return rate_; }

    // Uniform-message average power per dimension. SecondMoment returns
    // M^2/12; Empirical averages |x|^2/n over the enumerated codebook
    // (only permitted up to 2^24 codewords).
    double average_power(PowerMode mode = PowerMode::SecondMoment) const;
    double power_per_dim() const { return average_power(PowerMode::SecondMoment); }

    // Invariant factors d_1 | d_2 | ... | d_n; message component i ranges
    // over [0, d_i).
    const VecI64& message_radices() const { return radices_; }
    std::uint64_t codebook_size() const { return codebook_size_; }

    // Message -> coset leader with coordinates in [-M/2, M/2).
    Eigen::VectorXd encode(const Message& msg) const;

    // Any point of the coding lattice -> its coset's message (tolerance
    // 1e-9 on lattice membership).
    Message decode_index(const Eigen::VectorXd& point) const;

    // Same map in coefficient space: basis coefficients of any coset
    // representative -> message, exactly ((U b) mod d). Shaping shifts the
    // coefficient vector by a multiple of G^{-1} M, which this mod absorbs.
    Message message_of_coeffs(const VecI64& coeffs) const;

    Message random_message(SubstreamRng& rng) const;

    // Reduce coordinates into the shaping cube [-M/2, M/2)^n (acts on the
    // shaping lattice only; the result stays in the coding lattice when the
    // input was a lattice point).
    Eigen::VectorXd shaping_mod(const Eigen::VectorXd& x) const;

  private:
    NestedCode(LatticeSpec coding, std::int64_t m_scale);

    LatticeSpec coding_;
    std::int64_t m_scale_ = 0;
    double rate_ = 0.0;
    VecI64 radices_;
    std::uint64_t codebook_size_ = 0;
    MatI64 unimodular_;      // U
    MatI64 unimodular_inv_;  // U^{-1}
};

// Invariant-factor (Smith) decomposition U * B * V = diag(d) with d_i > 0
// and d_i | d_{i+1}. Only U and U^{-1} are tracked; V is discarded.
struct SmithResult {
    MatI64 u;
    MatI64 u_inv;
    VecI64 diag;
};
SmithResult smith_normal_form(const MatI64& matrix);

}  // namespace latcode
