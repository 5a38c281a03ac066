// channel.hpp -- AWGN transmission, scaled-lattice decoders, WER estimation.
//
// Decode chain: scale the observation by alpha, quantize to the coding
// lattice, reduce to the coset message. Decoder variants differ in how
// alpha is chosen:
//
//   alpha1     one shot at alpha = 1
//   mmse       one shot at alpha = SNR / (1 + SNR)
//   genie      exhaustive alpha search; success if ANY candidate decodes to
//              the transmitted message (an oracle upper-performance decoder)
//   crc_retry  tries a short list of alphas, accepting the first candidate
//              whose embedded CRC checks out
//
// WER runs draw one Philox substream per trial index, so estimates are
// byte-reproducible for a fixed seed regardless of worker count; a run
// stops at max_errors errors (counted in trial order) or max_trials.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "latcode/nested_code.hpp"
#include "latcode/rng.hpp"

namespace latcode {

struct ChannelParams {
    double power_per_dim = 0.0;  // P of the code in use
    double sigma2 = 0.0;         // noise variance per dimension
    double snr = 0.0;            // linear P / sigma2
    double alpha_mmse = 0.0;     // snr / (1 + snr)

    static ChannelParams from_sigma2(double power_per_dim, double sigma2);
    static ChannelParams from_snr_db(double power_per_dim, double snr_db);
    double snr_db() const;
};

// Scaling-candidate grid [min, max] in steps of `step` (both endpoints
// included). Trial order: alpha_mmse first (when forced in), then 1.0,
// then grid points by increasing distance from alpha_mmse (ties toward the
// smaller alpha). Duplicates within 1e-12 are dropped.
struct AlphaGrid {
    double min = 0.5;
    double max = 1.5;
    double step = 0.01;
    bool include_mmse = true;

    std::vector<double> trial_order(double alpha_mmse) const;
};

// y = x + z with z ~ N(0, sigma2 I); consumes dim(x) Gaussian draws.
Eigen::VectorXd add_awgn(const Eigen::VectorXd& x, double sigma2, SubstreamRng& rng);

// encode + add_awgn.
Eigen::VectorXd transmit(const NestedCode& code, const Message& msg, const ChannelParams& ch,
                         SubstreamRng& rng);

// Does the line {a*y : a real} pass within distance r of x? Throws if y=0.
bool line_decodable(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double radius);

// Quantize alpha*y to the coding lattice and return its coset message.
Message decode_oneshot(const NestedCode& code, const Eigen::VectorXd& y, double alpha);

struct GenieResult {
    bool success = false;
    int attempts = 0;       // candidates tried (all, on failure)
    double alpha_used = 0;  // first successful alpha (0 on failure)
};

// Success iff some candidate alpha recovers `truth`.
GenieResult decode_genie(const NestedCode& code, const Eigen::VectorXd& y, const Message& truth,
                         const std::vector<double>& alphas);

struct CrcScheme {
    int parity_bits = 4;
    std::uint32_t poly = 0x3;  // x^4 + x + 1 (CRC-4-ITU) for the default width
};

// Embeds `parity_bits` of CRC into the low-order bits of the lowest-index
// message components. Every component carrying parity must have a
// power-of-two radix (config error otherwise); a component may hold parity
// in its low bits and payload in its remaining high bits. A uniformly
// wrong decode passes the check with probability exactly 2^-parity_bits.
class CrcCodec {
  public:
    CrcCodec(const NestedCode& code, CrcScheme scheme);

    // Number of leading components that carry at least one parity bit.
    int parity_slots() const { return static_cast<int>(parity_width_.size()); }
    const CrcScheme& scheme() const { return scheme_; }

    // Keeps the payload bits of `payload` (parity bits ignored) and writes
    // the payload's CRC into the parity bits.
    Message finalize(const Message& payload) const;
    bool check(const Message& msg) const;

    // Uniform over the payload bits, parity filled in.
    Message random_message(const NestedCode& code, SubstreamRng& rng) const;

  private:
    std::int64_t payload_part(int slot, std::int64_t value) const;
    std::uint32_t crc_of_payload(const Message& msg) const;

    CrcScheme scheme_;
    std::vector<int> parity_width_;  // parity bits in slot i, low bits first
    VecI64 radices_;
};

struct CrcRetryResult {
    bool accepted = false;
    Message message;    // accepted message (meaningful when accepted)
    int attempts = 0;   // candidates evaluated
};

CrcRetryResult decode_crc_retry(const NestedCode& code, const CrcCodec& codec,
                                const Eigen::VectorXd& y, const std::vector<double>& alphas);

enum class DecoderKind { Alpha1, Mmse, Genie, CrcRetry };

const char* decoder_kind_name(DecoderKind kind);
DecoderKind decoder_kind_from_name(const std::string& name);

struct DecoderSpec {
    DecoderKind kind = DecoderKind::Mmse;
    AlphaGrid grid;                  // genie only
    CrcScheme crc;                   // crc_retry only
    std::vector<double> crc_alphas;  // crc_retry candidates; empty selects
                                     // {alpha_mmse, 1.0, (1 + alpha_mmse)/2}
};

// Resolved alpha candidates for a decoder at a given channel.
std::vector<double> decoder_alphas(const DecoderSpec& spec, const ChannelParams& ch);

struct WerEstimate {
    std::string decoder;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double wer = 0.0;
    double ci95 = 0.0;           // 1.96 * sqrt(wer * (1 - wer) / trials)
    double mean_attempts = 0.0;  // alpha candidates evaluated per trial
    std::uint64_t seed = 0;
};

WerEstimate estimate_wer(const NestedCode& code, const ChannelParams& ch, const DecoderSpec& spec,
                         std::uint64_t max_trials, std::uint64_t max_errors, std::uint64_t seed,
                         unsigned threads = 0);

}  // namespace latcode
