#include "latcode/channel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latcode {

namespace {

constexpr double kAlphaDedupeTol = 1e-12;

bool same_message(const Message& a, const Message& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

void append_unique(std::vector<double>& out, double alpha) {
    for (double existing : out) {
        if (std::abs(existing - alpha) <= kAlphaDedupeTol) return;
    }
    out.push_back(alpha);
}

}  // namespace

ChannelParams ChannelParams::from_sigma2(double power_per_dim, double sigma2) {
    if (!(power_per_dim > 0.0) || !(sigma2 > 0.0)) {
        throw std::invalid_argument("ChannelParams: power and sigma2 must be positive");
    }
    ChannelParams ch;
    ch.power_per_dim = power_per_dim;
    ch.sigma2 = sigma2;
    ch.snr = power_per_dim / sigma2;
    ch.alpha_mmse = ch.snr / (1.0 + ch.snr);
    return ch;
}

ChannelParams ChannelParams::from_snr_db(double power_per_dim, double snr_db) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return from_sigma2(power_per_dim, power_per_dim / snr);
}

double ChannelParams::snr_db() const { return 10.0 * std::log10(snr); }

std::vector<double> AlphaGrid::trial_order(double alpha_mmse) const {
    if (!(step > 0.0) || !(max >= min)) {
        throw std::invalid_argument("AlphaGrid: requires step > 0 and max >= min");
    }
    std::vector<double> order;
    if (include_mmse) append_unique(order, alpha_mmse);
    append_unique(order, 1.0);

    const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) grid[k] = min + static_cast<double>(k) * step;
    std::stable_sort(grid.begin(), grid.end(), [alpha_mmse](double a, double b) {
        const double da = std::abs(a - alpha_mmse);
        const double db = std::abs(b - alpha_mmse);
        if (da != db) return da < db;
        return a < b;
    });
    order.reserve(order.size() + grid.size());
    for (double alpha : grid) append_unique(order, alpha);
    return order;
}

Eigen::VectorXd add_awgn(const Eigen::VectorXd& x, double sigma2, SubstreamRng& rng) {
    const double sigma = std::sqrt(sigma2);
    Eigen::VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = x[i] + sigma * rng.next_gaussian();
    return y;
}

Eigen::VectorXd transmit(const NestedCode& code, const Message& msg, const ChannelParams& ch,
                         SubstreamRng& rng) {
    return add_awgn(code.encode(msg), ch.sigma2, rng);
}

bool line_decodable(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double radius) {
    const double ynorm2 = y.squaredNorm();
    if (ynorm2 == 0.0) {
        throw std::invalid_argument("line_decodable: direction vector y must be nonzero");
    }
    const double proj = x.dot(y);
    const double dist2 = std::max(0.0, x.squaredNorm() - proj * proj / ynorm2);
    return std::sqrt(dist2) <= radius;
}

Message decode_oneshot(const NestedCode& code, const Eigen::VectorXd& y, double alpha) {
    const LatticePoint nearest = code.lattice().quantize(alpha * y);
    return code.message_of_coeffs(nearest.coeffs);
}

GenieResult decode_genie(const NestedCode& code, const Eigen::VectorXd& y, const Message& truth,
                         const std::vector<double>& alphas) {
    GenieResult res;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (same_message(decode_oneshot(code, y, alphas[i]), truth)) {
            res.success = true;
            res.attempts = static_cast<int>(i) + 1;
            res.alpha_used = alphas[i];
            return res;
        }
    }
    res.attempts = static_cast<int>(alphas.size());
    return res;
}

namespace {

// Exact log2 of a power of two; -1 for anything else.
int exact_log2(std::int64_t value) {
    if (value < 1 || (value & (value - 1)) != 0) return -1;
    int bits = 0;
    while ((std::int64_t{1} << bits) < value) ++bits;
    return bits;
}

}  // namespace

CrcCodec::CrcCodec(const NestedCode& code, CrcScheme scheme)
    : scheme_(scheme), radices_(code.message_radices()) {
    if (scheme_.parity_bits < 1 || scheme_.parity_bits > 20) {
        throw std::invalid_argument("CrcCodec: parity_bits must lie in [1, 20]");
    }
    int remaining = scheme_.parity_bits;
    for (int i = 0; i < radices_.size() && remaining > 0; ++i) {
        const int slot_bits = exact_log2(radices_[i]);
        if (slot_bits < 0) {
            std::ostringstream err;
            err << "CrcCodec: message component " << i << " has radix " << radices_[i]
                << ", but parity bits can only occupy power-of-two radices";
            throw std::invalid_argument(err.str());
        }
        const int used = std::min(slot_bits, remaining);
        parity_width_.push_back(used);
        remaining -= used;
    }
    if (remaining > 0) {
        std::ostringstream err;
        err << "CrcCodec: " << scheme_.parity_bits
            << " parity bits exceed the index space of the code (message holds only "
            << (scheme_.parity_bits - remaining) << ")";
        throw std::invalid_argument(err.str());
    }
}

std::int64_t CrcCodec::payload_part(int slot, std::int64_t value) const {
    if (slot < static_cast<int>(parity_width_.size())) return value >> parity_width_[slot];
    return value;
}

std::uint32_t CrcCodec::crc_of_payload(const Message& msg) const {
    const int w = scheme_.parity_bits;
    const std::uint32_t mask = (std::uint32_t{1} << w) - 1;
    const std::uint32_t top = std::uint32_t{1} << (w - 1);
    const std::uint32_t poly = scheme_.poly & mask;
    std::uint32_t reg = 0;
    for (int slot = 0; slot < msg.size(); ++slot) {
        const auto value = static_cast<std::uint64_t>(payload_part(slot, msg[slot]));
        for (int byte = 0; byte < 8; ++byte) {
            const auto b = static_cast<std::uint32_t>((value >> (8 * byte)) & 0xFF);
            for (int bit = 7; bit >= 0; --bit) {
                const std::uint32_t feedback = ((reg & top) ? 1u : 0u) ^ ((b >> bit) & 1u);
                reg = (reg << 1) & mask;
                if (feedback) reg ^= poly;
            }
        }
    }
    return reg;
}

Message CrcCodec::finalize(const Message& payload) const {
    if (payload.size() != radices_.size()) {
        throw std::invalid_argument("CrcCodec: message size mismatch");
    }
    Message msg = payload;
    std::uint32_t value = crc_of_payload(msg);  // parity bits do not feed the CRC
    for (std::size_t i = 0; i < parity_width_.size(); ++i) {
        const int width = parity_width_[i];
        const std::int64_t chunk = static_cast<std::int64_t>(value) & ((1 << width) - 1);
        msg[static_cast<int>(i)] =
            (payload_part(static_cast<int>(i), payload[static_cast<int>(i)]) << width) | chunk;
        value >>= width;
    }
    return msg;
}

bool CrcCodec::check(const Message& msg) const {
    if (msg.size() != radices_.size()) return false;
    std::uint32_t value = crc_of_payload(msg);
    for (std::size_t i = 0; i < parity_width_.size(); ++i) {
        const int width = parity_width_[i];
        const std::int64_t chunk = static_cast<std::int64_t>(value) & ((1 << width) - 1);
        if ((msg[static_cast<int>(i)] & ((1 << width) - 1)) != chunk) return false;
        value >>= width;
    }
    return true;
}

Message CrcCodec::random_message(const NestedCode& code, SubstreamRng& rng) const {
    (void)code;
    Message msg = Message::Zero(radices_.size());
    for (int i = 0; i < msg.size(); ++i) {
        const int width = (i < static_cast<int>(parity_width_.size())) ? parity_width_[i] : 0;
        const std::int64_t payload_radix = radices_[i] >> width;
        const std::int64_t draw =
            payload_radix > 1
                ? static_cast<std::int64_t>(
                      rng.next_below(static_cast<std::uint64_t>(payload_radix)))
                : 0;
        msg[i] = draw << width;  // payload in the high bits, parity zeroed
    }
    return finalize(msg);
}

CrcRetryResult decode_crc_retry(const NestedCode& code, const CrcCodec& codec,
                                const Eigen::VectorXd& y, const std::vector<double>& alphas) {
    CrcRetryResult res;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        Message candidate = decode_oneshot(code, y, alphas[i]);
        res.attempts = static_cast<int>(i) + 1;
        if (codec.check(candidate)) {
            res.accepted = true;
            res.message = std::move(candidate);
            return res;
        }
    }
    res.attempts = static_cast<int>(alphas.size());
    return res;
}

const char* decoder_kind_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::Alpha1: return "alpha1";
        case DecoderKind::Mmse: return "mmse";
        case DecoderKind::Genie: return "genie";
        case DecoderKind::CrcRetry: return "crc_retry";
    }
    return "unknown";
}

DecoderKind decoder_kind_from_name(const std::string& name) {
    if (name == "alpha1") return DecoderKind::Alpha1;
    if (name == "mmse") return DecoderKind::Mmse;
    if (name == "genie") return DecoderKind::Genie;
    if (name == "crc_retry") return DecoderKind::CrcRetry;
    throw std::invalid_argument("unknown decoder '" + name +
                                "' (expected alpha1, mmse, genie, or crc_retry)");
}

std::vector<double> decoder_alphas(const DecoderSpec& spec, const ChannelParams& ch) {
    switch (spec.kind) {
        case DecoderKind::Alpha1: return {1.0};
        case DecoderKind::Mmse: return {ch.alpha_mmse};
        case DecoderKind::Genie: return spec.grid.trial_order(ch.alpha_mmse);
        case DecoderKind::CrcRetry: {
            std::vector<double> alphas;
            if (spec.crc_alphas.empty()) {
                append_unique(alphas, ch.alpha_mmse);
                append_unique(alphas, 1.0);
                append_unique(alphas, 0.5 * (1.0 + ch.alpha_mmse));
            } else {
                for (double alpha : spec.crc_alphas) append_unique(alphas, alpha);
            }
            return alphas;
        }
    }
    throw std::invalid_argument("decoder_alphas: unknown decoder kind");
}

WerEstimate estimate_wer(const NestedCode& code, const ChannelParams& ch, const DecoderSpec& spec,
                         std::uint64_t max_trials, std::uint64_t max_errors, std::uint64_t seed,
                         unsigned threads) {
    if (max_trials == 0) throw std::invalid_argument("estimate_wer: max_trials must be >= 1");
    if (max_errors == 0) throw std::invalid_argument("estimate_wer: max_errors must be >= 1");

    const std::vector<double> alphas = decoder_alphas(spec, ch);
    const bool use_crc = (spec.kind == DecoderKind::CrcRetry);
    const CrcCodec* codec = nullptr;
    std::unique_ptr<CrcCodec> codec_storage;
    if (use_crc) {
        codec_storage = std::make_unique<CrcCodec>(code, spec.crc);
        codec = codec_storage.get();
    }

    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());

    // Trials are evaluated in fixed blocks and reduced in trial order, so
    // the stopping point (and therefore every reported number) does not
    // depend on the worker count.
    constexpr std::uint64_t kBlock = 8192;
    std::vector<std::uint8_t> block_error(kBlock);
    std::vector<std::uint32_t> block_attempts(kBlock);

    auto run_trial = [&](std::uint64_t trial_index, std::uint8_t& error_out,
                         std::uint32_t& attempts_out) {
        SubstreamRng rng(seed, trial_index);
        const Message msg = use_crc ? codec->random_message(code, rng) : code.random_message(rng);
        const Eigen::VectorXd y = transmit(code, msg, ch, rng);
        switch (spec.kind) {
            case DecoderKind::Alpha1:
            case DecoderKind::Mmse: {
                error_out = same_message(decode_oneshot(code, y, alphas[0]), msg) ? 0 : 1;
                attempts_out = 1;
                break;
            }
            case DecoderKind::Genie: {
                const GenieResult g = decode_genie(code, y, msg, alphas);
                error_out = g.success ? 0 : 1;
                attempts_out = static_cast<std::uint32_t>(g.attempts);
                break;
            }
            case DecoderKind::CrcRetry: {
                const CrcRetryResult r = decode_crc_retry(code, *codec, y, alphas);
                error_out = (r.accepted && same_message(r.message, msg)) ? 0 : 1;
                attempts_out = static_cast<std::uint32_t>(r.attempts);
                break;
            }
        }
    };

    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    std::uint64_t attempts_total = 0;
    bool done = false;

    for (std::uint64_t base = 0; base < max_trials && !done; base += kBlock) {
        const std::uint64_t count = std::min<std::uint64_t>(kBlock, max_trials - base);
        auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t t = lo; t < hi; ++t) {
                run_trial(base + t, block_error[t], block_attempts[t]);
            }
        };
        if (workers <= 1 || count < 2 * workers) {
            run_range(0, count);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            const std::uint64_t chunk = (count + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                const std::uint64_t lo = std::min<std::uint64_t>(count, w * chunk);
                const std::uint64_t hi = std::min<std::uint64_t>(count, lo + chunk);
                if (lo < hi) pool.emplace_back(run_range, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        for (std::uint64_t t = 0; t < count; ++t) {
            ++trials;
            attempts_total += block_attempts[t];
            if (block_error[t]) {
                ++errors;
                if (errors >= max_errors) {
                    done = true;
                    break;
                }
            }
        }
    }

    WerEstimate est;
    est.decoder = decoder_kind_name(spec.kind);
    est.trials = trials;
    est.errors = errors;
    est.wer = static_cast<double>(errors) / static_cast<double>(trials);
    est.ci95 = 1.96 * std::sqrt(est.wer * (1.0 - est.wer) / static_cast<double>(trials));
    est.mean_attempts = static_cast<double>(attempts_total) / static_cast<double>(trials);
    est.seed = seed;
    return est;
}

}  // namespace latcode
