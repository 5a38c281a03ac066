#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "latcode/channel.hpp"
#include "latcode/lattice.hpp"
#include "latcode/nested_code.hpp"
#include "latcode/rng.hpp"

using latcode::AlphaGrid;
using latcode::ChannelParams;
using latcode::CrcCodec;
using latcode::CrcScheme;
using latcode::DecoderKind;
using latcode::DecoderSpec;
using latcode::LatticeSpec;
using latcode::Message;
using latcode::NestedCode;
using latcode::SubstreamRng;

TEST_SUITE("channel") {
    TEST_CASE("channel parameters: SNR conversions and MMSE coefficient") {
        const auto ch = ChannelParams::from_snr_db(4.0 / 3.0, 17.0);
        CHECK(ch.snr_db() == doctest::Approx(17.0));
        CHECK(ch.snr == doctest::Approx(std::pow(10.0, 1.7)));
        CHECK(ch.alpha_mmse == doctest::Approx(ch.snr / (1.0 + ch.snr)));
        CHECK(ch.sigma2 == doctest::Approx(ch.power_per_dim / ch.snr));
        CHECK_THROWS(ChannelParams::from_sigma2(0.0, 1.0));
        CHECK_THROWS(ChannelParams::from_sigma2(1.0, -1.0));
    }

    TEST_CASE("alpha grid ordering: mmse first, then 1.0, then by distance") {
        AlphaGrid grid;
        const double mmse = 0.9174;
        const auto order = grid.trial_order(mmse);
        REQUIRE(order.size() >= 100);
        CHECK(order[0] == doctest::Approx(mmse));
        CHECK(order[1] == 1.0);
        // Remaining candidates never decrease in distance from the mmse value.
        for (std::size_t i = 3; i < order.size(); ++i) {
            CHECK(std::abs(order[i] - mmse) >= std::abs(order[i - 1] - mmse) - 1e-12);
        }
        // Both grid edges eventually appear; no duplicates anywhere.
        CHECK(std::count_if(order.begin(), order.end(),
                            [](double a) { return std::abs(a - 0.5) < 1e-12; }) == 1);
        CHECK(std::count_if(order.begin(), order.end(),
                            [](double a) { return std::abs(a - 1.5) < 1e-12; }) == 1);
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                CHECK(std::abs(order[i] - order[j]) > 1e-12);
            }
        }

        AlphaGrid no_mmse = grid;
        no_mmse.include_mmse = false;
        const auto plain = no_mmse.trial_order(mmse);
        CHECK(plain[0] == 1.0);
        // 0.92 is on the grid; the forced-in exact mmse value is not.
        CHECK(std::count_if(plain.begin(), plain.end(),
                            [&](double a) { return std::abs(a - mmse) < 1e-12; }) == 0);
    }

    TEST_CASE("line decodability matches the explicit minimum over scalings") {
        SubstreamRng rng(41, 0);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd x(4), y(4);
            for (int i = 0; i < 4; ++i) {
                x[i] = 3.0 * (2.0 * rng.next_unit() - 1.0);
                y[i] = 3.0 * (2.0 * rng.next_unit() - 1.0);
            }
            if (y.norm() < 1e-6) continue;
            // Dense sweep around the analytic optimum alpha.
            const double alpha_star = x.dot(y) / y.squaredNorm();
            double best = 1e300;
            for (double a = alpha_star - 1.0; a <= alpha_star + 1.0; a += 1e-4) {
                best = std::min(best, (a * y - x).norm());
            }
            const double analytic =
                std::sqrt(std::max(0.0, x.squaredNorm() -
                                            x.dot(y) * x.dot(y) / y.squaredNorm()));
            CHECK(analytic == doctest::Approx(best).epsilon(1e-6));
            const double r = analytic + (trial % 2 ? 1e-3 : -1e-3);
            if (r > 0.0) {
                CHECK(latcode::line_decodable(x, y, r) == (analytic <= r));
            }
            // Scaling y does not change the line.
            CHECK(latcode::line_decodable(x, 7.0 * y, analytic + 1e-3));
        }
        Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
        CHECK_THROWS_AS((void)latcode::line_decodable(x, Eigen::VectorXd::Zero(4), 1.0),
                        std::invalid_argument);
    }

    TEST_CASE("one-shot decode equals the literal quantize-reduce-index chain") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 15.0);
        SubstreamRng rng(42, 0);
        for (int trial = 0; trial < 300; ++trial) {
            const Message msg = code.random_message(rng);
            const Eigen::VectorXd y = latcode::transmit(code, msg, ch, rng);
            for (double alpha : {ch.alpha_mmse, 1.0, 0.8}) {
                const Message fast = latcode::decode_oneshot(code, y, alpha);
                const auto point = code.lattice().quantize(alpha * y);
                const Message literal = code.decode_index(code.shaping_mod(point.coords));
                CHECK((fast - literal).cwiseAbs().maxCoeff() == 0);
            }
        }
    }

    TEST_CASE("genie decoder: oracle success is a superset of one-shot success") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 16.0);
        DecoderSpec spec;
        spec.kind = DecoderKind::Genie;
        const auto alphas = latcode::decoder_alphas(spec, ch);
        SubstreamRng rng(43, 0);
        int genie_errors = 0;
        int mmse_errors = 0;
        int rescued = 0;
        for (int trial = 0; trial < 4000; ++trial) {
            const Message msg = code.random_message(rng);
            const Eigen::VectorXd y = latcode::transmit(code, msg, ch, rng);
            const bool mmse_ok =
                (latcode::decode_oneshot(code, y, ch.alpha_mmse) - msg).cwiseAbs().maxCoeff() == 0;
            const auto genie = latcode::decode_genie(code, y, msg, alphas);
            if (mmse_ok) {
                CHECK(genie.success);
                CHECK(genie.attempts == 1);
                CHECK(genie.alpha_used == doctest::Approx(ch.alpha_mmse));
            }
            genie_errors += !genie.success;
            mmse_errors += !mmse_ok;
            rescued += (!mmse_ok && genie.success);
            if (!genie.success) CHECK(genie.attempts == static_cast<int>(alphas.size()));
        }
        CHECK(genie_errors <= mmse_errors);
        CHECK(rescued > 0);  // at 16 dB some one-shot failures are recoverable
    }

    TEST_CASE("crc parity layout on the e8 code") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const CrcCodec codec(code, CrcScheme{});
        // Radices (2,4,4,...): 1 + 2 + 1 parity bits across three components.
        CHECK(codec.parity_slots() == 3);
        SubstreamRng rng(44, 0);
        for (int trial = 0; trial < 500; ++trial) {
            const Message msg = codec.random_message(code, rng);
            for (int i = 0; i < 8; ++i) REQUIRE(msg[i] < code.message_radices()[i]);
            CHECK(codec.check(msg));
            // Flipping any payload bit of the high components must be caught.
            Message tampered = msg;
            const int slot = 3 + static_cast<int>(rng.next_below(5));
            tampered[slot] ^= std::int64_t{1} << rng.next_below(2);
            CHECK_FALSE(codec.check(tampered));
        }
    }

    TEST_CASE("crc configuration errors") {
        auto z4 = NestedCode::with_scale(LatticeSpec::zn(4), 4);  // 8 index bits
        CHECK_NOTHROW(CrcCodec(z4, CrcScheme{}));
        CHECK_THROWS_AS(CrcCodec(z4, CrcScheme{9, 0x3}), std::invalid_argument);
        CHECK_THROWS_AS(CrcCodec(z4, CrcScheme{0, 0x3}), std::invalid_argument);
        auto z3 = NestedCode::with_scale(LatticeSpec::zn(2), 3);  // radix 3: no bit space
        CHECK_THROWS_AS(CrcCodec(z3, CrcScheme{}), std::invalid_argument);
    }

    TEST_CASE("crc retry accepts the truth through the first valid candidate") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const CrcCodec codec(code, CrcScheme{});
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 30.0);
        DecoderSpec spec;
        spec.kind = DecoderKind::CrcRetry;
        const auto alphas = latcode::decoder_alphas(spec, ch);
        REQUIRE(alphas.size() == 3);
        SubstreamRng rng(45, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const Message msg = codec.random_message(code, rng);
            const Eigen::VectorXd y = latcode::transmit(code, msg, ch, rng);
            const auto res = latcode::decode_crc_retry(code, codec, y, alphas);
            REQUIRE(res.accepted);
            CHECK(res.attempts == 1);  // 30 dB: the mmse candidate is correct
            CHECK((res.message - msg).cwiseAbs().maxCoeff() == 0);
        }
    }

    TEST_CASE("WER estimation is reproducible and thread-count independent") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 15.0);
        DecoderSpec spec;
        spec.kind = DecoderKind::Mmse;
        const auto one = latcode::estimate_wer(code, ch, spec, 20000, 1u << 30, 99, 1);
        const auto three = latcode::estimate_wer(code, ch, spec, 20000, 1u << 30, 99, 3);
        CHECK(one.trials == three.trials);
        CHECK(one.errors == three.errors);
        CHECK(one.wer == three.wer);
        CHECK(one.mean_attempts == three.mean_attempts);
        CHECK(one.errors > 0);
    }

    TEST_CASE("WER estimation stops exactly at the error budget") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 10.0);
        DecoderSpec spec;
        spec.kind = DecoderKind::Alpha1;
        const auto a = latcode::estimate_wer(code, ch, spec, 1u << 20, 25, 7, 1);
        const auto b = latcode::estimate_wer(code, ch, spec, 1u << 20, 25, 7, 4);
        CHECK(a.errors == 25);
        CHECK(a.trials < (1u << 20));
        CHECK(a.trials == b.trials);
        CHECK(a.ci95 == doctest::Approx(1.96 * std::sqrt(a.wer * (1 - a.wer) /
                                                         static_cast<double>(a.trials))));
    }

    TEST_CASE("paired decoders: genie WER never exceeds mmse WER on a shared seed") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const auto ch = ChannelParams::from_snr_db(code.power_per_dim(), 15.5);
        DecoderSpec mmse;
        mmse.kind = DecoderKind::Mmse;
        DecoderSpec genie;
        genie.kind = DecoderKind::Genie;
        const auto em = latcode::estimate_wer(code, ch, mmse, 30000, 1u << 30, 5, 2);
        const auto eg = latcode::estimate_wer(code, ch, genie, 30000, 1u << 30, 5, 2);
        CHECK(em.trials == eg.trials);
        CHECK(eg.errors <= em.errors);
        CHECK(eg.mean_attempts >= 1.0);
    }
}
