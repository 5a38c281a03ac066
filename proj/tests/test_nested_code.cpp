#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "latcode/nested_code.hpp"
#include "latcode/rng.hpp"

using latcode::LatticeSpec;
using latcode::MatI64;
using latcode::Message;
using latcode::NestedCode;
using latcode::SubstreamRng;
using latcode::VecI64;

namespace {

MatI64 random_integer_matrix(SubstreamRng& rng, int n) {
    while (true) {
        MatI64 m(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                m(r, c) = static_cast<std::int64_t>(rng.next_below(11)) - 5;
            }
        }
        if (std::abs(m.cast<double>().determinant()) > 0.5) return m;
    }
}

}  // namespace

TEST_SUITE("nested_code") {
    TEST_CASE("smith decomposition: divisibility chain and unimodular factors") {
        SubstreamRng rng(21, 0);
        for (int n : {2, 3, 4, 5}) {
            for (int rep = 0; rep < 10; ++rep) {
                const MatI64 b = random_integer_matrix(rng, n);
                const auto snf = latcode::smith_normal_form(b);
                double prod = 1.0;
                for (int i = 0; i < n; ++i) {
                    CHECK(snf.diag[i] > 0);
                    if (i + 1 < n) CHECK(snf.diag[i + 1] % snf.diag[i] == 0);
                    prod *= static_cast<double>(snf.diag[i]);
                }
                // |det B| is preserved by unimodular row/column operations.
                CHECK(prod == doctest::Approx(std::abs(b.cast<double>().determinant())));
                CHECK(((snf.u * snf.u_inv) -
                       MatI64::Identity(n, n)).cwiseAbs().maxCoeff() == 0);
            }
        }
    }

    TEST_CASE("e8 rate-2 code: scale, radices, codebook size") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        CHECK(code.shaping_scale() == 4);
        CHECK(code.rate() == doctest::Approx(2.0));
        CHECK(code.codebook_size() == 65536);
        const VecI64& d = code.message_radices();
        std::int64_t prod = 1;
        for (int i = 0; i < 8; ++i) {
            prod *= d[i];
            if (i + 1 < 8) CHECK(d[i + 1] % d[i] == 0);
        }
        CHECK(prod == 65536);
        CHECK(code.power_per_dim() == doctest::Approx(16.0 / 12.0));
    }

    TEST_CASE("bw16 rate-2.25 code exists with a 2^36 codebook") {
        auto code = NestedCode::from_rate(LatticeSpec::bw16(), 2.25);
        CHECK(code.shaping_scale() == 8);
        CHECK(code.codebook_size() == (std::uint64_t{1} << 36));
        CHECK(code.rate() == doctest::Approx(2.25));
    }

    TEST_CASE("unachievable rates throw with nearby alternatives in the message") {
        try {
            (void)NestedCode::from_rate(LatticeSpec::e8(), 1.7);
            FAIL("expected a configuration error");
        } catch (const std::invalid_argument& ex) {
            const std::string what = ex.what();
            CHECK(what.find("rate") != std::string::npos);
        }
        // The hexagonal lattice admits no scaled cubic sublattice at all.
        CHECK_THROWS_AS((void)NestedCode::from_rate(LatticeSpec::a2(), 2.0),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)NestedCode::with_scale(LatticeSpec::a2(), 4),
                        std::invalid_argument);
    }

    TEST_CASE("full e8 codebook round-trips and stays inside the shaping cube") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const double half = 2.0;  // M/2
        Message msg = Message::Zero(8);
        std::set<std::string> seen;
        for (std::uint64_t k = 0; k < code.codebook_size(); ++k) {
            const Eigen::VectorXd x = code.encode(msg);
            CHECK(x.minCoeff() >= -half - 1e-12);
            CHECK(x.maxCoeff() < half + 1e-12);
            const Message back = code.decode_index(x);
            CHECK((back - msg).cwiseAbs().maxCoeff() == 0);
            std::ostringstream key;
            key << (2.0 * x).cast<std::int64_t>().transpose();  // e8 coords are half-integers
            seen.insert(key.str());
            for (int i = 0; i < 8; ++i) {  // mixed-radix increment
                if (++msg[i] < code.message_radices()[i]) break;
                msg[i] = 0;
            }
        }
        CHECK(seen.size() == code.codebook_size());
    }

    TEST_CASE("bw16 code round-trips on random messages") {
        auto code = NestedCode::from_rate(LatticeSpec::bw16(), 2.25);
        SubstreamRng rng(22, 0);
        for (int trial = 0; trial < 300; ++trial) {
            const Message msg = code.random_message(rng);
            const Eigen::VectorXd x = code.encode(msg);
            CHECK(x.minCoeff() >= -4.0 - 1e-12);
            CHECK(x.maxCoeff() < 4.0 + 1e-12);
            CHECK((code.decode_index(x) - msg).cwiseAbs().maxCoeff() == 0);
        }
    }

    TEST_CASE("decode_index is invariant under shaping-lattice shifts") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        SubstreamRng rng(23, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const Message msg = code.random_message(rng);
            Eigen::VectorXd x = code.encode(msg);
            for (int i = 0; i < 8; ++i) {
                x[i] += 4.0 * (static_cast<double>(rng.next_below(7)) - 3.0);
            }
            CHECK((code.decode_index(x) - msg).cwiseAbs().maxCoeff() == 0);
        }
    }

    TEST_CASE("message_of_coeffs equals the coordinate decode path") {
        auto code = NestedCode::from_rate(LatticeSpec::bw16(), 2.25);
        const auto& lat = code.lattice();
        SubstreamRng rng(24, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const Message msg = code.random_message(rng);
            Eigen::VectorXd x = code.encode(msg);
            const VecI64 coeffs = lat.coeffs_of(x);
            CHECK((code.message_of_coeffs(coeffs) - code.decode_index(x)).cwiseAbs().maxCoeff() ==
                  0);
        }
    }

    TEST_CASE("shaping_mod window is [-M/2, M/2) including the boundary rule") {
        auto code = NestedCode::with_scale(LatticeSpec::zn(2), 4);
        Eigen::VectorXd x(2);
        x << -2.0, 2.0;  // -M/2 stays, +M/2 wraps to -M/2
        const Eigen::VectorXd m = code.shaping_mod(x);
        CHECK(m[0] == -2.0);
        CHECK(m[1] == -2.0);
        CHECK((code.shaping_mod(m) - m).norm() == doctest::Approx(0.0));
    }

    TEST_CASE("encode validates message ranges") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        Message bad = Message::Zero(8);
        bad[7] = code.message_radices()[7];
        CHECK_THROWS_AS((void)code.encode(bad), std::invalid_argument);
        bad[7] = -1;
        CHECK_THROWS_AS((void)code.encode(bad), std::invalid_argument);
    }

    TEST_CASE("average power: second moment versus exact enumeration") {
        auto code = NestedCode::with_scale(LatticeSpec::zn(2), 4);
        CHECK(code.power_per_dim() == doctest::Approx(16.0 / 12.0));
        // Exact uniform power of {-2,-1,0,1}^2 is mean square (4+1+0+1)/4.
        CHECK(code.average_power(latcode::PowerMode::Empirical) == doctest::Approx(1.5));
        auto e8code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        const double emp = e8code.average_power(latcode::PowerMode::Empirical);
        // Second-moment approximation is within a few percent for M=4.
        CHECK(emp == doctest::Approx(e8code.power_per_dim()).epsilon(0.15));
    }

    TEST_CASE("random messages are uniform per component") {
        auto code = NestedCode::from_rate(LatticeSpec::e8(), 2.0);
        SubstreamRng rng(25, 0);
        const int n_trials = 20000;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
        for (int t = 0; t < n_trials; ++t) {
            mean += code.random_message(rng).cast<double>();
        }
        mean /= n_trials;
        for (int i = 0; i < 8; ++i) {
            const double d = static_cast<double>(code.message_radices()[i]);
            const double expected = (d - 1.0) / 2.0;
            const double sd = std::sqrt((d * d - 1.0) / 12.0 / n_trials);
            CHECK(std::abs(mean[i] - expected) < 5.0 * sd + 1e-12);
        }
    }
}
