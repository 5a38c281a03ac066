#include "latcode/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "latcode/rng.hpp"
#include "latcode/sphere_decoder.hpp"

namespace latcode {

namespace {

// std::round implements the documented tie rule: halves round away from zero.
inline double round_tie_away(double v) { return std::round(v); }

Eigen::VectorXd round_each(const Eigen::VectorXd& y) {
    Eigen::VectorXd r(y.size());
    for (int i = 0; i < y.size(); ++i) r[i] = round_tie_away(y[i]);
    return r;
}

// Checkerboard rule: round every coordinate; if the coordinate sum is odd,
// re-round the worst coordinate (largest rounding error, lowest index on
// equal error) to the other side.
Eigen::VectorXd quantize_dn_coords(const Eigen::VectorXd& y) {
    Eigen::VectorXd r = round_each(y);
    long long sum = 0;
    for (int i = 0; i < y.size(); ++i) sum += static_cast<long long>(r[i]);
    if (sum % 2 != 0) {
        int worst = 0;
        double worst_err = -1.0;
        for (int i = 0; i < y.size(); ++i) {
            const double err = std::abs(y[i] - r[i]);
            if (err > worst_err) {
                worst_err = err;
                worst = i;
            }
        }
        r[worst] += (y[worst] >= r[worst]) ? 1.0 : -1.0;
    }
    return r;
}

Eigen::VectorXd quantize_e8_coords(const Eigen::VectorXd& y) {
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(y.size(), 0.5);
    const Eigen::VectorXd a = quantize_dn_coords(y);
    const Eigen::VectorXd b = quantize_dn_coords(y - half) + half;
    // Equal distances prefer the integer-coordinate branch.
    return ((y - a).squaredNorm() <= (y - b).squaredNorm()) ? a : b;
}

// Hexagonal lattice as two rectangular cosets: Z(1,0) + Z(0,sqrt(3)),
// offset by (1/2, sqrt(3)/2). Each coset is quantized coordinate-wise.
Eigen::VectorXd quantize_a2_coords(const Eigen::VectorXd& y) {
    const double s3 = std::numbers::sqrt3;
    Eigen::VectorXd a(2), b(2);
    a[0] = round_tie_away(y[0]);
    a[1] = s3 * round_tie_away(y[1] / s3);
    b[0] = 0.5 + round_tie_away(y[0] - 0.5);
    b[1] = s3 / 2.0 + s3 * round_tie_away((y[1] - s3 / 2.0) / s3);
    return ((y - a).squaredNorm() <= (y - b).squaredNorm()) ? a : b;
}

}  // namespace

double unit_ball_volume(int n) {
    return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

double effective_radius_from_volume(int n, double volume) {
    if (n < 1 || volume <= 0.0) {
        throw std::invalid_argument("effective radius needs n >= 1 and volume > 0");
    }
    return std::exp((std::log(volume) + std::lgamma(0.5 * n + 1.0) -
                     0.5 * n * std::log(std::numbers::pi)) /
                    n);
}

void LatticeSpec::finish_setup() {
    n_ = static_cast<int>(gen_.rows());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gen_);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("lattice generator must be full rank: " + name_);
    }
    gen_inv_ = lu.inverse();
    volume_ = std::abs(lu.determinant());
    effective_radius_ = effective_radius_from_volume(n_, volume_);
    if (family_ == Family::Bw16 || family_ == Family::Custom) {
        searcher_ = std::make_shared<const SphereDecoder>(gen_);
    }
}

LatticeSpec LatticeSpec::zn(int dimension) {
    if (dimension < 1) throw std::invalid_argument("zn requires dimension >= 1");
    LatticeSpec lat;
    lat.name_ = "zn";
    lat.family_ = Family::Zn;
    lat.gen_ = Eigen::MatrixXd::Identity(dimension, dimension);
    lat.covering_radius_ = 0.5 * std::sqrt(static_cast<double>(dimension));
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::a2() {
    LatticeSpec lat;
    lat.name_ = "a2";
    lat.family_ = Family::A2;
    lat.gen_.resize(2, 2);
    lat.gen_ << 1.0, 0.5,  //
        0.0, std::numbers::sqrt3 / 2.0;
    lat.covering_radius_ = 1.0 / std::numbers::sqrt3;  // triangle circumcenter
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::dn(int dimension) {
    if (dimension < 2) throw std::invalid_argument("dn requires dimension >= 2");
    LatticeSpec lat;
    lat.name_ = "dn";
    lat.family_ = Family::Dn;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dimension, dimension);
    g(0, 0) = 2.0;  // column basis: 2*e1, then e_i - e_(i-1)
    for (int j = 1; j < dimension; ++j) {
        g(j - 1, j) = -1.0;
        g(j, j) = 1.0;
    }
    lat.gen_ = g;
    // Deep hole is (1,0,...) up to n=3, the half-integer center beyond.
    lat.covering_radius_ =
        (dimension <= 3) ? 1.0 : 0.5 * std::sqrt(static_cast<double>(dimension));
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::e8() {
    LatticeSpec lat;
    lat.name_ = "e8";
    lat.family_ = Family::E8;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(8, 8);
    g(0, 0) = 2.0;  // columns: 2*e1, chain e_i - e_(i-1), half-integer glue
    for (int j = 1; j < 7; ++j) {
        g(j - 1, j) = -1.0;
        g(j, j) = 1.0;
    }
    for (int i = 0; i < 8; ++i) g(i, 7) = 0.5;
    lat.gen_ = g;
    lat.covering_radius_ = 1.0;
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::bw16() {
    LatticeSpec lat;
    lat.name_ = "bw16";
    lat.family_ = Family::Bw16;
    // Columns indexed by monomial subsets S of the four position bits, in
    // degree-then-index order; entry at position p is the monomial value
    // scaled by 1 (deg <= 1), 2 (deg 2 or 3) or 4 (deg 4).
    std::vector<std::vector<int>> subsets;
    for (int deg = 0; deg <= 4; ++deg) {
        for (int mask = 0; mask < 16; ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) == deg) {
                std::vector<int> s;
                for (int bit = 0; bit < 4; ++bit) {
                    if (mask & (1 << bit)) s.push_back(bit);
                }
                subsets.push_back(s);
            }
        }
    }
    Eigen::MatrixXd g(16, 16);
    for (int j = 0; j < 16; ++j) {
        const auto& s = subsets[static_cast<std::size_t>(j)];
        const double scale = (s.size() <= 1) ? 1.0 : (s.size() <= 3 ? 2.0 : 4.0);
        for (int p = 0; p < 16; ++p) {
            int val = 1;
            for (int bit : s) val &= (p >> bit) & 1;
            g(p, j) = scale * static_cast<double>(val);
        }
    }
    lat.gen_ = g;
    lat.covering_radius_ = std::sqrt(6.0);
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::builtin(const std::string& name, int dimension) {
    if (name == "zn") return zn(dimension);
    if (name == "a2") return a2();
    if (name == "dn") return dn(dimension);
    if (name == "e8") return e8();
    if (name == "bw16") return bw16();
    throw std::invalid_argument("unknown lattice name: " + name);
}

LatticeSpec LatticeSpec::custom(std::string name, const Eigen::MatrixXd& generator) {
    if (generator.rows() != generator.cols() || generator.rows() < 1) {
        throw std::invalid_argument("custom lattice generator must be square");
    }
    LatticeSpec lat;
    lat.name_ = std::move(name);
    lat.family_ = Family::Custom;
    lat.gen_ = generator;
    lat.finish_setup();
    return lat;
}

LatticeSpec LatticeSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lattice file: " + path);
    int n = 0;
    if (!(in >> n) || n < 1 || n > 64) {
        throw std::runtime_error("lattice file must start with a dimension in [1,64]: " + path);
    }
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            if (!(in >> v)) {
                std::ostringstream msg;
                msg << "lattice file " << path << ": expected " << n * n
                    << " generator entries, ran out at row " << i << " col " << j;
                throw std::runtime_error(msg.str());
            }
            g(i, j) = v;  // row-major in the file; rows are basis vectors
        }
    }
    return custom("custom:" + path, g.transpose());
}

double LatticeSpec::covering_radius() const {
    if (!covering_radius_) {
        throw std::runtime_error(
            "covering radius is not tabulated for lattice '" + name_ +
            "'; use estimate_covering_radius() for a search-based lower estimate");
    }
    return *covering_radius_;
}

LatticePoint LatticeSpec::quantize(const Eigen::VectorXd& y) const {
    if (y.size() != n_) throw std::invalid_argument("quantize: dimension mismatch");
    LatticePoint p;
    switch (family_) {
        case Family::Zn:
            p.coords = round_each(y);
            break;
        case Family::A2:
            p.coords = quantize_a2_coords(y);
            break;
        case Family::Dn:
            p.coords = quantize_dn_coords(y);
            break;
        case Family::E8:
            p.coords = quantize_e8_coords(y);
            break;
        case Family::Bw16:
        case Family::Custom: {
            p.coeffs = searcher_->nearest_coeffs(y);
            p.coords = gen_ * p.coeffs.cast<double>();
            return p;
        }
    }
    p.coeffs = coeffs_of(p.coords);
    return p;
}

Eigen::VectorXd LatticeSpec::mod(const Eigen::VectorXd& y) const {
    return y - quantize(y).coords;
}

LatticePoint LatticeSpec::point_from_coeffs(const VecI64& coeffs) const {
    if (coeffs.size() != n_) throw std::invalid_argument("point_from_coeffs: dimension mismatch");
    LatticePoint p;
    p.coeffs = coeffs;
    p.coords = gen_ * coeffs.cast<double>();
    return p;
}

VecI64 LatticeSpec::coeffs_of(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != n_) throw std::invalid_argument("coeffs_of: dimension mismatch");
    const Eigen::VectorXd raw = gen_inv_ * x;
    VecI64 b(n_);
    for (int i = 0; i < n_; ++i) b[i] = std::llround(raw[i]);
    const Eigen::VectorXd back = gen_ * b.cast<double>();
    if ((back - x).lpNorm<Eigen::Infinity>() > tol) {
        throw std::invalid_argument("coeffs_of: vector is not a lattice point of " + name_);
    }
    return b;
}

namespace {

// Equidistance polish: move toward the circumcenter of the set of nearest
// lattice points discovered by probing, accepting only distance increases.
double polish_deep_hole(const LatticeSpec& lat, Eigen::VectorXd y, SubstreamRng& rng) {
    const int n = lat.dimension();
    double probe_eps = 1e-3 * lat.effective_radius();
    double best = lat.mod(y).norm();
    for (int iter = 0; iter < 12; ++iter) {
        std::vector<Eigen::VectorXd> pts;
        std::vector<VecI64> seen;
        auto add_probe = [&](const Eigen::VectorXd& probe) {
            const LatticePoint q = lat.quantize(probe);
            for (const auto& s : seen) {
                if (s == q.coeffs) return;
            }
            seen.push_back(q.coeffs);
            pts.push_back(q.coords);
        };
        add_probe(y);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e[i] = probe_eps;
            add_probe(y + e);
            add_probe(y - e);
        }
        for (int r = 0; r < 2 * n; ++r) {
            Eigen::VectorXd dir(n);
            for (int i = 0; i < n; ++i) dir[i] = rng.next_gaussian();
            dir.normalize();
            add_probe(y + probe_eps * dir);
        }
        if (pts.size() < 2) break;

        // Least-squares circumcenter c = y + delta with minimal shift:
        // 2 (x_i - x_0) . c = |x_i|^2 - |x_0|^2.
        const int m = static_cast<int>(pts.size()) - 1;
        Eigen::MatrixXd a(m, n);
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) {
            a.row(i) = 2.0 * (pts[static_cast<std::size_t>(i) + 1] - pts[0]).transpose();
            rhs[i] = pts[static_cast<std::size_t>(i) + 1].squaredNorm() - pts[0].squaredNorm();
        }
        const Eigen::VectorXd delta =
            a.completeOrthogonalDecomposition().solve(rhs - a * y);
        bool improved = false;
        for (double t : {1.0, 0.5, 0.25}) {
            const Eigen::VectorXd cand = y + t * delta;
            const double d = lat.mod(cand).norm();
            if (d > best + 1e-15) {
                best = d;
                y = cand;
                improved = true;
                break;
            }
        }
        if (!improved) probe_eps *= 0.5;
    }
    return best;
}

}  // namespace

double estimate_covering_radius(const LatticeSpec& lat, const DeepHoleSearchOptions& opts) {
    const int n = lat.dimension();
    SubstreamRng rng(opts.seed, 0);
    double best = 0.0;

    std::vector<Eigen::VectorXd> starts = opts.candidates;
    for (int s = 0; s < opts.restarts; ++s) {
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) u[i] = rng.next_unit();
        starts.push_back(lat.generator() * u);
    }

    for (auto& y0 : starts) {
        Eigen::VectorXd y = y0;
        double step = 0.35 * lat.effective_radius();
        for (int it = 0; it < opts.steps; ++it) {
            const Eigen::VectorXd d = lat.mod(y);
            const double dist = d.norm();
            if (dist < 1e-12) {
                Eigen::VectorXd jitter(n);
                for (int i = 0; i < n; ++i) jitter[i] = rng.next_gaussian();
                y += 1e-3 * lat.effective_radius() * jitter.normalized();
                continue;
            }
            y += step * (d / dist);  // walk away from the nearest point
            step *= 0.96;
        }
        best = std::max(best, polish_deep_hole(lat, y, rng));
    }
    return best;
}

}  // namespace latcode
