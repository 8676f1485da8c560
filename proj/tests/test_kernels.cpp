#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lmpsim/kernels.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

using namespace lmpsim;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -5.0,
                               double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// sizes chosen to cover empty, sub-lane, one-lane, and remainder paths
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 256, 1001};

struct BackendPin {
    explicit BackendPin(kern::Backend b) { kern::force(b); }
    ~BackendPin() { kern::reset(); }
};

} // namespace

TEST_CASE("backend introspection") {
    CHECK(kern::available(kern::Backend::scalar));
    CHECK(std::string(kern::name(kern::Backend::scalar)) == "scalar");
    CHECK(std::string(kern::name(kern::Backend::avx2)) == "avx2");
    CHECK(std::string(kern::name(kern::Backend::neon)) == "neon");
    // the active backend must always be an available one
    CHECK(kern::available(kern::active()));
    // pinning an unavailable backend is an error
    if (!kern::available(kern::Backend::neon))
        CHECK_THROWS_AS(kern::force(kern::Backend::neon), std::invalid_argument);
    if (!kern::available(kern::Backend::avx2))
        CHECK_THROWS_AS(kern::force(kern::Backend::avx2), std::invalid_argument);
    kern::force(kern::Backend::scalar);
    CHECK(kern::active() == kern::Backend::scalar);
    kern::reset();
}

TEST_CASE("scalar reductions match straightforward loops") {
    BackendPin pin(kern::Backend::scalar);
    std::mt19937_64 rng(11);
    for (std::size_t n : kSizes) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);

        double s = 0.0, d = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += x[i];
            d += x[i] * y[i];
            sq += (x[i] - 0.5) * (x[i] - 0.5);
        }
        CHECK(kern::sum(n, x.data()) == doctest::Approx(s).epsilon(1e-12));
        CHECK(kern::dot(n, x.data(), y.data()) == doctest::Approx(d).epsilon(1e-12));
        CHECK(kern::sum_sq_dev(n, 0.5, x.data()) == doctest::Approx(sq).epsilon(1e-12));

        std::size_t cnt = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(x[i]) < 1.0) ++cnt;
        CHECK(kern::count_abs_below(n, 1.0, x.data()) == cnt);

        double lo = 1e300, hi = -1e300;
        kern::minmax(n, x.data(), &lo, &hi);
        if (n == 0) {
            CHECK(lo == 1e300);
            CHECK(hi == -1e300);
        } else {
            double elo = x[0], ehi = x[0];
            for (double v : x) {
                elo = std::min(elo, v);
                ehi = std::max(ehi, v);
            }
            CHECK(lo == elo);
            CHECK(hi == ehi);
        }

        if (n > 0) {
            std::size_t best = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (std::fabs(x[i]) > std::fabs(x[best])) best = i;
            CHECK(kern::iamax(n, x.data()) == best);
        }
    }
}

TEST_CASE("axpy updates in place") {
    BackendPin pin(kern::Backend::scalar);
    std::mt19937_64 rng(12);
    auto x = random_vec(rng, 17);
    auto y = random_vec(rng, 17);
    auto expect = y;
    for (std::size_t i = 0; i < x.size(); ++i) expect[i] += 2.5 * x[i];
    kern::axpy(x.size(), 2.5, x.data(), y.data());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == expect[i]);
}

TEST_CASE("cdot matches std::complex inner product") {
    BackendPin pin(kern::Backend::scalar);
    std::mt19937_64 rng(13);
    for (std::size_t n : kSizes) {
        auto ar = random_vec(rng, n), ai = random_vec(rng, n);
        auto br = random_vec(rng, n), bi = random_vec(rng, n);
        std::complex<double> want(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            want += std::complex<double>(ar[i], ai[i]) * std::complex<double>(br[i], bi[i]);
        double re = -1.0, im = -1.0;
        kern::cdot(n, ar.data(), ai.data(), br.data(), bi.data(), &re, &im);
        CHECK(re == doctest::Approx(want.real()).epsilon(1e-12));
        CHECK(im == doctest::Approx(want.imag()).epsilon(1e-12));
    }
}

TEST_CASE("jrow matches the complex formula out = a * conj(y) * c") {
    BackendPin pin(kern::Backend::scalar);
    std::mt19937_64 rng(14);
    for (std::size_t n : kSizes) {
        auto yr = random_vec(rng, n), yi = random_vec(rng, n);
        auto cr = random_vec(rng, n), ci = random_vec(rng, n);
        const std::complex<double> a(0.97, -0.21);
        std::vector<double> op(n, -9.0), oq(n, -9.0);
        kern::jrow(n, a.real(), a.imag(), yr.data(), yi.data(), cr.data(), ci.data(),
                   op.data(), oq.data());
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = std::conj(std::complex<double>(yr[i], yi[i])) *
                           std::complex<double>(cr[i], ci[i]);
            const auto o = a * t;
            CHECK(op[i] == doctest::Approx(o.real()).epsilon(1e-12));
            CHECK(oq[i] == doctest::Approx(o.imag()).epsilon(1e-12));
        }
    }
}

TEST_CASE("every available backend agrees with scalar") {
    std::mt19937_64 rng(15);
    for (kern::Backend b : {kern::Backend::avx2, kern::Backend::neon}) {
        if (!kern::available(b)) continue;
        CAPTURE(kern::name(b));
        for (std::size_t n : kSizes) {
            auto x = random_vec(rng, n);
            auto y = random_vec(rng, n);
            auto yr = random_vec(rng, n), yi = random_vec(rng, n);
            auto cr = random_vec(rng, n), ci = random_vec(rng, n);

            kern::force(kern::Backend::scalar);
            const double s_sum = kern::sum(n, x.data());
            const double s_dot = kern::dot(n, x.data(), y.data());
            const double s_dev = kern::sum_sq_dev(n, 0.25, x.data());
            const std::size_t s_cnt = kern::count_abs_below(n, 2.0, x.data());
            double s_lo = 1e300, s_hi = -1e300;
            kern::minmax(n, x.data(), &s_lo, &s_hi);
            auto s_axpy = y;
            kern::axpy(n, -1.75, x.data(), s_axpy.data());
            double s_cre = 0, s_cim = 0;
            kern::cdot(n, x.data(), y.data(), cr.data(), ci.data(), &s_cre, &s_cim);
            std::vector<double> s_p(n), s_q(n);
            kern::jrow(n, 1.03, -0.4, yr.data(), yi.data(), cr.data(), ci.data(),
                       s_p.data(), s_q.data());

            kern::force(b);
            // reductions may reassociate, so compare to tight relative slack
            CHECK(kern::sum(n, x.data()) == doctest::Approx(s_sum).epsilon(1e-13));
            CHECK(kern::dot(n, x.data(), y.data()) == doctest::Approx(s_dot).epsilon(1e-13));
            CHECK(kern::sum_sq_dev(n, 0.25, x.data()) == doctest::Approx(s_dev).epsilon(1e-13));
            // counting, extrema, and elementwise kernels must agree exactly
            CHECK(kern::count_abs_below(n, 2.0, x.data()) == s_cnt);
            double lo = 1e300, hi = -1e300;
            kern::minmax(n, x.data(), &lo, &hi);
            CHECK(lo == s_lo);
            CHECK(hi == s_hi);
            if (n > 0) {
                kern::force(kern::Backend::scalar);
                const std::size_t si = kern::iamax(n, x.data());
                kern::force(b);
                CHECK(kern::iamax(n, x.data()) == si);
            }
            auto v_axpy = y;
            kern::axpy(n, -1.75, x.data(), v_axpy.data());
            for (std::size_t i = 0; i < n; ++i)
                CHECK(v_axpy[i] == doctest::Approx(s_axpy[i]).epsilon(1e-14));
            double cre = 0, cim = 0;
            kern::cdot(n, x.data(), y.data(), cr.data(), ci.data(), &cre, &cim);
            CHECK(cre == doctest::Approx(s_cre).epsilon(1e-13));
            CHECK(cim == doctest::Approx(s_cim).epsilon(1e-13));
            std::vector<double> p(n), q(n);
            kern::jrow(n, 1.03, -0.4, yr.data(), yi.data(), cr.data(), ci.data(), p.data(),
                       q.data());
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(p[i] == doctest::Approx(s_p[i]).epsilon(1e-13));
                CHECK(q[i] == doctest::Approx(s_q[i]).epsilon(1e-13));
            }
        }
        kern::reset();
    }
}
