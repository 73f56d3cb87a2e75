#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsv/simd/kernels.hpp"
#include "nsv/util/rng.hpp"

#include <vector>

using namespace nsv;

namespace {

std::vector<double> random_buf(std::uint64_t seed, std::size_t n, double lo = -2.0,
                               double hi = 2.0) {
    util::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// element ops should agree to a relative ulp-scale tolerance (FMA contraction),
// reductions to reordering tolerance
constexpr double kElemTol = 1e-14;
constexpr double kReduceTol = 1e-12;

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::fabs(a[i]), std::fabs(b[i])});
        CHECK(std::fabs(a[i] - b[i]) <= tol * scale);
    }
}

} // namespace

TEST_CASE("scalar reference semantics") {
    // minmod: opposite signs or zero kill the slope, else the smaller magnitude
    CHECK(simd::scalar::minmod(1.0, -2.0) == 0.0);
    CHECK(simd::scalar::minmod(0.0, 3.0) == 0.0);
    CHECK(simd::scalar::minmod(1.0, 2.0) == 1.0);
    CHECK(simd::scalar::minmod(-3.0, -2.0) == -2.0);

    double out[2];
    const double x[2] = {0.5, 1e-30};
    simd::scalar::recip_clamped(out, x, 1e-12, 2);
    CHECK(out[0] == 2.0);
    CHECK(out[1] == 1e12);  // clamped at the floor, never inf

    // integer fast path of sum_abs_pow matches pow()
    const double v[3] = {-1.5, 2.0, -0.25};
    double direct = 0.0;
    for (double t : v) direct += std::pow(std::fabs(t), 4.0);
    CHECK(simd::scalar::sum_abs_pow(v, 4.0, 3) == doctest::Approx(direct).epsilon(1e-15));

    // muscl upwind switch: positive face velocity takes the left state
    const double rm[1] = {1.0}, r0[1] = {2.0}, rp[1] = {4.0}, rq[1] = {5.0};
    double flux[1];
    const double up[1] = {1.0}, dn[1] = {-1.0};
    simd::scalar::muscl_flux(flux, rm, r0, rp, rq, up, 1);
    CHECK(flux[0] == doctest::Approx(2.5));  // qL = 2 + 0.5*min(1,2)
    simd::scalar::muscl_flux(flux, rm, r0, rp, rq, dn, 1);
    CHECK(flux[0] == doctest::Approx(-3.5)); // qR = 4 - 0.5*min(2,1)
}

TEST_CASE("backend dispatch honors force_backend") {
    const simd::Backend before = simd::active_backend();
    CHECK(simd::backend_name() != nullptr);
    simd::force_backend(simd::Backend::scalar);
    CHECK(simd::active_backend() == simd::Backend::scalar);
    if (simd::avx2_compiled() && simd::avx2_supported()) {
        simd::force_backend(simd::Backend::avx2);
        CHECK(simd::active_backend() == simd::Backend::avx2);
    }
    simd::force_backend(before);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
#ifndef NSV_HAVE_AVX2_TU
    return;  // scalar-only build: nothing to compare
#else
    if (!simd::avx2_supported()) return;

    // lengths straddling the vector width to exercise remainder handling
    for (std::size_t n : {1ul, 3ul, 4ul, 7ul, 64ul, 1001ul}) {
        const auto x = random_buf(10 + n, n);
        const auto y = random_buf(20 + n, n);
        const auto z = random_buf(30 + n, n);
        std::vector<double> a(n), b(n);

        simd::scalar::scale(a.data(), 1.7, x.data(), n);
        simd::avx2::scale(b.data(), 1.7, x.data(), n);
        check_close(a, b, kElemTol);

        simd::scalar::axpby(a.data(), 1.3, x.data(), -0.7, y.data(), n);
        simd::avx2::axpby(b.data(), 1.3, x.data(), -0.7, y.data(), n);
        check_close(a, b, kElemTol);

        simd::scalar::axpbypcz(a.data(), 0.5, x.data(), 2.0, y.data(), -1.1, z.data(), n);
        simd::avx2::axpbypcz(b.data(), 0.5, x.data(), 2.0, y.data(), -1.1, z.data(), n);
        check_close(a, b, kElemTol);

        simd::scalar::mul(a.data(), x.data(), y.data(), n);
        simd::avx2::mul(b.data(), x.data(), y.data(), n);
        check_close(a, b, kElemTol);

        simd::scalar::prod_axpz(a.data(), -2.0, x.data(), y.data(), z.data(), n);
        simd::avx2::prod_axpz(b.data(), -2.0, x.data(), y.data(), z.data(), n);
        check_close(a, b, kElemTol);

        auto pos = random_buf(40 + n, n, 1e-14, 3.0);
        simd::scalar::recip_clamped(a.data(), pos.data(), 1e-9, n);
        simd::avx2::recip_clamped(b.data(), pos.data(), 1e-9, n);
        check_close(a, b, kElemTol);

        CHECK(simd::avx2::sum(x.data(), n) ==
              doctest::Approx(simd::scalar::sum(x.data(), n)).epsilon(kReduceTol));
        CHECK(simd::avx2::dot(x.data(), y.data(), n) ==
              doctest::Approx(simd::scalar::dot(x.data(), y.data(), n)).epsilon(kReduceTol));
        for (double p : {1.0, 2.0, 4.0, 2.5})
            CHECK(simd::avx2::sum_abs_pow(x.data(), p, n) ==
                  doctest::Approx(simd::scalar::sum_abs_pow(x.data(), p, n))
                      .epsilon(kReduceTol));
        CHECK(simd::avx2::max_abs(x.data(), n) == simd::scalar::max_abs(x.data(), n));
        CHECK(simd::avx2::min(x.data(), n) == simd::scalar::min(x.data(), n));

        // interleaved complex scale: nc complex elements = 2*nc doubles
        const std::size_t nc = n;
        auto zc1 = random_buf(50 + n, 2 * nc);
        auto zc2 = zc1;
        const auto mr = random_buf(60 + n, nc);
        simd::scalar::cmul_real(zc1.data(), mr.data(), nc);
        simd::avx2::cmul_real(zc2.data(), mr.data(), nc);
        check_close(zc1, zc2, kElemTol);

        const auto rm = random_buf(70 + n, n, 0.5, 2.0);
        const auto r0 = random_buf(71 + n, n, 0.5, 2.0);
        const auto rp = random_buf(72 + n, n, 0.5, 2.0);
        const auto rq = random_buf(73 + n, n, 0.5, 2.0);
        const auto uf = random_buf(74 + n, n);
        simd::scalar::muscl_flux(a.data(), rm.data(), r0.data(), rp.data(), rq.data(),
                                 uf.data(), n);
        simd::avx2::muscl_flux(b.data(), rm.data(), r0.data(), rp.data(), rq.data(),
                               uf.data(), n);
        check_close(a, b, kElemTol);
    }
#endif
}

TEST_CASE("dispatch wrappers route through the forced backend") {
    const simd::Backend before = simd::active_backend();
    const std::size_t n = 37;
    const auto x = random_buf(1, n);
    const auto y = random_buf(2, n);

    simd::force_backend(simd::Backend::scalar);
    std::vector<double> a(n);
    simd::axpby(a.data(), 2.0, x.data(), 3.0, y.data(), n);
    const double s_scalar = simd::sum(x.data(), n);

    std::vector<double> ref(n);
    simd::scalar::axpby(ref.data(), 2.0, x.data(), 3.0, y.data(), n);
    check_close(a, ref, 0.0);
    CHECK(s_scalar == simd::scalar::sum(x.data(), n));

    if (simd::avx2_compiled() && simd::avx2_supported()) {
        simd::force_backend(simd::Backend::avx2);
        std::vector<double> b(n);
        simd::axpby(b.data(), 2.0, x.data(), 3.0, y.data(), n);
        check_close(b, ref, kElemTol);
    }
    simd::force_backend(before);
}
