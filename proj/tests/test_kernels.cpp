#include "magrec/kernels.hpp"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

using namespace magrec;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) v = dist(rng);
    return out;
}

// Runs `fn` under both backends and hands the results to `check`.
template <typename Fn, typename Check>
void for_both_backends(Fn&& fn, Check&& check) {
    if (!kernels::avx2_available()) return;  // single-backend machine: nothing to compare
    kernels::force_backend(kernels::Backend::Scalar);
    auto scalar = fn();
    kernels::force_backend(kernels::Backend::Avx2);
    auto avx2 = fn();
    kernels::force_backend(kernels::Backend::Avx2);
    check(scalar, avx2);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("reductions agree across backends") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 63u, 64u, 1001u}) {
        const auto x = random_vector(rng, n, -100.0, 100.0);
        const auto y = random_vector(rng, n, -100.0, 100.0);
        for_both_backends(
            [&] {
                return std::array<double, 4>{
                    kernels::sum(x.data(), n), kernels::abs_sum(x.data(), n),
                    kernels::dot(x.data(), y.data(), n),
                    kernels::squared_distance(x.data(), y.data(), n)};
            },
            [&](const auto& a, const auto& b) {
                for (std::size_t k = 0; k < a.size(); ++k)
                    CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
            });
    }
}

TEST_CASE("sumsq_dev and centered_corr agree across backends") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {2u, 5u, 16u, 333u, 4096u}) {
        const auto x = random_vector(rng, n, -5.0, 5.0);
        const auto y = random_vector(rng, n, -5.0, 5.0);
        const double mx = kernels::sum(x.data(), n) / static_cast<double>(n);
        const double my = kernels::sum(y.data(), n) / static_cast<double>(n);
        for_both_backends(
            [&] {
                const auto acc = kernels::centered_corr(x.data(), y.data(), n, mx, my);
                return std::array<double, 4>{kernels::sumsq_dev(x.data(), n, mx), acc.sxx,
                                             acc.syy, acc.sxy};
            },
            [&](const auto& a, const auto& b) {
                for (std::size_t k = 0; k < a.size(); ++k)
                    CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
            });
    }
}

TEST_CASE("elementwise kernels are bit-identical across backends") {
    std::mt19937_64 rng(13);
    for (std::size_t n : {1u, 2u, 5u, 8u, 129u}) {
        const auto x = random_vector(rng, n, -10.0, 10.0);
        for_both_backends(
            [&] {
                std::vector<double> lerp(n > 0 ? n - 1 : 0);
                kernels::lerp_next(x.data(), n, 0.37, lerp.data());
                std::vector<double> field(n, 1.5);
                kernels::dipole_field_add(field.data(), n, -3.2, 0.01, 0.5, 2.0);
                return std::pair{lerp, field};
            },
            [&](const auto& a, const auto& b) {
                REQUIRE(a.first.size() == b.first.size());
                for (std::size_t k = 0; k < a.first.size(); ++k) CHECK(a.first[k] == b.first[k]);
                for (std::size_t k = 0; k < a.second.size(); ++k) CHECK(a.second[k] == b.second[k]);
            });
    }
}

TEST_CASE("dipole kernel matches the closed-form profile") {
    kernels::force_backend(kernels::avx2_available() ? kernels::Backend::Avx2
                                                     : kernels::Backend::Scalar);
    const double h = 0.7, m = 1.3, u0 = -2.0, du = 0.05;
    std::vector<double> field(100, 0.0);
    kernels::dipole_field_add(field.data(), field.size(), u0, du, h, m);
    for (std::size_t i = 0; i < field.size(); i += 17) {
        const double u = u0 + static_cast<double>(i) * du;
        const double r2 = u * u + h * h;
        const double expected = m * (2.0 * h * h - u * u) / std::pow(r2, 2.5);
        CHECK(field[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    // Peak at closest approach, zero crossing at |u| = sqrt(2) h.
    std::vector<double> probe(3, 0.0);
    kernels::dipole_field_add(probe.data(), 1, 0.0, 0.0, h, m);
    CHECK(probe[0] == doctest::Approx(2.0 * m / std::pow(h, 3)).epsilon(1e-12));
    kernels::dipole_field_add(probe.data() + 1, 1, std::sqrt(2.0) * h, 0.0, h, m);
    CHECK(std::fabs(probe[1]) < 1e-9);
}

}  // TEST_SUITE
