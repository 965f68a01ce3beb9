// AVX2/FMA variants of the arithmetic kernels. Compiled with -mavx2 -mfma;
// only reached when the dispatcher saw those CPU flags at startup.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "magrec/kernels.hpp"

namespace magrec::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

}  // namespace

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double abs_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_dev(const double* x, std::size_t n, double mean) {
    const __m256d m = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d =
            _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

CorrAccum centered_corr(const double* x, const double* y, std::size_t n,
                        double mean_x, double mean_y) {
    const __m256d mx = _mm256_set1_pd(mean_x);
    const __m256d my = _mm256_set1_pd(mean_y);
    __m256d sxx = _mm256_setzero_pd();
    __m256d syy = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
        const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
        sxx = _mm256_fmadd_pd(a, a, sxx);
        syy = _mm256_fmadd_pd(b, b, syy);
        sxy = _mm256_fmadd_pd(a, b, sxy);
    }
    CorrAccum st;
    st.sxx = hsum(sxx);
    st.syy = hsum(syy);
    st.sxy = hsum(sxy);
    for (; i < n; ++i) {
        const double a = x[i] - mean_x;
        const double b = y[i] - mean_y;
        st.sxx += a * a;
        st.syy += b * b;
        st.sxy += a * b;
    }
    return st;
}

void lerp_next(const double* x, std::size_t n, double w, double* out) {
    if (n == 0) return;
    const __m256d vw = _mm256_set1_pd(w);
    const __m256d vwc = _mm256_set1_pd(1.0 - w);
    const std::size_t m = n - 1;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 1);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(vwc, a),
                                                  _mm256_mul_pd(vw, b)));
    }
    for (; i < m; ++i) out[i] = (1.0 - w) * x[i] + w * x[i + 1];
}

void dipole_field_add(double* acc, std::size_t n, double u0, double du,
                      double height, double moment) {
    const double h2 = height * height;
    const __m256d vh2 = _mm256_set1_pd(h2);
    const __m256d v2h2 = _mm256_set1_pd(2.0 * h2);
    const __m256d vm = _mm256_set1_pd(moment);
    const __m256d vdu = _mm256_set1_pd(du);
    const __m256d vu0 = _mm256_set1_pd(u0);
    const __m256d lane = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d idx =
            _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
        const __m256d u = _mm256_fmadd_pd(idx, vdu, vu0);
        const __m256d u2 = _mm256_mul_pd(u, u);
        const __m256d r2 = _mm256_add_pd(u2, vh2);
        const __m256d denom =
            _mm256_mul_pd(_mm256_mul_pd(r2, r2), _mm256_sqrt_pd(r2));
        const __m256d num = _mm256_mul_pd(vm, _mm256_sub_pd(v2h2, u2));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                                _mm256_div_pd(num, denom)));
    }
    for (; i < n; ++i) {
        const double ui = std::fma(static_cast<double>(i), du, u0);
        const double r2 = ui * ui + h2;
        acc[i] += moment * (2.0 * h2 - ui * ui) / (r2 * r2 * std::sqrt(r2));
    }
}

}  // namespace magrec::kernels::avx2

#endif  // x86-64
