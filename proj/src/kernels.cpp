#include "magrec/kernels.hpp"

#include <cmath>
#include <cstdlib>

namespace magrec::kernels {

namespace scalar {

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double abs_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_dev(const double* x, std::size_t n, double mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

CorrAccum centered_corr(const double* x, const double* y, std::size_t n,
                        double mean_x, double mean_y) {
    CorrAccum st;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i] - mean_x;
        const double b = y[i] - mean_y;
        st.sxx += a * a;
        st.syy += b * b;
        st.sxy += a * b;
    }
    return st;
}

void lerp_next(const double* x, std::size_t n, double w, double* out) {
    const double wc = 1.0 - w;
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] = wc * x[i] + w * x[i + 1];
}

void dipole_field_add(double* acc, std::size_t n, double u0, double du,
                      double height, double moment) {
    const double h2 = height * height;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::fma(static_cast<double>(i), du, u0);
        const double r2 = u * u + h2;
        acc[i] += moment * (2.0 * h2 - u * u) / (r2 * r2 * std::sqrt(r2));
    }
}

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(const double* x, std::size_t n);
double abs_sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sumsq_dev(const double* x, std::size_t n, double mean);
double squared_distance(const double* x, const double* y, std::size_t n);
CorrAccum centered_corr(const double* x, const double* y, std::size_t n,
                        double mean_x, double mean_y);
void lerp_next(const double* x, std::size_t n, double w, double* out);
void dipole_field_add(double* acc, std::size_t n, double u0, double du,
                      double height, double moment);
}  // namespace avx2
#endif

namespace {

struct Vtable {
    double (*sum)(const double*, std::size_t);
    double (*abs_sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq_dev)(const double*, std::size_t, double);
    double (*squared_distance)(const double*, const double*, std::size_t);
    CorrAccum (*centered_corr)(const double*, const double*, std::size_t, double, double);
    void (*lerp_next)(const double*, std::size_t, double, double*);
    void (*dipole_field_add)(double*, std::size_t, double, double, double, double);
};

constexpr Vtable kScalar = {
    scalar::sum,       scalar::abs_sum,          scalar::dot,
    scalar::sumsq_dev, scalar::squared_distance, scalar::centered_corr,
    scalar::lerp_next, scalar::dipole_field_add,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2 = {
    avx2::sum,       avx2::abs_sum,          avx2::dot,
    avx2::sumsq_dev, avx2::squared_distance, avx2::centered_corr,
    avx2::lerp_next, avx2::dipole_field_add,
};
#endif

bool detect_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("MAGREC_FORCE_SCALAR");
        env != nullptr && env[0] != '\0' && env[0] != '0') {
        return Backend::Scalar;
    }
    return detect_avx2() ? Backend::Avx2 : Backend::Scalar;
}

Backend g_backend = initial_backend();

const Vtable& table() {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::Avx2) return kAvx2;
#endif
    return kScalar;
}

}  // namespace

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
    if (b == Backend::Avx2 && !detect_avx2()) return;
    g_backend = b;
}

std::string_view backend_name() {
    return g_backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() { return detect_avx2(); }

double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double abs_sum(const double* x, std::size_t n) { return table().abs_sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) {
    return table().dot(x, y, n);
}
double sumsq_dev(const double* x, std::size_t n, double mean) {
    return table().sumsq_dev(x, n, mean);
}
double squared_distance(const double* x, const double* y, std::size_t n) {
    return table().squared_distance(x, y, n);
}
CorrAccum centered_corr(const double* x, const double* y, std::size_t n,
                        double mean_x, double mean_y) {
    return table().centered_corr(x, y, n, mean_x, mean_y);
}
void lerp_next(const double* x, std::size_t n, double w, double* out) {
    table().lerp_next(x, n, w, out);
}
void dipole_field_add(double* acc, std::size_t n, double u0, double du,
                      double height, double moment) {
    table().dipole_field_add(acc, n, u0, du, height, moment);
}

}  // namespace magrec::kernels
