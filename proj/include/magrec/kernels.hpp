#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the signal pipeline. Every kernel exists
// as a scalar reference implementation and, on x86-64, an AVX2/FMA variant.
// The backend is picked once at startup from CPU feature flags; tests pin it
// with force_backend() to check the variants against each other.
namespace magrec::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void force_backend(Backend b);
std::string_view backend_name();
bool avx2_available();

// Plain reductions.
double sum(const double* x, std::size_t n);
double abs_sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

// Sum of (x[i] - mean)^2; second pass of a two-pass variance.
double sumsq_dev(const double* x, std::size_t n, double mean);

// Squared Euclidean distance, the RBF kernel argument.
double squared_distance(const double* x, const double* y, std::size_t n);

// Centered second moments for a Pearson coefficient; the means come from a
// first pass so large offsets do not cancel catastrophically.
struct CorrAccum {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};
CorrAccum centered_corr(const double* x, const double* y, std::size_t n,
                        double mean_x, double mean_y);

// out[i] = (1 - w) * x[i] + w * x[i + 1] for i in [0, n-1); n >= 1.
void lerp_next(const double* x, std::size_t n, double w, double* out);

// acc[i] += moment * (2h^2 - u^2) / (u^2 + h^2)^(5/2), u = u0 + i * du.
// Point-dipole z-field profile along the travel axis.
void dipole_field_add(double* acc, std::size_t n, double u0, double du,
                      double height, double moment);

}  // namespace magrec::kernels
