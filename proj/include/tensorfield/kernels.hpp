#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tensorfield::kernels {

/// Function table for the hot inner loops. Two lanes are provided: a scalar
/// reference lane and an AVX2 lane; the best available lane is selected at
/// startup (override with TENSORFIELD_SIMD=scalar|avx2|auto or select()).
///
/// Elementwise ops are bit-identical across lanes; reductions and gemms may
/// differ in the last ulps because the accumulation order differs.
struct Kernels {
  const char* name;

  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = a[i] + b[i]
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = a[i] - b[i]
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = s * a[i]
  void (*scale)(const double* a, double s, double* out, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = max(a[i], 0)
  void (*relu)(const double* a, double* out, std::size_t n);
  // out[i] = pre[i] > 0 ? up[i] : 0   (ReLU backward; derivative at 0 is 0)
  void (*relu_mask)(const double* pre, const double* up, double* out, std::size_t n);
  // out[i] = y[i] - o[i] * x[i]       (masked data-fit residual)
  void (*masked_residual)(const double* y, const double* o, const double* x,
                          double* out, std::size_t n);

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);

  // C(m x n) = A(m x k) * B(k x n), all row-major, C overwritten
  void (*gemm_nn)(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t k, std::size_t n);
  // C(m x n) = A(m x k) * B(n x k)^T
  void (*gemm_nt)(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t k, std::size_t n);

  // Bias-corrected Adam update for one parameter block.
  // bias1 = 1 - beta1^t, bias2 = 1 - beta2^t.
  void (*adam_step)(double* p, const double* g, double* m, double* v,
                    std::size_t n, double lr, double beta1, double beta2,
                    double eps, double bias1, double bias2);
};

/// Currently selected lane.
const Kernels& active();

/// Force a lane by name ("scalar", "avx2", "auto"). Returns false if the
/// requested lane is unavailable on this CPU (selection is left unchanged).
bool select(std::string_view name);

/// Lane lookup for equivalence tests; nullptr if unavailable.
const Kernels* lane(std::string_view name);

std::vector<std::string> available_lanes();

extern const Kernels scalar_kernels;

#if defined(__x86_64__) || defined(_M_X64)
#define TENSORFIELD_HAVE_AVX2_LANE 1
extern const Kernels avx2_kernels;
bool cpu_has_avx2();
#endif

}  // namespace tensorfield::kernels
