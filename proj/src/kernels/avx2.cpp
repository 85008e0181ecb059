#include "licchavi/kernels/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace licchavi::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x in [-708, 0]; Cephes rational approximation with a
// two-constant Cody-Waite reduction, accurate to about 1 ulp.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(x, lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);

  __m256d k = _mm256_floor_pd(_mm256_fmadd_pd(x, log2e, _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(k, c1, x);
  x = _mm256_fnmadd_pd(k, c2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);

  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^k via the exponent field; k is in [-1022, 0].
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  const __m256i ki =
      _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    const __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    const __m256d wa1 =
        _mm256_mul_pd(_mm256_loadu_pd(w + i + kLanes), _mm256_loadu_pd(a + i + kLanes));
    acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + kLanes), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void margins(const PackedDataset& x, const double* theta, double* z) {
  const std::size_t n = x.n;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (Eigen::Index j = 0; j < x.d; ++j) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.column(j).data() + i), _mm256_set1_pd(theta[j]), acc);
    }
    _mm256_storeu_pd(z + i, acc);
  }
  for (; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.d; ++j) s += x.column(j)[i] * theta[j];
    z[i] = s;
  }
}

void transpose_times(const PackedDataset& x, const double* r, double* out) {
  for (Eigen::Index j = 0; j < x.d; ++j) out[j] = dot(x.column(j).data(), r, x.n);
}

void weighted_gram(const PackedDataset& x, const double* w, double* out) {
  const auto d = x.d;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double* cj = x.column(j).data();
    for (Eigen::Index k = j; k < d; ++k) {
      const double* ck = x.column(k).data();
      const double s = w == nullptr ? dot(cj, ck, x.n) : dot3(w, cj, ck, x.n);
      out[j + k * d] = s;
      out[k + j * d] = s;
    }
  }
}

void logistic_terms(const double* z, const double* y, std::size_t n, double* resid,
                    double* curv) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d zi = _mm256_loadu_pd(z + i);
    const __m256d neg_abs = _mm256_or_pd(zi, sign_mask);
    const __m256d e = exp_nonpositive(neg_abs);
    const __m256d denom = _mm256_add_pd(one, e);
    const __m256d nonneg = _mm256_cmp_pd(zi, zero, _CMP_GE_OQ);
    const __m256d sig = _mm256_div_pd(_mm256_blendv_pd(e, one, nonneg), denom);
    const __m256d label = _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(y + i), zero, _CMP_GT_OQ), one);
    _mm256_storeu_pd(resid + i, _mm256_sub_pd(sig, label));
    if (curv != nullptr) {
      _mm256_storeu_pd(curv + i, _mm256_div_pd(e, _mm256_mul_pd(denom, denom)));
    }
  }
  for (; i < n; ++i) {
    const double e = std::exp(-std::abs(z[i]));
    const double sig = z[i] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    resid[i] = sig - (y[i] > 0.0 ? 1.0 : 0.0);
    if (curv != nullptr) curv[i] = e / ((1.0 + e) * (1.0 + e));
  }
}

}  // namespace

const KernelTable kTable{&margins, &transpose_times, &weighted_gram, &logistic_terms, &dot};

}  // namespace licchavi::kernels::avx2
