#include "mqseg/kernels.hpp"

#include <cmath>

#include "mqseg/multiscale.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace mqseg {

PenalizedLlrTable::PenalizedLlrTable(int n, double beta) : n_(n), beta_(beta) {
  offsets_.resize(static_cast<size_t>(n));
  std::size_t total = 0;
  for (int len = 1; len <= n; ++len) {
    offsets_[static_cast<size_t>(len) - 1] = total;
    total += static_cast<size_t>(len) + 1;
  }
  flat_.resize(total);
  for (int len = 1; len <= n; ++len) {
    double* r = flat_.data() + offsets_[static_cast<size_t>(len) - 1];
    const double pen = penalty(len, n);
    for (int k = 0; k <= len; ++k) {
      const double t = local_llr(static_cast<double>(k) / len, len, beta);
      r[k] = std::sqrt(2.0 * t) - pen;
    }
  }
}

double max_penalized_scan_scalar(const PenalizedLlrTable& tab, const std::int32_t* prefix) {
  const int n = tab.n();
  double best = -kInf;
  for (int len = 1; len <= n; ++len) {
    const double* row = tab.row(len);
    const int starts = n - len + 1;
    for (int i = 0; i < starts; ++i) {
      const int k = prefix[i + len] - prefix[i];
      const double v = row[k];
      if (v > best) best = v;
    }
  }
  return best;
}

#if defined(__x86_64__) || defined(__i386__)

__attribute__((target("avx2")))
double max_penalized_scan_avx2(const PenalizedLlrTable& tab, const std::int32_t* prefix) {
  const int n = tab.n();
  __m256d acc = _mm256_set1_pd(-kInf);
  double best = -kInf;
  for (int len = 1; len <= n; ++len) {
    const double* row = tab.row(len);
    const int starts = n - len + 1;
    int i = 0;
    for (; i + 4 <= starts; i += 4) {
      const __m128i hi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(prefix + i + len));
      const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(prefix + i));
      const __m128i k = _mm_sub_epi32(hi, lo);
      const __m256d v = _mm256_i32gather_pd(row, k, 8);
      acc = _mm256_max_pd(acc, v);
    }
    for (; i < starts; ++i) {
      const double v = row[prefix[i + len] - prefix[i]];
      if (v > best) best = v;
    }
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (double v : lanes)
    if (v > best) best = v;
  return best;
}

#endif  // x86

namespace {

using ScanFn = double (*)(const PenalizedLlrTable&, const std::int32_t*);

struct Dispatch {
  ScanFn fn;
  const char* name;
};

Dispatch select_scan() {
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2")) return {&max_penalized_scan_avx2, "avx2"};
#endif
  return {&max_penalized_scan_scalar, "scalar"};
}

const Dispatch& dispatch() {
  static const Dispatch d = select_scan();
  return d;
}

}  // namespace

double max_penalized_scan(const PenalizedLlrTable& tab, const std::int32_t* prefix) {
  return dispatch().fn(tab, prefix);
}

const char* active_scan_kernel() { return dispatch().name; }

}  // namespace mqseg
