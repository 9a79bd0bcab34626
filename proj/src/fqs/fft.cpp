#include "fqs/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace fqs {

struct FftEngine::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t count = 0;
};

FftEngine& FftEngine::instance() {
  static FftEngine e;
  return e;
}

FftEngine::Plans& FftEngine::plans_for(int dim, int n) {
  const long long key = static_cast<long long>(dim) * (1LL << 32) + n;
  for (auto& kv : cache_)
    if (kv.first == key) return *kv.second;

  auto* p = new Plans();
  std::size_t count = 1;
  for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(n);
  p->count = count;
  p->in = fftw_alloc_complex(count);
  p->out = fftw_alloc_complex(count);
  if (dim == 1) {
    p->fwd = fftw_plan_dft_1d(n, p->in, p->out, FFTW_FORWARD, FFTW_ESTIMATE);
    p->bwd = fftw_plan_dft_1d(n, p->in, p->out, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    p->fwd = fftw_plan_dft_3d(n, n, n, p->in, p->out, FFTW_FORWARD, FFTW_ESTIMATE);
    p->bwd = fftw_plan_dft_3d(n, n, n, p->in, p->out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  cache_.emplace_back(key, p);
  return *p;
}

void FftEngine::dft(int dim, int n, const cplx* in, cplx* out, int sign) {
  Plans& p = plans_for(dim, n);
  std::memcpy(static_cast<void*>(p.in), static_cast<const void*>(in), p.count * sizeof(cplx));
  fftw_execute(sign < 0 ? p.fwd : p.bwd);
  std::memcpy(static_cast<void*>(out), static_cast<const void*>(p.out), p.count * sizeof(cplx));
}

}  // namespace fqs
