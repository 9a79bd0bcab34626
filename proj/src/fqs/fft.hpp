#ifndef FQS_FFT_HPP
#define FQS_FFT_HPP

#include <vector>

#include "fqs/common.hpp"

namespace fqs {

// Cached-plan FFTW front end.  Plans use FFTW_ESTIMATE only: measured planning
// is timing-dependent and would break byte-identical reruns.  All transforms
// are complex-to-complex, row-major, last axis fastest.  Single-threaded.
class FftEngine {
 public:
  static FftEngine& instance();

  // Unscaled DFT, sign = -1 forward (e^{-i}), +1 backward.
  void dft(int dim, int n, const cplx* in, cplx* out, int sign);

 private:
  FftEngine() = default;
  struct Plans;
  Plans& plans_for(int dim, int n);
  std::vector<std::pair<long long, Plans*>> cache_;
};

}  // namespace fqs

#endif
