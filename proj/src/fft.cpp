#include "mindsculpt/fft.hpp"

#include "mindsculpt/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace mindsculpt {

namespace {

// FFTW's planner is not reentrant; plans are cached per length and executed
// on caller-owned arrays through the new-array interface.
struct PlanPair {
  fftw_plan forward{nullptr};
  fftw_plan inverse{nullptr};
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE);
    p.inverse = fftw_plan_dft_c2r_1d(len, out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidArgument("rfft of an empty signal");
  const PlanPair plan = cache().get(n);
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n / 2 + 1));
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute_dft_r2c(plan.forward, in.get(), out.get());
  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = {out.get()[k][0], out.get()[k][1]};
  return bins;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
  if (bins.size() != n / 2 + 1) throw InvalidArgument("irfft bin count does not match the signal length");
  const PlanPair plan = cache().get(n);
  std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(n / 2 + 1));
  std::unique_ptr<double, FftwFree> out(fftw_alloc_real(n));
  for (std::size_t k = 0; k < bins.size(); ++k) {
    in.get()[k][0] = bins[k].real();
    in.get()[k][1] = bins[k].imag();
  }
  fftw_execute_dft_c2r(plan.inverse, in.get(), out.get());
  std::vector<double> x(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : x) v *= scale;
  return x;
}

}  // namespace mindsculpt
