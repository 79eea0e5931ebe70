#include "gmclab/fft.hpp"

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace gmclab::fft {

namespace {

// Plan creation is the only part of FFTW that is not thread-safe, so plans
// are built once per (d, n, sign) under a lock and then reused via the
// new-array execute interface, which is safe to call concurrently.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int d, int n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(d, n, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;

  std::size_t total = d == 1 ? static_cast<std::size_t>(n)
                             : static_cast<std::size_t>(n) * n;
  fftw_complex* buf = fftw_alloc_complex(total);
  if (buf == nullptr) throw std::bad_alloc();
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = d == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                          : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
  fftw_free(buf);
  if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
  plan_cache.emplace(key, plan);
  return plan;
}

void execute(std::vector<std::complex<double>>& data, int d, int n, int sign) {
  if (d != 1 && d != 2) throw std::invalid_argument("fft: d must be 1 or 2");
  std::size_t total = d == 1 ? static_cast<std::size_t>(n)
                             : static_cast<std::size_t>(n) * n;
  if (data.size() != total) throw std::invalid_argument("fft: size != n^d");
  fftw_plan plan = plan_for(d, n, sign);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
}

}  // namespace

void forward(std::vector<std::complex<double>>& data, int d, int n) {
  execute(data, d, n, FFTW_FORWARD);
}

void inverse(std::vector<std::complex<double>>& data, int d, int n) {
  execute(data, d, n, FFTW_BACKWARD);
}

}  // namespace gmclab::fft
