#include "dfrc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace dfrc {

namespace {

// FFTW plan creation is not thread-safe; executing a cached plan on distinct
// arrays is. Plans are created in-place and unaligned so they apply to any
// std::vector buffer of the right length.
std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(int n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_pair(n, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_cache.emplace(key, plan);
  return plan;
}

void run(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = get_plan(static_cast<int>(data.size()), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) { run(data, FFTW_FORWARD); }

void fft_backward(std::vector<std::complex<double>>& data) { run(data, FFTW_BACKWARD); }

}  // namespace dfrc
