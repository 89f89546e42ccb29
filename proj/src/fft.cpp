#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace slowshift::detail {

namespace {

std::mutex planner_mutex;  // the FFTW planner is not re-entrant

void run(std::vector<cplx>& data, int sign) {
  if (data.empty()) return;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_forward(std::vector<cplx>& data) { run(data, FFTW_FORWARD); }
void fft_backward(std::vector<cplx>& data) { run(data, FFTW_BACKWARD); }

double fft_frequency(std::size_t k, std::size_t n, double dt_us) {
  const double df = 1.0 / (static_cast<double>(n) * dt_us);
  return k < (n + 1) / 2 ? df * static_cast<double>(k) : -df * static_cast<double>(n - k);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace slowshift::detail
