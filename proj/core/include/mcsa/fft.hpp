#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mcsa {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Radix-2 forward DFT plan for a fixed power-of-two size. Twiddles and the
// bit-reversal table are precomputed once and reused across frames.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  // In-place forward transform: X[k] = sum_n x[n] exp(-2*pi*i*n*k/N).
  void forward(std::vector<std::complex<double>>& a) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bit_reversal_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2*pi*i*k/N), k < N/2
};

}  // namespace mcsa
