#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mindsculpt {

// Real-to-complex forward transform: returns n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft for a signal of length n, including the 1/n normalization.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

}  // namespace mindsculpt
