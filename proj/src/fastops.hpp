#pragma once

#include <cstddef>

namespace erc {

// Elementwise activation kernels on contiguous buffers. Implemented in
// a translation unit built with vector-math flags so the loops compile
// to libmvec SIMD calls; results are deterministic within a build.
void tanh_inplace(double* x, std::size_t n);
void sigmoid_inplace(double* x, std::size_t n);
void relu_inplace(double* x, std::size_t n);

}  // namespace erc
