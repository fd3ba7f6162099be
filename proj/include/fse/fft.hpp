#pragma once

// Thin FFTW wrapper for in-place 3D complex transforms.

#include <complex>
#include <vector>

namespace fse {

// In-place forward DFT of an n0 x n1 x n2 array (row-major), unnormalized.
void fft3d_forward(std::complex<double>* data, int n0, int n1, int n2);

// In-place inverse DFT, scaled by 1/(n0*n1*n2).
void fft3d_inverse(std::complex<double>* data, int n0, int n1, int n2);

}  // namespace fse
