#include "fse/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace fse {

namespace {
// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex plan_mutex;

void run(std::complex<double>* data, int n0, int n1, int n2, int sign) {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_3d(n0, n1, n2, p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}
}  // namespace

void fft3d_forward(std::complex<double>* data, int n0, int n1, int n2) {
    run(data, n0, n1, n2, FFTW_FORWARD);
}

void fft3d_inverse(std::complex<double>* data, int n0, int n1, int n2) {
    run(data, n0, n1, n2, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(n0) * n1 * n2);
    const std::size_t total = static_cast<std::size_t>(n0) * n1 * n2;
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

}  // namespace fse
