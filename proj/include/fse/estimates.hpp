#pragma once

// Closed-form truncation error estimates and automatic parameter selection.

#include "fse/ewald.hpp"
#include "fse/kernels.hpp"

namespace fse {

// Predicted real-space and Fourier-space RMS truncation errors (absolute).
struct ErrorBudget {
    KernelKind kind = KernelKind::Stokeslet;
    double xi = 0, rc = 0, k_inf = 0, L = 0, R = 0;
    double Q = 0;  // sum of squared strength components
    double predicted_real_rms = 0;
    double predicted_fourier_rms = 0;
};

// RMS error of truncating the Fourier integral at k_inf.
double fourier_error_estimate(KernelKind kind, double Q, double xi, double k_inf,
                              double L, double R);

// RMS error of truncating the real-space sum at rc.
double real_error_estimate(KernelKind kind, double Q, double xi, double rc, double L);

ErrorBudget error_budget(KernelKind kind, const EwaldConfig& cfg, double Q);

// Reference RMS velocity magnitude used to turn a relative tolerance into an
// absolute one (statistical, same Kolafa-Perram style as the estimates).
double reference_velocity_rms(KernelKind kind, double Q, double L, std::size_t N);

struct SelectedParameters {
    EwaldConfig config;
    bool feasible = true;  // false: required rc > L sqrt(3), use direct summation
};

// Smallest rc and M meeting tol (relative RMS), split evenly between the real
// and Fourier budgets; P from the accuracy lookup.
SelectedParameters select_parameters(KernelKind kind, std::size_t N, double L,
                                     double Q, double xi, double tol);

}  // namespace fse
