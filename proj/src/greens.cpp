#include "fse/greens.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fse/fft.hpp"

namespace fse {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

}  // namespace

double hhat_R(double k, double R) {
    if (!(R > 0) || k < 0) throw std::invalid_argument("hhat_R: need k >= 0, R > 0");
    const double s = sinc(0.5 * R * k);
    return 2.0 * M_PI * R * R * s * s;
}

double bhat_R(double k, double R) {
    if (!(R > 0) || k < 0) throw std::invalid_argument("bhat_R: need k >= 0, R > 0");
    const double t = R * k;
    const double piR4 = M_PI * R * R * R * R;
    if (t < 0.5) {
        // Direct evaluation cancels catastrophically (k^4 denominator).
        const double t2 = t * t;
        return piR4 * (1.0 + t2 * (-1.0 / 9.0 + t2 * (1.0 / 240.0 +
                       t2 * (-1.0 / 12600.0 + t2 * (1.0 / 1088640.0 +
                       t2 * (-1.0 / 139708800.0 + t2 / 24908083200.0))))));
    }
    // Long double keeps the residual cancellation near the branch point benign.
    const long double tl = static_cast<long double>(R) * k;
    const long double num =
        (2.0L - tl * tl) * std::cos(tl) + 2.0L * tl * std::sin(tl) - 2.0L;
    return static_cast<double>(4.0L * static_cast<long double>(M_PI) * num /
                               (tl * tl * tl * tl) *
                               (static_cast<long double>(R) * R * R * R));
}

MollifiedGreen precompute_mollified_green(GreenKind kind, double Ltilde, int Mtilde,
                                          double sf) {
    const double sf_min = 1.0 + std::sqrt(3.0);
    if (!(Ltilde > 0) || Mtilde < 1)
        throw std::invalid_argument("precompute_mollified_green: bad domain");
    if (sf < sf_min - 1e-12)
        throw std::invalid_argument("precompute_mollified_green: sf below 1 + sqrt(3)");

    const double h = Ltilde / Mtilde;
    const double R = std::sqrt(3.0) * Ltilde;
    int sM = static_cast<int>(std::ceil(sf * Mtilde));
    if (sM % 2 != 0) ++sM;

    // Ghat on the oversampled wavenumber grid, dk = 2 pi / (sM h).
    const double dk = 2.0 * M_PI / (sM * h);
    std::vector<std::complex<double>> grid(static_cast<std::size_t>(sM) * sM * sM);
    std::vector<double> k2_axis(sM);
    for (int a = 0; a < sM; ++a) {
        const int na = a < sM / 2 ? a : a - sM;
        k2_axis[a] = (dk * na) * (dk * na);
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < sM; ++i)
        for (int j = 0; j < sM; ++j) {
            std::complex<double>* row =
                &grid[(static_cast<std::size_t>(i) * sM + j) * sM];
            const double k2ij = k2_axis[i] + k2_axis[j];
            for (int l = 0; l < sM; ++l) {
                const double k = std::sqrt(k2ij + k2_axis[l]);
                row[l] = kind == GreenKind::Harmonic ? hhat_R(k, R) : bhat_R(k, R);
            }
        }

    // Effective Green's function on the grid (real, even).
    fft3d_inverse(grid.data(), sM, sM, sM);

    // Keep the (2M)^3 window of signed grid offsets in [-M, M) per axis,
    // embedded circulant-style so index p represents offset p - 2M for p >= M.
    MollifiedGreen green;
    green.kind = kind;
    green.Ltilde = Ltilde;
    green.h = h;
    green.R = R;
    green.Mtilde = Mtilde;
    const int D = 2 * Mtilde;
    std::vector<std::complex<double>> trunc(static_cast<std::size_t>(D) * D * D);
    auto src_index = [&](int p) {  // doubled-grid index -> oversampled index
        const int off = p < Mtilde ? p : p - D;  // signed offset
        return off >= 0 ? off : off + sM;
    };
#pragma omp parallel for schedule(static)
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            for (int l = 0; l < D; ++l)
                trunc[(static_cast<std::size_t>(i) * D + j) * D + l] =
                    grid[(static_cast<std::size_t>(src_index(i)) * sM + src_index(j)) * sM +
                         src_index(l)].real();
    grid.clear();
    grid.shrink_to_fit();

    fft3d_forward(trunc.data(), D, D, D);
    green.fourier.resize(trunc.size());
    for (std::size_t i = 0; i < trunc.size(); ++i)
        green.fourier[i] = trunc[i].real();  // imaginary part is round-off
    return green;
}

ScalarGrid freespace_solve(const MollifiedGreen& green, const ScalarGrid& rhs) {
    const int M = green.Mtilde;
    if (rhs.extents[0] != M || rhs.extents[1] != M || rhs.extents[2] != M)
        throw std::invalid_argument("freespace_solve: rhs extents must match green");
    const int D = green.doubled();
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(D) * D * D);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            for (int l = 0; l < M; ++l)
                buf[(static_cast<std::size_t>(i) * D + j) * D + l] = rhs.at(i, j, l);
    fft3d_forward(buf.data(), D, D, D);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= green.fourier[i];
    fft3d_inverse(buf.data(), D, D, D);

    ScalarGrid out;
    out.extents[0] = out.extents[1] = out.extents[2] = M;
    out.h = green.h;
    out.origin = rhs.origin;
    out.values.resize(rhs.size());
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            for (int l = 0; l < M; ++l)
                out.at(i, j, l) = buf[(static_cast<std::size_t>(i) * D + j) * D + l].real();
    return out;
}

namespace {
constexpr char kMagic[4] = {'F', 'S', 'E', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_raw(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_mollified_green(const MollifiedGreen& green, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_mollified_green: cannot open " + path);
    os.write(kMagic, 4);
    write_raw(os, kVersion);
    write_raw(os, static_cast<std::uint8_t>(green.kind));
    write_raw(os, green.Ltilde);
    write_raw(os, green.h);
    write_raw(os, green.R);
    const std::uint64_t d = static_cast<std::uint64_t>(green.doubled());
    write_raw(os, d);
    write_raw(os, d);
    write_raw(os, d);
    os.write(reinterpret_cast<const char*>(green.fourier.data()),
             static_cast<std::streamsize>(green.fourier.size() * sizeof(double)));
    if (!os) throw std::runtime_error("save_mollified_green: write failed for " + path);
}

MollifiedGreen load_mollified_green(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_mollified_green: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_mollified_green: bad magic in " + path);
    std::uint32_t version = 0;
    read_raw(is, version);
    if (version != kVersion)
        throw std::runtime_error("load_mollified_green: unsupported version");
    std::uint8_t kind = 0;
    MollifiedGreen green;
    read_raw(is, kind);
    green.kind = static_cast<GreenKind>(kind);
    read_raw(is, green.Ltilde);
    read_raw(is, green.h);
    read_raw(is, green.R);
    std::uint64_t d0 = 0, d1 = 0, d2 = 0;
    read_raw(is, d0);
    read_raw(is, d1);
    read_raw(is, d2);
    if (!is || d0 != d1 || d0 != d2 || d0 == 0 || d0 % 2 != 0)
        throw std::runtime_error("load_mollified_green: bad extents");
    green.Mtilde = static_cast<int>(d0 / 2);
    green.fourier.resize(d0 * d1 * d2);
    is.read(reinterpret_cast<char*>(green.fourier.data()),
            static_cast<std::streamsize>(green.fourier.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_mollified_green: truncated payload");
    return green;
}

}  // namespace fse
