#pragma once
// Periodic square-box grid and field containers. Layout is row-major with x
// fastest: index(ix, iy) = iy*n + ix, node coordinates x = ix*h, y = iy*h,
// h = L/n. Spectral fields hold normalized coefficients c_k (f = sum c_k e^{ikx})
// in FFTW r2c layout: iy in [0,n), ix in [0,n/2].

#include <complex>
#include <cstdlib>
#include <cstddef>
#include <new>
#include <stdexcept>
#include <vector>

namespace nsv::spectral {

template <class T>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <class U> AlignedAlloc(const AlignedAlloc<U>&) {}
    T* allocate(std::size_t n) {
        std::size_t bytes = (n * sizeof(T) + 63) / 64 * 64;
        void* p = std::aligned_alloc(64, bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }
    template <class U> bool operator==(const AlignedAlloc<U>&) const { return true; }
};

using Buffer = std::vector<double, AlignedAlloc<double>>;

struct Grid {
    int n = 0;
    double L = 0.0;

    Grid() = default;
    Grid(int n_, double L_) : n(n_), L(L_) {
        if (n < 16 || (n & (n - 1)) != 0)
            throw std::invalid_argument("grid: n must be a power of two, >= 16");
        if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
    }
    double h() const { return L / n; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    int nkx() const { return n / 2 + 1; }
    std::size_t spec_size() const { return static_cast<std::size_t>(n) * nkx(); }
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * n + ix;
    }
    double x(int i) const { return i * h(); }
    // signed integer mode number for row index
    int mode(int j) const { return j <= n / 2 ? j : j - n; }
    // physical wavenumber 2*pi/L * mode
    double wave(int j) const { return 2.0 * 3.14159265358979323846 / L * mode(j); }
    bool operator==(const Grid& o) const { return n == o.n && L == o.L; }
};

inline void require_same(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g) : g_(g), v_(g.size(), 0.0) {}
    const Grid& grid() const { return g_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }
    double& operator()(int ix, int iy) { return v_[g_.idx(ix, iy)]; }
    double operator()(int ix, int iy) const { return v_[g_.idx(ix, iy)]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    void fill(double a) { for (auto& x : v_) x = a; }

private:
    Grid g_;
    Buffer v_;
};

struct VectorField {
    ScalarField x, y;
    VectorField() = default;
    explicit VectorField(const Grid& g) : x(g), y(g) {}
    const Grid& grid() const { return x.grid(); }
};

// Interleaved complex storage so the re/im pair sits contiguously for the
// multiplier kernels.
class SpecField {
public:
    SpecField() = default;
    explicit SpecField(const Grid& g) : g_(g), v_(2 * g.spec_size(), 0.0) {}
    const Grid& grid() const { return g_; }
    double* raw() { return v_.data(); }
    const double* raw() const { return v_.data(); }
    std::size_t modes() const { return v_.size() / 2; }
    std::complex<double> at(std::size_t m) const { return {v_[2 * m], v_[2 * m + 1]}; }
    void set(std::size_t m, std::complex<double> c) {
        v_[2 * m] = c.real();
        v_[2 * m + 1] = c.imag();
    }
    std::size_t midx(int ikx, int iy) const {
        return static_cast<std::size_t>(iy) * g_.nkx() + ikx;
    }

private:
    Grid g_;
    Buffer v_;
};

} // namespace nsv::spectral
