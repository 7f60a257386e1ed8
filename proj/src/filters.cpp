#include "tubetrack/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "tubetrack/parallel.hpp"

namespace tubetrack {

namespace {

// ---------------------------------------------------------------------------
// Separable Gaussian-derivative convolution
// ---------------------------------------------------------------------------

struct Kernel {
    std::vector<double> taps;  // centered, size 2r+1
    int radius = 0;
};

// Sampled Gaussian and derivatives. The 0th order kernel is normalized to
// sum 1; the 2nd order kernel is corrected to sum 0 so constant inputs give
// exactly zero Hessian (the 1st order kernel is odd and sums to 0 already).
Kernel gaussian_kernel(double sigma, int order) {
    const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    Kernel k;
    k.radius = r;
    k.taps.resize(2 * r + 1);
    const double s2 = sigma * sigma;
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    for (int i = -r; i <= r; ++i) {
        const double x = i;
        const double g = norm * std::exp(-x * x / (2.0 * s2));
        double t = g;
        if (order == 1) t = -x / s2 * g;
        if (order == 2) t = (x * x / s2 - 1.0) / s2 * g;
        k.taps[i + r] = t;
    }
    if (order == 0) {
        double sum = 0;
        for (double t : k.taps) sum += t;
        for (double& t : k.taps) t /= sum;
    } else if (order == 2) {
        double sum = 0;
        for (double t : k.taps) sum += t;
        const double corr = sum / k.taps.size();
        for (double& t : k.taps) t -= corr;
    }
    return k;
}

int reflect(int i, int n) {
    // mirror boundary without repeating the edge sample: -1 -> 1, n -> n-2
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = std::abs(i) % period;
    return i < n ? i : period - i;
}

// Convolve along one axis. Lines are independent, so the loop over lines is
// parallelized.
void convolve_axis(const std::vector<float>& src, std::vector<float>& dst,
                   const std::array<int, 3>& dims, int axis, const Kernel& k, int threads) {
    const int nx = dims[0], ny = dims[1], nz = dims[2];
    const std::size_t stride_x = 1;
    const std::size_t stride_y = static_cast<std::size_t>(nx);
    const std::size_t stride_z = static_cast<std::size_t>(nx) * ny;
    const std::size_t strides[3] = {stride_x, stride_y, stride_z};
    const int lens[3] = {nx, ny, nz};

    const int n = lens[axis];
    const std::size_t stride = strides[axis];
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const std::size_t n_lines = static_cast<std::size_t>(lens[a1]) * lens[a2];

    dst.resize(src.size());
    parallel_for(
        n_lines,
        [&](std::size_t line) {
            const int i1 = static_cast<int>(line % lens[a1]);
            const int i2 = static_cast<int>(line / lens[a1]);
            const std::size_t base = static_cast<std::size_t>(i1) * strides[a1] +
                                     static_cast<std::size_t>(i2) * strides[a2];
            std::vector<double> buf(n);
            for (int i = 0; i < n; ++i) buf[i] = src[base + i * stride];
            for (int i = 0; i < n; ++i) {
                double acc = 0;
                for (int j = -k.radius; j <= k.radius; ++j)
                    acc += k.taps[j + k.radius] * buf[reflect(i + j, n)];
                dst[base + i * stride] = static_cast<float>(acc);
            }
        },
        threads);
}

}  // namespace

Volume meijering_valley(const Volume& v, const std::vector<double>& scales_mm, bool dark_sheets,
                        int threads) {
    if (scales_mm.empty()) throw TrackError("meijering_valley: need at least one scale");
    for (double s : scales_mm)
        if (s <= 0.0) throw TrackError("meijering_valley: scales must be > 0");
    const double spacing = v.iso_spacing();

    std::vector<float> input = v.data;
    if (!dark_sheets)
        for (float& x : input) x = -x;

    Volume response;
    static_cast<Grid&>(response) = v;
    response.data.assign(v.size(), 0.0f);

    std::vector<float> y0, y1, y2, tmp;
    std::vector<float> hess[6];  // xx, yy, zz, xy, xz, yz

    for (double scale_mm : scales_mm) {
        const double sigma = scale_mm / spacing;  // voxel units
        const Kernel g0 = gaussian_kernel(sigma, 0);
        const Kernel g1 = gaussian_kernel(sigma, 1);
        const Kernel g2 = gaussian_kernel(sigma, 2);

        // Separable Hessian: smooth along y first, then z, then x, reusing
        // the shared intermediates.
        convolve_axis(input, y0, v.dims, 1, g0, threads);
        convolve_axis(input, y1, v.dims, 1, g1, threads);
        convolve_axis(input, y2, v.dims, 1, g2, threads);

        convolve_axis(y0, tmp, v.dims, 2, g0, threads);  // g0y g0z
        convolve_axis(tmp, hess[0], v.dims, 0, g2, threads);  // xx
        convolve_axis(y0, tmp, v.dims, 2, g1, threads);  // g0y g1z
        convolve_axis(tmp, hess[4], v.dims, 0, g1, threads);  // xz
        convolve_axis(y0, tmp, v.dims, 2, g2, threads);  // g0y g2z
        convolve_axis(tmp, hess[2], v.dims, 0, g0, threads);  // zz

        convolve_axis(y1, tmp, v.dims, 2, g0, threads);  // g1y g0z
        convolve_axis(tmp, hess[3], v.dims, 0, g1, threads);  // xy
        convolve_axis(y1, tmp, v.dims, 2, g1, threads);  // g1y g1z
        convolve_axis(tmp, hess[5], v.dims, 0, g0, threads);  // yz

        convolve_axis(y2, tmp, v.dims, 2, g0, threads);  // g2y g0z
        convolve_axis(tmp, hess[1], v.dims, 0, g0, threads);  // yy

        const double gamma = sigma * sigma;  // scale normalization
        parallel_for(
            v.size(),
            [&](std::size_t i) {
                Eigen::Matrix3d h;
                h(0, 0) = hess[0][i];
                h(1, 1) = hess[1][i];
                h(2, 2) = hess[2][i];
                h(0, 1) = h(1, 0) = hess[3][i];
                h(0, 2) = h(2, 0) = hess[4][i];
                h(1, 2) = h(2, 1) = hess[5][i];
                h *= gamma;
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
                es.computeDirect(h, Eigen::EigenvaluesOnly);
                const Eigen::Vector3d lam = es.eigenvalues();
                const double third_trace = (lam[0] + lam[1] + lam[2]) / 3.0;
                double best = 0.0;
                for (int e = 0; e < 3; ++e) best = std::max(best, lam[e] + third_trace);
                const float r = static_cast<float>(best);
                if (r > response.data[i]) response.data[i] = r;
            },
            threads);
    }

    // min-max normalize to [0, 1]; an all-flat response stays all-zero
    const float lo = response.min_value();
    const float hi = response.max_value();
    const float range = hi - lo;
    if (range > 0.0f) {
        for (float& x : response.data) x = (x - lo) / range;
    } else {
        std::fill(response.data.begin(), response.data.end(), 0.0f);
    }
    return response;
}

VoxelMask binarize_walls(const Volume& wall_map, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw TrackError("binarize_walls: threshold must be in (0, 1)");
    VoxelMask m(wall_map);
    for (std::size_t i = 0; i < wall_map.data.size(); ++i)
        m.data[i] = wall_map.data[i] >= static_cast<float>(threshold) ? 1 : 0;
    return m;
}

VoxelMask invert_or(const VoxelMask& segmentation, const VoxelMask& walls) {
    if (!segmentation.same_grid(walls))
        throw TrackError("invert_or: mask grids differ");
    VoxelMask out(segmentation);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (!segmentation.data[i] || walls.data[i]) ? 1 : 0;
    return out;
}

namespace {

// 1D squared-distance transform, lower envelope of parabolas
// (Felzenszwalb & Huttenlocher). f is the input (squared distances from the
// previous pass), d the output. v/z are scratch of size n and n+1.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p);
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const int p = v[k];
        d[q] = (q - p) * (double)(q - p) + f[p];
    }
}

}  // namespace

Volume euclidean_distance_transform(const VoxelMask& obstacles, int threads) {
    const double spacing = obstacles.iso_spacing();
    if (obstacles.count() == 0)
        throw TrackError("euclidean_distance_transform: empty obstacle set, distance undefined");

    const int nx = obstacles.dims[0], ny = obstacles.dims[1], nz = obstacles.dims[2];
    const std::size_t n = obstacles.size();
    constexpr double kInf = 1e18;

    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = obstacles.data[i] ? 0.0 : kInf;

    // three separable passes: x, then y, then z
    const auto run_axis = [&](int axis) {
        const int lens[3] = {nx, ny, nz};
        const std::size_t strides[3] = {1, static_cast<std::size_t>(nx),
                                        static_cast<std::size_t>(nx) * ny};
        const int len = lens[axis];
        const std::size_t stride = strides[axis];
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        const std::size_t n_lines = static_cast<std::size_t>(lens[a1]) * lens[a2];
        parallel_for(
            n_lines,
            [&](std::size_t line) {
                const int i1 = static_cast<int>(line % lens[a1]);
                const int i2 = static_cast<int>(line / lens[a1]);
                const std::size_t base = static_cast<std::size_t>(i1) * strides[a1] +
                                         static_cast<std::size_t>(i2) * strides[a2];
                std::vector<double> f(len), d(len), z(len + 1);
                std::vector<int> v(len);
                for (int i = 0; i < len; ++i) f[i] = sq[base + i * stride];
                dt_1d(f, d, v, z, len);
                for (int i = 0; i < len; ++i) sq[base + i * stride] = d[i];
            },
            threads);
    };
    run_axis(0);
    run_axis(1);
    run_axis(2);

    Volume dist;
    static_cast<Grid&>(dist) = obstacles;
    dist.data.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        dist.data[i] = static_cast<float>(std::sqrt(sq[i]) * spacing);
    return dist;
}

}  // namespace tubetrack
