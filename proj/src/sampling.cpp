#include "nonholo/sampling.hpp"

#include <stdexcept>

namespace nonholo {

namespace {
constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
}

double van_der_corput(unsigned long long index, unsigned base) {
    double result = 0.0;
    double inv = 1.0 / static_cast<double>(base);
    double scale = inv;
    // index + 1: the 0th element would otherwise be exactly 0 for every base.
    for (unsigned long long i = index + 1; i > 0; i /= base) {
        result += static_cast<double>(i % base) * scale;
        scale *= inv;
    }
    return result;
}

Vec halton_point(unsigned long long index, int dim) {
    if (dim <= 0 || dim > static_cast<int>(std::size(kPrimes))) {
        throw std::invalid_argument("halton_point: unsupported dimension");
    }
    Vec p(dim);
    for (int d = 0; d < dim; ++d) p[d] = van_der_corput(index, kPrimes[d]);
    return p;
}

std::vector<Vec> halton_ball(int dim, double radius, int count, unsigned long long offset) {
    if (count <= 0) throw std::invalid_argument("halton_ball: need a positive point count");
    if (radius <= 0.0) throw std::invalid_argument("halton_ball: need a positive radius");
    std::vector<Vec> points;
    points.reserve(static_cast<size_t>(count));
    unsigned long long idx = offset + 20;  // skip the degenerate start of the sequence
    while (static_cast<int>(points.size()) < count) {
        Vec p = 2.0 * halton_point(idx++, dim) - Vec::Ones(dim);
        if (p.norm() <= 1.0) points.push_back(radius * p);
    }
    return points;
}

std::vector<Vec> axis_points(int dim, double radius) {
    std::vector<Vec> points;
    points.reserve(static_cast<size_t>(4 * dim));
    for (int d = 0; d < dim; ++d) {
        for (double s : {radius, -radius, 0.5 * radius, -0.5 * radius}) {
            Vec p = Vec::Zero(dim);
            p[d] = s;
            points.push_back(p);
        }
    }
    return points;
}

}  // namespace nonholo
