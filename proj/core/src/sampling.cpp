#include "sigmak/sampling.hpp"

#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

double radical_inverse(std::size_t index, int base) {
    double inv_base = 1.0 / base;
    double f = inv_base;
    double result = 0.0;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f *= inv_base;
    }
    return result;
}

std::vector<Vector> halton(int dim, std::size_t count, std::size_t skip) {
    if (dim < 1 || dim > static_cast<int>(std::size(kPrimes))) {
        throw PreconditionError("halton: unsupported dimension");
    }
    std::vector<Vector> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d) p[d] = radical_inverse(skip + i, kPrimes[d]);
        pts.push_back(std::move(p));
    }
    return pts;
}

std::vector<Vector> halton_box(int dim, std::size_t count, double half_width, std::size_t skip) {
    auto pts = halton(dim, count, skip);
    for (auto& p : pts) p = (2.0 * p.array() - 1.0) * half_width;
    return pts;
}

std::vector<Vector> sphere_directions(int dim, std::size_t count) {
    std::vector<Vector> dirs;
    dirs.reserve(count);
    for (int i = 0; i < dim && dirs.size() < count; ++i) {
        for (double s : {1.0, -1.0}) {
            if (dirs.size() >= count) break;
            Vector e = Vector::Zero(dim);
            e[i] = s;
            dirs.push_back(std::move(e));
        }
    }
    std::size_t index = 1;
    while (dirs.size() < count) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d) p[d] = 2.0 * radical_inverse(index, kPrimes[d]) - 1.0;
        ++index;
        const double r = p.norm();
        if (r > 1e-3 && r <= 1.0) dirs.push_back(p / r);
    }
    return dirs;
}

}  // namespace sigmak
