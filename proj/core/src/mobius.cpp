#include "sigmak/mobius.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const MobiusAtom& atom, int n) {
    std::visit(overloaded{
                   [n](const Translation& t) {
                       if (t.b.size() != n) throw PreconditionError("Translation: dimension mismatch");
                   },
                   [n](const Rotation& r) {
                       if (r.o.rows() != n || r.o.cols() != n) {
                           throw PreconditionError("Rotation: dimension mismatch");
                       }
                       const Matrix err = r.o.transpose() * r.o - Matrix::Identity(n, n);
                       if (err.cwiseAbs().maxCoeff() > 1e-12) {
                           throw PreconditionError("Rotation: matrix is not orthogonal");
                       }
                   },
                   [](const Dilation& d) {
                       if (!(d.s > 0.0) || !std::isfinite(d.s)) {
                           throw PreconditionError("Dilation: scale must be positive");
                       }
                   },
                   [](const Inversion&) {},
               },
               atom);
}

double checked_norm_sq(const Vector& y) {
    const double r2 = y.squaredNorm();
    if (!(r2 > std::numeric_limits<double>::min())) {
        throw DomainError("Moebius map evaluated at an inversion pole", 0.0);
    }
    return r2;
}

Vector apply_atom(const MobiusAtom& atom, const Vector& y) {
    return std::visit(overloaded{
                          [&](const Translation& t) -> Vector { return y + t.b; },
                          [&](const Rotation& r) -> Vector { return r.o * y; },
                          [&](const Dilation& d) -> Vector { return d.s * y; },
                          [&](const Inversion&) -> Vector { return y / checked_norm_sq(y); },
                      },
                      atom);
}

// Jet at y of v_a = |J_a|^{(n-2)/(2n)} (v o a), given the jet of v at a(y).
Jet2 pull_back(const MobiusAtom& atom, const Vector& y, const Jet2& v) {
    const auto n = y.size();
    return std::visit(
        overloaded{
            [&](const Translation&) { return Jet2(y, v.u, v.grad, v.hess); },
            [&](const Rotation& r) {
                return Jet2(y, v.u, r.o.transpose() * v.grad, r.o.transpose() * v.hess * r.o);
            },
            [&](const Dilation& d) {
                const double w = std::pow(d.s, 0.5 * (n - 2.0));
                return Jet2(y, w * v.u, (w * d.s) * v.grad, (w * d.s * d.s) * v.hess);
            },
            [&](const Inversion&) {
                const double r2 = checked_norm_sq(y);
                const Matrix id = Matrix::Identity(n, n);
                const Matrix yy = y * y.transpose();
                const Matrix dz = (id - (2.0 / r2) * yy) / r2;

                // f = v o z, with z(y) = y / |y|^2.
                const Vector grad_f = dz * v.grad;
                const double gy = v.grad.dot(y);
                Matrix hess_f = dz * v.hess * dz;
                hess_f -= (2.0 / (r2 * r2)) * (v.grad * y.transpose() + y * v.grad.transpose());
                hess_f -= (2.0 * gy / (r2 * r2)) * id;
                hess_f += (8.0 * gy / (r2 * r2 * r2)) * yy;

                // w = |y|^{2-n}.
                const double w = std::pow(r2, 0.5 * (2.0 - n));
                const double wn = (2.0 - n) * std::pow(r2, -0.5 * n);
                const Vector grad_w = wn * y;
                const Matrix hess_w = wn * (id - (n / r2) * yy);

                Vector grad = w * grad_f + v.u * grad_w;
                Matrix hess = w * hess_f + grad_w * grad_f.transpose() +
                              grad_f * grad_w.transpose() + v.u * hess_w;
                return Jet2(y, w * v.u, std::move(grad), std::move(hess));
            },
        },
        atom);
}

}  // namespace

MobiusMap::MobiusMap(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionError("MobiusMap: dimension must be positive");
}

MobiusMap::MobiusMap(int dim, std::vector<MobiusAtom> word) : MobiusMap(dim) {
    for (const auto& atom : word) validate(atom, dim);
    word_ = std::move(word);
}

MobiusMap MobiusMap::then(MobiusAtom atom) const {
    validate(atom, dim_);
    MobiusMap out = *this;
    out.word_.push_back(std::move(atom));
    return out;
}

MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner) {
    if (outer.dim() != inner.dim()) throw PreconditionError("compose: dimension mismatch");
    std::vector<MobiusAtom> word = inner.word();
    word.insert(word.end(), outer.word().begin(), outer.word().end());
    return MobiusMap(inner.dim(), std::move(word));
}

Vector mobius_apply(const MobiusMap& psi, const Vector& x) {
    if (x.size() != psi.dim()) throw PreconditionError("mobius_apply: dimension mismatch");
    Vector y = x;
    for (const auto& atom : psi.word()) y = apply_atom(atom, y);
    return y;
}

double jacobian_det(const MobiusMap& psi, const Vector& x) {
    if (x.size() != psi.dim()) throw PreconditionError("jacobian_det: dimension mismatch");
    const int n = psi.dim();
    Vector y = x;
    double det = 1.0;
    for (const auto& atom : psi.word()) {
        if (const auto* d = std::get_if<Dilation>(&atom)) {
            det *= std::pow(d->s, n);
        } else if (std::holds_alternative<Inversion>(atom)) {
            det *= std::pow(checked_norm_sq(y), -n);
        }
        y = apply_atom(atom, y);
    }
    return det;
}

ScalarField transform_field(const ScalarField& u, const MobiusMap& psi) {
    if (u.dim() != psi.dim()) throw PreconditionError("transform_field: dimension mismatch");
    auto eval = [u, psi](const Vector& x) {
        const auto& word = psi.word();
        std::vector<Vector> trail;
        trail.reserve(word.size() + 1);
        trail.push_back(x);
        for (const auto& atom : word) trail.push_back(apply_atom(atom, trail.back()));
        Jet2 jet = u.jet(trail.back());
        for (std::size_t j = word.size(); j-- > 0;) jet = pull_back(word[j], trail[j], jet);
        return jet;
    };
    auto contains = [u, psi](const Vector& x) {
        try {
            return u.contains(mobius_apply(psi, x));
        } catch (const DomainError&) {
            return false;
        }
    };
    std::optional<std::string> tag;
    if (u.tag()) tag = *u.tag() + "|moebius";
    return ScalarField(u.dim(), std::move(eval), std::move(contains), std::move(tag));
}

ScalarField kelvin_transform(const ScalarField& u) {
    return transform_field(u, MobiusMap(u.dim(), {Inversion{}}));
}

MobiusMap random_mobius(int dim, int length, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> gauss;
    std::vector<MobiusAtom> word;
    for (int i = 0; i < length; ++i) {
        switch (pick(rng)) {
            case 0: {
                Vector b(dim);
                for (int j = 0; j < dim; ++j) b[j] = unit(rng);
                word.emplace_back(Translation{std::move(b)});
                break;
            }
            case 1: {
                Matrix g(dim, dim);
                for (int r = 0; r < dim; ++r)
                    for (int c = 0; c < dim; ++c) g(r, c) = gauss(rng);
                Eigen::HouseholderQR<Matrix> qr(g);
                Matrix q = qr.householderQ();
                const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
                for (int c = 0; c < dim; ++c) {
                    if (rr(c, c) < 0.0) q.col(c) *= -1.0;
                }
                word.emplace_back(Rotation{std::move(q)});
                break;
            }
            case 2:
                word.emplace_back(Dilation{std::exp(std::log(2.0) * unit(rng))});
                break;
            default:
                word.emplace_back(Inversion{});
                break;
        }
    }
    return MobiusMap(dim, std::move(word));
}

}  // namespace sigmak
