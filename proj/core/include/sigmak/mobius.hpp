#pragma once

#include <random>
#include <variant>
#include <vector>

#include "sigmak/conformal.hpp"

namespace sigmak {

struct Translation {
    Vector b;
};

/// x -> O x with O orthogonal (O^T O = I to 1e-12).
struct Rotation {
    Matrix o;
};

/// x -> s x, s > 0.
struct Dilation {
    double s;
};

/// x -> x / |x|^2.
struct Inversion {};

using MobiusAtom = std::variant<Translation, Rotation, Dilation, Inversion>;

/// Moebius transformation of R^n u {inf} stored as a word of generators.
/// Atoms are applied in order: word[0] first.
class MobiusMap {
public:
    explicit MobiusMap(int dim);
    MobiusMap(int dim, std::vector<MobiusAtom> word);

    static MobiusMap identity(int dim) { return MobiusMap(dim); }

    int dim() const noexcept { return dim_; }
    const std::vector<MobiusAtom>& word() const noexcept { return word_; }

    /// Appends `atom`, i.e. returns atom o (*this).
    MobiusMap then(MobiusAtom atom) const;

private:
    int dim_;
    std::vector<MobiusAtom> word_;
};

/// outer o inner: applies `inner` first.
MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);

/// Throws DomainError when x (or an intermediate image) hits an inversion pole.
Vector mobius_apply(const MobiusMap& psi, const Vector& x);

/// |det D psi(x)|: product of s^n per dilation and |y|^{-2n} per inversion at its argument y.
double jacobian_det(const MobiusMap& psi, const Vector& x);

/// u_psi = |J_psi|^{(n-2)/(2n)} (u o psi), with analytically chain-ruled jets.
ScalarField transform_field(const ScalarField& u, const MobiusMap& psi);

/// Kelvin transform |x|^{2-n} u(x / |x|^2).
ScalarField kelvin_transform(const ScalarField& u);

/// Random generator word of `length` atoms: translations in [-1,1]^n,
/// Haar-like rotations, dilations in [1/2, 2], and inversions.
MobiusMap random_mobius(int dim, int length, std::mt19937_64& rng);

}  // namespace sigmak
