import random
from fractions import Fraction

import pytest

from qfactor.errors import BadPrime, DivisionByZero, FieldMismatch
from qfactor.scalar import (
    Fp,
    FieldSpec,
    ModularReduction,
    QuadExt,
    is_prime,
    reduce_mod,
    sqrt_mod,
)

BACKENDS = [
    FieldSpec.rational(),
    FieldSpec.quadratic(5),
    FieldSpec.quadratic(-3),
    FieldSpec.prime(101),
    FieldSpec.prime(1048583),
]


@pytest.mark.parametrize("field", BACKENDS, ids=lambda f: f.tag + str(f.disc or f.p or ""))
def test_field_axioms(field):
    rng = random.Random(7)
    for _ in range(1000):
        x, y, z = (field.random(rng) for _ in range(3))
        assert field.add(x, y) == field.add(y, x)
        assert field.mul(x, y) == field.mul(y, x)
        assert field.add(field.add(x, y), z) == field.add(x, field.add(y, z))
        assert field.mul(field.mul(x, y), z) == field.mul(x, field.mul(y, z))
        assert field.mul(x, field.add(y, z)) == field.add(field.mul(x, y), field.mul(x, z))
        assert field.add(x, field.zero) == x
        assert field.mul(x, field.one) == x
        if not field.is_zero(x):
            assert field.mul(x, field.inv(x)) == field.one


def test_approx_axioms_within_tolerance():
    field = FieldSpec.approx()
    rng = random.Random(7)
    for _ in range(1000):
        x, y, z = (field.random(rng) for _ in range(3))
        assert field.eq(field.mul(x, field.add(y, z)),
                        field.add(field.mul(x, y), field.mul(x, z)))
        if not field.is_zero(x):
            assert field.eq(field.mul(x, field.inv(x)), 1.0)


def test_golden_ratio_algebra():
    # tau = (1 + sqrt5)/2 satisfies tau^2 = tau + 1 and 1/tau = tau - 1
    tau = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)
    assert tau * tau == tau + 1
    assert tau.inv() == tau - 1
    assert tau ** 4 == 3 * tau + 2


def test_conjugation_is_automorphism():
    rng = random.Random(11)
    K = FieldSpec.quadratic(5)
    for _ in range(200):
        x, y = K.random(rng), K.random(rng)
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()
        assert (x + y).conjugate() == x.conjugate() + y.conjugate()
        assert x.norm() == (x * x.conjugate()).a
        assert (x * x.conjugate()).b == 0


def test_fp_basics():
    a = Fp(5, 7)
    assert a + 3 == Fp(1, 7)
    assert a * a == Fp(4, 7)
    assert a.inv() * a == Fp(1, 7)
    assert a ** -2 == (a.inv()) ** 2
    with pytest.raises(DivisionByZero):
        Fp(0, 7).inv()
    with pytest.raises(FieldMismatch):
        Fp(1, 7) + Fp(1, 11)


def test_is_prime():
    assert [n for n in range(60) if is_prime(n)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    assert is_prime(1048583)
    assert not is_prime(1048583 * 1048589)
    # Carmichael number
    assert not is_prime(561)


def test_sqrt_mod():
    for p in (3, 5, 7, 11, 101, 1048583):
        for a in range(min(p, 50)):
            r = sqrt_mod(a, p)
            if r is None:
                assert pow(a, (p - 1) // 2, p) == p - 1
            else:
                assert r * r % p == a % p


def test_reduce_mod_is_ring_homomorphism():
    rng = random.Random(3)
    K = FieldSpec.quadratic(5)
    red = ModularReduction(K, 31)
    assert (red.sqrt_disc ** 2 - 5) % 31 == 0
    for _ in range(300):
        x, y = K.random(rng), K.random(rng)
        assert red(x * y) == red(x) * red(y)
        assert red(x + y) == red(x) + red(y)
    # rational specialization
    assert reduce_mod(Fraction(2, 3), 7) == Fp(3, 7)
    with pytest.raises(BadPrime):
        reduce_mod(Fraction(1, 7), 7)
    with pytest.raises(BadPrime):
        ModularReduction(K, 7)  # 5 is a non-residue mod 7


def test_root_choice_gives_conjugate_reduction():
    K = FieldSpec.quadratic(5)
    tau = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)
    r0 = ModularReduction(K, 31, root_choice=0)
    r1 = ModularReduction(K, 31, root_choice=1)
    assert r0(tau) != r1(tau)
    assert r0(tau.conjugate()) == r1(tau)


def test_fieldspec_validation():
    with pytest.raises(BadPrime):
        FieldSpec.prime(91)
    with pytest.raises(ValueError):
        FieldSpec.quadratic(12)  # not square-free
    with pytest.raises(ValueError):
        FieldSpec.quadratic(1)


@pytest.mark.parametrize("field", BACKENDS + [FieldSpec.approx()],
                         ids=lambda f: f.tag + str(f.disc or f.p or ""))
def test_json_roundtrip(field):
    assert FieldSpec.from_json(field.to_json()) == field
    rng = random.Random(5)
    for _ in range(50):
        x = field.random(rng)
        back = field.scalar_from_json(field.scalar_to_json(x))
        assert field.eq(back, x)


def test_scalar_json_fractions():
    field = FieldSpec.rational()
    assert field.scalar_to_json(Fraction(3, 4)) == "3/4"
    assert field.scalar_to_json(Fraction(5)) == 5
    assert field.scalar_from_json("3/4") == Fraction(3, 4)
    K = FieldSpec.quadratic(5)
    tau = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)
    assert K.scalar_from_json(K.scalar_to_json(tau)) == tau
