import itertools
import random
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bks2.exact_algebra import (
    ONE,
    SQRT2,
    ZERO,
    Scalar,
    ScalarParseError,
    SymMatrix,
    Vec,
    diag,
    identity,
    inner_product,
    is_density,
    parse_scalar,
    projector_from_ray,
    trace_product,
)

rationals = st.builds(Fraction, st.integers(-999, 999), st.integers(1, 50))
scalars = st.builds(Scalar, rationals, rationals)
nonzero_scalars = scalars.filter(bool)


def third():
    return Scalar(Fraction(1, 3))


class TestScalarExamples:
    def test_difference_of_squares(self):
        assert Scalar(1, 1) * Scalar(1, -1) == Scalar(-1)

    def test_rationalize(self):
        assert ONE / SQRT2 == Scalar(0, Fraction(1, 2))

    def test_cmp(self):
        assert Scalar(1, 1).cmp(2) == 1
        assert Scalar(1, 1) > 2
        assert Scalar(3, -2) > 0  # 3 - 2.828...
        assert Scalar(-3, 2) < 0
        assert Scalar(2, -2) < 0

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_lowest_terms(self):
        x = Scalar(Fraction(2, -4), Fraction(6, 3))
        assert x.a == Fraction(-1, 2) and x.a.denominator == 2
        assert x.b == 2

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            Scalar(0.5)
        with pytest.raises(TypeError):
            ONE + 0.5

    def test_equality_with_rationals_and_hash(self):
        assert Scalar(3) == 3
        assert Scalar(Fraction(1, 2)) == Fraction(1, 2)
        assert hash(Scalar(3)) == hash(Scalar(Fraction(6, 2)))
        assert Scalar(0, 1) != 1


def _random_scalars(seed, n, k):
    rng = random.Random(seed)

    def rat():
        den = rng.choice([1, 1, 2, 3, 7, 12, 70, 99, 408])
        return Fraction(rng.randint(-600, 600), den)

    for _ in range(n):
        yield tuple(Scalar(rat(), rat() if rng.random() < 0.8 else 0) for _ in range(k))


def test_field_axioms_fuzz():
    for x, y, z in _random_scalars(1, 10_000, 3):
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x and x * y == y * x
        assert x - x == ZERO
        if x:
            assert x * x.inverse() == ONE
            assert (y / x) * x == y


@settings(max_examples=300, deadline=None)
@given(scalars, scalars, scalars)
def test_field_axioms_hypothesis(x, y, z):
    assert x * (y + z) == x * y + x * z
    if x:
        assert (y / x) * x == y


def _decimal(x: Scalar) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 80
        return Decimal(x.a.numerator) / x.a.denominator + Decimal(x.b.numerator) / x.b.denominator * Decimal(2).sqrt()


def _decimal_sign(x, y):
    diff = _decimal(x) - _decimal(y)
    return 0 if x == y else (1 if diff > 0 else -1)


def test_cmp_agrees_with_high_precision_decimal_fuzz():
    for x, y in _random_scalars(2, 10_000, 2):
        assert x.cmp(y) == _decimal_sign(x, y)


@settings(max_examples=300, deadline=None)
@given(scalars, scalars)
def test_cmp_agrees_with_high_precision_decimal(x, y):
    assert x.cmp(y) == _decimal_sign(x, y)


def test_cmp_near_cancellation():
    # 99/70 is a convergent of sqrt2; the difference is about 7e-5
    x = Scalar(Fraction(99, 70))
    assert x > SQRT2
    assert Scalar(Fraction(140, 99)) < SQRT2
    assert (Scalar(577, -408)).sign() == 1  # 577 - 408*sqrt2 ~ 8.7e-7


class TestParse:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("3", Scalar(3)),
            ("-3/4", Scalar(Fraction(-3, 4))),
            ("1/2+3/4*r2", Scalar(Fraction(1, 2), Fraction(3, 4))),
            ("-1/2*r2", Scalar(0, Fraction(-1, 2))),
            ("r2", SQRT2),
            ("-r2", -SQRT2),
            ("1-r2", Scalar(1, -1)),
            ("0", ZERO),
            ("6/4", Scalar(Fraction(3, 2))),
        ],
    )
    def test_valid(self, text, expected):
        assert parse_scalar(text) == expected

    @pytest.mark.parametrize("text", ["0.5", "1e3", " 1", "1 ", "2r2", "+1", "1/0", "r3", "", "sqrt2", "1/2*", "--1", "١"])
    def test_invalid(self, text):
        with pytest.raises(ScalarParseError):
            parse_scalar(text)

    @settings(max_examples=500)
    @given(scalars)
    def test_round_trip(self, x):
        assert parse_scalar(str(x)) == x


class TestInnerProduct:
    def test_examples(self):
        assert inner_product(Vec([1, 0, 0]), Vec([1, 0, 0])) == ONE
        assert inner_product(Vec([1, 1, 0]), Vec([1, -1, 0])) == ZERO
        assert inner_product(Vec([SQRT2, 1, 0]), Vec([1, -SQRT2, 0])) == ZERO

    def test_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(Vec([1, 0]), Vec([1, 0, 0]))


class TestProjector:
    def test_examples(self):
        assert projector_from_ray(Vec([1, 0, 0])) == diag([1, 0, 0])
        h = Scalar(Fraction(1, 2))
        assert projector_from_ray(Vec([1, 1, 0])).rows == ((h, h, ZERO), (h, h, ZERO), (ZERO, ZERO, ZERO))
        assert projector_from_ray(Vec([0, 0, 2])) == diag([0, 0, 1])

    def test_zero(self):
        with pytest.raises(ValueError):
            projector_from_ray(Vec([0, 0, 0]))

    @settings(max_examples=300, deadline=None)
    @given(st.lists(scalars, min_size=2, max_size=4).filter(any))
    def test_idempotent_trace_one(self, entries):
        p = projector_from_ray(Vec(entries))
        assert (p @ p).rows == p.rows
        assert p.trace() == ONE
        assert p.is_symmetric()


class TestTraceProduct:
    def test_examples(self):
        p = projector_from_ray(Vec([1, 2, SQRT2]))
        assert trace_product(identity(3).scale(third()), p) == third()
        assert trace_product(p, p) == ONE
        h = Fraction(1, 2)
        assert trace_product(diag([h, h, 0]), diag([0, 0, 1])) == ZERO

    @settings(max_examples=60, deadline=None)
    @given(st.lists(scalars, min_size=9, max_size=9), st.lists(scalars, min_size=9, max_size=9))
    def test_symmetric_and_matches_product(self, xs, ys):
        def sym(v):
            return SymMatrix([[v[min(i, j) * 3 + max(i, j)] for j in range(3)] for i in range(3)])

        a, b = sym(xs), sym(ys)
        assert trace_product(a, b) == trace_product(b, a) == (a @ b).trace()


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ZERO
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _psd_by_minors(m: SymMatrix) -> bool:
    # every principal minor nonnegative: an independent PSD criterion
    n = m.dimension
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            if _det([[m.rows[i][j] for j in idx] for i in idx]).sign() < 0:
                return False
    return True


class TestDensity:
    def test_examples(self):
        assert is_density(identity(3).scale(third()))
        r = is_density(diag([2, -1, 0]))
        assert not r and "semidefinite" in r.failure
        r = is_density(diag([Fraction(1, 2)] * 3))
        assert not r and "trace" in r.failure

    def test_not_symmetric(self):
        m = SymMatrix.unchecked([[Fraction(1, 2), 1], [0, Fraction(1, 2)]])
        assert is_density(m).failure == "not symmetric"

    def test_zero_diagonal_offdiagonal(self):
        m = SymMatrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
        assert not is_density(m)

    def test_irrational_entries(self):
        # projector onto (1, sqrt2, 0)/sqrt3 is PSD; tweak it to lose PSD
        p = projector_from_ray(Vec([1, SQRT2, 0]))
        assert is_density(p)
        bad = SymMatrix([[p[0, 0], p[0, 1] + Scalar(0, Fraction(1, 100)), 0], [p[0, 1] + Scalar(0, Fraction(1, 100)), p[1, 1], 0], [0, 0, 0]])
        assert not is_density(bad)

    @settings(max_examples=400, deadline=None)
    @given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=4), min_size=6, max_size=6), st.booleans())
    def test_psd_agrees_with_principal_minors(self, v, irr):
        a, b, c, d, e, f = v
        if irr:
            b = Scalar(0, b)
        m = SymMatrix([[a, b, c], [b, d, e], [c, e, f]])
        tr = m.trace()
        if tr.sign() > 0:
            m = m.scale(tr.inverse())
            m = SymMatrix(m.rows)
            assert bool(is_density(m)) == _psd_by_minors(m)
