from fractions import Fraction

import pytest

from bks2.exact_algebra import Scalar, Vec, identity
from bks2.hv_model import HiddenVariableModel, MaximalObservable, ProjectorObservable

BASIS = [Vec([1, 0, 0]), Vec([0, 1, 0]), Vec([0, 0, 1])]


def frac(p, q=1):
    return Scalar(Fraction(p, q))


def make_model(patterns, weights, eigenvalues=(1, 2, 3), maximal=None, labels=None, context=BASIS):
    """Projectors P1..P3 on a context (default the standard basis) plus a maximal M.

    ``patterns[k]`` is the (P1, P2, P3) response of hidden state k.  M answers
    the eigenvalue of the first projector valued 1, unless ``maximal`` gives
    its responses explicitly.
    """
    labels = labels or [f"l{k + 1}" for k in range(len(patterns))]
    xs = tuple(Scalar.coerce(x) for x in eigenvalues)
    obs = [ProjectorObservable(f"P{n + 1}", context[n]) for n in range(3)]
    obs.append(MaximalObservable("M", xs, tuple(context)))
    responses = {f"P{n + 1}": {l: Scalar(p[n]) for l, p in zip(labels, patterns)} for n in range(3)}
    if maximal is None:
        maximal = [xs[p.index(1)] if 1 in p else xs[0] for p in patterns]
    responses["M"] = {l: Scalar.coerce(x) for l, x in zip(labels, maximal)}
    return HiddenVariableModel(3, tuple(zip(labels, weights)), tuple(obs), responses)


@pytest.fixture
def delta_model():
    third = frac(1, 3)
    return make_model([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [third] * 3)


@pytest.fixture
def mixed_state():
    return identity(3).scale(frac(1, 3))


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[1])):
            terminalreporter.write_line(f"{key}: {ACCEPTANCE[key]}")
