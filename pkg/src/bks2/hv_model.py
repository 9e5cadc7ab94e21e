"""Finite deterministic hidden-variable models and the checks run against them.

A model is a finite set of hidden states, each with an exact weight, and a
response table giving every declared observable a value per hidden state.
The checks compare those tables with Born probabilities and with the
structural conditions that force valuations to be orthogonally additive.

Hidden states of weight zero are allowed and are exempt from every value
constraint: with a finite sample space "almost all" means "every state of
positive weight".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .coloring import Valuation
from .exact_algebra import (
    ONE,
    ZERO,
    Scalar,
    SymMatrix,
    Vec,
    identity,
    is_density,
    projector_from_ray,
    trace_product,
)
from .hypergraph import (
    Context,
    OrthoHypergraph,
    Ray,
    RaySet,
    build_hypergraph,
    canonicalize_ray,
    validate_context,
)

__all__ = [
    "ModelError",
    "ProjectorObservable",
    "MaximalObservable",
    "ObservableDecl",
    "HiddenVariableModel",
    "Equation",
    "Finding",
    "CheckReport",
    "OutcomeTable",
    "validate_model",
    "check_born",
    "check_born_all",
    "check_bks2",
    "check_at_least_one",
    "check_orthogonal_additivity",
    "check_lemma1",
    "check_lemma2",
    "check_joint_zero",
    "outcome_table",
    "induced_valuation",
    "build_product_model",
    "model_hypergraph",
]


class ModelError(ValueError):
    """A precondition of a model operation is not met."""


@dataclass(frozen=True)
class ProjectorObservable:
    id: str
    ray: Vec
    kind = "projector"

    @property
    def spectrum(self) -> tuple[Scalar, ...]:
        return (ZERO, ONE)

    def spectral_projector(self, x: Scalar) -> SymMatrix:
        p = projector_from_ray(self.ray)
        if x == ONE:
            return p
        if x == ZERO:
            return identity(self.ray.dimension) - p
        raise ModelError(f"{x} is not in the spectrum of {self.id}")


@dataclass(frozen=True)
class MaximalObservable:
    """``M = sum_n x_n P_n`` over a context of rank-one projectors."""

    id: str
    eigenvalues: tuple[Scalar, ...]
    context: tuple[Vec, ...]
    kind = "maximal"

    @property
    def spectrum(self) -> tuple[Scalar, ...]:
        return self.eigenvalues

    def spectral_projector(self, x: Scalar) -> SymMatrix:
        for xn, v in zip(self.eigenvalues, self.context):
            if xn == x:
                return projector_from_ray(v)
        raise ModelError(f"{x} is not in the spectrum of {self.id}")


ObservableDecl = Union[ProjectorObservable, MaximalObservable]


@dataclass(frozen=True, eq=False)
class HiddenVariableModel:
    dimension: int
    lambdas: tuple[tuple[str, Scalar], ...]
    observables: tuple[ObservableDecl, ...]
    responses: Mapping[str, Mapping[str, Scalar]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambdas", tuple((str(l), Scalar.coerce(w)) for l, w in self.lambdas))
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(
            self,
            "responses",
            {o: {l: Scalar.coerce(v) for l, v in table.items()} for o, table in self.responses.items()},
        )

    @property
    def labels(self) -> list[str]:
        return [l for l, _ in self.lambdas]

    def weight(self, label: str) -> Scalar:
        for l, w in self.lambdas:
            if l == label:
                return w
        raise ModelError(f"unknown hidden state {label!r}")

    def observable(self, obs_id: str) -> ObservableDecl:
        for o in self.observables:
            if o.id == obs_id:
                return o
        raise ModelError(f"unknown observable {obs_id!r}")

    def value(self, obs_id: str, label: str) -> Scalar:
        try:
            return self.responses[obs_id][label]
        except KeyError:
            raise ModelError(f"no response of {obs_id!r} for hidden state {label!r}") from None

    def projector_for(self, ray: Vec | Ray | Sequence) -> str | None:
        """Id of the projector observable on the given ray, or None."""
        target = canonicalize_ray(ray.entries if isinstance(ray, Ray) else ray).entries
        for o in self.observables:
            if isinstance(o, ProjectorObservable) and canonicalize_ray(o.ray).entries == target:
                return o.id
        return None

    def positive(self) -> list[tuple[str, Scalar]]:
        return [(l, w) for l, w in self.lambdas if w.sign() > 0]


# -- reports --------------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    """An exact comparison ``lhs == rhs`` recorded by a check."""

    name: str
    lhs: Scalar
    rhs: Scalar

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds}


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    details: Mapping[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "details": dict(self.details)}


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check.

    ``verdict`` is "pass" when there are no findings and nothing was left
    unchecked, "hypothesis-failure" when the only findings say the check's
    premise does not hold, "incomplete" when nothing failed but some items
    could not be checked, and "fail" otherwise.
    """

    name: str
    findings: tuple[Finding, ...] = ()
    equations: tuple[Equation, ...] = ()
    unchecked: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        if self.findings:
            if all(f.kind == "hypothesis" for f in self.findings):
                return "hypothesis-failure"
            return "fail"
        return "incomplete" if self.unchecked else "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def equation(self, name: str) -> Equation:
        for e in self.equations:
            if e.name == name:
                return e
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "verdict": self.verdict,
            "findings": [f.as_dict() for f in self.findings],
            "equations": [e.as_dict() for e in self.equations],
            "unchecked": list(self.unchecked),
        }


def _require_density(d: SymMatrix, dimension: int) -> None:
    if d.dimension != dimension:
        raise ModelError(f"state has dimension {d.dimension}, model has {dimension}")
    diag = is_density(d)
    if not diag:
        raise ModelError(f"invalid density operator: {diag.failure}")


def _context_projectors(m: HiddenVariableModel, ctx: Sequence[Vec | Ray]) -> list[str]:
    ids = []
    for v in ctx:
        pid = m.projector_for(v)
        if pid is None:
            shown = v if isinstance(v, Ray) else canonicalize_ray(v)
            raise ModelError(f"no projector observable declared for ray ({shown})")
        ids.append(pid)
    return ids


def _ctx_vecs(ctx: Sequence[Vec | Ray | Sequence]) -> list[Vec]:
    return [v.vec if isinstance(v, Ray) else (v if isinstance(v, Vec) else Vec(v)) for v in ctx]


def _total(ws: Iterable[Scalar]) -> Scalar:
    return sum(ws, ZERO)


# -- validation -----------------------------------------------------------


def validate_model(m: HiddenVariableModel) -> CheckReport:
    """Probability measure, declaration sanity, and total in-spectrum responses."""
    out: list[Finding] = []
    labels = m.labels
    seen = set()
    for l in labels:
        if l in seen:
            out.append(Finding("lambda", f"duplicate hidden state label {l!r}", {"lambda": l}))
        seen.add(l)
    for l, w in m.lambdas:
        if w.sign() < 0:
            out.append(Finding("weight", f"negative weight {w} on {l!r}", {"lambda": l, "weight": str(w)}))
    total = _total(w for _, w in m.lambdas)
    if total != ONE:
        out.append(Finding("weight", f"weights sum to {total}, not 1", {"sum": str(total)}))

    ids = set()
    for o in m.observables:
        if o.id in ids:
            out.append(Finding("observable", f"duplicate observable id {o.id!r}", {"observable": o.id}))
        ids.add(o.id)
        out.extend(_validate_decl(o, m.dimension))

    for obs_id in m.responses:
        if obs_id not in ids:
            out.append(Finding("response", f"responses given for undeclared observable {obs_id!r}",
                               {"observable": obs_id}))
    for o in m.observables:
        table = m.responses.get(o.id, {})
        spectrum = set(o.spectrum)
        for l in labels:
            if l not in table:
                out.append(Finding("response", f"{o.id} has no response for {l!r}",
                                   {"observable": o.id, "lambda": l}))
            elif table[l] not in spectrum:
                out.append(Finding("spectrum", f"{o.id} responds {table[l]} on {l!r}, outside its spectrum",
                                   {"observable": o.id, "lambda": l, "value": str(table[l])}))
        for l in table:
            if l not in seen:
                out.append(Finding("response", f"{o.id} responds on unknown hidden state {l!r}",
                                   {"observable": o.id, "lambda": l}))
    return CheckReport("validate", tuple(out))


def _validate_decl(o: ObservableDecl, dimension: int) -> list[Finding]:
    out = []
    where = {"observable": o.id}
    if isinstance(o, ProjectorObservable):
        if o.ray.dimension != dimension:
            out.append(Finding("observable", f"{o.id}: ray has dimension {o.ray.dimension}", where))
        elif o.ray.is_zero():
            out.append(Finding("observable", f"{o.id}: zero ray", where))
        return out
    xs = o.eigenvalues
    if len(xs) != dimension or len(o.context) != dimension:
        out.append(Finding("observable", f"{o.id}: needs {dimension} eigenvalues and context rays", where))
        return out
    if len(set(xs)) != len(xs):
        out.append(Finding("observable", f"{o.id}: eigenvalues are not distinct", where))
    if any(not x for x in xs):
        out.append(Finding("observable", f"{o.id}: zero eigenvalue", where))
    if any(v.dimension != dimension or v.is_zero() for v in o.context):
        out.append(Finding("observable", f"{o.id}: bad context ray", where))
        return out
    try:
        rs = RaySet(o.context)
    except ValueError as exc:
        out.append(Finding("observable", f"{o.id}: {exc}", where))
        return out
    problems = [] if len(rs) == dimension else ["repeated ray"]
    problems += validate_context(range(len(rs)), rs)
    for p in problems:
        out.append(Finding("observable", f"{o.id}: context {p}", where))
    return out


# -- Born rule ------------------------------------------------------------


def _born_sides(m: HiddenVariableModel, d: SymMatrix, o: ObservableDecl, xs: Sequence[Scalar]):
    proj = None
    for x in xs:
        p = o.spectral_projector(x)
        proj = p if proj is None else proj + p
    born = trace_product(proj, d) if proj is not None else ZERO
    xset = set(xs)
    measure = _total(w for l, w in m.lambdas if m.value(o.id, l) in xset)
    return born, measure


def check_born(
    m: HiddenVariableModel,
    d: SymMatrix,
    obs: str | ObservableDecl,
    xs: Iterable[Scalar] | None = None,
) -> CheckReport:
    """Compare tr(P_X D) with the weight of hidden states answering inside X.

    Without ``xs`` every singleton of the observable's spectrum is checked.
    """
    _require_density(d, m.dimension)
    o = m.observable(obs) if isinstance(obs, str) else obs
    spectrum = set(o.spectrum)
    if xs is None:
        sets = [[x] for x in o.spectrum]
    else:
        xs = [Scalar.coerce(x) for x in xs]
        bad = [x for x in xs if x not in spectrum]
        if bad:
            raise ModelError(f"values {', '.join(map(str, bad))} are not in the spectrum of {o.id}")
        sets = [xs]
    eqs, out = [], []
    for x in sets:
        label = "{" + ",".join(str(v) for v in x) + "}"
        born, measure = _born_sides(m, d, o, x)
        eqs.append(Equation(f"born[{o.id} in {label}]", born, measure))
        if born != measure:
            out.append(Finding("born", f"tr(P_X D) = {born} but hidden-state measure is {measure}",
                               {"observable": o.id, "X": label, "born": str(born), "measure": str(measure)}))
    return CheckReport("born", tuple(out), tuple(eqs))


def check_born_all(m: HiddenVariableModel, d: SymMatrix) -> CheckReport:
    """check_born over every declared observable and spectral singleton."""
    findings, eqs = [], []
    for o in m.observables:
        r = check_born(m, d, o)
        findings.extend(r.findings)
        eqs.extend(r.equations)
    return CheckReport("born", tuple(findings), tuple(eqs))


# -- structural conditions -------------------------------------------------


def check_bks2(m: HiddenVariableModel) -> CheckReport:
    """A maximal observable answering x_n forces its projector P_n to answer 1.

    Maximal observables whose context projectors are not all declared are
    listed as unchecked rather than passed.
    """
    out, unchecked = [], []
    for o in m.observables:
        if not isinstance(o, MaximalObservable):
            continue
        pids = [m.projector_for(v) for v in o.context]
        if None in pids:
            missing = [str(canonicalize_ray(v)) for v, p in zip(o.context, pids) if p is None]
            unchecked.append(f"{o.id}: no projector declared for ray(s) {'; '.join(missing)}")
            continue
        for l, _ in m.positive():
            x = m.value(o.id, l)
            if x not in o.eigenvalues:
                continue  # out-of-spectrum responses are validate_model's business
            n = o.eigenvalues.index(x)
            if m.value(pids[n], l) != ONE:
                out.append(Finding(
                    "bks2",
                    f"{l!r}: {o.id} = {x} but {pids[n]} = {m.value(pids[n], l)}",
                    {"lambda": l, "observable": o.id, "n": str(n + 1), "projector": pids[n]},
                ))
    return CheckReport("bks2", tuple(out), (), tuple(unchecked))


def check_at_least_one(m: HiddenVariableModel, ctx: Sequence[Vec | Ray]) -> CheckReport:
    """The hidden states giving some projector of the context the value 1 have measure 1."""
    pids = _context_projectors(m, ctx)
    hit = _total(w for l, w in m.lambdas if any(m.value(p, l) == ONE for p in pids))
    eq = Equation("at_least_one_measure", hit, ONE)
    out = []
    if not eq.holds:
        none = [l for l, w in m.positive() if all(m.value(p, l) != ONE for p in pids)]
        out.append(Finding("at_least_one", f"measure with some projector valued 1 is {hit}",
                           {"measure": str(hit), "lambdas": ",".join(none), "projectors": ",".join(pids)}))
    return CheckReport("at_least_one", tuple(out), (eq,))


check_lemma1 = check_at_least_one


@dataclass(frozen=True)
class OutcomeTable:
    """Weight of each joint response pattern over a context's projectors."""

    projectors: tuple[str, ...]
    p: Mapping[tuple[int, ...], Scalar]

    def __getitem__(self, pattern: tuple[int, ...] | str) -> Scalar:
        if isinstance(pattern, str):
            pattern = tuple(int(c) for c in pattern)
        return self.p[pattern]

    @property
    def size(self) -> int:
        return len(self.projectors)

    def total(self) -> Scalar:
        return _total(self.p.values())

    def marginal(self, k: int) -> Scalar:
        return _total(w for s, w in self.p.items() if s[k] == 1)

    def support(self) -> list[tuple[int, ...]]:
        return [s for s, w in self.p.items() if w]

    def as_dict(self) -> dict[str, str]:
        return {"".join(map(str, s)): str(w) for s, w in self.p.items()}


def outcome_table(m: HiddenVariableModel, ctx: Sequence[Vec | Ray]) -> OutcomeTable:
    pids = _context_projectors(m, ctx)
    table = {s: ZERO for s in itertools.product((0, 1), repeat=len(pids))}
    for l, w in m.lambdas:
        pattern = []
        for p in pids:
            v = m.value(p, l)
            if v not in (ZERO, ONE):
                raise ModelError(f"{p} responds {v} on {l!r}, not a projector value")
            pattern.append(int(v == ONE))
        table[tuple(pattern)] += w
    return OutcomeTable(tuple(pids), table)


def _single_one(s: tuple[int, ...]) -> bool:
    return sum(s) == 1


def check_orthogonal_additivity(
    m: HiddenVariableModel, ctx: Sequence[Vec | Ray], d: SymMatrix
) -> CheckReport:
    """Run the chain from the outcome table to "exactly one projector is 1".

    Equations recorded, each with both exact sides:
      total_probability      1 = sum of all pattern weights
      born_marginal[P]       tr(D P) = weight of patterns with P valued 1
      trace_resolution       1 = tr(D) = sum_P tr(D P)
      marginal_sum           1 = sum of the marginals
      multiple_ones_mass     sum over patterns of (#ones - 1) * p = 0, the
                             weight of patterns with two or more ones counted
                             with multiplicity; in dimension 3 this is
                             2p(111) + p(110) + p(101) + p(011)
      off_support_mass       weight outside the single-one patterns = 0
    If the all-zero pattern carries weight the premise fails, which is
    reported as a hypothesis failure instead of an equation violation.
    """
    _require_density(d, m.dimension)
    vecs = _ctx_vecs(ctx)
    rs = RaySet(vecs)
    problems = validate_context(range(len(rs)), rs) if len(rs) == len(vecs) else ["repeated ray"]
    if problems or len(vecs) != m.dimension:
        raise ModelError(f"not a context: {'; '.join(problems) or 'wrong size'}")
    t = outcome_table(m, vecs)
    k = t.size
    marginals = [t.marginal(i) for i in range(k)]
    traces = [trace_product(d, projector_from_ray(v)) for v in vecs]
    multiple = _total((sum(s) - 1) * w for s, w in t.p.items() if sum(s) >= 2)
    off = _total(w for s, w in t.p.items() if not _single_one(s))

    eqs = [Equation("total_probability", ONE, t.total())]
    eqs += [Equation(f"born_marginal[{pid}]", tr, mg) for pid, tr, mg in zip(t.projectors, traces, marginals)]
    eqs += [
        Equation("trace_resolution", d.trace(), _total(traces)),
        Equation("marginal_sum", ONE, _total(marginals)),
        Equation("multiple_ones_mass", multiple, ZERO),
        Equation("off_support_mass", off, ZERO),
    ]

    zero_pattern = (0,) * k
    if t.p[zero_pattern]:
        f = Finding("hypothesis", f"all-zero pattern has weight {t.p[zero_pattern]}",
                    {"p_all_zero": str(t.p[zero_pattern])})
        return CheckReport("orthogonal_additivity", (f,), tuple(eqs))

    out = []
    for e in eqs:
        if not e.holds:
            out.append(Finding("equation", f"{e.name}: {e.lhs} != {e.rhs}",
                               {"equation": e.name, "lhs": str(e.lhs), "rhs": str(e.rhs)}))
    bad = [s for s in t.support() if not _single_one(s)]
    for s in bad:
        out.append(Finding("support", f"pattern {''.join(map(str, s))} has weight {t.p[s]}",
                           {"pattern": "".join(map(str, s)), "weight": str(t.p[s])}))
    return CheckReport("orthogonal_additivity", tuple(out), tuple(eqs))


check_lemma2 = check_orthogonal_additivity


def check_joint_zero(m: HiddenVariableModel, ctx: Sequence[Vec | Ray]) -> CheckReport:
    """No two projectors of a context are jointly 1, and never are all 0, up to measure zero."""
    pids = _context_projectors(m, ctx)
    out, eqs = [], []
    for i, j in itertools.combinations(range(len(pids)), 2):
        both = _total(w for l, w in m.lambdas if m.value(pids[i], l) == ONE and m.value(pids[j], l) == ONE)
        eqs.append(Equation(f"joint[{pids[i]},{pids[j]}]", both, ZERO))
        if both:
            out.append(Finding("pair", f"{pids[i]} and {pids[j]} are jointly 1 with weight {both}",
                               {"projectors": f"{pids[i]},{pids[j]}", "weight": str(both)}))
    none = _total(w for l, w in m.lambdas if all(m.value(p, l) != ONE for p in pids))
    eqs.append(Equation("all_zero", none, ZERO))
    if none:
        out.append(Finding("all_zero", f"all projectors are 0 with weight {none}", {"weight": str(none)}))
    return CheckReport("joint_zero", tuple(out), tuple(eqs))


# -- bridges to the coloring side -------------------------------------------


def model_hypergraph(m: HiddenVariableModel) -> tuple[OrthoHypergraph, dict[int, str]]:
    """Hypergraph over the model's projector rays, and ray id -> projector id."""
    projs = [o for o in m.observables if isinstance(o, ProjectorObservable)]
    if not projs:
        raise ModelError("model declares no projector observables")
    rs = RaySet(o.ray for o in projs)
    names = {}
    for o in projs:
        names.setdefault(rs.index_of(o.ray), o.id)
    return build_hypergraph(rs), names


def induced_valuation(m: HiddenVariableModel, label: str, h: OrthoHypergraph) -> Valuation:
    """The hidden state's projector answers, read off as a valuation on h's rays."""
    w = m.weight(label)
    if w.sign() <= 0:
        raise ModelError(f"hidden state {label!r} has weight {w}; only positive-weight states induce valuations")
    values = []
    for ray in h.rayset:
        pid = m.projector_for(ray)
        if pid is None:
            raise ModelError(f"ray {ray.id} ({ray}) has no declared projector observable")
        v = m.value(pid, label)
        if v not in (ZERO, ONE):
            raise ModelError(f"{pid} responds {v} on {label!r}, not a projector value")
        values.append(int(v == ONE))
    return Valuation(tuple(values))


# -- construction -------------------------------------------------------------


def build_product_model(contexts: Sequence[Context], rays: RaySet, d: SymMatrix) -> HiddenVariableModel:
    """Noncontextual model over ray-disjoint contexts reproducing the Born weights of ``d``.

    Each hidden state picks one ray per context; its weight is the product of
    tr(D P) over the picks.  Projectors answer 1 exactly on picked rays and
    the maximal observable of context k (eigenvalues 1..d) answers the
    eigenvalue of its picked ray.
    """
    if not contexts:
        raise ModelError("need at least one context")
    _require_density(d, rays.dimension)
    owner: dict[int, int] = {}
    ctxs = [tuple(c) for c in contexts]
    for k, ctx in enumerate(ctxs):
        problems = validate_context(ctx, rays)
        if problems:
            raise ModelError(f"context {k} {ctx}: {'; '.join(problems)}")
        for r in ctx:
            if r in owner:
                raise ModelError(
                    f"contexts {owner[r]} and {k} share ray {r} ({rays[r]}); the product construction needs disjoint contexts"
                )
            owner[r] = k

    dim = rays.dimension
    born = {r: trace_product(d, rays.projector(r)) for r in owner}
    eigen = tuple(Scalar(n + 1) for n in range(dim))
    proj_ids = {r: f"P{r}" for r in sorted(owner)}
    observables: list[ObservableDecl] = [ProjectorObservable(proj_ids[r], rays[r].vec) for r in sorted(owner)]
    observables += [
        MaximalObservable(f"M{k}", eigen, tuple(rays[r].vec for r in ctx)) for k, ctx in enumerate(ctxs)
    ]

    lambdas = []
    responses: dict[str, dict[str, Scalar]] = {o.id: {} for o in observables}
    for picks in itertools.product(*ctxs):
        label = "+".join(f"r{r}" for r in picks)
        weight = ONE
        for r in picks:
            weight = weight * born[r]
        lambdas.append((label, weight))
        chosen = set(picks)
        for r, pid in proj_ids.items():
            responses[pid][label] = ONE if r in chosen else ZERO
        for k, (ctx, r) in enumerate(zip(ctxs, picks)):
            responses[f"M{k}"][label] = eigen[ctx.index(r)]
    return HiddenVariableModel(dim, tuple(lambdas), tuple(observables), responses)
