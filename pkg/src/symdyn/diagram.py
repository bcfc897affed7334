"""Countable compact measure diagrams with threshold-form value specs.

A diagram describes a closed set of ergodic measures with accumulation
depth at most 2 using finitely many node classes.  A class carries 0, 1 or
2 integer parameters (outer to inner); a family link says that the members
of a class converge, as their innermost parameter grows, to the instance
of the limit class with the remaining parameters.  Compactness forces the
diagonal convergences as well: if A(m, j) -> B(m) -> z then any sequence
A(m_r, j_r) with m_r -> infinity converges to z, whatever j_r does.

Functions on a diagram are piecewise constant with guards comparing one
parameter against a linear expression in the others; sequences indexed by
k take one value below a linear threshold in the parameters and another
above.  Everything is exact: values are Fractions (or +infinity), guard
satisfiability is decided by integer scanning plus a certified asymptotic
regime, never by floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .entropy import EntropyValue
from .errors import ArgumentError

INF = float("inf")

MAX_COEFF = 3
_SLOPE_STEP = 6  # lcm of admissible coefficient denominators 1..3


def val_add(a, b):
    if a == INF or b == INF:
        return INF
    return a + b


def val_sub(a, b):
    if b == INF:
        raise ArgumentError("cannot subtract infinity")
    if a == INF:
        return INF
    return a - b


def as_val(x):
    if x == INF:
        return INF
    return Fraction(x)


# ---------------------------------------------------------------------------
# linear expressions and guard atoms


@dataclass(frozen=True)
class Lin:
    """const + sum of coeff * param over integer parameters."""

    const: int = 0
    coeffs: tuple = ()  # sorted (param, coeff) pairs, coeff >= 1

    def __post_init__(self):
        for p, c in self.coeffs:
            if not (1 <= c <= MAX_COEFF):
                raise ArgumentError(f"coefficient {c} on {p} outside 1..{MAX_COEFF}")
        if list(self.coeffs) != sorted(self.coeffs):
            raise ArgumentError("Lin coefficients must be sorted")

    def evaluate(self, env: dict) -> int:
        return self.const + sum(c * env[p] for p, c in self.coeffs)

    def coeff(self, param: str) -> int:
        return dict(self.coeffs).get(param, 0)

    @property
    def params(self) -> tuple:
        return tuple(p for p, _ in self.coeffs)

    def render(self) -> str:
        parts = [f"{'' if c == 1 else c}{p}" for p, c in self.coeffs]
        if self.const or not parts:
            parts.append(str(self.const))
        return "+".join(parts)


def lin(const: int = 0, **coeffs) -> Lin:
    return Lin(const, tuple(sorted((p, c) for p, c in coeffs.items() if c)))


@dataclass(frozen=True)
class Atom:
    """var < rhs (lt=True) or var >= rhs; rhs never mentions var."""

    var: str
    lt: bool
    rhs: Lin

    def __post_init__(self):
        if self.var in self.rhs.params:
            raise ArgumentError("guard right-hand side mentions its own variable")

    def holds(self, env: dict) -> bool:
        v, r = env[self.var], self.rhs.evaluate(env)
        return v < r if self.lt else v >= r

    def render(self) -> str:
        return f"{self.var}{'<' if self.lt else '>='}{self.rhs.render()}"


# ---------------------------------------------------------------------------
# integer feasibility over <= 2 parameters

_BIG_OFFSET = 7919  # placed beyond every guard crossing by construction


def _const_budget(atoms) -> int:
    return sum(abs(a.rhs.const) for a in atoms) + 16


def _y_bounds_at(atoms, x_var: str, y_var: str, x: int, y_min: int):
    """Feasible integer y-interval at fixed x, or None when x itself fails."""
    lo, hi = y_min, None
    for a in atoms:
        if a.var == x_var:
            c = a.rhs.coeff(y_var)
            base = a.rhs.const
            if c == 0:
                ok = x < base if a.lt else x >= base
                if not ok:
                    return None
                continue
            if a.lt:  # x < c*y + base  =>  y >= floor((x - base)/c) + 1
                lo = max(lo, (x - base) // c + 1)
            else:  # x >= c*y + base  =>  y <= floor((x - base)/c)
                bound = (x - base) // c
                hi = bound if hi is None else min(hi, bound)
        else:
            c = a.rhs.coeff(x_var)
            base = a.rhs.const + c * x
            if a.lt:  # y < base
                hi = base - 1 if hi is None else min(hi, base - 1)
            else:  # y >= base
                lo = max(lo, base)
    if hi is not None and lo > hi:
        return None
    return lo, hi


def feasible(atoms, mins: dict):
    """A satisfying integer assignment with every var >= its min, or None."""
    vars_ = sorted({a.var for a in atoms} | set(mins))
    if not vars_:
        return {}
    if len(vars_) == 1:
        x = vars_[0]
        x_min = mins.get(x, 1)
        lo, hi = x_min, None
        for a in atoms:
            if a.rhs.coeffs:
                raise ArgumentError("one-variable guard references a second variable")
            if a.lt:
                hi = a.rhs.const - 1 if hi is None else min(hi, a.rhs.const - 1)
            else:
                lo = max(lo, a.rhs.const)
        if hi is not None and lo > hi:
            return None
        return {x: lo}
    if len(vars_) != 2:
        raise ArgumentError("feasibility supports at most two variables")
    x_var, y_var = vars_
    x_min, y_min = mins.get(x_var, 1), mins.get(y_var, 1)
    budget = _const_budget(atoms) + x_min + y_min
    for x in range(x_min, x_min + 4 * budget + 2):
        b = _y_bounds_at(atoms, x_var, y_var, x, y_min)
        if b is not None:
            return {x_var: x, y_var: b[0]}
    # beyond every crossing the bounds are affine along each residue class
    # mod 6 (all slope denominators divide 6), so probing one full residue
    # window decides the tail exactly
    base = x_min + 4 * budget + _BIG_OFFSET
    for x in range(base, base + _SLOPE_STEP):
        b = _y_bounds_at(atoms, x_var, y_var, x, y_min)
        if b is not None:
            return {x_var: x, y_var: b[0]}
    return None


def feasible_unbounded(atoms, mins: dict, var: str) -> bool:
    """Whether satisfying points exist with `var` arbitrarily large."""
    vars_ = sorted({a.var for a in atoms} | set(mins) | {var})
    if len(vars_) == 1:
        # feasible for arbitrarily large var iff no upper bound exists
        return not any(a.lt for a in atoms)
    if len(vars_) != 2:
        raise ArgumentError("feasibility supports at most two variables")
    x_var, y_var = vars_
    if var != x_var:
        x_var, y_var = y_var, x_var
    x_min, y_min = mins.get(x_var, 1), mins.get(y_var, 1)
    budget = _const_budget(atoms) + x_min + y_min
    base = x_min + 4 * budget + _BIG_OFFSET
    return any(
        _y_bounds_at(atoms, x_var, y_var, x, y_min) is not None
        for x in range(base, base + _SLOPE_STEP)
    )


def tau_unbounded_along(atoms, mins: dict, var: str, tau: Lin) -> bool:
    """Whether sup of tau over the region is unbounded as `var` grows.

    Presumes feasible_unbounded(atoms, mins, var).  tau's growth may come
    from `var` itself or from the other parameter being free to grow.
    """
    if tau.coeff(var) >= 1:
        return True
    other = [p for p in tau.params if p != var]
    if not other:
        return False
    vars_ = sorted({a.var for a in atoms} | set(mins) | {var} | set(other))
    if len(vars_) == 1:
        return False
    x_var, y_var = vars_
    if var != x_var:
        x_var, y_var = y_var, x_var
    x_min, y_min = mins.get(x_var, 1), mins.get(y_var, 1)
    budget = _const_budget(atoms) + x_min + y_min

    def sup_tau(x: int):
        b = _y_bounds_at(atoms, x_var, y_var, x, y_min)
        if b is None:
            return None
        lo, hi = b
        cy = tau.coeff(y_var)
        if cy == 0:
            return tau.const + tau.coeff(x_var) * x
        if hi is None:
            return INF
        return tau.const + tau.coeff(x_var) * x + cy * hi

    # compare residue by residue: along each class mod 6 the supremum is
    # affine in x beyond the crossings, so one step of size 6 reveals growth
    base = x_min + 4 * budget + _BIG_OFFSET
    for x in range(base, base + _SLOPE_STEP):
        s0 = sup_tau(x)
        if s0 is None:
            continue
        if s0 == INF:
            return True
        s1 = sup_tau(x + _SLOPE_STEP)
        if s1 == INF or (s1 is not None and s1 > s0):
            return True
    return False


# ---------------------------------------------------------------------------
# piecewise-constant functions


@dataclass(frozen=True)
class FnSpec:
    """Disjoint guard pieces covering the whole parameter space."""

    pieces: tuple  # (atoms tuple, value) pairs

    def evaluate(self, env: dict):
        for atoms, v in self.pieces:
            if all(a.holds(env) for a in atoms):
                return v
        raise ArgumentError(f"FnSpec does not cover {env}")

    def render(self) -> str:
        if len(self.pieces) == 1:
            return _render_val(self.pieces[0][1])
        parts = []
        for atoms, v in self.pieces:
            cond = " & ".join(a.render() for a in atoms) or "else"
            parts.append(f"{cond}: {_render_val(v)}")
        return "{" + "; ".join(parts) + "}"


def _render_val(v) -> str:
    return "inf" if v == INF else str(v)


def const_fn(v) -> FnSpec:
    return FnSpec((((), as_val(v)),))


def step_fn(var: str, tau: Lin, lo, hi) -> FnSpec:
    """Value lo while var < tau, hi afterwards."""
    return FnSpec(
        (
            ((Atom(var, True, tau),), as_val(lo)),
            ((Atom(var, False, tau),), as_val(hi)),
        )
    )


def fn_binary(f: FnSpec, g: FnSpec, op, mins: dict) -> FnSpec:
    pieces = []
    for fa, fv in f.pieces:
        for ga, gv in g.pieces:
            atoms = fa + ga
            if feasible(list(atoms), mins) is None:
                continue
            pieces.append((atoms, op(fv, gv)))
    if not pieces:
        raise ArgumentError("operands do not cover the parameter space")
    if all(v == pieces[0][1] for _, v in pieces):
        return const_fn(pieces[0][1])
    return FnSpec(tuple(pieces))


def fn_max(f: FnSpec, g: FnSpec, mins: dict) -> FnSpec:
    return fn_binary(f, g, max, mins)


def fn_add(f: FnSpec, g: FnSpec, mins: dict) -> FnSpec:
    return fn_binary(f, g, val_add, mins)


def fn_shift(f: FnSpec, c) -> FnSpec:
    return FnSpec(tuple((atoms, val_add(v, as_val(c))) for atoms, v in f.pieces))


def fn_eventual(f: FnSpec, param: str, mins: dict) -> FnSpec:
    """The stabilized value as `param` grows, a function of the rest.

    Guards on `param` resolve by sign; guards on other variables whose
    right side mentions `param` resolve to the large-`param` truth.  The
    surviving pieces are exactly the large-`param` selections, so they
    remain disjoint and covering over the remaining parameters.
    """
    out = []
    for atoms, v in f.pieces:
        keep = []
        dead = False
        for a in atoms:
            if a.var == param:
                if a.lt:  # param < rhs fails eventually (rhs is param-free)
                    dead = True
                    break
                continue  # param >= rhs holds eventually
            elif a.rhs.coeff(param) >= 1:
                if a.lt:  # other < ...param... holds eventually
                    continue
                dead = True
                break
            else:
                keep.append(a)
        if not dead:
            out.append((tuple(keep), v))
    if not out:
        raise ArgumentError(f"no piece survives {param} -> infinity")
    reduced_mins = {p: m for p, m in mins.items() if p != param}
    live = [(a, v) for a, v in out if feasible(list(a), reduced_mins) is not None]
    if all(v == live[0][1] for _, v in live):
        return const_fn(live[0][1])
    return FnSpec(tuple(live))


def fn_sup(f: FnSpec, mins: dict):
    """Supremum of the function over all parameter values."""
    best = None
    for atoms, v in f.pieces:
        if feasible(list(atoms), mins) is None:
            continue
        if best is None or v > best:
            best = v
    if best is None:
        raise ArgumentError("FnSpec has no feasible piece")
    return best


def fn_compare(f: FnSpec, g: FnSpec, mins: dict):
    """None if f == g everywhere, else a witness (env, f value, g value)."""
    for fa, fv in f.pieces:
        for ga, gv in g.pieces:
            if fv == gv:
                continue
            env = feasible(list(fa + ga), mins)
            if env is not None:
                return env, fv, gv
    return None


def fn_le(f: FnSpec, g: FnSpec, mins: dict):
    """None if f <= g everywhere, else a witness (env, f value, g value)."""
    for fa, fv in f.pieces:
        for ga, gv in g.pieces:
            if fv <= gv:
                continue
            env = feasible(list(fa + ga), mins)
            if env is not None:
                return env, fv, gv
    return None


# ---------------------------------------------------------------------------
# k-indexed sequence specs


@dataclass(frozen=True)
class SeqSpec:
    """Value lo for k < tau(params), hi for k >= tau(params)."""

    lo: object
    tau: Lin
    hi: object

    def value_at(self, env: dict, k: int):
        return self.lo if k < self.tau.evaluate(env) else self.hi

    @property
    def limit(self):
        """Pointwise limit in k at any fixed parameters."""
        return self.hi

    def as_fn(self, k: int, mins: dict | None = None) -> FnSpec:
        """The k-th function of the sequence, as a piecewise spec.

        A single-parameter threshold becomes one step; a two-parameter
        threshold has a finite settled region {a*p + b*q <= k - const},
        which is enumerated one outer value at a time.
        """
        if not self.tau.coeffs:
            return const_fn(self.lo if k < self.tau.const else self.hi)
        if len(self.tau.coeffs) == 1:
            p, c = self.tau.coeffs[0]
            # k < c*p + const  <=>  p > (k - const)/c  <=>  p >= floor(...) + 1
            thr = (k - self.tau.const) // c + 1
            return step_fn(p, lin(max(thr, 0)), self.hi, self.lo)  # p < thr: k >= tau
        (p, a), (q, b) = self.tau.coeffs
        mins = mins or {}
        p_min, q_min = mins.get(p, 1), mins.get(q, 1)
        bound = k - self.tau.const  # settled (hi) region: a*p + b*q <= bound
        p_max = (bound - b * q_min) // a
        if p_max < p_min:
            return const_fn(self.lo)
        pieces = []
        for p0 in range(p_min, p_max + 1):
            q_thr = (bound - a * p0) // b + 1  # q < q_thr: settled
            at_p0 = (Atom(p, False, lin(p0)), Atom(p, True, lin(p0 + 1)))
            pieces.append((at_p0 + (Atom(q, True, lin(q_thr)),), as_val(self.hi)))
            pieces.append((at_p0 + (Atom(q, False, lin(q_thr)),), as_val(self.lo)))
        pieces.append(((Atom(p, False, lin(p_max + 1)),), as_val(self.lo)))
        return FnSpec(tuple(pieces))


def seq_const(v) -> SeqSpec:
    return SeqSpec(as_val(v), lin(0), as_val(v))


def seq_step(lo, tau: Lin, hi) -> SeqSpec:
    return SeqSpec(as_val(lo), tau, as_val(hi))


# ---------------------------------------------------------------------------
# diagram structure


@dataclass(frozen=True)
class Node:
    """A class of ergodic measures, parameterized outer-to-inner.

    A class with parameters stands for the whole family of instances over
    integer parameter values (each at least its minimum); value specs on
    the class may depend on the parameters, so clusters whose values agree
    collapse into one class.
    """

    node_id: str
    params: tuple = ()
    kind: str = "periodic"  # "periodic" | "aperiodic"
    period: str | None = None  # informational period expression
    param_mins: tuple = ()

    def __post_init__(self):
        if self.kind not in ("periodic", "aperiodic"):
            raise ArgumentError(f"unknown node kind {self.kind!r}")
        if len(self.params) > 2:
            raise ArgumentError("nodes carry at most two parameters (depth <= 2)")
        if self.param_mins and len(self.param_mins) != len(self.params):
            raise ArgumentError("param_mins must match params")

    @property
    def mins(self) -> dict:
        if self.param_mins:
            return dict(zip(self.params, self.param_mins))
        return {p: 1 for p in self.params}


@dataclass(frozen=True)
class FamilyLink:
    """Members of `member` converge to `limit` as `parameter` grows."""

    member: str
    parameter: str
    limit: str


@dataclass(frozen=True)
class MeasureDiagram:
    nodes: tuple
    families: tuple
    p_sup: EntropyValue | None = None

    def __post_init__(self):
        by_id = {}
        for n in self.nodes:
            if n.node_id in by_id:
                raise ArgumentError(f"duplicate node id {n.node_id!r}")
            by_id[n.node_id] = n
        member_of = {}
        for f in self.families:
            if f.member not in by_id or f.limit not in by_id:
                raise ArgumentError(f"family references unknown node: {f}")
            if f.member in member_of:
                raise ArgumentError(f"{f.member} is a member of two families")
            member_of[f.member] = f
            m, l = by_id[f.member], by_id[f.limit]
            if not m.params or m.params[-1] != f.parameter:
                raise ArgumentError(
                    f"family parameter {f.parameter!r} must be the innermost "
                    f"parameter of {f.member}"
                )
            if m.params[:-1] != l.params:
                raise ArgumentError(
                    f"limit {f.limit} must carry the outer parameters of {f.member}"
                )
        for n in self.nodes:
            if n.params and n.node_id not in member_of:
                raise ArgumentError(
                    f"parameterized class {n.node_id} must converge somewhere"
                )
        # levels: members sit strictly below their limits; depth <= 2
        for n in self.nodes:
            if self.level(n.node_id) > 2:
                raise ArgumentError("accumulation depth exceeds 2")

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise ArgumentError(f"unknown node {node_id!r}")

    def level(self, node_id: str) -> int:
        incoming = [f for f in self.families if f.limit == node_id]
        if not incoming:
            return 0
        return 1 + max(self.level(f.member) for f in incoming)

    @property
    def depth(self) -> int:
        return max((self.level(n.node_id) for n in self.nodes), default=0)

    def families_into(self, node_id: str):
        return [f for f in self.families if f.limit == node_id]

    def chains_into(self, node_id: str):
        """Two-step family chains (grandchild, child) converging to node_id."""
        out = []
        for f1 in self.families_into(node_id):
            for f2 in self.families_into(f1.member):
                out.append((f2, f1))
        return out


@dataclass(frozen=True)
class FnOnDiagram:
    """A function on the diagram: one FnSpec per node class."""

    specs: tuple  # sorted (node_id, FnSpec) pairs

    def spec(self, node_id: str) -> FnSpec:
        for nid, s in self.specs:
            if nid == node_id:
                return s
        raise ArgumentError(f"no spec for node {node_id!r}")

    def evaluate(self, node_id: str, env: dict):
        return self.spec(node_id).evaluate(env)

    def mixture_value(self, parts):
        """Harmonic (weighted-average) value on a rational mixture.

        parts: list of (node_id, env, weight) with weights summing to 1.
        """
        total = sum((w for _, _, w in parts), Fraction(0))
        if total != 1:
            raise ArgumentError("mixture weights must sum to 1")
        acc = Fraction(0)
        for nid, env, w in parts:
            v = self.evaluate(nid, env)
            if v == INF:
                if w > 0:
                    return INF
                continue
            acc += w * v
        return acc


def fn_on(diagram: MeasureDiagram, mapping: dict) -> FnOnDiagram:
    specs = []
    for n in diagram.nodes:
        if n.node_id not in mapping:
            raise ArgumentError(f"no value spec for node {n.node_id}")
        v = mapping[n.node_id]
        specs.append((n.node_id, v if isinstance(v, FnSpec) else const_fn(v)))
    return FnOnDiagram(tuple(sorted(specs)))


@dataclass(frozen=True)
class SeqOnDiagram:
    """A k-indexed sequence of functions in threshold form, per node class."""

    specs: tuple  # sorted (node_id, SeqSpec) pairs
    monotone: str  # "nonincreasing" | "nondecreasing"

    def __post_init__(self):
        if self.monotone not in ("nonincreasing", "nondecreasing"):
            raise ArgumentError("declare the monotone direction")
        for nid, s in self.specs:
            lo_hi = (s.lo, s.hi)
            if self.monotone == "nonincreasing" and not s.lo >= s.hi:
                raise ArgumentError(f"{nid}: nonincreasing spec needs lo >= hi")
            if self.monotone == "nondecreasing" and not s.lo <= s.hi:
                raise ArgumentError(f"{nid}: nondecreasing spec needs lo <= hi")

    def spec(self, node_id: str) -> SeqSpec:
        for nid, s in self.specs:
            if nid == node_id:
                return s
        raise ArgumentError(f"no sequence spec for node {node_id!r}")

    def limit_fn(self, diagram: MeasureDiagram) -> FnOnDiagram:
        """The recorded pointwise limit, constant per class."""
        return fn_on(diagram, {nid: const_fn(s.limit) for nid, s in self.specs})


def seq_on(diagram: MeasureDiagram, mapping: dict, monotone: str) -> SeqOnDiagram:
    specs = []
    for n in diagram.nodes:
        if n.node_id not in mapping:
            raise ArgumentError(f"no sequence spec for node {n.node_id}")
        s = mapping[n.node_id]
        if not isinstance(s, SeqSpec):
            s = seq_const(s)
        for p in s.tau.params:
            if p not in n.params:
                raise ArgumentError(
                    f"{n.node_id}: threshold parameter {p!r} not a node parameter"
                )
        specs.append((n.node_id, s))
    return SeqOnDiagram(tuple(sorted(specs)), monotone)


def tails_of(hseq: SeqOnDiagram, diagram: MeasureDiagram) -> SeqOnDiagram:
    """The tail sequence h - h_k of a nondecreasing entropy sequence."""
    if hseq.monotone != "nondecreasing":
        raise ArgumentError("entropy sequences must be nondecreasing")
    specs = {}
    for nid, s in hseq.specs:
        h = s.limit
        specs[nid] = SeqSpec(val_sub(h, s.lo), s.tau, val_sub(h, s.hi))
    return seq_on(diagram, specs, "nonincreasing")
