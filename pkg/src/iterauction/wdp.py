"""Winner determination: who gets which items to maximize total value.

Three solving routes, used to check each other:

* ``brute_force_wdp`` -- exhaustive enumeration of every assignment of
  items to bidders, the ground-truth oracle at desk scale,
* ``solve_wdp`` -- a native branch-and-bound over item-to-bidder decisions
  whose admissible bound exploits monotonicity of the value functions,
* ``encode_milp`` / ``solve_model`` -- an exact mixed-integer encoding of
  winner determination over monotone networks, solvable with scipy's HiGHS
  backend and exportable to / re-importable from LP text files.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedSizeError
from .mvnn import MvnnParams

INTEGRALITY_TOL = 1e-6
FEASIBILITY_TOL = 1e-9
WELFARE_TIE_TOL = 1e-9
BRUTE_FORCE_LIMIT = 10**7


@dataclass
class SolveBudget:
    relative_gap: float = 0.005
    time_limit_secs: float = 600.0

    def __post_init__(self):
        if self.relative_gap < 0 or self.time_limit_secs <= 0:
            raise InvalidInputError("gap must be >= 0 and time limit positive")


@dataclass
class WdpSolution:
    allocation: np.ndarray  # (n, m) 0/1
    objective: float
    status: str = "optimal"  # optimal | gap_limit | time_limit
    proven_gap: float = 0.0
    nodes: int = 0


def _better(w, alloc_flat, best_w, best_flat):
    """Incumbent comparison: higher welfare wins; welfare ties within
    WELFARE_TIE_TOL go to the lexicographically smallest flattened
    allocation."""
    if best_w is None or w > best_w + WELFARE_TIE_TOL:
        return True
    if w >= best_w - WELFARE_TIE_TOL and tuple(alloc_flat) < tuple(best_flat):
        return True
    return False


def _excluded(bundle: np.ndarray, excl) -> bool:
    return excl is not None and tuple(int(v) for v in bundle) in excl


def _exclusion_sets(n: int, exclusions):
    if exclusions is None:
        return [None] * n
    out = []
    for bundles in exclusions:
        if bundles is None:
            out.append(None)
        else:
            out.append({tuple(int(v) for v in np.asarray(b).ravel()) for b in bundles})
    return out


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def brute_force_wdp(evaluators, m: int, exclusions=None, chunk: int = 1 << 16) -> WdpSolution:
    """Enumerate all (n+1)^m assignments of each item to a bidder or nobody.

    ``evaluators[i]`` maps a (B, m) 0/1 array to (B,) values.  ``exclusions``
    is an optional per-bidder collection of forbidden bundles.
    """
    n = len(evaluators)
    total = (n + 1) ** m
    if total > BRUTE_FORCE_LIMIT:
        raise UnsupportedSizeError(
            f"{total} assignments exceed the brute-force limit {BRUTE_FORCE_LIMIT}"
        )
    excl = _exclusion_sets(n, exclusions)
    radix = (n + 1) ** np.arange(m, dtype=np.int64)
    best_w, best_alloc = None, None
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // radix[None, :]) % (n + 1)  # (B, m), 0 = nobody
        welfare = np.zeros(len(codes))
        bundles = []
        feasible = np.ones(len(codes), dtype=bool)
        for i in range(n):
            X = (digits == i + 1).astype(np.float64)
            bundles.append(X)
            welfare += np.asarray(evaluators[i](X), dtype=np.float64)
            if excl[i] is not None:
                for e in excl[i]:
                    feasible &= ~(X == np.asarray(e, dtype=np.float64)).all(axis=1)
        welfare[~feasible] = -np.inf
        if best_w is not None and welfare.max() < best_w - WELFARE_TIE_TOL:
            continue
        cutoff = welfare.max() if best_w is None else max(welfare.max(), best_w)
        for idx in np.flatnonzero(welfare >= cutoff - WELFARE_TIE_TOL):
            alloc = np.stack([b[idx] for b in bundles]).astype(np.int64)
            flat = alloc.ravel()
            if _better(welfare[idx], flat, best_w, None if best_alloc is None else best_alloc.ravel()):
                best_w, best_alloc = float(welfare[idx]), alloc
    if best_alloc is None:
        raise InvalidInputError("exclusions rule out every assignment")
    return WdpSolution(allocation=best_alloc, objective=best_w, nodes=total)


# ---------------------------------------------------------------------------
# Native branch and bound
# ---------------------------------------------------------------------------


class _TimeUp(Exception):
    pass


def solve_wdp(evaluators, m: int, budget: SolveBudget | None = None, exclusions=None) -> WdpSolution:
    """Branch and bound over item-to-bidder-or-nobody decisions.

    The bound at a node is sum_i v_i(assigned_i plus all undecided items),
    admissible because every value function is monotone.  Items are
    branched in order of decreasing total single-item value; children are
    explored best-bound first.  With a zero relative gap, nodes whose bound
    ties the incumbent are still explored so the lexicographic tie-break
    matches the brute-force oracle.
    """
    budget = budget or SolveBudget()
    n = len(evaluators)
    excl = _exclusion_sets(n, exclusions)
    deadline = time.monotonic() + budget.time_limit_secs

    singles = np.eye(m)
    marginal = np.zeros(m)
    for ev in evaluators:
        marginal += np.asarray(ev(singles), dtype=np.float64)
    order = sorted(range(m), key=lambda j: (-marginal[j], j))

    bundles = np.zeros((n, m))
    undecided = np.ones(m)
    state = {"best_w": None, "best_alloc": None, "nodes": 0, "abandoned": 0.0}

    def bound() -> float:
        X = np.minimum(bundles + undecided, 1.0)
        return float(sum(np.asarray(ev(X[i : i + 1]))[0] for i, ev in enumerate(evaluators)))

    def leaf():
        w = float(sum(np.asarray(ev(bundles[i : i + 1]))[0] for i, ev in enumerate(evaluators)))
        for i in range(n):
            if _excluded(bundles[i], excl[i]):
                return
        alloc = bundles.astype(np.int64)
        bf = None if state["best_alloc"] is None else state["best_alloc"].ravel()
        if _better(w, alloc.ravel(), state["best_w"], bf):
            state["best_w"], state["best_alloc"] = w, alloc

    def recurse(depth: int):
        state["nodes"] += 1
        if time.monotonic() > deadline:
            state["abandoned"] = max(state["abandoned"], bound())
            raise _TimeUp
        if depth == m:
            leaf()
            return
        j = order[depth]
        undecided[j] = 0.0
        children = []
        for choice in range(n + 1):  # bidders 0..n-1, then nobody
            if choice < n:
                bundles[choice, j] = 1.0
            b = bound()
            if choice < n:
                bundles[choice, j] = 0.0
            children.append((b, choice))
        children.sort(key=lambda c: (-c[0], c[1]))
        for b, choice in children:
            bw = state["best_w"]
            if bw is not None:
                if budget.relative_gap > 0 and b <= bw * (1 + budget.relative_gap):
                    continue
                if budget.relative_gap == 0 and b <= bw - WELFARE_TIE_TOL:
                    continue
            if choice < n:
                bundles[choice, j] = 1.0
            recurse(depth + 1)
            if choice < n:
                bundles[choice, j] = 0.0
        undecided[j] = 1.0

    status = "optimal" if budget.relative_gap == 0 else "gap_limit"
    proven_gap = budget.relative_gap
    try:
        recurse(0)
    except _TimeUp:
        status = "time_limit"
        w = state["best_w"]
        proven_gap = float("inf") if not w else max(0.0, state["abandoned"] / w - 1.0)
    if state["best_alloc"] is None:
        raise InvalidInputError("no feasible allocation found within the budget")
    return WdpSolution(
        allocation=state["best_alloc"],
        objective=state["best_w"],
        status=status,
        proven_gap=proven_gap,
        nodes=state["nodes"],
    )


# ---------------------------------------------------------------------------
# Reported-bundle winner determination
# ---------------------------------------------------------------------------


def solve_reported_wdp(reports) -> WdpSolution:
    """Each bidder receives one of their reported bundles or nothing; bundles
    must be item-disjoint.  Exhaustive search over the report choices."""
    n, m = reports.n, reports.m
    options = []
    for i in range(n):
        opts = [(np.zeros(m, dtype=np.int64), 0.0)]
        for b, v in reports.per_bidder[i]:
            if b.sum() > 0:
                opts.append((b, v))
        options.append(opts)
    best = {"w": None, "alloc": None}
    alloc = np.zeros((n, m), dtype=np.int64)
    nodes = 0

    def recurse(i: int, used: np.ndarray, w: float):
        nonlocal nodes
        nodes += 1
        if i == n:
            bf = None if best["alloc"] is None else best["alloc"].ravel()
            if _better(w, alloc.ravel(), best["w"], bf):
                best["w"], best["alloc"] = w, alloc.copy()
            return
        for b, v in options[i]:
            if (used + b).max() <= 1:
                alloc[i] = b
                recurse(i + 1, used + b, w + v)
        alloc[i] = 0

    recurse(0, np.zeros(m, dtype=np.int64), 0.0)
    return WdpSolution(allocation=best["alloc"], objective=best["w"], nodes=nodes)


# ---------------------------------------------------------------------------
# Mixed-integer encoding over monotone networks
# ---------------------------------------------------------------------------


def box_bounds(params: MvnnParams) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tight pre-activation bounds (l, u) per hidden layer, attained at the
    empty and full bundles respectively because the network is monotone."""
    lo_z = np.zeros(params.m)
    hi_z = np.ones(params.m)
    out = []
    for k in range(params.num_hidden):
        lo_o = params.weights[k] @ lo_z + params.biases[k]
        hi_o = params.weights[k] @ hi_z + params.biases[k]
        out.append((lo_o, hi_o))
        lo_z = np.clip(lo_o, 0.0, params.cutoffs[k])
        hi_z = np.clip(hi_o, 0.0, params.cutoffs[k])
    return out


def lemma_assignment(o: float, t: float) -> tuple[int, int]:
    """Feasible binary pair for a neuron with pre-activation o and cutoff t:
    below zero both off, in the linear band only the upper indicator on,
    saturated both on."""
    if o < 0:
        return 0, 0
    if o <= t:
        return 1, 0
    return 1, 1


@dataclass
class WdpModel:
    """A mixed-integer maximization in named-variable form."""

    var_names: list = field(default_factory=list)
    var_lb: list = field(default_factory=list)
    var_ub: list = field(default_factory=list)
    var_int: list = field(default_factory=list)
    var_index: dict = field(default_factory=dict)
    # constraints: (name, {var: coeff}, lb, ub)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    objective_const: float = 0.0
    prune_log: list = field(default_factory=list)

    def add_var(self, name, lb, ub, integer=False) -> str:
        if name in self.var_index:
            raise InvalidInputError(f"duplicate variable {name}")
        self.var_index[name] = len(self.var_names)
        self.var_names.append(name)
        self.var_lb.append(float(lb))
        self.var_ub.append(float(ub))
        self.var_int.append(bool(integer))
        return name

    def add_constraint(self, name, coeffs, lb, ub):
        coeffs = {v: float(c) for v, c in coeffs.items() if c != 0.0}
        self.constraints.append((name, coeffs, float(lb), float(ub)))

    def objective_value(self, values: dict) -> float:
        return self.objective_const + sum(c * values[v] for v, c in self.objective.items())


def _affine(coeffs=None, const=0.0):
    return (dict(coeffs or {}), float(const))


def _affine_sum(terms, const=0.0):
    """terms: iterable of (scale, (coeffs, const))."""
    out: dict = {}
    c = float(const)
    for scale, (coeffs, k) in terms:
        if scale == 0.0:
            continue
        c += scale * k
        for v, w in coeffs.items():
            out[v] = out.get(v, 0.0) + scale * w
    return (out, c)


def encode_milp(nets: list[MvnnParams], exclusions=None, prune: bool = True) -> WdpModel:
    """Exact winner-determination MILP over monotone networks.

    Each hidden neuron's clipped activation z = min(t, max(0, o)) is encoded
    with two indicator binaries and four linear constraints; ``prune``
    replaces neurons whose box bounds pin them down (always saturated,
    always off, always linear, or reachable from one side only) by fixed
    values, affine identities, or a single binary.  Optional per-bidder
    ``exclusions`` add cuts making each listed bundle infeasible for that
    bidder.
    """
    if not nets:
        raise InvalidInputError("need at least one bidder network")
    m = nets[0].m
    if any(net.m != m for net in nets):
        raise InvalidInputError("all networks must share the item count")
    model = WdpModel()
    for i in range(len(nets)):
        for j in range(m):
            model.add_var(f"a_{i}_{j}", 0, 1, integer=True)
    for j in range(m):
        model.add_constraint(
            f"item_{j}", {f"a_{i}_{j}": 1.0 for i in range(len(nets))}, -np.inf, 1.0
        )

    obj = _affine()
    for i, net in enumerate(nets):
        bounds = box_bounds(net)
        zexpr = [_affine({f"a_{i}_{j}": 1.0}) for j in range(m)]
        for k in range(net.num_hidden):
            lo, hi = bounds[k]
            new_z = []
            for j in range(net.weights[k].shape[0]):
                W_row = net.weights[k][j]
                o = _affine_sum(
                    [(W_row[p], zexpr[p]) for p in range(len(zexpr))],
                    const=net.biases[k][j],
                )
                t = float(net.cutoffs[k][j])
                l, u = float(lo[j]), float(hi[j])
                tag = f"{i}_{k}_{j}"
                if prune and t < l:
                    model.prune_log.append((i, k, j, "fixed-saturated"))
                    new_z.append(_affine(const=t))
                    continue
                if prune and u < 0:
                    model.prune_log.append((i, k, j, "fixed-off"))
                    new_z.append(_affine(const=0.0))
                    continue
                if prune and 0 <= l and u <= t:
                    model.prune_log.append((i, k, j, "affine-identity"))
                    new_z.append(o)
                    continue
                z = model.add_var(f"z_{tag}", max(0.0, l), min(t, u))
                if prune and 0 <= l <= t < u:
                    # reachable states: linear band or saturated; alpha = 1
                    model.prune_log.append((i, k, j, "alpha-fixed"))
                    beta = model.add_var(f"beta_{tag}", 0, 1, integer=True)
                    c2, k2 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                    model.add_constraint(f"n{tag}_ub2", c2, -np.inf, -k2)
                    model.add_constraint(f"n{tag}_lb1", {z: 1.0, beta: -t}, 0.0, np.inf)
                    c4, k4 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                    c4[beta] = c4.get(beta, 0.0) - (t - u)
                    model.add_constraint(f"n{tag}_lb2", c4, -k4, np.inf)
                    new_z.append(_affine({z: 1.0}))
                    continue
                if prune and l <= 0 < u <= t:
                    # reachable states: off or linear band; beta = 0
                    model.prune_log.append((i, k, j, "beta-fixed"))
                    alpha = model.add_var(f"alpha_{tag}", 0, 1, integer=True)
                    model.add_constraint(f"n{tag}_ub1", {z: 1.0, alpha: -t}, -np.inf, 0.0)
                    c2, k2 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                    c2[alpha] = c2.get(alpha, 0.0) - l
                    model.add_constraint(f"n{tag}_ub2", c2, -np.inf, -k2 - l)
                    c4, k4 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                    model.add_constraint(f"n{tag}_lb2", c4, -k4, np.inf)
                    new_z.append(_affine({z: 1.0}))
                    continue
                # general neuron: both indicator binaries
                alpha = model.add_var(f"alpha_{tag}", 0, 1, integer=True)
                beta = model.add_var(f"beta_{tag}", 0, 1, integer=True)
                model.add_constraint(f"n{tag}_ub1", {z: 1.0, alpha: -t}, -np.inf, 0.0)
                c2, k2 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                c2[alpha] = c2.get(alpha, 0.0) - l
                model.add_constraint(f"n{tag}_ub2", c2, -np.inf, -k2 - l)
                model.add_constraint(f"n{tag}_lb1", {z: 1.0, beta: -t}, 0.0, np.inf)
                c4, k4 = _affine_sum([(1.0, _affine({z: 1.0})), (-1.0, o)])
                c4[beta] = c4.get(beta, 0.0) - (t - u)
                model.add_constraint(f"n{tag}_lb2", c4, -k4, np.inf)
                new_z.append(_affine({z: 1.0}))
            zexpr = new_z
        terms = [(float(net.weights[-1][0, j]), zexpr[j]) for j in range(len(zexpr))]
        if net.skip is not None:
            terms += [
                (float(net.skip[j]), _affine({f"a_{i}_{j}": 1.0})) for j in range(m)
            ]
        obj = _affine_sum([(1.0, obj)] + terms)

    if exclusions is not None:
        for i, bundles in enumerate(exclusions):
            for idx, b in enumerate(bundles or []):
                x = np.asarray(b, dtype=np.int64).ravel()
                coeffs = {
                    f"a_{i}_{j}": (1.0 if x[j] == 0 else -1.0) for j in range(m)
                }
                model.add_constraint(f"excl_{i}_{idx}", coeffs, 1.0 - float(x.sum()), np.inf)

    model.objective, model.objective_const = obj
    return model


def check_encoding_at(net: MvnnParams, bundle: np.ndarray) -> bool:
    """Verify the indicator assignment of the hidden-neuron encoding at one
    bundle: with the canonical binaries the four constraints hold and force
    z to the clipped pre-activation."""
    z = np.asarray(bundle, dtype=np.float64)
    for k in range(net.num_hidden):
        o = net.weights[k] @ z + net.biases[k]
        t = net.cutoffs[k]
        z_next = np.clip(o, 0.0, t)
        bounds = box_bounds(net)[k]
        for j in range(len(o)):
            a, b = lemma_assignment(float(o[j]), float(t[j]))
            l, u = float(bounds[0][j]), float(bounds[1][j])
            zj, oj, tj = float(z_next[j]), float(o[j]), float(t[j])
            ok = (
                zj <= a * tj + FEASIBILITY_TOL
                and zj <= oj - l * (1 - a) + FEASIBILITY_TOL
                and zj >= b * tj - FEASIBILITY_TOL
                and zj >= oj + (tj - u) * b - FEASIBILITY_TOL
            )
            if not ok:
                return False
        z = z_next
    return True


def solve_model(model: WdpModel, time_limit_secs: float | None = None) -> tuple[dict, float]:
    """Solve a WdpModel with scipy's HiGHS mixed-integer backend."""
    from scipy.optimize import LinearConstraint, Bounds, milp

    nv = len(model.var_names)
    c = np.zeros(nv)
    for v, w in model.objective.items():
        c[model.var_index[v]] = -w  # HiGHS minimizes
    A = np.zeros((len(model.constraints), nv))
    lb = np.zeros(len(model.constraints))
    ub = np.zeros(len(model.constraints))
    for r, (_, coeffs, clo, cup) in enumerate(model.constraints):
        for v, w in coeffs.items():
            A[r, model.var_index[v]] = w
        lb[r], ub[r] = clo, cup
    options = {}
    if time_limit_secs is not None:
        options["time_limit"] = time_limit_secs
    res = milp(
        c,
        constraints=LinearConstraint(A, lb, ub) if len(model.constraints) else (),
        bounds=Bounds(np.asarray(model.var_lb), np.asarray(model.var_ub)),
        integrality=np.asarray(model.var_int, dtype=np.int64),
        options=options,
    )
    if res.status != 0:
        raise InvalidInputError(f"MILP solve failed: {res.message}")
    values = {name: float(res.x[k]) for k, name in enumerate(model.var_names)}
    return values, model.objective_value(values)


def milp_wdp(nets: list[MvnnParams], exclusions=None, prune: bool = True,
             time_limit_secs: float | None = None) -> WdpSolution:
    """Winner determination over monotone networks via the MILP encoding."""
    model = encode_milp(nets, exclusions=exclusions, prune=prune)
    values, obj = solve_model(model, time_limit_secs)
    n, m = len(nets), nets[0].m
    alloc = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for j in range(m):
            v = values[f"a_{i}_{j}"]
            if min(abs(v), abs(v - 1)) > INTEGRALITY_TOL:
                raise InvalidInputError(f"non-integral allocation variable a_{i}_{j}={v}")
            alloc[i, j] = int(round(v))
    if (alloc.sum(axis=0) > 1).any():
        raise InvalidInputError("MILP solution assigns an item twice")
    true_obj = float(sum(net.forward(alloc[i].astype(np.float64)) for i, net in enumerate(nets)))
    return WdpSolution(allocation=alloc, objective=true_obj)


# ---------------------------------------------------------------------------
# LP text round trip
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_lp_file(model: WdpModel) -> str:
    """Serialize to CPLEX-style LP text (deterministic ordering).

    The objective constant, which the LP format cannot carry, travels in a
    structured comment read back by :func:`parse_lp_file`.
    """
    lines = [
        "\\ winner-determination model",
        f"\\ objective_constant {_fmt(model.objective_const)}",
        "Maximize",
    ]
    terms = " ".join(
        f"{'-' if w < 0 else '+'} {_fmt(abs(w))} {v}"
        for v, w in sorted(model.objective.items())
    )
    lines.append(f" obj: {terms if terms else '0 ' + model.var_names[0]}")
    lines.append("Subject To")
    for name, coeffs, lb, ub in model.constraints:
        body = " ".join(
            f"{'-' if w < 0 else '+'} {_fmt(abs(w))} {v}" for v, w in sorted(coeffs.items())
        )
        if lb == ub:
            lines.append(f" {name}: {body} = {_fmt(lb)}")
        else:
            if np.isfinite(ub):
                lines.append(f" {name}: {body} <= {_fmt(ub)}")
            if np.isfinite(lb):
                suffix = "" if not np.isfinite(ub) else "_lo"
                lines.append(f" {name}{suffix}: {body} >= {_fmt(lb)}")
    lines.append("Bounds")
    for k, name in enumerate(model.var_names):
        if not model.var_int[k]:
            lines.append(f" {_fmt(model.var_lb[k])} <= {name} <= {_fmt(model.var_ub[k])}")
    binaries = [name for k, name in enumerate(model.var_names) if model.var_int[k]]
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def parse_lp_file(text: str) -> WdpModel:
    """Parse LP text produced by :func:`emit_lp_file` back into a model."""
    model = WdpModel()
    section = None
    obj_const = 0.0
    rows = []  # (name, coeffs, sense, rhs)
    bounds = {}
    binaries = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            parts = line[1:].split()
            if parts and parts[0] == "objective_constant":
                obj_const = float(parts[1])
            continue
        low = line.lower()
        if low in ("maximize", "minimize", "subject to", "bounds", "binary", "end"):
            section = low
            continue
        if section == "maximize":
            _, expr = line.split(":", 1)
            model.objective = _parse_terms(expr)
        elif section == "subject to":
            name, rest = line.split(":", 1)
            for sense in ("<=", ">=", "="):
                if sense in rest:
                    body, rhs = rest.rsplit(sense, 1)
                    rows.append((name.strip(), _parse_terms(body), sense, float(rhs)))
                    break
        elif section == "bounds":
            lo, name, hi = line.split("<=")
            bounds[name.strip()] = (float(lo), float(hi))
        elif section == "binary":
            binaries.append(line)
    names = set()
    for coeffs in [model.objective] + [r[1] for r in rows]:
        names.update(coeffs)
    names.update(bounds)
    names.update(binaries)
    for name in sorted(names):
        if name in binaries:
            model.add_var(name, 0, 1, integer=True)
        else:
            lo, hi = bounds.get(name, (0.0, np.inf))
            model.add_var(name, lo, hi)
    merged: dict[str, list] = {}
    for name, coeffs, sense, rhs in rows:
        base = name[:-3] if name.endswith("_lo") else name
        entry = merged.setdefault(base, [coeffs, -np.inf, np.inf])
        if sense == "<=":
            entry[2] = rhs
        elif sense == ">=":
            entry[1] = rhs
        else:
            entry[1] = entry[2] = rhs
    for name, (coeffs, lb, ub) in merged.items():
        model.add_constraint(name, coeffs, lb, ub)
    model.objective_const = obj_const
    return model


def _parse_terms(expr: str) -> dict:
    coeffs: dict[str, float] = {}
    tokens = expr.split()
    sign = 1.0
    k = 0
    while k < len(tokens):
        tok = tokens[k]
        if tok == "+":
            sign = 1.0
            k += 1
        elif tok == "-":
            sign = -1.0
            k += 1
        else:
            value = float(tok)
            name = tokens[k + 1]
            coeffs[name] = coeffs.get(name, 0.0) + sign * value
            sign = 1.0
            k += 2
    return coeffs
