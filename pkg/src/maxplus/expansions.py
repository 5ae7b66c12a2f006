"""Periodic expansions of max-plus matrix powers.

Both expansions write a^t as a max of terms lam_mu^t (x) P_mu^(t) where each
P_mu^(t) is a periodic CSR product.  The power expansion (Nachtigall form)
peels off critical nodes one level at a time and is valid for every
t >= 3 n^2.  The ultimate expansion peels off whole components grouped by
their maximum cycle mean; it has one term per distinct component cycle mean
and agrees with a^t from some finite threshold on, which
ultimate_threshold measures.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx
import numpy as np

from .core import NEG_INF, TropicalMatrix, mat_mul, mat_oplus, mat_power, _mp_matmul
from .csr import CsrTriple, csr_build, csr_product, _rotate_cols, _rotate_rows
from .errors import NoCyclesError, ThresholdError
from .graphs import CritSubgraph, CriticalStructure, critical_structure
from .kleene import apply_scaling, total_visualizing_scaling

# enumeration budget for picking the smallest critical cycle
_CYCLE_ENUM_CAP = 20000


@dataclass(frozen=True)
class DeflationStep:
    """One level of a deflation sequence.

    k_set is the surviving node set, a_mu the restriction of the input to
    it, lambda_mu its maximum cycle mean, crit the critical selection whose
    nodes get removed next.  m_set is the set actually removed (equal to
    crit's nodes for the power expansion, the full components for the
    ultimate one).
    """

    mu: int
    k_set: tuple
    a_mu: TropicalMatrix
    lambda_mu: float
    crit: CritSubgraph
    m_set: tuple


class Term(NamedTuple):
    lam: float
    triple: CsrTriple


@dataclass
class Expansion:
    """Ordered terms (lam_mu, CsrTriple) of one expansion variant."""

    variant: str
    n: int
    terms: list
    steps: list
    sigma: tuple | None
    gamma_u: int
    validity_threshold: int | None

    @property
    def lambdas(self) -> tuple:
        return tuple(term.lam for term in self.terms)


@dataclass(frozen=True)
class ExpansionEvaluation:
    t: int
    matrix: TropicalMatrix
    per_term: list


def _rotate_to_min(cycle):
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def _greedy_critical_cycle(cs: CriticalStructure):
    """Deterministic fallback: walk min successors until a node repeats."""
    succ = {}
    for i, j in cs.critical_edges:
        succ.setdefault(i, []).append(j)
    for i in succ:
        succ[i].sort()
    v = min(cs.critical_nodes)
    seen = {v: 0}
    walk = [v]
    while True:
        v = succ[v][0]
        if v in seen:
            return walk[seen[v]:]
        seen[v] = len(walk)
        walk.append(v)


def _smallest_critical_cycle(cs: CriticalStructure):
    g = nx.DiGraph(cs.critical_edges)
    cycles = list(itertools.islice(nx.simple_cycles(g), _CYCLE_ENUM_CAP + 1))
    if len(cycles) > _CYCLE_ENUM_CAP:
        # critical graph too dense to enumerate; any critical cycle works
        return _greedy_critical_cycle(cs)
    return min(cycles, key=lambda c: (sorted(c), _rotate_to_min(c)))


def _select_crit(cs: CriticalStructure, rule: str) -> CritSubgraph:
    if rule == "canonical":
        return CritSubgraph.from_critical_structure(cs)
    if rule == "cycle":
        return CritSubgraph.from_cycle(_smallest_critical_cycle(cs))
    raise ValueError("rule must be 'canonical' or 'cycle'")


def _deflation_steps(a: TropicalMatrix, rule: str) -> list:
    steps = []
    keep = set(range(a.n))
    mu = 0
    while keep:
        a_mu = a.restrict(keep)
        try:
            cs = critical_structure(a_mu)
        except NoCyclesError:
            break
        crit = _select_crit(cs, rule)
        steps.append(DeflationStep(mu=mu, k_set=tuple(sorted(keep)), a_mu=a_mu,
                                   lambda_mu=float(cs.lambda_global), crit=crit,
                                   m_set=tuple(sorted(crit.nodes))))
        keep -= crit.nodes
        mu += 1
    if not steps:
        raise NoCyclesError("no cycles")
    return steps


def _ultimate_steps(a: TropicalMatrix) -> list:
    cs = critical_structure(a)
    groups = {}
    for c in cs.scc.nontrivial():
        groups.setdefault(float(cs.lambda_of_component[c]), []).append(c)
    steps = []
    keep = set(range(a.n))
    for mu, lam in enumerate(sorted(groups, reverse=True)):
        edges, m_nodes = [], []
        for c in groups[lam]:
            edges.extend(cs.per_component[c].crit_edges)
            m_nodes.extend(cs.scc.components[c])
        steps.append(DeflationStep(mu=mu, k_set=tuple(sorted(keep)),
                                   a_mu=a.restrict(keep), lambda_mu=lam,
                                   crit=CritSubgraph.from_edges(edges),
                                   m_set=tuple(sorted(m_nodes))))
        keep -= set(m_nodes)
    return steps


def _build_expansion(a: TropicalMatrix, variant: str, steps: list,
                     sigma: tuple | None) -> Expansion:
    terms = []
    gamma = 1
    for st in steps:
        normalized = st.a_mu.scale(-st.lambda_mu)
        triple = csr_build(normalized, st.crit, check_definite=False)
        terms.append(Term(st.lambda_mu, triple))
        gamma = math.lcm(gamma, triple.gamma)
    threshold = 3 * a.n * a.n if variant.startswith("nachtigall") else None
    return Expansion(variant=variant, n=a.n, terms=terms, steps=steps,
                     sigma=sigma, gamma_u=gamma, validity_threshold=threshold)


def nachtigall_expand(a: TropicalMatrix, rule: str = "canonical") -> Expansion:
    """Power expansion valid for all t >= 3 n^2.

    rule picks the critical selection per level: "canonical" removes the
    whole critical graph (cycle means then strictly decrease), "cycle"
    removes only the smallest critical cycle (by sorted node list).
    """
    steps = _deflation_steps(a, rule)
    return _build_expansion(a, "nachtigall-" + rule, steps, None)


def ultimate_expand(a: TropicalMatrix) -> Expansion:
    """Ultimate expansion: one term per distinct component cycle mean.

    sigma maps each term index to the index of the canonical power
    expansion term with the same cycle mean.
    """
    steps = _ultimate_steps(a)
    canon_lams = [st.lambda_mu for st in _deflation_steps(a, "canonical")]
    sigma = []
    for st in steps:
        matches = [k for k, lam in enumerate(canon_lams)
                   if abs(lam - st.lambda_mu) <= 1e-9]
        if len(matches) != 1:
            raise AssertionError(
                "cycle mean %g of ultimate level %d matches canonical levels %s"
                % (st.lambda_mu, st.mu, matches))
        sigma.append(matches[0])
    return _build_expansion(a, "ultimate", steps, tuple(sigma))


def evaluate(e: Expansion, t: int) -> ExpansionEvaluation:
    """Max of lam^t-scaled periodic products over all terms."""
    if t < 0:
        raise ValueError("negative exponent")
    per = []
    total = None
    for lam, triple in e.terms:
        contrib = csr_product(triple, t).matrix.scale(lam * t)
        per.append(contrib)
        total = contrib if total is None else mat_oplus(total, contrib)
    return ExpansionEvaluation(t=t, matrix=total, per_term=per)


def fast_terms(a: TropicalMatrix, t: int, variant: str = "nachtigall",
               rule: str = "canonical") -> list:
    """All term matrices P_mu^(t) without forming any Kleene star.

    Each deflated level is normalized, visualized by a total scaling,
    raised to a power r >= 3 n^2 by repeated squaring, and its critical
    rows and columns are read off and rotated along cyclic classes to the
    requested exponent; one multiplication then yields the term.  Results
    match the literal CSR products of the corresponding expansion.
    """
    if t < 0:
        raise ValueError("negative exponent")
    n = a.n
    if variant == "nachtigall":
        if t < 3 * n * n:
            raise ThresholdError("t below validity threshold 3n^2 = %d" % (3 * n * n))
        steps = _deflation_steps(a, rule)
    elif variant == "ultimate":
        steps = _ultimate_steps(a)
    else:
        raise ValueError("variant must be 'nachtigall' or 'ultimate'")

    s_parts = []
    for st in steps:
        s_arr = np.full((n, n), NEG_INF)
        for i, j in st.crit.edges:
            s_arr[i, j] = a.arr[i, j] - st.lambda_mu
        s_parts.append(TropicalMatrix(s_arr, copy=False))
    scaling = total_visualizing_scaling(s_parts, n)
    a_vis = apply_scaling(a, scaling)
    unscale = scaling.inverse()

    r = 1
    while r < 3 * n * n:
        r <<= 1
    out = []
    for st in steps:
        powered = mat_power(a_vis.restrict(st.k_set).scale(-st.lambda_mu), r)
        nodes = sorted(st.crit.nodes)
        rows = np.full((n, n), NEG_INF)
        rows[nodes, :] = powered.arr[nodes, :]
        cols = np.full((n, n), NEG_INF)
        cols[:, nodes] = powered.arr[:, nodes]
        c_block = _rotate_cols(st.crit, cols, -r)
        str_block = _rotate_rows(st.crit, rows, t - r)
        term = mat_mul(TropicalMatrix(c_block, copy=False),
                       TropicalMatrix(str_block, copy=False))
        out.append(apply_scaling(term, unscale))
    return out


def _term_residue_arrays(e: Expansion) -> list:
    data = []
    for lam, triple in e.terms:
        arrs = [csr_product(triple, res).matrix.arr for res in range(triple.gamma)]
        data.append((lam, arrs))
    return data


def _residue_eval(data, t: int) -> np.ndarray:
    acc = None
    for lam, arrs in data:
        contrib = arrs[t % len(arrs)] + lam * t
        acc = contrib if acc is None else np.maximum(acc, contrib)
    return acc


def _arr_eq(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    if tol == 0.0:
        return bool(np.array_equal(x, y))
    fx, fy = x != NEG_INF, y != NEG_INF
    if not np.array_equal(fx, fy):
        return False
    return bool(np.all(np.abs(x[fx] - y[fy]) <= tol))


def ultimate_threshold(a: TropicalMatrix, e: Expansion | None = None,
                       t_max: int | None = None, tol: float = 1e-9) -> int | None:
    """Smallest t' <= t_max from which the ultimate expansion equals a^t.

    Equality is verified on a window of gamma_u + ceil(log2 t_max) extra
    exponents past the candidate.  Returns None when no qualifying t'
    exists below t_max (reported, not raised).
    """
    n = a.n
    if e is None:
        e = ultimate_expand(a)
    if t_max is None:
        t_max = 30 * n * n
    window = e.gamma_u + max(1, math.ceil(math.log2(max(t_max, 2))))
    data = _term_residue_arrays(e)
    cur = TropicalMatrix.identity(n).arr
    run_start = None
    for t in range(t_max + window + 1):
        if _arr_eq(cur, _residue_eval(data, t), tol):
            if run_start is None:
                run_start = t
            if run_start <= t_max and t - run_start >= window:
                return run_start
        else:
            run_start = None
            if t > t_max:
                return None
        cur = _mp_matmul(cur, a.arr)
    return None
