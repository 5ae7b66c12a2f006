"""Orbit periodicity verdicts, orbit simulation, growth rates."""

import numpy as np
import pytest

from maxplus import (NEG_INF, NotOrbitPeriodicError, TrivialColumnError,
                     TropicalMatrix, ZeroVectorError, column_periodicity,
                     critical_structure, csr_product, gamma_u,
                     is_orbit_periodic, kleene_star, mat_mul, mat_power,
                     mat_scalar_mul, max_cycle_mean, orbit_growth_rate,
                     pair_periodicity, scc_decompose, simulate_orbit,
                     ultimate_expand)

from conftest import random_cyclic, random_matrix
from goldens import EX3_GAMMA_U, EX3A_SEQ_FROM_T4, EX3B_SEQ_FROM_T2

TOL = 1e-9


def unit(n: int, *idx) -> np.ndarray:
    y = np.full(n, NEG_INF)
    for i in idx:
        y[i] = 0.0
    return y


def lam_set(a: TropicalMatrix) -> set:
    cs = critical_structure(a)
    return {float(cs.lambda_of_component[c]) for c in cs.scc.nontrivial()}


# ---------------------------------------------------------------- verdicts

def test_verdicts_example3(ex3a, ex3b):
    ra = is_orbit_periodic(ex3a, method="both")
    assert ra.verdict
    assert ra.gamma_u == EX3_GAMMA_U
    assert not (ra.condition1_violations or ra.condition2_violations
                or ra.support_violations)
    rb_sup = is_orbit_periodic(ex3b)
    assert not rb_sup.verdict
    assert rb_sup.support_violations == [(1, 0, 4, 1)]
    assert rb_sup.gamma_u == EX3_GAMMA_U
    rb_str = is_orbit_periodic(ex3b, method="strong-access")
    assert not rb_str.verdict
    assert rb_str.condition2_violations == [(0, 4)]


def test_verdict_diagonal():
    r = is_orbit_periodic(TropicalMatrix.identity(3))
    assert r.verdict and r.gamma_u == 1


def test_verdict_acyclic():
    a = TropicalMatrix.from_rows([[None, 2.0], [None, None]])
    r = is_orbit_periodic(a)
    assert r.verdict and r.gamma_u == 1
    assert orbit_growth_rate(a, unit(2, 0)) == NEG_INF
    trace = simulate_orbit(a, unit(2, 0))
    assert trace.period == 1 and trace.growth_rate == NEG_INF


def test_condition1_violation():
    # high cycle mean feeding a lower one breaks condition 1
    a = TropicalMatrix.from_rows([[1.0, 0.0], [None, 0.0]])
    r = is_orbit_periodic(a, method="both")
    assert not r.verdict
    assert r.condition1_violations == [(0, 1)]
    # the support screen is not consulted once condition 1 fails
    assert r.support_violations == []


def test_report_method_guard(ex3a):
    with pytest.raises(ValueError):
        is_orbit_periodic(ex3a, method="boolean")


# -------------------------------------------------------------- simulation

def test_simulate_example3a(ex3a, ex3x):
    trace = simulate_orbit(ex3a, ex3x)
    assert trace.period == 4
    assert trace.growth_rate == pytest.approx(1.0)
    assert trace.transient == 4
    assert trace.samples[4:16, 5].tolist() == EX3A_SEQ_FROM_T4
    p, rate, t0 = trace.period, trace.growth_rate, trace.transient
    for t in range(t0, trace.samples.shape[0] - p):
        fin = trace.samples[t] != NEG_INF
        assert np.array_equal(fin, trace.samples[t + p] != NEG_INF)
        assert np.allclose(trace.samples[t + p][fin],
                           trace.samples[t][fin] + rate * p, atol=TOL)


def test_simulate_example3b(ex3b, ex3x):
    trace = simulate_orbit(ex3b, ex3x)
    assert trace.period is None
    assert trace.growth_rate is None and trace.transient is None
    assert trace.samples[2:14, 5].tolist() == EX3B_SEQ_FROM_T2


def test_simulate_eigenvector_orbit():
    rng = np.random.default_rng(70)
    for _ in range(6):
        n = int(rng.integers(2, 6))
        a = random_cyclic(rng, n)
        dec = scc_decompose(a)
        if dec.k != 1:
            continue
        lam = max_cycle_mean(a)
        d = mat_scalar_mul(-lam, a)
        j = critical_structure(d).critical_nodes[0]
        v = kleene_star(d).arr[:, j]
        trace = simulate_orbit(d, v)
        assert trace.period == 1 and trace.transient == 0
        assert trace.growth_rate == pytest.approx(0.0, abs=TOL)
        # shifting the matrix shifts the rate, not the eigenvector
        trace2 = simulate_orbit(a, v)
        assert trace2.period == 1 and trace2.transient == 0
        assert trace2.growth_rate == pytest.approx(lam, abs=TOL)


def test_detected_period_divides_gamma_u():
    rng = np.random.default_rng(71)
    for _ in range(20):
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        g = gamma_u(a)
        y = np.where(rng.random(a.n) < 0.7, rng.integers(-4, 5, a.n), NEG_INF)
        if not (np.asarray(y) != NEG_INF).any():
            y = unit(a.n, 0)
        trace = simulate_orbit(a, y)
        if trace.period is not None:
            assert g % trace.period == 0


# ------------------------------------------------------------ growth rates

def test_growth_rate_examples(ex2, ex3a, ex3x):
    assert orbit_growth_rate(ex3a, ex3x) == pytest.approx(1.0)
    assert orbit_growth_rate(ex3a, unit(6, 4)) == pytest.approx(0.0)
    assert is_orbit_periodic(ex2).verdict
    assert orbit_growth_rate(ex2, unit(7, 6)) == pytest.approx(-1.0)
    assert orbit_growth_rate(ex2, unit(7, 0)) == pytest.approx(0.0)


def test_growth_rate_critical_unit_vector():
    rng = np.random.default_rng(72)
    for _ in range(8):
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        if not is_orbit_periodic(a).verdict:
            continue
        cs = critical_structure(a)
        i = cs.critical_nodes[0]
        assert orbit_growth_rate(a, unit(a.n, i)) == \
            pytest.approx(cs.lambda_global, abs=TOL)


def test_growth_rate_matches_simulation():
    rng = np.random.default_rng(73)
    checked = 0
    while checked < 12:
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        if not is_orbit_periodic(a).verdict:
            continue
        for _ in range(3):
            y = np.where(rng.random(a.n) < 0.6,
                         rng.integers(-4, 5, a.n).astype(float), NEG_INF)
            if not (y != NEG_INF).any():
                continue
            trace = simulate_orbit(a, y)
            assert trace.period is not None
            want = orbit_growth_rate(a, y)
            if want == NEG_INF:
                assert trace.growth_rate == NEG_INF
            else:
                assert trace.growth_rate == pytest.approx(want, abs=TOL)
        checked += 1


def test_growth_rate_errors(ex3a, ex3b):
    with pytest.raises(ZeroVectorError):
        orbit_growth_rate(ex3a, np.full(6, NEG_INF))
    with pytest.raises(NotOrbitPeriodicError):
        orbit_growth_rate(ex3b, unit(6, 0))


# ----------------------------------------------------------- column / pair

def test_column_periodicity_basic(ex3b):
    rng = np.random.default_rng(74)
    a = random_cyclic(rng, 4)
    if scc_decompose(a).k == 1:
        for j in range(a.n):
            assert column_periodicity(a, j)
    for j in range(6):
        assert column_periodicity(ex3b, j)


def test_column_periodicity_false_case():
    a = TropicalMatrix.from_rows([[1.0, 0.0], [None, 0.0]])
    assert column_periodicity(a, 0)
    assert not column_periodicity(a, 1)


def test_column_periodicity_trivial_errors():
    acyclic = TropicalMatrix.from_rows([[None, 2.0], [None, None]])
    with pytest.raises(TrivialColumnError, match="acyclic"):
        column_periodicity(acyclic, 0)
    mixed = TropicalMatrix.from_rows([[None, 0.0], [None, 0.0]])
    with pytest.raises(TrivialColumnError, match="trivial column: 0"):
        column_periodicity(mixed, 0)
    assert column_periodicity(mixed, 1)


def test_column_periodicity_matches_simulation():
    rng = np.random.default_rng(75)
    for _ in range(15):
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        cs = critical_structure(a)
        dec = cs.scc
        for j in range(a.n):
            if dec.is_trivial[int(dec.component_of[j])]:
                continue
            trace = simulate_orbit(a, unit(a.n, j))
            assert column_periodicity(a, j) == (trace.period is not None)


def test_pair_periodicity_example3(ex3a, ex3b):
    assert pair_periodicity(ex3a, 0, 2)
    assert pair_periodicity(ex3a, 5, 1)
    for j in range(4):
        assert not pair_periodicity(ex3b, 5, j)
        assert not pair_periodicity(ex3b, 4, j)
    assert pair_periodicity(ex3b, 4, 5)


def test_pair_periodicity_precondition():
    a = TropicalMatrix.from_rows([[1.0, 0.0], [None, 0.0]])
    with pytest.raises(ValueError, match="not ultimately periodic"):
        pair_periodicity(a, 0, 1)


def test_pair_periodicity_matches_simulation():
    rng = np.random.default_rng(76)
    for _ in range(12):
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        dec = scc_decompose(a)
        lu = [v for v in range(a.n)
              if not dec.is_trivial[int(dec.component_of[v])]]
        pairs = [(i, j) for i in lu for j in lu if i < j]
        for i, j in pairs[:6]:
            if not (column_periodicity(a, i) and column_periodicity(a, j)):
                continue
            trace = simulate_orbit(a, unit(a.n, i, j))
            assert pair_periodicity(a, i, j) == (trace.period is not None)


# --------------------------------------------------------- entry sequences

# Sampling time for "eventually" claims.  With integer weights in
# [-9, 3] and n <= 6 the last term switch happens before
# (intercept spread) / (smallest cycle-mean gap) ~ 7e4 steps, and
# integer path sums stay exact in doubles at this size.
T_LATE = 1 << 17


def late_powers(a: TropicalMatrix, g: int) -> list:
    """a^t for t in [T_LATE, T_LATE + 2g]."""
    out = [mat_power(a, T_LATE)]
    for _ in range(2 * g):
        out.append(mat_mul(out[-1], a))
    return [m.arr for m in out]


def test_same_component_entry_sequences():
    rng = np.random.default_rng(77)
    for _ in range(10):
        a = random_cyclic(rng, int(rng.integers(2, 6)))
        cs = critical_structure(a)
        g = gamma_u(a)
        pows = late_powers(a, g)
        for c in cs.scc.nontrivial():
            lam = cs.lambda_of_component[c]
            nodes = cs.scc.components[c]
            for i in nodes:
                for j in nodes:
                    for k in range(g):
                        x, xg = pows[k][i, j], pows[k + g][i, j]
                        if x == NEG_INF:
                            assert xg == NEG_INF
                        else:
                            assert abs(xg - x - lam * g) <= 1e-6


def term_rate(e, i: int, j: int, t: int) -> float:
    """Largest term slope with a finite coefficient on the t-residue."""
    best = NEG_INF
    for term in e.terms:
        if csr_product(term.triple, t).matrix.arr[i, j] != NEG_INF:
            best = max(best, term.lam)
    return best


def test_entry_sequences_eventually_affine():
    rng = np.random.default_rng(78)
    for _ in range(8):
        a = random_cyclic(rng, int(rng.integers(2, 5)))
        e = ultimate_expand(a)
        g = e.gamma_u
        pows = late_powers(a, g)
        slopes = lam_set(a)
        for i in range(a.n):
            for j in range(a.n):
                trio = (pows[0][i, j], pows[g][i, j], pows[2 * g][i, j])
                want = term_rate(e, i, j, T_LATE)
                if NEG_INF in trio:
                    assert trio == (NEG_INF,) * 3
                    assert want == NEG_INF
                    continue
                d1, d2 = trio[1] - trio[0], trio[2] - trio[1]
                assert abs(d1 - d2) <= 1e-6
                assert abs(d1 / g - want) <= 1e-6
                assert any(abs(d1 / g - lam) <= 1e-6 for lam in slopes)


def enumerate_path_level(a: TropicalMatrix, lam_of, i: int, length: int):
    """Max over i->j walks of the largest visited component mean."""
    best = {}

    def walk(v, steps, level):
        level = max(level, lam_of[v])
        if steps == length:
            if level > best.get(v, NEG_INF):
                best[v] = level
            return
        for w in range(a.n):
            if a.arr[v, w] != NEG_INF:
                walk(w, steps + 1, level)

    walk(i, 0, NEG_INF)
    return best


def test_path_implies_growth_lower_bound():
    # a walk touching a component of mean lam forces the aligned entry
    # subsequence to eventually grow at rate >= lam; the eventual rate
    # is read off the expansion terms on the walk's length residue
    rng = np.random.default_rng(79)
    for _ in range(6):
        n = int(rng.integers(2, 6))
        a = random_cyclic(rng, n)
        cs = critical_structure(a)
        lam_of = [NEG_INF] * n
        for c in cs.scc.nontrivial():
            for v in cs.scc.components[c]:
                lam_of[v] = float(cs.lambda_of_component[c])
        e = ultimate_expand(a)
        for i in range(n):
            for l in range(1, 6):
                levels = enumerate_path_level(a, lam_of, i, l)
                for j, level in levels.items():
                    if level == NEG_INF:
                        continue
                    assert term_rate(e, i, j, l) >= level - TOL
