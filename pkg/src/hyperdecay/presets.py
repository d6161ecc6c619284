"""Bundled operator models with closed-form expected outcomes.

Each preset builds its stack from named physical parameters and carries
fixtures: the stability verdict, the low/high expansion coefficients from
independent closed-form arithmetic (quadratic formulas and explicit deleted
root products, no calls into the root finder), and, where wired, a decay-rate
band for the simulation pipeline.  `compare_expansions` checks computed
records against fixtures by minimum-distance matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .asymptotics import ExpansionRecord
from .symbols import HomogeneousSymbol, OperatorStack

TermList = list[tuple[float, complex]]


@dataclass(frozen=True)
class PresetModel:
    name: str
    params: dict
    build: Callable[[], OperatorStack]
    structure: str                     # "Q1" | "Q2" | "Q3"
    dim: int
    expected: dict = field(default_factory=dict)
    description: str = ""


# ---------------------------------------------------------------------------
# stack builders


def mgt_stack(tau: float = 1.0, b: float = 1.0, c: float = 1.0, dim: int = 3) -> OperatorStack:
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: tau, 1: -(tau * c**2 + b)})
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: 1.0, 0: -(c**2)})
    return OperatorStack.build([p3, p2])


def blackstock_crighton_stack(tau: float = 1.0, a: float = 1.0, b: float = 1.0, c: float = 1.0,
                              dim: int = 3) -> OperatorStack:
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: tau, 2: -(tau * c**2 + a + b), 0: a * c**2})
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: 1.0, 1: -(c**2)})
    return OperatorStack.build([p4, p3])


def em_elastic_stack(mu: float = 1.0, c: float = 1.0, gamma: float = 1.0, sigma: float = 1.0,
                     dim: int = 3) -> OperatorStack:
    p5 = HomogeneousSymbol.isotropic(5, dim, {5: 1.0, 3: -(mu + c**2 + gamma**2), 1: c**2 * mu})
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: 2.0 * sigma, 2: -sigma * (2 * mu + c**2 + gamma**2),
                                              0: sigma * c**2 * mu})
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: sigma**2, 1: -(sigma**2) * mu})
    return OperatorStack.build([p5, p4, p3])


def em_elastic_dissipative_stack(a: float = 2.0, sigma: float = 1.0, mu: float = 1.0, c: float = 1.0,
                                 gamma: float = 1.0, dim: int = 3) -> OperatorStack:
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: 1.0, 2: -(mu + c**2 + gamma**2), 0: c**2 * mu})
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: a + sigma, 1: -(a * c**2 + mu * sigma)})
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: a * sigma})
    return OperatorStack.build([p4, p3, p2])


def anisotropic_elastic_2d_stack(a1: float = 2.0, a2: float = 1.0, mu: float = 1.0,
                                 nu_lame: float = 0.0) -> OperatorStack:
    dim = 2
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: 1.0, 2: -(3 * mu + nu_lame), 0: mu * (2 * mu + nu_lame)})
    p3 = HomogeneousSymbol(3, dim, {
        (3, (0, 0)): a1 + a2,
        (1, (2, 0)): -(a1 * mu + a2 * (2 * mu + nu_lame)),
        (1, (0, 2)): -(a1 * (2 * mu + nu_lame) + a2 * mu),
    })
    p2 = HomogeneousSymbol(2, dim, {(2, (0, 0)): a1 * a2})
    return OperatorStack.build([p4, p3, p2])


def mgt_classical_damping_stack(tau: float = 1.0, b: float = 1.0, c: float = 1.0,
                                dim: int = 3) -> OperatorStack:
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: tau, 1: -tau * c**2})
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: 1.0, 0: -(c**2)})
    p1 = HomogeneousSymbol.isotropic(1, dim, {1: b})
    return OperatorStack.build([p3, p2, p1])


def fourth_order_weak_stack(c: float = 2.0, dim: int = 1) -> OperatorStack:
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: 1.0, 2: -(c**2)})
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: 1.0, 1: -1.0})
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: 1.0, 0: -1.0})
    return OperatorStack.build([p4, p3, p2])


def example_ell3_stack(a: float = 2.0, b: float = 1.0, c1: float = 1.0, c2: float = 2.0,
                       c3: float = 1.0, dim: int = 3) -> OperatorStack:
    p4 = HomogeneousSymbol.isotropic(4, dim, {4: 1.0, 2: -(a**2)})
    p3 = HomogeneousSymbol.isotropic(3, dim, {3: c3, 1: -c3 * a**2})
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: c2, 0: -c2 * b**2})
    p1 = HomogeneousSymbol.isotropic(1, dim, {1: c1})
    return OperatorStack.build([p4, p3, p2, p1])


def damped_wave_stack(c: float = 1.0, dim: int = 1) -> OperatorStack:
    p2 = HomogeneousSymbol.isotropic(2, dim, {2: 1.0, 0: -(c**2)})
    p1 = HomogeneousSymbol.isotropic(1, dim, {1: 1.0})
    return OperatorStack.build([p2, p1])


# ---------------------------------------------------------------------------
# closed-form expansion fixtures (independent arithmetic, not the library paths)


def _quartic_even_roots(b2: float, c0: float) -> tuple[float, float]:
    """Positive roots (small, large) of z^4 - b2 z^2 + c0 with b2^2 > 4 c0 > 0."""
    disc = b2 * b2 - 4.0 * c0
    if disc <= 0:
        raise ValueError("expected two distinct positive squared roots")
    s_small = (b2 - math.sqrt(disc)) / 2.0
    s_large = (b2 + math.sqrt(disc)) / 2.0
    return math.sqrt(s_small), math.sqrt(s_large)


def mgt_low_expected(tau: float, b: float, c: float) -> list[TermList]:
    return [
        [(1.0, 1j * c), (2.0, -b / 2.0 + 0j)],
        [(1.0, -1j * c), (2.0, -b / 2.0 + 0j)],
        [(0.0, complex(-1.0 / tau))],
    ]


def mgt_high_expected(tau: float, b: float, c: float) -> list[TermList]:
    s2 = c**2 + b / tau
    s = math.sqrt(s2)
    outer = -b / (2.0 * tau**2 * s2)
    inner = -(c**2) / (tau * s2)
    return [
        [(1.0, 1j * s), (0.0, complex(outer))],
        [(1.0, -1j * s), (0.0, complex(outer))],
        [(1.0, 0j), (0.0, complex(inner))],
    ]


def bc_low_expected(tau: float, a: float, b: float, c: float) -> list[TermList]:
    return [
        [(1.0, 1j * c), (2.0, -b / 2.0 + 0j)],
        [(1.0, -1j * c), (2.0, -b / 2.0 + 0j)],
        [(1.0, 0j), (2.0, complex(-a))],
        [(0.0, complex(-1.0 / tau))],
    ]


def bc_high_expected(tau: float, a: float, b: float, c: float) -> list[TermList]:
    a3, a4 = _quartic_even_roots(c**2 + (a + b) / tau, a * c**2 / tau)
    out = []
    for r in (a4, a3):
        # deleted-root product of the quartic at +-r; P3 = (z^3 - c^2 z)/tau
        other = a3 if r == a4 else a4
        prod = (r - other) * (r + other) * (2.0 * r)
        coef = -((r**3 - c**2 * r) / tau) / prod
        out.append([(1.0, 1j * r), (0.0, complex(coef))])
        out.append([(1.0, -1j * r), (0.0, complex(coef))])
    return out


def em_elastic_low_expected(mu: float, c: float, gamma: float, sigma: float) -> list[TermList]:
    rmu = math.sqrt(mu)
    return [
        [(1.0, 1j * rmu), (2.0, complex(-(gamma**2) / (2.0 * sigma)))],
        [(1.0, -1j * rmu), (2.0, complex(-(gamma**2) / (2.0 * sigma)))],
        [(1.0, 0j), (2.0, complex(-(c**2) / sigma))],
        [(0.0, complex(-sigma))],
        [(0.0, complex(-sigma))],
    ]


def em_elastic_high_expected(mu: float, c: float, gamma: float, sigma: float) -> list[TermList]:
    a4, a5 = _quartic_even_roots(mu + c**2 + gamma**2, c**2 * mu)

    def p4(z: float) -> float:
        return sigma * (2.0 * z**4 - (2 * mu + c**2 + gamma**2) * z**2 + c**2 * mu)

    out = []
    for r, other in ((a5, a4), (a4, a5)):
        prod = r * (r - other) * (r + other) * (2.0 * r)
        coef = -p4(r) / prod
        out.append([(1.0, 1j * r), (0.0, complex(coef))])
        out.append([(1.0, -1j * r), (0.0, complex(coef))])
    out.append([(1.0, 0j), (0.0, complex(-sigma))])  # deleted product at 0 is a4^2 a5^2 = c^2 mu
    return out


def em_elastic_dissipative_low_expected(a: float, sigma: float, mu: float, c: float,
                                        gamma: float) -> list[TermList]:
    return [
        [(1.0, 0j), (2.0, complex(-mu / a))],
        [(1.0, 0j), (2.0, complex(-(c**2) / sigma))],
        [(0.0, complex(-sigma))],
        [(0.0, complex(-a))],
    ]


def em_elastic_dissipative_high_expected(a: float, sigma: float, mu: float, c: float,
                                         gamma: float) -> list[TermList]:
    a3, a4 = _quartic_even_roots(mu + c**2 + gamma**2, c**2 * mu)

    def p3(z: float) -> float:
        return (a + sigma) * z**3 - (a * c**2 + mu * sigma) * z

    out = []
    for r, other in ((a4, a3), (a3, a4)):
        prod = (r - other) * (r + other) * (2.0 * r)
        coef = -p3(r) / prod
        out.append([(1.0, 1j * r), (0.0, complex(coef))])
        out.append([(1.0, -1j * r), (0.0, complex(coef))])
    return out


def anisotropic_kappas(a1: float, a2: float, mu: float, nu_lame: float,
                       d: Sequence[float]) -> tuple[complex, complex]:
    d1, d2 = float(d[0]), float(d[1])
    qa = a1 * a2
    qb = a1 * (mu + (mu + nu_lame) * d2**2) + a2 * (mu + (mu + nu_lame) * d1**2)
    qc = mu * (2.0 * mu + nu_lame)
    disc = complex(qb * qb - 4.0 * qa * qc)
    root = np.sqrt(disc)
    k1 = (-qb + root) / (2.0 * qa)
    k2 = (-qb - root) / (2.0 * qa)
    return complex(k1), complex(k2)


def anisotropic_low_expected(a1: float, a2: float, mu: float, nu_lame: float,
                             d: Sequence[float]) -> list[TermList]:
    k1, k2 = anisotropic_kappas(a1, a2, mu, nu_lame, d)
    return [
        [(1.0, 0j), (2.0, k1)],
        [(1.0, 0j), (2.0, k2)],
        [(0.0, complex(-min(a1, a2)))],
        [(0.0, complex(-max(a1, a2)))],
    ]


def anisotropic_high_expected(a1: float, a2: float, mu: float, nu_lame: float,
                              d: Sequence[float]) -> list[TermList]:
    d1, d2 = float(d[0]), float(d[1])
    r1, r2 = math.sqrt(mu), math.sqrt(2.0 * mu + nu_lame)

    def p3(z: float) -> float:
        return (a1 + a2) * z**3 - (a1 * (mu + (mu + nu_lame) * d2**2)
                                   + a2 * (mu + (mu + nu_lame) * d1**2)) * z

    out = []
    for r, other in ((r1, r2), (r2, r1)):
        prod = (2.0 * r) * (r - other) * (r + other)
        coef = -p3(r) / prod
        out.append([(1.0, 1j * r), (0.0, complex(coef))])
        out.append([(1.0, -1j * r), (0.0, complex(coef))])
    return out


def mgt_cd_low_expected(tau: float, b: float, c: float) -> list[TermList]:
    disc = complex(1.0 / tau**2 - 4.0 * b / tau)
    root = np.sqrt(disc)
    z1 = (-1.0 / tau + root) / 2.0
    z2 = (-1.0 / tau - root) / 2.0
    return [
        [(1.0, 0j), (2.0, complex(-(c**2) / b))],
        [(0.0, complex(z1))],
        [(0.0, complex(z2))],
    ]


def mgt_cd_high_expected(tau: float, b: float, c: float) -> list[TermList]:
    return [
        [(1.0, 1j * c), (-1.0, 1j * b / (2.0 * c * tau)), (-2.0, complex(-b / (2.0 * c**2 * tau**2)))],
        [(1.0, -1j * c), (-1.0, -1j * b / (2.0 * c * tau)), (-2.0, complex(-b / (2.0 * c**2 * tau**2)))],
        [(1.0, 0j), (0.0, complex(-1.0 / tau))],
    ]


def fourth_order_low_expected(c: float) -> list[TermList]:
    g = (c**2 - 1.0) / 2.0
    z1 = complex(-0.5, math.sqrt(3.0) / 2.0)
    z2 = complex(-0.5, -math.sqrt(3.0) / 2.0)
    return [
        [(1.0, 1j), (3.0, -1j * g), (4.0, complex(-g))],
        [(1.0, -1j), (3.0, 1j * g), (4.0, complex(-g))],
        [(0.0, z1)],
        [(0.0, z2)],
    ]


def fourth_order_high_expected(c: float) -> list[TermList]:
    kplus = complex(-1.0, math.sqrt(4.0 * c**2 - 1.0)) / (2.0 * c**2)
    kminus = complex(-1.0, -math.sqrt(4.0 * c**2 - 1.0)) / (2.0 * c**2)
    outer = -(c**2 - 1.0) / (2.0 * c**2)
    return [
        [(1.0, 1j * c), (0.0, complex(outer))],
        [(1.0, -1j * c), (0.0, complex(outer))],
        [(1.0, 0j), (0.0, kplus)],
        [(1.0, 0j), (0.0, kminus)],
    ]


def example_ell3_low_expected(a: float, b: float, c1: float, c2: float, c3: float) -> list[TermList]:
    cubic = np.roots([1.0, c3, c2, c1])
    out: list[TermList] = [[(1.0, 0j), (2.0, complex(-c2 * b**2 / c1))]]
    for z in sorted(cubic, key=lambda w: (w.real, w.imag)):
        out.append([(0.0, complex(z))])
    return out


def example_ell3_stable_predicate(a: float, b: float, c1: float, c2: float, c3: float) -> bool:
    return (c1 < c2 * c3) and (b**2 < (1.0 - c1 / (c2 * c3)) * a**2)


# ---------------------------------------------------------------------------
# registry


def _make_presets() -> dict[str, PresetModel]:
    presets = {}

    params = {"tau": 1.0, "b": 1.0, "c": 1.0}
    presets["mgt"] = PresetModel(
        name="mgt", params=params, dim=3, structure="Q1",
        build=lambda p=params: mgt_stack(p["tau"], p["b"], p["c"], dim=3),
        description="third-order acoustic model with relaxed viscous damping",
        expected={
            "strictly_stable": True,
            "scenario_flags": set(),
            "low": mgt_low_expected(**params),
            "high": mgt_high_expected(**params),
            "sim": {"slot": 2, "k": 0, "s": 0.0, "n": 3, "q": 1.0,
                    "t_range": (1e2, 1e4, 25), "slope": -0.25, "tol": 0.05},
            "profile_gap_band": (-0.65, -0.35),
        })

    params = {"tau": 1.0, "a": 1.0, "b": 1.0, "c": 1.0}
    presets["blackstock_crighton"] = PresetModel(
        name="blackstock_crighton", params=params, dim=3, structure="Q1",
        build=lambda p=params: blackstock_crighton_stack(p["tau"], p["a"], p["b"], p["c"], dim=3),
        description="fourth-order acoustic model coupling thermal and viscous damping",
        expected={
            "strictly_stable": True,
            "scenario_flags": set(),
            "low": bc_low_expected(**params),
            "high": bc_high_expected(**params),
            "sim": {"slot": 3, "k": 0, "s": 1.0, "n": 3, "q": 1.0,
                    "t_range": (1e2, 1e4, 25), "slope": -0.25, "tol": 0.05},
            "profile_gap_band": (-0.65, -0.35),
        })

    params = {"mu": 1.0, "c": 1.0, "gamma": 1.0, "sigma": 1.0}
    presets["em_elastic"] = PresetModel(
        name="em_elastic", params=params, dim=3, structure="Q2",
        build=lambda p=params: em_elastic_stack(p["mu"], p["c"], p["gamma"], p["sigma"], dim=3),
        description="fifth-order scalar reduction of elastic waves coupled to a conducting field",
        expected={
            "strictly_stable": True,
            "scenario_flags": set(),
            "low": em_elastic_low_expected(**params),
            "high": em_elastic_high_expected(**params),
            "sim": {"slot": 4, "k": 0, "s": 2.0, "n": 3, "q": 1.0,
                    "t_range": (1e2, 1e4, 25), "slope": -0.75, "tol": 0.07},
        })

    params = {"a": 2.0, "sigma": 1.0, "mu": 1.0, "c": 1.0, "gamma": 1.0}
    presets["em_elastic_dissipative"] = PresetModel(
        name="em_elastic_dissipative", params=params, dim=3, structure="Q2",
        build=lambda p=params: em_elastic_dissipative_stack(p["a"], p["sigma"], p["mu"], p["c"],
                                                            p["gamma"], dim=3),
        description="fourth-order elastic-conducting reduction with an extra frictional term",
        expected={
            "strictly_stable": True,
            "scenario_flags": {"DECAY_LOSS"},
            "low": em_elastic_dissipative_low_expected(**params),
            "high": em_elastic_dissipative_high_expected(**params),
        })

    params = {"a1": 2.0, "a2": 1.0, "mu": 1.0, "nu_lame": 0.0}
    presets["anisotropic_elastic_2d"] = PresetModel(
        name="anisotropic_elastic_2d", params=params, dim=2, structure="Q2",
        build=lambda p=params: anisotropic_elastic_2d_stack(p["a1"], p["a2"], p["mu"], p["nu_lame"]),
        description="planar elastic waves with direction-dependent friction",
        expected={
            "strictly_stable": True,
            "scenario_flags": {"DECAY_LOSS"},
            "low_at": lambda d, p=params: anisotropic_low_expected(p["a1"], p["a2"], p["mu"],
                                                                   p["nu_lame"], d),
            "high_at": lambda d, p=params: anisotropic_high_expected(p["a1"], p["a2"], p["mu"],
                                                                     p["nu_lame"], d),
        })

    params = {"tau": 1.0, "b": 1.0, "c": 1.0}
    presets["mgt_classical_damping"] = PresetModel(
        name="mgt_classical_damping", params=params, dim=3, structure="Q2",
        build=lambda p=params: mgt_classical_damping_stack(p["tau"], p["b"], p["c"], dim=3),
        description="third-order acoustic model with frictional instead of viscous damping",
        expected={
            "strictly_stable": True,
            "scenario_flags": {"REG_LOSS_DECAY"},
            "low": mgt_cd_low_expected(**params),
            "high": mgt_cd_high_expected(**params),
            "high_re_slope": {"range": (1e1, 1e3), "slope": -2.0, "tol": 0.1},
            "sim": {"slot": 2, "k": 0, "s": 0.0, "n": 3, "q": 1.0,
                    "t_range": (1e2, 1e4, 25), "slope": -0.75, "tol": 0.05},
        })

    params = {"c": 2.0}
    presets["fourth_order_weak"] = PresetModel(
        name="fourth_order_weak", params=params, dim=1, structure="Q2",
        build=lambda p=params: fourth_order_weak_stack(p["c"], dim=1),
        description="fourth-order model whose lower symbols share simple roots with each other",
        expected={
            "strictly_stable": True,
            "scenario_flags": {"SLOW_LOW", "DERIVATIVE_LOSS"},
            "low": fourth_order_low_expected(**params),
            "high": fourth_order_high_expected(**params),
            "low_re_slope": {"range": (3e-3, 3e-2), "slope": 4.0, "tol": 0.1,
                             "coefficient": -1.5, "coef_tol": 0.02},
            "sim": {"slot": 3, "k": 0, "s": 1.0, "n": 1, "q": 1.0,
                    "t_range": (1e2, 1e4, 25), "slope": -0.125, "tol": 0.05},
        })

    params = {"a": 2.0, "b": 1.0, "c1": 1.0, "c2": 2.0, "c3": 1.0}
    presets["example_ell3"] = PresetModel(
        name="example_ell3", params=params, dim=3, structure="Q3",
        build=lambda p=params: example_ell3_stack(p["a"], p["b"], p["c1"], p["c2"], p["c3"], dim=3),
        description="depth-3 stack handled by the even/odd interlacing criterion",
        expected={
            "strictly_stable": example_ell3_stable_predicate(**params),
            "low": example_ell3_low_expected(**params),
        })
    return presets


PRESETS = _make_presets()


def get_preset(name: str) -> PresetModel:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return PRESETS[name]


# ---------------------------------------------------------------------------
# fixture comparison


def _term_distance(a: TermList, b: TermList) -> float:
    da = {round(p, 9): c for p, c in a}
    db = {round(p, 9): c for p, c in b}
    if set(da) != set(db):
        return float("inf")
    return max(abs(da[p] - db[p]) for p in da)


def compare_expansions(records: Sequence[ExpansionRecord], expected: Sequence[TermList],
                       rtol: float = 1e-8) -> tuple[bool, list[str]]:
    """Match computed records to expected term lists and check coefficients.

    Matching minimizes the summed coefficient distance; a pair passes when
    every coefficient agrees within rtol * (1 + |coefficient|).
    """
    if len(records) != len(expected):
        return False, [f"expected {len(expected)} records, got {len(records)}"]
    cost = np.zeros((len(expected), len(records)))
    for i, exp in enumerate(expected):
        for j, rec in enumerate(records):
            d = _term_distance(exp, list(rec.terms))
            cost[i, j] = min(d, 1e9)
    rows, cols = linear_sum_assignment(cost)
    problems = []
    for i, j in zip(rows, cols):
        exp, rec = expected[i], records[j]
        de = {round(p, 9): c for p, c in exp}
        dr = {round(p, 9): c for p, c in rec.terms}
        if set(de) != set(dr):
            problems.append(f"record {j}: powers {sorted(dr)} != expected {sorted(de)}")
            continue
        for p in de:
            tol = rtol * (1.0 + abs(de[p]))
            if abs(de[p] - dr[p]) > tol:
                problems.append(
                    f"record {j}: coeff at power {p} = {dr[p]:.12g} differs from {de[p]:.12g}")
    return not problems, problems
