import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from lfpoly import evaluate as ev
from lfpoly.descriptors import series_descriptor, zeta_descriptor
from lfpoly.errors import (
    AccuracyUnreachable,
    PoleAt1,
    PoleTooClose,
    RegionViolation,
)

from conftest import ZETA, build, zpoly

mp.mp.dps = 40


# --- certified scalar APIs ------------------------------------------------

def test_zeta_2():
    assert abs(ev.zeta(2.0, err=1e-12) - math.pi**2 / 6) < 1e-12


def test_zeta_special_rationals():
    # certificates are conservative near the real axis; actual accuracy
    # is much better than the requested bound
    assert abs(ev.zeta(0.0, err=1e-10) + 0.5) < 1e-12
    assert abs(ev.zeta(-1.0, err=1e-10) + 1 / 12) < 1e-12
    assert abs(ev.zeta(-11.0, err=1e-10) - 691 / 32760) < 1e-11


def test_zeta_on_critical_line_oracle():
    for t in (14.0, 37.5, 81.25):
        s = 0.5 + 1j * t
        ref = complex(mp.zeta(mp.mpc(s)))
        assert abs(ev.zeta(s, err=1e-10) - ref) < 1e-10


def test_zeta_deep_reflection_oracle():
    for s in (-25.5 + 0.3j, -101.25 + 1j, -44.0 + 7.0j):
        ref = complex(mp.zeta(mp.mpc(s)))
        got = ev.zeta(s, err=abs(ref) * 1e-6)
        assert abs(got - ref) <= abs(ref) * 1e-6


def test_zeta_pole_guard():
    with pytest.raises(PoleAt1):
        ev.zeta(1.0 + 1e-12j)


def test_zeta_err_floor():
    with pytest.raises(AccuracyUnreachable):
        ev.zeta(2.0, err=1e-16)


def test_hurwitz_basic():
    assert abs(ev.hurwitz_zeta(2.0, 0.5, err=1e-12) - math.pi**2 / 2) < 1e-12
    for s, a in ((3.5 + 2j, 0.25), (0.5 + 30j, 2 / 3), (-2.5, 0.1)):
        ref = complex(mp.zeta(mp.mpc(s), a))
        assert abs(ev.hurwitz_zeta(s, a, err=1e-9) - ref) < 1e-9


def test_dirichlet_l_values(chi3, chi4):
    # L(1, chi_4) = pi/4 (Leibniz); L(2, chi_4) is Catalan's constant
    assert abs(ev.dirichlet_l(1.0, chi4, err=1e-12) - math.pi / 4) < 1e-12
    assert abs(ev.dirichlet_l(2.0, chi4, err=1e-12) - float(mp.catalan)) < 1e-12
    # L(2, chi_3) against the mpmath Hurwitz decomposition
    ref = complex((mp.zeta(2, mp.mpf(1) / 3) - mp.zeta(2, mp.mpf(2) / 3)) / 9)
    assert abs(ev.dirichlet_l(2.0, chi3, err=1e-12) - ref) < 1e-12


def test_dirichlet_l_entire_at_1_and_deep(chi4):
    ev.dirichlet_l(1.0, chi4, err=1e-10)  # no pole for non-principal chi
    s = -8.5 + 0.25j
    z = mp.mpc(s)
    ref = complex(
        mp.power(4, -z) * (mp.zeta(z, mp.mpf(1) / 4) - mp.zeta(z, mp.mpf(3) / 4))
    )
    got = ev.dirichlet_l(s, chi4, err=1e-8)
    assert abs(got - ref) < 1e-7 * max(1.0, abs(ref))


def test_principal_character_pole(chi3):
    from lfpoly import characters as chars

    principal = chars.character_table(3)[0]
    with pytest.raises(PoleAt1):
        ev.dirichlet_l(1.0, principal)


# --- derivative tables ----------------------------------------------------

def test_zeta_derivatives_oracle():
    S = np.array([2.0 + 0j, 0.5 + 14.0j, -3.25 + 2.0j])
    D = ev.lfunc_derivatives(ZETA, S, 3, rel_tol=1e-10)
    for i, s in enumerate(S):
        for l in range(4):
            ref = complex(mp.diff(mp.zeta, mp.mpc(s), l)) if l else complex(
                mp.zeta(mp.mpc(s))
            )
            assert abs(D[l, i] - ref) < 1e-8 * max(1.0, abs(ref)), (s, l)


def test_derivatives_near_pole_rejected():
    with pytest.raises(PoleTooClose):
        ev.lfunc_derivatives(ZETA, np.array([1.0 + 1e-8j]), 1)


def test_series_descriptor_region():
    d = series_descriptor("toy", [1.0, 0.5, 0.25])
    with pytest.raises(RegionViolation):
        ev.lfunc_values(d, np.array([0.9 + 0j]))


# --- expression evaluation ------------------------------------------------

def test_eval_F_composite_oracle():
    F = zpoly((2.0, [(1, 1), (0, 1)]), (-1.0j, [(2, 1)]))
    for s in (2.0 + 3.0j, 0.5 + 21.0j, -1.5 + 0.5j):
        z = mp.mpc(s)
        ref = complex(
            2 * mp.diff(mp.zeta, z, 1) * mp.zeta(z) - 1j * mp.diff(mp.zeta, z, 2)
        )
        got = ev.eval_F(F, s, rel_tol=1e-10)
        assert abs(got - ref) < 1e-7 * max(1.0, abs(ref)), s


def test_eval_F_with_prime_consistency():
    F = zpoly((1.0, [(1, 2)]), (0.5, [(0, 1)]))
    s = 0.75 + 9.0j
    v, vp = ev.eval_F_with_prime(F, s)
    h = 1e-5
    num = (ev.eval_F(F, s + h) - ev.eval_F(F, s - h)) / (2 * h)
    assert abs(v - ev.eval_F(F, s)) < 1e-9 * max(1.0, abs(v))
    assert abs(vp - num) < 1e-4 * max(1.0, abs(vp))


# --- scaled path ----------------------------------------------------------

def test_scaled_matches_plain_at_moderate_depth():
    F = zpoly((1.0, [(1, 1)]), (3.0, [(2, 1)]))
    S = np.array([-20.3 + 0.4j, 2.5 + 10.0j])
    u, g = ev.eval_F_scaled_batch(F, S)
    plain, _ = ev.eval_F_batch(F, S)
    recon = u * np.exp(g)
    assert np.all(np.abs(recon - plain) <= 1e-8 * np.abs(plain))


def test_scaled_deep_oracle():
    mp.mp.dps = 200
    zd = zeta_descriptor()
    S = np.array([-400.25 + 0.1j, -739.6 + 0.0j])
    D, G = ev.lfunc_derivatives_scaled(zd, S, 1)
    for i, s in enumerate(S):
        for l in (0, 1):
            ref = mp.diff(mp.zeta, mp.mpc(s), l) if l else mp.zeta(mp.mpc(s))
            log_ref = float(mp.log(abs(ref)))
            log_got = math.log(abs(D[l, i])) + G[i]
            assert abs(log_got - log_ref) < 1e-9
            dph = (np.angle(D[l, i]) - float(mp.arg(ref))) % (2 * math.pi)
            assert min(dph, 2 * math.pi - dph) < 1e-9
    mp.mp.dps = 40


# --- functional-equation pieces -------------------------------------------

def test_b_factor_power_example():
    # at s = 9 the rank-1 zeta factor gives ((1/2) log 22.5)^l
    g = 0.5 * math.log(22.5)
    for l in (0, 1, 2):
        got = ev.b_factor(9.0 + 0j, l, ZETA)
        assert abs(got - g**l) < 1e-12


def test_reflection_identity_zeta():
    for s in (4.0 + 0j, 3.0 + 17.0j, 2.5 + 60.0j):
        lhs = complex(mp.zeta(1 - mp.mpc(s)))
        rhs = cmath.exp(ev.log_fe_factor(ZETA, s)) * ev.zeta(s, err=1e-10)
        assert abs(rhs - lhs) < 1e-9 * max(1.0, abs(lhs))


def test_reflection_identity_dirichlet(l_chi4, chi4):
    # completed-L reflection: L(1-s, conj chi) = Phi(s) L(s, chi)
    for s in (3.0 + 5.0j, 2.0 + 25.0j):
        w = 1 - mp.mpc(s)
        lhs = complex(
            mp.power(4, -w) * (mp.zeta(w, mp.mpf(1) / 4) - mp.zeta(w, mp.mpf(3) / 4))
        )
        rhs = cmath.exp(ev.log_fe_factor(l_chi4, s)) * ev.dirichlet_l(
            s, chi4, err=1e-11
        )
        assert abs(rhs - lhs) < 1e-8 * max(1.0, abs(lhs))


def test_fe_special_values():
    # factor route reproduces zeta(-3) = 1/120 and zeta(-1) = -1/12
    v4 = cmath.exp(ev.log_fe_factor(ZETA, 4.0)) * ev.zeta(4.0, err=1e-10)
    v2 = cmath.exp(ev.log_fe_factor(ZETA, 2.0)) * ev.zeta(2.0, err=1e-10)
    assert abs(v4 - 1 / 120) < 1e-9
    assert abs(v2 + 1 / 12) < 1e-9


def test_asymptotic_fe_region_guard():
    F = zpoly((1.0, [(1, 1)]))
    from lfpoly import expr as E

    profile = E.degree_profile(F)
    with pytest.raises(RegionViolation):
        ev.asymptotic_fe_main(F, 1.2 + 0j, profile)
