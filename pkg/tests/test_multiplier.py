import cmath
import math

import pytest

from conftest import random_element
from vvps.modgroup import I2, S, T, cocycle_j, mobius_act, real_power, t_power
from vvps.multiplier import MultiplierSystem, check_consistency, evaluate_v


def log_eta(tau: complex) -> complex:
    """log of the eta function through its q-product, with enough terms for
    the height of tau."""
    q = cmath.exp(2j * math.pi * tau)
    terms = min(int(60.0 / tau.imag) + 50, 250000)
    total = 1j * math.pi * tau / 12.0
    qn = 1.0 + 0j
    for _ in range(terms):
        qn *= q
        total += cmath.log(1.0 - qn)
    return total


def v_oracle(ms: MultiplierSystem, g, tau=complex(0.37, 1.31)) -> complex:
    """v(g) from the 2k-th eta power evaluated directly."""
    gt = complex(mobius_act(g, tau))
    num = cmath.exp(2.0 * ms.k * log_eta(gt))
    return num * real_power(cocycle_j(g, tau), -ms.k) / cmath.exp(2.0 * ms.k * log_eta(tau))


class TestConstruction:
    def test_trivial_requires_even_integer(self):
        MultiplierSystem("trivial_even", 12.0)
        MultiplierSystem("trivial_even", -4.0)
        with pytest.raises(ValueError):
            MultiplierSystem("trivial_even", 3.0)
        with pytest.raises(ValueError):
            MultiplierSystem("trivial_even", 0.5)

    def test_kappa(self):
        assert MultiplierSystem("trivial_even", 12.0).kappa == 0.0
        assert MultiplierSystem("eta_power", 12.0).kappa == 0.0
        assert MultiplierSystem("eta_power", 0.5).kappa == pytest.approx(1.0 / 24.0)
        assert MultiplierSystem("eta_power", 3.5).kappa == pytest.approx(3.5 / 12.0)

    def test_json_round_trip(self):
        ms = MultiplierSystem("eta_power", 2.5)
        assert MultiplierSystem.from_json(ms.to_json()) == ms


class TestValues:
    def test_trivial_is_one(self, rng):
        ms = MultiplierSystem("trivial_even", 12.0)
        for _ in range(20):
            assert evaluate_v(ms, random_element(rng)) == 1.0

    def test_nontriviality_value(self):
        for k in (0.5, 1.0, 12.0, 3.5):
            ms = MultiplierSystem("eta_power", k)
            assert evaluate_v(ms, -I2) == pytest.approx(real_power(-1.0, -k), abs=1e-13)

    def test_v_at_t(self):
        ms = MultiplierSystem("eta_power", 0.5)
        assert evaluate_v(ms, T) == pytest.approx(cmath.exp(2j * math.pi / 24.0))
        ms12 = MultiplierSystem("eta_power", 12.0)
        assert evaluate_v(ms12, T) == pytest.approx(1.0)

    def test_unit_modulus(self, rng):
        for k in (0.5, 1.7, 12.0):
            ms = MultiplierSystem("eta_power", k)
            for _ in range(30):
                assert abs(abs(evaluate_v(ms, random_element(rng))) - 1.0) <= 1e-14

    def test_matches_eta_product_oracle(self, rng):
        ms = MultiplierSystem("eta_power", 0.5)
        for g in (T, S, S * T, t_power(-3) * S, S * t_power(2) * S):
            assert evaluate_v(ms, g) == pytest.approx(v_oracle(ms, g), abs=1e-9)
        for _ in range(10):
            g = random_element(rng, max_len=5)
            assert evaluate_v(ms, g) == pytest.approx(v_oracle(ms, g), abs=1e-8)

    def test_oracle_base_point_independent(self):
        ms = MultiplierSystem("eta_power", 1.5)
        g = S * t_power(3)
        assert v_oracle(ms, g, complex(0.1, 0.9)) == pytest.approx(
            v_oracle(ms, g, complex(-0.8, 2.2)), abs=1e-10)

    def test_eta_k12_equals_trivial(self, rng):
        eta = MultiplierSystem("eta_power", 12.0)
        for _ in range(100):
            g = random_element(rng)
            assert evaluate_v(eta, g) == pytest.approx(1.0, abs=1e-12)


class TestConsistency:
    def test_trivial(self):
        assert check_consistency(MultiplierSystem("trivial_even", 12.0), 50) <= 1e-12

    def test_eta_half(self):
        assert check_consistency(MultiplierSystem("eta_power", 0.5), 100) <= 1e-10

    def test_eta_generic_weight(self):
        assert check_consistency(MultiplierSystem("eta_power", 3.7), 100) <= 1e-10
