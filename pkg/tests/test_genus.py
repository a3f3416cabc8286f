"""Genus engine: logarithm, characteristic series, twisted words, closed forms."""

import random
from fractions import Fraction
from math import comb

import pytest

from genuslab.errors import StructuralError
from genuslab.genus import (
    EXT2_PLUS_TANGENT,
    GENERIC_RING,
    GenusSpec,
    LOOP_WORD,
    PHI0_WORD,
    TANGENT,
    TANGENT_CHERN,
    TRIVIAL,
    char_series,
    cp_generating_check,
    genus_log,
    genus_value,
    hypersurface_index_closed,
    hypersurface_index_closed_form_value,
    leading_vanish_count,
    loop_sign_series,
    phi0_series,
    pole_order,
    raw_ahat_series,
    twisted_index,
)
from genuslab.manifolds import builtin, euler_characteristic

D = GENERIC_RING.gen("delta")
E = GENERIC_RING.gen("epsilon")


# -- logarithm / characteristic series -------------------------------------------


def test_generic_log():
    g = genus_log(GenusSpec.generic(), 5)
    assert g.coefficient((1,)) == GENERIC_RING.one()
    assert g.coefficient((3,)) == D * Fraction(1, 3)
    assert g.coefficient((5,)) == (3 * D * D - E) * Fraction(1, 10)
    assert all(e % 2 == 1 for (e,) in g.coeffs)  # odd series


def test_signature_log_is_artanh():
    g = genus_log(GenusSpec.signature(), 7)
    # (1 - 2u^2 + u^4)^{-1/2} = (1-u^2)^{-1}, so g = u + u^3/3 + u^5/5 + u^7/7
    for j in (1, 3, 5, 7):
        assert g.coefficient((j,)) == Fraction(1, j)


def test_ahat_char_series():
    Q = char_series(GenusSpec.ahat(), 6)
    assert Q.coefficient((0,)) == 1
    assert Q.coefficient((2,)) == Fraction(-1, 24)
    assert Q.coefficient((4,)) == Fraction(7, 5760)
    assert all(e % 2 == 0 for (e,) in Q.coeffs)


def test_signature_char_series_is_x_over_tanh():
    Q = char_series(GenusSpec.signature(), 6)
    assert Q.coefficient((2,)) == Fraction(1, 3)
    assert Q.coefficient((4,)) == Fraction(-1, 45)
    assert Q.coefficient((6,)) == Fraction(2, 945)


# -- genus values ----------------------------------------------------------------


def test_cp2_gives_delta_and_hp2_gives_epsilon():
    assert genus_value(GenusSpec.generic(), builtin("CP2")) == D
    assert genus_value(GenusSpec.generic(), builtin("HP2")) == E


def test_cp4_matches_binomial_oracle():
    # t^4 coefficient of (1-2dt^2+et^4)^{-1/2} is (3d^2-e)/2
    assert genus_value(GenusSpec.generic(), builtin("CP4")) == (3 * D * D - E) * Fraction(1, 2)


def test_generating_function_check():
    assert cp_generating_check(GenusSpec.generic(), 4)
    assert cp_generating_check(GenusSpec.signature(), 3)
    assert cp_generating_check(GenusSpec.ahat(), 3)


def test_genus_vanishes_off_dimension_4k():
    assert genus_value(GenusSpec.ahat(), builtin("CP3")) == 0
    assert genus_value(GenusSpec.generic(), builtin("CP1")) == GENERIC_RING.zero()


def test_ahat_values():
    assert genus_value(GenusSpec.ahat(), builtin("CP2")) == Fraction(-1, 8)
    for n in (1, 2, 3):
        assert genus_value(GenusSpec.ahat(), builtin(f"HP{n}")) == 0
    for m in (1, 2, 3):
        assert genus_value(GenusSpec.ahat(), builtin(f"CP{2 * m + 1}")) == 0


def test_signature_values():
    assert genus_value(GenusSpec.signature(), builtin("CP2")) == 1
    assert genus_value(GenusSpec.signature(), builtin("HP2")) == 1
    assert genus_value(GenusSpec.signature(), builtin("HP3")) == 0
    # sign(V4) via L-genus: independent hand computation from p1 = -10h^2, p2 = 175h^4
    assert genus_value(GenusSpec.signature(), builtin("V(4,4)")) == 100


def test_multiplicativity_on_catalog_pairs():
    pairs = [("CP2", "CP2"), ("CP2", "HP2"), ("HP2", "V(4,4)"), ("CP4", "CP2")]
    for a, b in pairs:
        va = genus_value(GenusSpec.generic(), builtin(a))
        vb = genus_value(GenusSpec.generic(), builtin(b))
        vprod = genus_value(GenusSpec.generic(), builtin(f"product({a},{b})"))
        assert vprod == va * vb


def test_weight_grading():
    for name in ("CP2", "CP4", "HP2", "HP3", "V(4,4)", "product(CP2,HP2)"):
        m = builtin(name)
        k = m.dim_real // 4
        value = genus_value(GenusSpec.generic(), m)
        for (a, b), _ in value.coeffs.items():
            assert 2 * a + 4 * b == 2 * k


def test_specialization_commutes():
    for name in ("CP2", "CP4", "HP2", "V(4,4)"):
        m = builtin(name)
        generic = genus_value(GenusSpec.generic(), m)
        assert generic.evaluate({"delta": Fraction(1), "epsilon": Fraction(1)}) == genus_value(
            GenusSpec.signature(), m
        )
        assert generic.evaluate(
            {"delta": Fraction(-1, 8), "epsilon": Fraction(0)}
        ) == genus_value(GenusSpec.ahat(), m)


# -- twisted indices ---------------------------------------------------------------


def test_untwisted_indices_match_genus_values():
    assert twisted_index("signature", builtin("CP2"), TRIVIAL) == 1
    assert twisted_index("ahat", builtin("CP2"), TRIVIAL) == Fraction(-1, 8)
    assert twisted_index("signature", builtin("HP2"), TRIVIAL) == 1
    assert twisted_index("ahat", builtin("V(4,4)"), TRIVIAL) == 0


def test_loop_series_q0_is_signature():
    for name in ("CP2", "CP4", "HP2", "HP3", "V(4,4)", "product(CP2,CP2)"):
        m = builtin(name)
        s = loop_sign_series(m, 3)
        assert s.series.q_coefficient(0) == genus_value(GenusSpec.signature(), m)


def test_phi0_lowest_coefficient_is_ahat():
    for name in ("CP2", "CP4", "HP2", "V(4,4)"):
        m = builtin(name)
        k = m.dim_real // 4
        p = phi0_series(m, 3)
        assert p.series.coefficient(-k) == genus_value(GenusSpec.ahat(), m)


def test_phi0_first_two_coefficients_for_all_catalog():
    # q^{k/2} Phi_0 = A-hat(M) - A-hat(M, TM_C) q + ...
    for name in ("CP2", "CP4", "HP2", "HP3", "V(4,4)", "product(CP2,CP2)"):
        m = builtin(name)
        raw = raw_ahat_series(m, 3).series
        assert raw.coefficient(0) == genus_value(GenusSpec.ahat(), m)
        assert raw.coefficient(2) == -twisted_index("ahat", m, TANGENT)


def test_hp2_tangent_twist_nonzero():
    value = twisted_index("ahat", builtin("HP2"), TANGENT)
    assert value != 0
    raw = raw_ahat_series(builtin("HP2"), 3).series
    assert raw.coefficient(2) == -value


def test_ext2_word_matches_q2_coefficient():
    for name in ("CP2", "HP2", "V(4,4)"):
        m = builtin(name)
        raw = raw_ahat_series(m, 3).series
        assert raw.coefficient(4) == twisted_index("ahat", m, EXT2_PLUS_TANGENT)


def test_loop_series_multiplicative_on_product():
    a = loop_sign_series(builtin("CP2"), 4).series
    prod = loop_sign_series(builtin("product(CP2,CP2)"), 4).series
    assert prod.same_to(a * a)


def test_delta_correction_equivalence_on_cp1():
    # CP1 as virtual roots {(h,2), delta 1} and as the reduced root {(2h,1), delta 0}
    from genuslab.manifolds import load_model

    reduced = load_model(
        {
            "name": "CP1-reduced",
            "dim_real": 2,
            "spin": True,
            "generators": [{"symbol": "h", "degree": 2, "cap": 1}],
            "pairing": "1",
            "tangent": {
                "style": "chern",
                "delta": 0,
                "entries": [{"form": {"h": "2"}, "mult": 1}],
            },
        }
    )
    virtual = builtin("CP1")
    for word in (LOOP_WORD,):
        a = twisted_index("signature", reduced, word, 4).series
        b = twisted_index("signature", virtual, word, 4).series
        assert a.same_to(b)
    pa = twisted_index("ahat", reduced, PHI0_WORD, 4).series
    pb = twisted_index("ahat", virtual, PHI0_WORD, 4).series
    assert pa.same_to(pb)
    assert twisted_index("ahat", reduced, TANGENT) == twisted_index("ahat", virtual, TANGENT)


def test_quadric_model_agrees_with_cp1_x_cp1():
    # V(2,2) and CP1 x CP1 are the same manifold through different models
    a = loop_sign_series(builtin("V(2,2)"), 4).series
    b = loop_sign_series(builtin("product(CP1,CP1)"), 4).series
    assert a.same_to(b)


def test_word_exponent_parity():
    for name in ("CP2", "HP2", "V(4,4)"):
        m = builtin(name)
        loop = loop_sign_series(m, 4).series
        assert all(e % 2 == 0 for e in loop.support())
        k = m.dim_real // 4
        phi0 = phi0_series(m, 4).series
        assert all((e + k) % 2 == 0 for e in phi0.support())


def test_integrality_on_spin_catalog_models():
    for name in ("HP2", "HP3", "V(4,4)", "CP3"):
        m = builtin(name)
        if m.dim_real % 4:
            continue
        raw = raw_ahat_series(m, 4).series
        for e in raw.support():
            assert raw.coefficient(e).denominator == 1


def test_unsupported_descriptor_combinations():
    with pytest.raises(StructuralError):
        twisted_index("signature", builtin("CP2"), PHI0_WORD)
    with pytest.raises(StructuralError):
        twisted_index("ahat", builtin("CP2"), LOOP_WORD)
    with pytest.raises(StructuralError):
        twisted_index("ahat", builtin("HP2"), TANGENT_CHERN)


# -- hypersurface closed form -------------------------------------------------------


def test_hypersurface_closed_form_values():
    assert hypersurface_index_closed(4) == -50
    assert hypersurface_index_closed(6) == -784
    assert hypersurface_index_closed(8) == -11430
    for n in (4, 6, 8):
        assert hypersurface_index_closed_form_value(n) == n + 2 - comb(2 * n, n + 1)


def test_hypersurface_degree_two_probe():
    assert hypersurface_index_closed(2) == 0  # 4 - C(4,3)


# -- pole orders -----------------------------------------------------------------------


def test_pole_order_v4():
    m = builtin("V(4,4)")
    p = phi0_series(m, 4)
    # dim 8: A-hat vanishes, the tangent twist does not: pole order dim/8 - 1 = 0
    assert genus_value(GenusSpec.ahat(), m) == 0
    assert twisted_index("ahat", m, TANGENT) != 0
    assert pole_order(p) == 0


def test_pole_order_hp2_and_vanish_counts():
    p = phi0_series(builtin("HP2"), 4)
    assert p.series.coefficient(-2) == 0      # A-hat(HP2) = 0
    assert p.series.coefficient(0) != 0       # tangent twist survives
    assert leading_vanish_count(builtin("HP2"), 0)
    assert not leading_vanish_count(builtin("HP2"), 1)


def test_pole_order_zero_series_is_indeterminate():
    zero = phi0_series(builtin("CP3"), 3)  # dim not divisible by 4
    assert pole_order(zero) is None
