"""Center certification: cofactors, Darboux integrating factors,
reversibility, and the eight shipped center conditions of the cubic
Kolmogorov family."""

import pytest
from gmpy2 import mpq

from lyap.centers import (CENTER_CERTIFICATES, CENTER_CONDITIONS,
                          DarbouxCandidate, NotInvariantError, cofactor_of,
                          darboux_check, monodromic_lv_family, poly_divmod,
                          specialize_center, translated_cubic_family,
                          verify_center)
from lyap.parsing import ParseError, parse_poly, parse_ratfunc
from lyap.system import parse_system


def test_axis_cofactor():
    s = parse_system("vars x y\ndx = x*(1 - x - y)\ndy = y*(-1 + x)\n")
    k = cofactor_of(s, parse_poly("x", s.variables))
    assert (k - parse_ratfunc("1 - x - y", s.variables)).reduced().is_zero()


def test_non_invariant_curve_raises():
    s = parse_system("vars x y\ndx = -y\ndy = x\n")
    with pytest.raises(NotInvariantError) as exc:
        cofactor_of(s, parse_poly("x + y + 7", s.variables))
    assert not exc.value.remainder.is_zero()


def test_constant_factor_rejected():
    s = parse_system("vars x y\ndx = -y\ndy = x\n")
    with pytest.raises(ValueError):
        cofactor_of(s, parse_poly("3", s.variables))


def test_darboux_xy_integrating_factor():
    # V = 1/(x*y) for the scaled Lotka-Volterra field
    s = parse_system("vars x y\ndx = x*(y - 1)\ndy = y*(x - 1)\n")
    cand = DarbouxCandidate([
        (parse_poly("x", s.variables), parse_ratfunc("-1", s.variables)),
        (parse_poly("y", s.variables), parse_ratfunc("-1", s.variables))])
    assert darboux_check(s, cand)


def test_darboux_rejects_nonzero_divergence():
    s = parse_system("vars x y\ndx = x*(y - 1)\ndy = y*(x - 1)\n")
    # V = x^0 * y^0 = 1: the divergence x + y - 2 is not cancelled
    cand = DarbouxCandidate([
        (parse_poly("x", s.variables), parse_ratfunc("0", s.variables)),
        (parse_poly("y", s.variables), parse_ratfunc("0", s.variables))])
    assert not darboux_check(s, cand)


def test_candidate_parse_roundtrip():
    text = "factor = x ; exponent = -1\nfactor = y ; exponent = -1\n"
    cand = DarbouxCandidate.parse(text, ("x", "y"))
    assert len(cand.factors) == 2
    again = DarbouxCandidate.parse(str(cand), ("x", "y"))
    assert str(again) == str(cand)
    with pytest.raises(ParseError):
        DarbouxCandidate.parse("", ("x", "y"))


def test_poly_divmod_property():
    n = parse_poly("x^3*y - 2*x*y + y^2 + 5", ("x", "y"))
    f = parse_poly("x*y - 1", ("x", "y"))
    q, r = poly_divmod(n, f)
    assert q.mul(f) + r == n.with_variables(q.variables)


@pytest.mark.parametrize("name", sorted(CENTER_CONDITIONS))
def test_center_certificates(name):
    assert verify_center(name)


def test_specialize_center_identity():
    fam = translated_cubic_family()
    from lyap.centers import CenterCondition
    s = specialize_center(fam, CenterCondition("id", {}))
    assert s.P == fam.P and s.Q == fam.Q


def test_specialize_c1(cubic_family):
    s = specialize_center(cubic_family, CENTER_CONDITIONS["C1"])
    used = set(s.P.used_variables()) | set(s.Q.used_variables())
    assert "a2" not in used and "b2" not in used


def test_certificate_kinds_cover_reversible_and_darboux():
    kinds = {k: v[0] for k, v in CENTER_CERTIFICATES.items()}
    assert kinds["C6"] == "reversible" and kinds["C7"] == "reversible"
    assert all(v == "darboux" for k, v in kinds.items()
               if k not in ("C6", "C7"))


def test_monodromic_lv_family_shape():
    fam = monodromic_lv_family()
    assert fam.params == ("a", "c", "w")
    # linear part is the standard rotation
    from lyap.poly import as_ratfunc
    z = as_ratfunc(parse_poly("0", fam.variables))
    jac = fam.jacobian()
    at = [[fam.at_point(e, (z, z)) for e in row] for row in jac]
    assert at[0][0].is_zero() and at[1][1].is_zero()
    assert (at[0][1] + at[1][0].scale(1)).reduced().is_zero() or \
        (at[0][1].constant_value() == -1 and at[1][0].constant_value() == 1)
