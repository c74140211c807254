import pytest

from impulse_cone import conditions
from impulse_cone.errors import GammaBoundError

from conftest import example_spec, make_spec


@pytest.fixture(scope="module")
def spec():
    return example_spec()  # f = u^2, I = x/2


def test_analysis_thresholds(spec):
    an = spec.analysis()
    pc = an.constants
    assert pc.m == pytest.approx(8.0, abs=1e-9)
    assert pc.M == pytest.approx(16.0, abs=1e-9)
    assert pc.Gamma == pytest.approx(0.9, abs=1e-12)
    assert pc.int_K_g == pytest.approx(0.15, abs=1e-12)
    assert pc.c == 0.25
    assert pc.i1_coefficient() == pytest.approx(13 / 8, abs=1e-10)
    th = an.thresholds()
    assert th["f_sup_max"] == pytest.approx(8 / 13, rel=1e-9)
    assert th["f_inf_min"] == pytest.approx(64 / 5, rel=1e-9)


def test_index1_at_half(spec):
    chk = conditions.check_I1(spec, 0.5)
    # f = u^2 gives fsup(1/2) = 1/2, so lhs = (1/2)(13/8)
    assert chk.lhs == pytest.approx(13 / 16, rel=1e-9)
    assert chk.holds and not chk.marginal
    assert chk.f_bound_source == "sampled"


def test_index1_asserted_threshold(spec):
    chk = conditions.check_I1(spec, 1.0, f_bound=8 / 13)
    assert chk.lhs == pytest.approx(1.0, abs=1e-12)
    assert chk.holds and chk.marginal
    assert chk.f_bound_source == "asserted"


def test_index0_at_thirteen(spec):
    chk = conditions.check_I0(spec, 13.0)
    # finf(13) = 13, so lhs = (1/4)(4/5) + 13/16
    assert chk.lhs == pytest.approx(1.0125, rel=1e-9)
    assert chk.holds


def test_index0_asserted_threshold(spec):
    chk = conditions.check_I0(spec, 1.0, f_bound=64 / 5)
    assert chk.lhs == pytest.approx(1.0, abs=1e-12)
    assert chk.holds and chk.marginal


def test_zero_nonlinearity():
    spec0 = make_spec(f="0", impulses=((0.2, "0", 0.0, 0.0),), atoms=())
    assert conditions.check_I1(spec0, 1.0).lhs == 0.0
    assert conditions.check_I1(spec0, 1.0).holds
    chk0 = conditions.check_I0(spec0, 1.0)
    assert chk0.lhs == 0.0 and not chk0.holds


def test_gamma_refusal():
    heavy = make_spec(atoms=((0.5, 2.4),))
    with pytest.raises(GammaBoundError):
        conditions.check_I1(heavy, 1.0)
    report = conditions.find_H(heavy, [0.5, 13.0])
    assert not report.certified
    assert any("Gamma" in n for n in report.notes)


def test_monotone_in_bounds(spec):
    base1 = conditions.check_I1(spec, 1.0, f_bound=0.3).lhs
    more1 = conditions.check_I1(spec, 1.0, f_bound=0.4).lhs
    assert more1 > base1
    base0 = conditions.check_I0(spec, 1.0, f_bound=5.0).lhs
    more0 = conditions.check_I0(spec, 1.0, f_bound=6.0).lhs
    assert more0 > base0


def test_homogeneous_f_gives_rho_free_index1():
    lin = make_spec(f="u", impulses=((0.2, "x/2", 0.5, 0.5),))
    vals = [conditions.check_I1(lin, r).lhs for r in (0.1, 1.0, 10.0)]
    assert max(vals) - min(vals) < 1e-8


def test_check_pair_certifies_H1(spec):
    report = conditions.check_pair(spec, 0.5, 13.0)
    assert report.certified
    assert report.verdict.kind == "H1"
    assert report.verdict.rho1 == 0.5 and report.verdict.rho2 == 13.0


def test_check_pair_rejects_large_rho1(spec):
    # fsup(1) = 1 > 8/13, and the H2 direction fails too
    report = conditions.check_pair(spec, 1.0, 13.0)
    assert not report.certified


def test_find_H_on_explicit_grid(spec):
    report = conditions.find_H(spec, [0.5, 13.0])
    assert report.certified
    assert report.verdict.kind == "H1"
    assert (report.verdict.rho1, report.verdict.rho2) == (0.5, 13.0)


def test_find_H_default_grid(spec):
    report = conditions.find_H(spec)
    assert report.certified
    assert report.verdict.kind == "H1"
    assert report.verdict.rho1 < report.verdict.rho2


def test_find_H_none_when_index0_unreachable():
    # constant f: index-1 holds for large rho but f/rho -> 0 kills index-0
    flat = make_spec(f="1/100")
    report = conditions.find_H(flat, [0.5, 1.0, 13.0])
    assert not report.certified
    assert report.verdict is None


def test_report_roundtrip_dict(spec):
    report = conditions.check_pair(spec, 0.5, 13.0)
    d = report.to_dict()
    assert d["verdict"]["kind"] == "H1"
    assert d["constants"]["m"] == pytest.approx(8.0, abs=1e-9)
    assert isinstance(d["index1"], list) and d["index1"][0]["holds"]


def test_H2_direction():
    # sublinear f with no boundary terms: small rho passes index-0,
    # large rho passes index-1 once f/rho has decayed
    spec = make_spec(f="20*sqrt(u)", impulses=((0.2, "0", 0.0, 0.0),), atoms=())
    report = conditions.find_H(spec, [0.05, 1.0, 4000.0])
    assert report.certified
    assert report.verdict.kind == "H2"
    assert report.verdict.rho1 < spec.cone.c * report.verdict.rho2