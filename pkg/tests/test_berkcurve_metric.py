import json
import random
from pathlib import Path
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berkstab.acceptance import worked_examples
from berkstab.berkcurve import (
    TRIVIAL,
    ClosedPoint,
    PLPotential,
    Polarization,
    Profile,
    Valuation,
    d1,
    dist_to_constants,
    energy,
    envelope,
    fs_profile,
    stability_report,
)
from berkstab.berkcurve.io import InputError, load_potential, parse_fsdata, parse_measure, potential_to_dot, read_json, report_to_csv, report_to_json
from berkstab.berkcurve.measure import InfeasibleMeasureError
from berkstab.berkcurve.sampling import random_potential
from berkstab.berkcurve.stability import ALL_CONSTANT, NOT_SEMISTABLE, UNIFORM_FAILS, ReportRow, _verdicts

from oracles import scan_min

P1 = Polarization(1, 0)
EX = worked_examples()
HALF = F(1, 2)
SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def fs(name):
    return fs_profile(EX[name], P1)


def probe_valuations(*phis):
    out = [TRIVIAL]
    points = {p for phi in phis for p in phi.points} | {ClosedPoint("label:unused")}
    for p in sorted(points):
        xs = sorted({b for phi in phis for b in phi.profile(p).breaks})
        far = (xs[-1] if xs else F(1)) * 2 + 1
        grid = [F(1, 7)] + xs + [(a + b) / 2 for a, b in zip(xs, xs[1:])] + [far]
        out.extend(Valuation(p, c) for c in grid)
    return out


def test_envelope_examples():
    prod = fs("PROD")
    assert envelope(prod, prod, P1) == prod
    assert envelope(prod, PLPotential(0), P1) == PLPotential(0)
    assert envelope(PLPotential(0), PLPotential(-1), P1) == PLPotential(-1)


def test_envelope_binding_root_constraint():
    # two steep branches force the root below min(phi, psi)(triv)
    phi = PLPotential(0, {"0": Profile((1,), (-1, 0))})
    psi = PLPotential(0, {"inf": Profile((1,), (-1, 0))})
    env = envelope(phi, psi, P1)
    assert env.is_psh(P1)
    assert env.initial_slope_sum() == -1
    assert env.root < 0


def _shift_below(chi, floor_phis):
    """``chi - s`` with the least ``s >= 0`` keeping it below ``min(floor_phis)`` at every probe."""
    probes = probe_valuations(chi, *floor_phis)
    s = max(max(chi(v) - min(f(v) for f in floor_phis) for v in probes), F(0))
    return chi.plus(-s)


def test_envelope_is_below_psh_and_maximal():
    rng = random.Random(0)
    for V in (1, 2):
        pol = Polarization(V)
        for _ in range(30):
            phi, psi = random_potential(rng, pol), random_potential(rng, pol)
            env = envelope(phi, psi, pol)
            assert env.is_psh(pol)
            probes = probe_valuations(phi, psi, env)
            assert all(env(v) <= min(phi(v), psi(v)) for v in probes)
            for _ in range(5):
                chi = _shift_below(random_potential(rng, pol), [phi, psi])
                probes = probe_valuations(phi, psi, env, chi)
                assert all(chi(v) <= env(v) for v in probes)


def test_d1_examples():
    prod = fs("PROD")
    assert d1(prod, prod, P1) == 0
    for c in (F(3), F(-5, 2)):
        assert d1(PLPotential(0), PLPotential(c), P1) == abs(c)
    assert d1(prod, PLPotential(0), P1) == HALF


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_d1_metric_axioms(seed, V):
    rng = random.Random(seed)
    pol = Polarization(V)
    a, b, c = (random_potential(rng, pol) for _ in range(3))
    ab, bc, ac = d1(a, b, pol), d1(b, c, pol), d1(a, c, pol)
    assert ab >= 0 and ab == d1(b, a, pol)
    assert ac <= ab + bc
    assert d1(a, a, pol) == 0
    shift = F(rng.randint(-5, 5), rng.randint(1, 3))
    assert d1(a.plus(shift), b.plus(shift), pol) == ab


def test_d1_alternative_formula_for_ordered_pairs():
    # phi >= psi gives d1 = E(phi) - E(psi)
    rng = random.Random(1)
    for _ in range(30):
        phi = random_potential(rng, P1)
        psi = envelope(phi, random_potential(rng, P1), P1)
        assert d1(phi, psi, P1) == energy(phi, P1) - energy(psi, P1)


def test_dist_to_constants_examples():
    assert dist_to_constants(PLPotential(F(7, 3)), P1).value == 0
    prod = dist_to_constants(fs("PROD"), P1)
    assert 0 < prod.value <= HALF
    assert prod == (F(1, 4), HALF)
    twopt = dist_to_constants(fs("TWOPT"), P1)
    assert 0 < twopt.value <= F(1, 4)
    assert twopt == (F(1, 8), F(1, 4))


def test_dist_to_constants_against_scan():
    rng = random.Random(2)
    for V in (1, 2):
        pol = Polarization(V)
        for _ in range(15):
            phi = random_potential(rng, pol)
            res = dist_to_constants(phi, pol)
            assert d1(phi, PLPotential(res.argmin), pol) == res.value
            if phi.is_constant:
                assert res.value == 0
                continue
            lo, hi = phi.infimum - 1, phi.root + 1
            scanned = scan_min(lambda c: d1(phi, PLPotential(c), pol), lo, hi, 60)
            assert res.value <= scanned
            # no constant just beside the minimizer does better
            for eps in (F(1, 1000), F(-1, 1000)):
                assert res.value <= d1(phi, PLPotential(res.argmin + eps), pol)


def test_stability_report_examples():
    rep = stability_report([EX["T0"]], P1, ["T0"])
    assert rep.verdict == ALL_CONSTANT and rep.sigma is None
    assert rep.rows[0].verdict == "constant" and rep.rows[0].ratio is None

    rep = stability_report([EX["PROD"]], P1, ["PROD"])
    row = rep.rows[0]
    assert (row.E, row.R, row.H, row.M, row.dist) == (HALF, -2, 1, 0, F(1, 4))
    assert rep.verdict == UNIFORM_FAILS and row.verdict == "product-type"

    rep = stability_report([EX["TWOPT"]], P1, ["TWOPT"])
    row = rep.rows[0]
    assert row.M == HALF and row.ratio == 4 and row.verdict == "positive"


def test_genus_flag_and_negative_verdict():
    # genus >= 1 makes the mean scalar nonpositive, so M >= 0 there too
    pol = Polarization(1, 2)
    phi = PLPotential(0, {"0": Profile((1,), (-1, 0))})
    rep = stability_report([phi], pol, ["raw"])
    assert rep.rows[0].M == 2
    assert rep.model_level and "model-level" in rep.verdict
    bad = ReportRow("bad", phi, F(0), F(0), F(0), F(-1), F(1), False)
    assert bad.verdict == "destabilizing"
    assert NOT_SEMISTABLE in _verdicts([bad], P1)
    with pytest.raises(ValueError):
        stability_report([], P1)


def test_report_serialization():
    rep = stability_report([EX[k] for k in ("PROD", "T0", "TWOPT")], P1, ["PROD", "T0", "TWOPT"])
    csv = report_to_csv(rep).splitlines()
    assert csv[0] == "name,E,R,H,M,d1,ratio,verdict"
    assert csv[1] == "PROD,1/2,-2,1,0,1/4,0,product-type"
    assert csv[2] == "T0,0,0,0,0,0,inf,constant"
    assert csv[3] == "TWOPT,1/4,-1,1,1/2,1/8,4,positive"
    js = report_to_json(rep)
    json.dumps(js)
    assert js["sigma"] == "0"


# io


def test_sample_files_parse():
    for name in ("T0", "PROD", "TWOPT"):
        phi, pol, data = load_potential(SAMPLES / f"{name}.json")
        assert pol == P1 and phi == fs(name)
        assert data is not None


def test_potential_file_round_trip(tmp_path):
    phi = fs("TWOPT")
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({**phi.to_json(), "V": 1}))
    back, pol, data = load_potential(path)
    assert back == phi and data is None


def test_form_sections():
    data = {"m": 1, "V": 1, "sections": [{"form": "x", "lambda": 1}, {"form": "(x-y)", "lambda": 0}]}
    fsd, _ = parse_fsdata(data)
    phi = fs_profile(fsd, P1)
    assert phi.points == [ClosedPoint("0")]


def test_error_diagnostics_carry_line_and_field(tmp_path):
    text = '{\n  "m": 1,\n  "sections": [\n    {"zeros": {"0": 1}, "lambda": "x"},\n    {"zeros": {"inf": 1}, "lambda": 0}\n  ]\n}\n'
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(InputError) as err:
        load_potential(path)
    assert err.value.line == 4 and err.value.fieldname == "sections[0].lambda"
    assert str(err.value).startswith(f"{path}:4: field 'sections[0].lambda'")

    path.write_text('{"m": 1,\n "sections": [}')
    with pytest.raises(InputError) as err:
        read_json(path)
    assert err.value.line == 2

    with pytest.raises(InputError):
        parse_fsdata({"m": 1, "sections": [{"zeros": {"0": 1}, "lambda": 0}, {"zeros": {"0": 1}, "lambda": 0}]})
    with pytest.raises(InputError):
        load_potential(tmp_path / "missing.json")


def test_measure_file(tmp_path):
    mu, pol = parse_measure(json.loads((SAMPLES / "measures" / "two_atoms.json").read_text()))
    assert mu.trivial_mass == 0 and len(mu.atoms) == 2
    partial, _ = parse_measure({"atoms": [{"point": "0", "c": "1", "mass": "1/3"}]})
    assert partial.trivial_mass == F(2, 3)
    with pytest.raises(InfeasibleMeasureError):
        parse_measure({"atoms": [{"point": "0", "c": "1", "mass": "1"}, {"point": "1", "c": "1", "mass": "1/2"}]})
    with pytest.raises(InputError):
        parse_measure({"atoms": [{"point": "0", "mass": "1"}]})


def test_dot_export():
    dot = potential_to_dot(fs("TWOPT"), "TWOPT")
    assert dot.startswith('digraph "TWOPT" {') and dot.rstrip().endswith("}")
    assert "inf" in dot and "1/2" in dot
