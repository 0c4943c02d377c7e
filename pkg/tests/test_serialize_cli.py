import json
import random
from fractions import Fraction as F

import numpy as np
import pytest

from rstab import (
    JobSpec,
    PlantSS,
    RatFun,
    Realization,
    SignalSpace,
    StabilityMatrix,
    TFMatrix,
    coprime_factorize,
    dare_lqr,
    run,
    simulate,
    slp_sf_from_controller,
    slp_sf_to_iop,
    synthesize_sf_h2,
)
from rstab import serialize
from rstab.errors import SchemaError
from rstab.sls import RealizationVariant

from helpers import rand_ratfun, rand_fir_tfmatrix

SP = SignalSpace.make(x=1, u=1)


def write(tmp_path, name, doc):
    path = tmp_path / name
    serialize.dump_document(doc, path)
    return str(path)


@pytest.fixture()
def scalar_plant_doc(tmp_path):
    plant = PlantSS.state_feedback([[F(1, 2)]], [[1]])
    return plant, write(tmp_path, "plant.json", serialize.plant_to_doc(plant))


class TestDocuments:
    def test_ratfun_roundtrip(self):
        rng = random.Random(0)
        for _ in range(20):
            r = rand_ratfun(rng, 3)
            assert serialize.ratfun_from_doc(serialize.ratfun_to_doc(r)) == r

    def test_scalar_formats(self):
        assert serialize.parse_scalar("1/2") == F(1, 2)
        assert serialize.parse_scalar("0.25") == F(1, 4)
        assert serialize.parse_scalar("1e-3") == F(1, 1000)
        assert serialize.parse_scalar(3) == 3
        with pytest.raises(SchemaError):
            serialize.parse_scalar("not-a-number")

    def test_tfmatrix_roundtrip(self):
        rng = random.Random(1)
        m = TFMatrix(SP, SP, [[rand_ratfun(rng, 2) for _ in range(2)] for _ in range(2)])
        assert serialize.tfmatrix_from_doc(serialize.tfmatrix_to_doc(m)) == m

    def test_plant_roundtrip(self):
        plant = PlantSS([[F(1, 2), 1], [0, F(-1, 3)]], [[1], [2]], [[1, 0]], [["0.5"]])
        again = serialize.plant_from_doc(serialize.plant_to_doc(plant))
        assert np.array_equal(again.A, plant.A)
        assert np.array_equal(again.D, plant.D)

    def test_realization_roundtrip_with_stability(self):
        r = Realization(SP, TFMatrix.zeros(SP, SP), frozenset({("u", "u")}))
        s = StabilityMatrix(SP, TFMatrix.identity(SP))
        doc = serialize.realization_to_doc(r, s)
        r2, s2 = serialize.realization_from_doc(doc)
        assert r2.R == r.R and r2.structural_zeros == r.structural_zeros
        assert s2.S == s.S

    def test_bundle_roundtrip_with_validation(self):
        plant = PlantSS.state_feedback([[F(1, 2)]], [[1]])
        k = TFMatrix(plant.u_space, plant.x_space, [[RatFun(F(-1, 2))]])
        bundle = slp_sf_from_controller(plant, k)
        doc = serialize.bundle_to_doc("slp_sf", bundle)
        kind, again = serialize.bundle_from_doc(doc, plant)
        assert kind == "slp_sf" and again == bundle

    def test_bundle_validation_failure_on_load(self):
        plant = PlantSS.state_feedback([[F(1, 2)]], [[1]])
        k = TFMatrix(plant.u_space, plant.x_space, [[RatFun(F(-1, 2))]])
        bundle = slp_sf_from_controller(plant, k)
        doc = serialize.bundle_to_doc("slp_sf", bundle)
        other = PlantSS.state_feedback([[F(1, 4)]], [[1]])  # wrong plant
        from rstab.errors import InvariantViolation

        with pytest.raises(InvariantViolation):
            serialize.bundle_from_doc(doc, other)

    def test_iop_bundle_picks_state_transfer_by_block_names(self):
        plant = PlantSS.state_feedback([[F(1, 2)]], [[1]])
        k = TFMatrix(plant.u_space, plant.x_space, [[RatFun(F(-1, 2))]])
        p = slp_sf_to_iop(slp_sf_from_controller(plant, k), plant)
        doc = serialize.bundle_to_doc("iop", p)
        kind, again = serialize.bundle_from_doc(doc, plant)
        assert kind == "iop" and again == p

    def test_coprime_roundtrip(self):
        plant = PlantSS([[2]], [[1]], [[1]], [[0]])
        f = coprime_factorize(plant, [[-2]], [[-2]])
        again = serialize.coprime_from_doc(serialize.coprime_to_doc(f))
        assert again == f

    def test_fir_bundle_roundtrip(self):
        plant = PlantSS.state_feedback([[F(1, 2)]], [[1]])
        bundle = synthesize_sf_h2(plant, [[1]], [[1]], 6)
        doc = serialize.fir_bundle_to_doc(6, {"phi_x": bundle.phi_x, "phi_u": bundle.phi_u})
        parts = serialize.fir_bundle_from_doc(doc)
        assert parts["horizon"] == 6
        assert parts["phi_x"].horizon == 6
        # taps survive exactly when they are representable, and the document
        # itself is exact (strings), so a re-dump is identical
        doc2 = serialize.fir_bundle_to_doc(6, {"phi_x": bundle.phi_x, "phi_u": bundle.phi_u})
        assert doc == doc2

    def test_schema_version_enforced(self):
        doc = serialize.plant_to_doc(PlantSS.state_feedback([[0]], [[1]]))
        doc["schema_version"] = 99
        with pytest.raises(SchemaError):
            serialize.plant_from_doc(doc)

    def test_kind_enforced(self):
        doc = serialize.plant_to_doc(PlantSS.state_feedback([[0]], [[1]]))
        doc["kind"] = "realization"
        with pytest.raises(SchemaError):
            serialize.plant_from_doc(doc)


class TestCLI:
    def test_verify_pass_fixture(self, tmp_path):
        r = Realization(SP, TFMatrix.zeros(SP, SP))
        s = StabilityMatrix(SP, TFMatrix.identity(SP))
        path = write(tmp_path, "r.json", serialize.realization_to_doc(r, s))
        code, report = run(JobSpec("verify", {"realization": path}))
        assert code == 0 and report["passed"] and report["details"]["lemma_holds"]

    def test_verify_check_failure_exit_one(self, tmp_path):
        g = RatFun(1, [-2, 1])
        r = Realization(SP, TFMatrix.from_blocks(SP, SP, {("x", "u"): [[g]]}))
        path = write(tmp_path, "r.json", serialize.realization_to_doc(r))
        code, report = run(JobSpec("verify", {"realization": path}))
        assert code == 1 and not report["passed"]
        assert any(f["kind"] == "unstable" for f in report["findings"])

    def test_verify_singular_exit_three(self, tmp_path):
        r = Realization(SP, TFMatrix.identity(SP))
        path = write(tmp_path, "r.json", serialize.realization_to_doc(r))
        code, report = run(JobSpec("verify", {"realization": path}))
        assert code == 3

    def test_parse_error_exit_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, report = run(JobSpec("verify", {"realization": str(path)}))
        assert code == 2

    def test_exit_codes_partition(self, tmp_path):
        # same command, four disjoint outcomes
        seen = set()
        fixtures = []
        r_ok = Realization(SP, TFMatrix.zeros(SP, SP))
        fixtures.append(write(tmp_path, "ok.json", serialize.realization_to_doc(r_ok)))
        g = RatFun(1, [-2, 1])
        r_bad = Realization(SP, TFMatrix.from_blocks(SP, SP, {("x", "u"): [[g]]}))
        fixtures.append(write(tmp_path, "bad.json", serialize.realization_to_doc(r_bad)))
        broken = tmp_path / "nojson.json"
        broken.write_text("]")
        fixtures.append(str(broken))
        r_sing = Realization(SP, TFMatrix.identity(SP))
        fixtures.append(write(tmp_path, "sing.json", serialize.realization_to_doc(r_sing)))
        for path in fixtures:
            code, _ = run(JobSpec("verify", {"realization": path}))
            assert code not in seen
            seen.add(code)
        assert seen == {0, 1, 2, 3}

    def test_synthesize_matches_api(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        out = tmp_path / "fir.json"
        code, report = run(JobSpec(
            "synthesize", {"plant": plant_path},
            {"horizon": 8, "out": str(out)},
        ))
        assert code == 0
        bundle = synthesize_sf_h2(plant, np.eye(1), np.eye(1), 8)
        expected = serialize.fir_bundle_to_doc(8, {"phi_x": bundle.phi_x, "phi_u": bundle.phi_u})
        assert json.loads(out.read_text()) == expected

    def test_certify_and_simulate_match_api(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        fir = tmp_path / "fir.json"
        run(JobSpec("synthesize", {"plant": plant_path}, {"horizon": 6, "out": str(fir)}))
        code, report = run(JobSpec(
            "certify", {"plant": plant_path, "fir": str(fir)},
            {"variant": "original_sls"},
        ))
        assert code == 0 and report["passed"]
        trace_path = tmp_path / "trace.json"
        code, _ = run(JobSpec(
            "simulate", {"plant": plant_path, "fir": str(fir)},
            {"variant": "deployment", "horizon": 12, "out": str(trace_path)},
        ))
        assert code == 0
        parts = serialize.fir_bundle_from_doc(serialize.load_document(fir))
        v = RealizationVariant.deployment(parts["phi_x"], parts["phi_u"])
        impulse = np.zeros((1, 1))
        impulse[0, 0] = 1.0
        trace = simulate(v, plant, {"x": impulse}, 12)
        assert json.loads(trace_path.read_text()) == serialize.trace_to_doc(trace)

    def test_certify_failure_exit_one(self, tmp_path):
        plant = PlantSS.state_feedback([[2]], [[1]])
        plant_path = write(tmp_path, "p2.json", serialize.plant_to_doc(plant))
        doc = {
            "schema_version": 1, "kind": "fir_bundle", "horizon": 1,
            "phi_x": [[["1"]]], "phi_u": [[["-2"]]],
        }
        fir_path = write(tmp_path, "fir2.json", doc)
        code, report = run(JobSpec(
            "certify", {"plant": plant_path, "fir": fir_path},
            {"variant": "deployment"},
        ))
        assert code == 1 and not report["passed"]
        assert report["details"]["schur_stable"] is False
        assert {"matrix": "S", "row": "x", "col": "u", "kind": "unstable"} in report["findings"]

    def test_factorize_matches_api(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        out = tmp_path / "factors.json"
        code, _ = run(JobSpec("factorize", {"plant": plant_path}, {"out": str(out)}))
        assert code == 0
        f_gain = dare_lqr(plant, np.eye(1), np.eye(1))
        dual = PlantSS.state_feedback(plant.A.T, plant.C.T)
        l_gain = dare_lqr(dual, np.eye(1), np.eye(1)).T
        expected = coprime_factorize(plant, f_gain, l_gain)
        assert json.loads(out.read_text()) == serialize.coprime_to_doc(expected)

    def test_convert_slp_sf_to_iop_matches_direct_map(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        k = TFMatrix(plant.u_space, plant.x_space, [[RatFun(F(-1, 2))]])
        bundle = slp_sf_from_controller(plant, k)
        bundle_path = write(tmp_path, "slp.json", serialize.bundle_to_doc("slp_sf", bundle))
        out = tmp_path / "iop.json"
        code, _ = run(JobSpec(
            "convert", {"plant": plant_path, "bundle": bundle_path},
            {"target": "iop", "out": str(out)},
        ))
        assert code == 0
        expected = serialize.bundle_to_doc("iop", slp_sf_to_iop(bundle, plant))
        assert json.loads(out.read_text()) == expected

    def test_convert_roundtrip_through_files(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        k = TFMatrix(plant.u_space, plant.x_space, [[RatFun(F(-1, 2))]])
        bundle = slp_sf_from_controller(plant, k)
        slp_path = write(tmp_path, "slp.json", serialize.bundle_to_doc("slp_sf", bundle))
        iop_path = tmp_path / "iop.json"
        back_path = tmp_path / "slp2.json"
        assert run(JobSpec("convert", {"plant": plant_path, "bundle": slp_path},
                           {"target": "iop", "out": str(iop_path)}))[0] == 0
        assert run(JobSpec("convert", {"plant": plant_path, "bundle": str(iop_path)},
                           {"target": "slp_sf", "out": str(back_path)}))[0] == 0
        assert json.loads(back_path.read_text()) == serialize.bundle_to_doc("slp_sf", bundle)

    def test_convert_between_output_parameterizations(self, tmp_path):
        plant = PlantSS([[F(1, 2)]], [[1]], [[1]], [[1]])
        plant_path = write(tmp_path, "pd.json", serialize.plant_to_doc(plant))
        from rstab import mixed2_from_controller, slp_of_from_controller

        k = TFMatrix(plant.u_space, plant.y_space, [[RatFun(F(-1, 4))]])
        p = slp_of_from_controller(plant, k)
        src = write(tmp_path, "of.json", serialize.bundle_to_doc("slp_of", p))
        out = tmp_path / "m2.json"
        code, _ = run(JobSpec("convert", {"plant": plant_path, "bundle": src},
                              {"target": "mixed2", "out": str(out)}))
        assert code == 0
        expected = serialize.bundle_to_doc("mixed2", mixed2_from_controller(plant, k))
        assert json.loads(out.read_text()) == expected

    def test_convert_youla_needs_factors(self, tmp_path, scalar_plant_doc):
        plant, plant_path = scalar_plant_doc
        rng = random.Random(5)
        q = rand_fir_tfmatrix(rng, SignalSpace.single("u", 1), SignalSpace.single("y", 1), deg=1)
        src = write(tmp_path, "q.json", serialize.bundle_to_doc("youla", __import__("rstab").YoulaParam.checked(q)))
        out = tmp_path / "iop.json"
        code, report = run(JobSpec("convert", {"plant": plant_path, "bundle": src},
                                   {"target": "iop", "out": str(out)}))
        assert code == 2 and "factors" in report["details"]["error"]

    def test_cli_main_exit_status(self, tmp_path, capsys):
        from rstab.cli import main

        r = Realization(SP, TFMatrix.zeros(SP, SP))
        path = write(tmp_path, "r.json", serialize.realization_to_doc(r))
        report_path = tmp_path / "report.json"
        with pytest.raises(SystemExit) as exc:
            main(["verify", path, "--report", str(report_path)])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "verify: PASS" in out
        saved = json.loads(report_path.read_text())
        assert saved["kind"] == "report" and saved["passed"]
