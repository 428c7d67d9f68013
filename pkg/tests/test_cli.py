"""
Tests for the command-line entry point and the JSON file layer.
"""
import json

import numpy as np
import pandas as pd
import pytest

from qmac_capacity.cli import main
from qmac_capacity.commands.files import (
    builtin_channel,
    channel_from_spec,
    load_json,
    manifest_path,
    state_from_spec,
)
from qmac_capacity.commands.plot_commands import oracle_region
from qmac_capacity.errors import SpecFileError
from qmac_capacity.quantum.channels import collective_phase_flip
from qmac_capacity.quantum.information import binary_entropy
from qmac_capacity.quantum.states import CqqState, DensityMatrix
from qmac_capacity.regions.geometry import RateRegion
from qmac_capacity.regions.optimizer import OptimizerConfig, optimize_qq_region
from qmac_capacity.settings import load_settings

BELL_MATRIX = [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]

FAST_REGION = ["--restarts", "1", "--weights", "3", "--max-iters", "50", "--seed", "7"]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("QMAC_CONFIG", raising=False)
    monkeypatch.delenv("QMAC_LOG_LEVEL", raising=False)


@pytest.fixture
def region_file(write_json_file):
    return write_json_file("region.json", {
        "generators": [
            {"a_max": 1.0, "b_max": 0.5, "sum_max": 1.5},
            {"a_max": 0.5, "b_max": 1.0, "sum_max": 1.5},
        ],
        "k": 1,
        "metadata": {"channel": "demo"},
    })


class TestJsonInputs:
    """Test parsing of channel and state documents."""

    def test_malformed_json_reports_position(self, tmp_path):
        """Test that a syntax error carries line and column."""
        path = tmp_path / "broken.json"
        path.write_text('{\n  "din": [2,\n}', encoding="utf-8")
        with pytest.raises(SpecFileError) as info:
            load_json(path)
        assert info.value.line == 3
        assert info.value.column is not None
        assert "line 3" in str(info.value)

    def test_builtin_channel_spec(self):
        """Test that a builtin spec resolves to the named channel."""
        channel = channel_from_spec({"builtin": "erasure", "params": {"d": 3}})
        assert channel.din == 6
        assert channel.dout == 4

    def test_unknown_builtin(self):
        """Test that an unknown builtin name is rejected with its field."""
        with pytest.raises(SpecFileError) as info:
            builtin_channel("teleporter", {})
        assert info.value.field == "builtin"

    def test_missing_parameter(self):
        """Test that a builtin without its parameter names the missing field."""
        with pytest.raises(SpecFileError) as info:
            channel_from_spec({"builtin": "phase_flip", "params": {}})
        assert info.value.field == "params.p"

    def test_kraus_spec_with_complex_pairs(self):
        """Test that [re, im] entries build a valid unitary channel."""
        spec = {"name": "phase", "din": [2], "dout": [2],
                "kraus": [[[1, 0], [0, [0, 1]]]]}
        channel = channel_from_spec(spec)
        assert channel.name == "phase"
        assert len(channel.kraus) == 1

    def test_kraus_spec_not_trace_preserving(self):
        """Test that an incomplete Kraus set is reported against the kraus field."""
        spec = {"din": [2], "dout": [2], "kraus": [[[1, 0], [0, 0]]]}
        with pytest.raises(SpecFileError) as info:
            channel_from_spec(spec)
        assert info.value.field == "kraus"

    def test_matrix_state(self):
        """Test that a matrix document gives a labelled density matrix."""
        state = state_from_spec({"dims": [2, 2], "labels": ["X", "Y"], "matrix": BELL_MATRIX})
        assert isinstance(state, DensityMatrix)
        assert state.layout.labels == ("X", "Y")

    def test_vector_state(self):
        """Test that a vector document gives the pure-state density matrix."""
        state = state_from_spec({"dims": 2, "vector": [0, 1]})
        assert isinstance(state, DensityMatrix)
        assert state.matrix[1, 1] == pytest.approx(1.0)

    def test_cqq_state(self):
        """Test that probs and blocks give a cqq state."""
        doc = {"dims": [2], "probs": [0.5, 0.5], "blocks": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}
        state = state_from_spec(doc)
        assert isinstance(state, CqqState)

    def test_invalid_state(self):
        """Test that a non-positive matrix is rejected as a spec error."""
        with pytest.raises(SpecFileError):
            state_from_spec({"dims": [2], "matrix": [[2, 0], [0, -1]]})

    def test_labels_must_match_dims(self):
        """Test that a label list of the wrong length names the labels field."""
        with pytest.raises(SpecFileError) as info:
            state_from_spec({"dims": [2, 2], "labels": ["A"], "matrix": BELL_MATRIX})
        assert info.value.field == "labels"

    @pytest.mark.parametrize("spec", ["circle:1", "erasure:x"])
    def test_bad_oracle(self, spec):
        """Test that unknown or malformed oracle names are rejected."""
        with pytest.raises(SpecFileError):
            oracle_region(spec)


class TestRegionCommand:
    """Test ``region`` end to end on scaled-down settings."""

    def test_outputs_and_manifest(self, tmp_path, capsys):
        """Test that the region JSON, frontier CSV and manifest are written."""
        out = tmp_path / "erasure.json"
        code = main(["region", "cq", "--builtin", "erasure", "--d", "2", *FAST_REGION, "--out", str(out)])
        assert code == 0

        region = json.loads(out.read_text(encoding="utf-8"))
        assert region["metadata"]["kind"] == "cq"
        assert region["k"] == 1

        frame = pd.read_csv(out.with_suffix(".csv"))
        assert list(frame.columns) == ["rate1", "rate2", "generator_id"]
        assert len(frame) == len(region["frontier"])

        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
        assert manifest["command"] == "region"
        assert manifest["seed"] == 7
        assert set(manifest["outputs"]) == {"erasure.json", "erasure.csv"}

        printed = capsys.readouterr().out
        assert f"region: {out}" in printed

    def test_byte_identical_reruns(self, tmp_path):
        """Test that two runs with the same seed write identical region and CSV bytes."""
        first, second = tmp_path / "a" / "r.json", tmp_path / "b" / "r.json"
        for out in (first, second):
            assert main(["region", "cq", "--builtin", "erasure", *FAST_REGION, "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert first.with_suffix(".csv").read_bytes() == second.with_suffix(".csv").read_bytes()

    def test_channel_file(self, tmp_path, write_json_file):
        """Test that a channel spec file drives a qq run."""
        spec = write_json_file("pf.json", {"builtin": "phase_flip", "params": {"p": 0.1}})
        out = tmp_path / "pf_region.json"
        assert main(["region", "qq", "--channel", str(spec), *FAST_REGION, "--out", str(out)]) == 0
        assert json.loads(out.read_text(encoding="utf-8"))["metadata"]["kind"] == "qq"

    def test_qq_max_sum_rate(self, tmp_path):
        """Test that the written qq region has the optimizer's sum rate, below 2 - H(p)."""
        out = tmp_path / "pf.json"
        assert main(["region", "qq", "--builtin", "phase_flip", "--p", "0.1", *FAST_REGION,
                     "--out", str(out)]) == 0
        region = RateRegion.from_dict(json.loads(out.read_text(encoding="utf-8")))

        config = OptimizerConfig.from_settings(load_settings(), restarts=1, max_iters=50, weights=3, seed=7)
        expected = optimize_qq_region(collective_phase_flip(0.1), config)
        assert region.max_sum_rate() == pytest.approx(expected.max_sum_rate(), abs=1e-12)
        assert 0.0 < region.max_sum_rate() <= 2 - binary_entropy(0.1) + 1e-9

    def test_region_to_stdout(self, tmp_path, monkeypatch, capsys):
        """Test that without --out the region JSON is printed and no file is written."""
        monkeypatch.chdir(tmp_path)
        assert main(["region", "qq", "--builtin", "phase_flip", "--p", "0.1", *FAST_REGION]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["metadata"]["kind"] == "qq"
        assert document["metadata"]["channel"] == collective_phase_flip(0.1).name
        assert RateRegion.from_dict(document).max_sum_rate() <= 2 - binary_entropy(0.1) + 1e-9
        assert list(tmp_path.iterdir()) == []

    def test_dimension_cap_exit_code(self, tmp_path, capsys):
        """Test that a tensor power beyond the cap exits with 3."""
        code = main(["region", "cq", "--builtin", "erasure", "--k", "4", *FAST_REGION,
                     "--out", str(tmp_path / "r.json")])
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_missing_channel_exit_code(self, tmp_path):
        """Test that a region run without a channel exits with 2."""
        assert main(["region", "cq", "--out", str(tmp_path / "r.json")]) == 2

    def test_malformed_channel_exit_code(self, tmp_path, capsys):
        """Test that a malformed channel file exits with 2 and reports its position."""
        bad = tmp_path / "bad.json"
        bad.write_text('{"builtin": "erasure",,}', encoding="utf-8")
        code = main(["region", "cq", "--channel", str(bad), "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "line 1" in capsys.readouterr().err

    def test_bad_config_exit_code(self, tmp_path):
        """Test that a malformed configuration file exits with 2."""
        config = tmp_path / "bad.yaml"
        config.write_text("optimizer: [\n", encoding="utf-8")
        code = main(["--config", str(config), "region", "cq", "--builtin", "erasure",
                     "--out", str(tmp_path / "r.json")])
        assert code == 2


class TestPropsCommand:
    """Test ``props``."""

    def test_passing_run(self, tmp_path):
        """Test that a short suite passes and writes its report."""
        out = tmp_path / "props.json"
        assert main(["props", "--trials", "2", "--dims", "2", "--seed", "1", "--out", str(out)]) == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert report["trials"] == 2
        assert manifest_path(out).exists()

    def test_violation_exit_code(self, tmp_path):
        """Test that violations exit with 4 and are recorded in the report."""
        out = tmp_path / "props.json"
        code = main(["props", "--trials", "2", "--dims", "2", "--checks", "subadditivity",
                     "--slack=-10", "--out", str(out)])
        assert code == 4
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"] is False
        assert report["reports"][0]["violations"] == 2

    def test_byte_identical_reruns(self, tmp_path):
        """Test that rerunning with the same seed writes an identical report."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            assert main(["props", "--trials", "3", "--dims", "2", "3", "--seed", "11", "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()


class TestPlotCommand:
    """Test ``plot``."""

    def test_svg_is_deterministic(self, tmp_path, region_file):
        """Test that rendering twice gives byte-identical SVG."""
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        for out in (first, second):
            assert main(["plot", str(region_file), "--oracle", "erasure:2", "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes().lstrip().startswith(b"<?xml")
        assert manifest_path(first).exists()

    def test_bad_region_file(self, tmp_path, write_json_file):
        """Test that a region file without generators exits with 2."""
        bad = write_json_file("bad_region.json", {"frontier": []})
        assert main(["plot", str(bad), "--out", str(tmp_path / "x.svg")]) == 2

    def test_empty_region_gives_axes_only(self, tmp_path, write_json_file):
        """Test that a region without generators renders bare axes."""
        empty = write_json_file("empty_region.json", {"generators": [], "k": 1})
        out = tmp_path / "empty.svg"
        assert main(["plot", str(empty), "--out", str(out)]) == 0
        svg = out.read_bytes()
        assert b"rate 1 (bits per channel use)" in svg
        assert b"rate 2 (bits per channel use)" in svg
        assert b"computed" not in svg
        assert b"analytic" not in svg


class TestEvalCommand:
    """Test ``eval``."""

    def test_entropy_of_bell_state(self, write_json_file, capsys):
        """Test that a Bell state has zero entropy."""
        state = write_json_file("bell.json", {"dims": [2, 2], "matrix": BELL_MATRIX})
        assert main(["eval", "entropy", "--state", str(state)]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(0.0, abs=1e-9)

    def test_mutual_information_of_bell_state(self, write_json_file, capsys):
        """Test that I(A;B) of a Bell state is 2 bits."""
        state = write_json_file("bell.json", {"dims": [2, 2], "matrix": BELL_MATRIX})
        assert main(["eval", "mi", "--state", str(state), "--source", "A", "--target", "B"]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(2.0)

    def test_trace_distance(self, write_json_file, capsys):
        """Test that orthogonal pure states are at trace distance 2."""
        zero = write_json_file("zero.json", {"dims": 2, "vector": [1, 0]})
        one = write_json_file("one.json", {"dims": 2, "vector": [0, 1]})
        assert main(["eval", "trace_distance", "--state", str(zero), "--other", str(one)]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(2.0)

    def test_coherent_information_of_bell_state(self, write_json_file, capsys):
        """Test that I_c(A>B) of a Bell state prints as exactly one bit."""
        state = write_json_file("bell.json", {"dims": [2, 2], "matrix": BELL_MATRIX})
        assert main(["eval", "ic", "--state", str(state), "--source", "A", "--target", "B"]) == 0
        assert capsys.readouterr().out.strip() == "1.000000000000"

    def test_conditional_coherent_information_of_erasure_output(self, write_json_file, capsys):
        """Test that the erasure output with q = 0.2 has I_c(R>C|X) = 1 - 2q = 0.6."""
        erased = np.kron(np.eye(2) / 2, np.diag([1.0, 0.0, 0.0]))
        transferred = np.zeros((6, 6))
        for i in (1, 5):
            for j in (1, 5):
                transferred[i, j] = 0.5
        state = write_json_file("omega.json", {
            "dims": [2, 3], "labels": ["R", "C"], "probs": [0.2, 0.8],
            "blocks": [erased.tolist(), transferred.tolist()],
        })
        assert main(["eval", "cond_ic", "--state", str(state), "--source", "R", "--target", "C"]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(0.6, abs=1e-9)

    def test_channel_coherent_information(self, write_json_file, capsys):
        """Test that pi_4 through the phase flip gives 2 - H(p)."""
        state = write_json_file("mixed.json", {"dims": [2, 2], "matrix": (np.eye(4) / 4).tolist()})
        assert main(["eval", "channel_ic", "--state", str(state), "--builtin", "phase_flip", "--p", "0.1"]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(2 - binary_entropy(0.1), abs=1e-9)

    def test_missing_second_state(self, write_json_file):
        """Test that a distance without --other exits with 2."""
        zero = write_json_file("zero.json", {"dims": 2, "vector": [1, 0]})
        assert main(["eval", "fidelity", "--state", str(zero)]) == 2
