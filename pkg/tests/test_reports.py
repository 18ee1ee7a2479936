import json

import numpy as np
import pytest

from wavespec.csv_utils import (
    read_rows,
    write_borders,
    write_evans_samples,
    write_orbit,
    write_rows,
    write_scan,
)
from wavespec.espec import border_polyline
from wavespec.exceptions import ReportError
from wavespec.manifest import (
    MANIFEST_NAME,
    RunManifest,
    to_jsonable,
    verify_manifest,
    write_json,
)
from wavespec.template_manager import REPORT_TEMPLATE, TemplateEngine


class TestCsv:
    def test_full_precision_and_lf(self, tmp_path):
        path = write_rows(tmp_path / "out.csv", ["x", "name", "k"],
                          [(0.1, "left", 3), (np.float64(1 / 3), "right", np.int64(4))])
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == "x,name,k"
        assert lines[1] == "0.10000000000000001,left,3"
        assert float(lines[2].split(",")[0]) == 1 / 3

    def test_row_length_checked(self, tmp_path):
        with pytest.raises(ReportError):
            write_rows(tmp_path / "bad.csv", ["a", "b"], [(1.0,)])

    def test_unwritable(self, tmp_path):
        with pytest.raises(ReportError):
            write_rows(tmp_path / "missing" / "out.csv", ["a"], [(1.0,)])

    def test_read_back(self, tmp_path):
        write_scan(tmp_path / "scan.csv", [(-0.5, 1.25), (0.0, -2.0)])
        rows = read_rows(tmp_path / "scan.csv")
        assert list(rows[0]) == ["re_lambda", "im_lambda", "re_E", "im_E"]
        assert [float(r["re_E"]) for r in rows] == [1.25, -2.0]
        assert [float(r["re_lambda"]) for r in rows] == [-0.5, 0.0]
        assert {float(r["im_E"]) for r in rows} == {0.0}

    def test_border_columns(self, tmp_path):
        samples = border_polyline(0.1, "minus", n=3, k_range=(-1.0, 1.0))
        rows = read_rows(write_borders(tmp_path / "b.csv", {0.1: samples}))
        assert list(rows[0])[:5] == ["k", "re_lambda", "im_lambda", "end", "order"]
        assert [float(r["k"]) for r in rows] == [-1.0, 0.0, 1.0]
        assert float(rows[1]["re_lambda"]) == pytest.approx(-1.0)
        assert {r["order"] for r in rows} == {"3"}

    def test_read_missing(self, tmp_path):
        with pytest.raises(ReportError):
            read_rows(tmp_path / "nope.csv")

    def test_evans_samples_split_complex(self, tmp_path):
        write_evans_samples(tmp_path / "e.csv", [(0.1 + 0.2j, 3 - 4j)])
        row = read_rows(tmp_path / "e.csv")[0]
        assert [float(row[k]) for k in ("re_lambda", "im_lambda", "re_E", "im_E")] == [
            0.1, 0.2, 3.0, -4.0]

    def test_orbit_export(self, tmp_path, orbit):
        rows = read_rows(write_orbit(tmp_path / "orbit.csv", orbit))
        segments = {r["segment"] for r in rows}
        assert segments == {"left", "right"}
        assert len(rows) == len(orbit.left_segment.tau) + len(orbit.right_segment.tau)


class TestManifest:
    def test_jsonable(self):
        data = to_jsonable({"z": 1 - 2j, "arr": np.array([1.0, 2.0]), 3: np.float64(0.5),
                            "t": (np.complex128(1j),)})
        assert data == {"z": [1.0, -2.0], "arr": [1.0, 2.0], "3": 0.5, "t": [[0.0, 1.0]]}
        json.dumps(data)

    def test_hashes_and_tampering(self, tmp_path):
        target = tmp_path / "data.csv"
        target.write_text("a\n1\n", encoding="utf-8")
        manifest = RunManifest(config={"command": "espec"})
        manifest.add_file(target, tmp_path)
        manifest.add_check("borders", True)
        path = manifest.write(tmp_path)
        assert path.name == MANIFEST_NAME
        assert verify_manifest(path) == []

        target.write_text("a\n2\n", encoding="utf-8")
        assert verify_manifest(path) == ["hash mismatch: data.csv"]
        target.unlink()
        assert verify_manifest(path) == ["missing: data.csv"]

    def test_failure_recorded(self, tmp_path):
        manifest = RunManifest(config={})
        manifest.fail("section hit at infinity")
        data = json.loads(manifest.write(tmp_path).read_text())
        assert data["status"] == "failed"
        assert data["diagnostic"] == "section hit at infinity"

    def test_unreadable_manifest(self, tmp_path):
        (tmp_path / MANIFEST_NAME).write_text("{not json", encoding="utf-8")
        with pytest.raises(ReportError):
            verify_manifest(tmp_path / MANIFEST_NAME)

    def test_write_json_sorted(self, tmp_path):
        path = write_json(tmp_path / "x.json", {"b": 1, "a": 0.5 + 0.5j})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")


class TestReportTemplate:
    def test_renders_manifest(self, tmp_path):
        manifest = RunManifest(config={"command": "evans", "rtol": 1e-10, "atol": 1e-12,
                                       "sigma": 0.95, "chart_threshold": 2.0,
                                       "eps": None})
        manifest.constants["c0"] = 0.19936
        manifest.eigenvalues = [-0.80925, 0.0]
        manifest.windings["contour"] = 1
        manifest.add_check("translation eigenvalue", False, "|E(0)| = 1e-3")
        target = tmp_path / "scan.csv"
        target.write_text("x\n", encoding="utf-8")
        manifest.add_file(target, tmp_path)

        text = TemplateEngine().render(REPORT_TEMPLATE, manifest=manifest.to_dict())
        assert "evans run" in text
        assert "- c0: 0.19936" in text
        assert "- -0.80925" in text
        assert "- contour: 1" in text
        assert "[FAIL] translation eigenvalue (|E(0)| = 1e-3)" in text
        assert "scan.csv  sha256=" in text
        assert "eps:" not in text

    def test_missing_template(self):
        with pytest.raises(ReportError):
            TemplateEngine().render("absent.txt", manifest={})

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ReportError):
            TemplateEngine(tmp_path / "none")

    def test_lists_templates(self):
        engine = TemplateEngine()
        assert REPORT_TEMPLATE in engine.list_templates()
        assert engine.validate_template(REPORT_TEMPLATE)
