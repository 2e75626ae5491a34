"""Scenario parsing, validation diagnostics, and the command-line driver."""

import json
from pathlib import Path

import pytest

from singpair.cli import main
from singpair.errors import ScenarioError
from singpair.scenario import Workspace, parse_scenario, validate_scenario

CORPUS = Path(__file__).resolve().parents[1] / "src" / "singpair" / "corpus"

PLANE = """
[ring]
vars = x, y

[space]
kind = affine

[tower]
s1: center = x; y

[strata]
main: rules = images

[cycles]
H: gens = y - 1 | perversity = 0,0
V: gens = x - 1 | perversity = 0,1

[tasks]
meet: kind = pair | a = H | b = V | strat = main | expect_degree = 1
"""


def scn(tmp_path, text: str, name: str = "case.scn") -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParsing:
    def test_cone_scenario_round_trips(self):
        sc = parse_scenario(CORPUS / "affine_quadric_cone.scn")
        assert sc.name == "affine_quadric_cone"
        assert sc.kind == "affine"
        assert sc.ring.names == ("x", "y", "z", "t")
        assert [s[0] for s in sc.steps] == ["s1"]
        assert set(sc.strata) == {"coarse", "refined"}
        assert set(sc.cycles) == {"D", "Dfine", "L", "alpha0", "alpha1"}
        assert set(sc.families) == {"A", "B"}
        assert len(sc.tasks) == 10
        assert sc.cycles["Dfine"].perversity.values == (0, 0, 1)
        assert sc.families["A"].marked == (0, 1)

    def test_comments_and_blank_lines_are_ignored(self, tmp_path):
        sc = parse_scenario(scn(tmp_path, PLANE + "\n# trailing comment\n"))
        assert sc.cycles["H"].ideal.gens[0] is not None
        assert sc.tasks[0].kind == "pair"

    def test_every_bundled_scenario_validates_clean(self):
        for path in sorted(CORPUS.glob("*.scn")):
            assert validate_scenario(path) == [], path.name

    def test_parse_error_carries_path_and_line(self, tmp_path):
        path = scn(tmp_path, "[ring]\nvars = x, y\n\n[cycles]\nC: gens = q + 1\n")
        with pytest.raises(ScenarioError, match=r"case\.scn:5: bad polynomial"):
            parse_scenario(path)


class TestValidation:
    def check(self, tmp_path, text: str, line: int, fragment: str):
        diags = validate_scenario(scn(tmp_path, text))
        assert any(d.line == line and fragment in d.message for d in diags), diags

    def test_unknown_section(self, tmp_path):
        self.check(tmp_path, "[ring]\nvars = x\n[junk]\n", 3, "unknown section")

    def test_content_before_section(self, tmp_path):
        self.check(tmp_path, "vars = x\n[ring]\nvars = x\n", 1, "before any section")

    def test_missing_ring(self, tmp_path):
        self.check(tmp_path, "[space]\nkind = affine\n", 1, "missing [ring]")

    def test_one_generator_center(self, tmp_path):
        text = "[ring]\nvars = x, y\n[tower]\ns1: center = x\n"
        self.check(tmp_path, text, 4, "at least 2 generators")

    def test_duplicate_name_across_sections(self, tmp_path):
        text = "[ring]\nvars = x, y\n[tower]\nD: center = x; y\n[cycles]\nD: gens = x\n"
        self.check(tmp_path, text, 6, "already used on line 4")

    def test_unknown_field_key(self, tmp_path):
        text = "[ring]\nvars = x, y\n[cycles]\nC: gens = x | weight = 3\n"
        self.check(tmp_path, text, 4, "unknown key 'weight'")

    def test_bad_perversity(self, tmp_path):
        text = "[ring]\nvars = x, y\n[cycles]\nC: gens = x | perversity = 0,q\n"
        self.check(tmp_path, text, 4, "bad perversity")

    def test_unknown_task_kind(self, tmp_path):
        text = "[ring]\nvars = x\n[tasks]\nt: kind = summon\n"
        self.check(tmp_path, text, 4, "unknown task kind")

    def test_task_reference_to_missing_cycle(self, tmp_path):
        text = PLANE + "\nextra: kind = minimal | cycle = ghost | strat = main\n"
        diags = validate_scenario(scn(tmp_path, text))
        assert any("unknown cycle 'ghost'" in d.message for d in diags)

    def test_prefix_out_of_range(self, tmp_path):
        text = PLANE + "\ncmp: kind = compare-towers | a = H | b = V | prefix = 1\n"
        diags = validate_scenario(scn(tmp_path, text))
        assert any("prefix must lie in 0..0" in d.message for d in diags)

    def test_incidence_needs_projective_space(self, tmp_path):
        text = PLANE + "\ninc: kind = incidence | a = H | b = V\n"
        diags = validate_scenario(scn(tmp_path, text))
        assert any("projective space" in d.message for d in diags)

    def test_family_on_projective_space_is_rejected(self, tmp_path):
        text = (
            "[ring]\nvars = x, y, z\n[space]\nkind = projective\n"
            "[families]\nF: total = x - l*y | param = l | marked = 0, 1\n"
        )
        self.check(tmp_path, text, 6, "affine space")

    def test_boolean_arguments_are_strict(self, tmp_path):
        text = PLANE.replace("expect_degree = 1", "allow_noncomplementary = yes")
        diags = validate_scenario(scn(tmp_path, text))
        assert any("must be true or false" in d.message for d in diags)

    def test_diagnostics_come_sorted_by_line(self, tmp_path):
        text = "[ring]\nvars = x\n[tasks]\nt: kind = summon\nu: nonsense\n"
        diags = validate_scenario(scn(tmp_path, text))
        assert [d.line for d in diags] == sorted(d.line for d in diags)
        assert len(diags) >= 2


class TestWorkspace:
    def test_towers_and_strata_are_cached(self):
        ws = Workspace(parse_scenario(CORPUS / "smooth_blowup_plane.scn"))
        assert ws.tower() is ws.tower()
        assert ws.strat("main") is ws.strat("main")

    def test_prefix_zero_is_the_bare_space(self):
        ws = Workspace(parse_scenario(CORPUS / "smooth_blowup_plane.scn"))
        assert ws.tower(prefix=0).steps == []
        assert len(ws.tower().steps) == 1


class TestCommandLine:
    def test_validate_clean_file_exits_zero(self, capsys):
        code = main(["validate", str(CORPUS / "nodal_image.scn")])
        assert code == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_broken_file_exits_two_with_locations(self, tmp_path, capsys):
        path = scn(tmp_path, "[ring]\nvars = x, y\n[tower]\ns1: center = x\n")
        code = main(["validate", str(path)])
        out = capsys.readouterr().out
        assert code == 2
        assert f"{path}:4:" in out

    def test_run_on_unparseable_file_exits_two(self, tmp_path, capsys):
        path = scn(tmp_path, "[ring]\nvars = x\n[tasks]\nt: kind = summon\n")
        assert main(["run", str(path)]) == 2
        assert ":4:" in capsys.readouterr().err

    def test_missing_file_exits_two(self, capsys):
        assert main(["run", "/nonexistent/thing.scn"]) == 2
        capsys.readouterr()

    def test_plane_scenario_runs_clean(self, capsys):
        code = main(["run", str(CORPUS / "smooth_blowup_plane.scn")])
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("[ok]") == 5

    def test_tiny_budget_exits_three(self, tmp_path, capsys):
        path = scn(tmp_path, PLANE)
        code = main(["run", str(path), "--budget", "3"])
        assert code == 3
        assert "error:budget" in capsys.readouterr().out

    def test_budget_context_is_restored_after_run(self, tmp_path, capsys):
        path = scn(tmp_path, PLANE)
        assert main(["run", str(path), "--budget", "3"]) == 3
        assert main(["run", str(path)]) == 0
        capsys.readouterr()

    def test_missed_expectation_exits_one(self, tmp_path, capsys):
        path = scn(tmp_path, PLANE.replace("expect_degree = 1", "expect_degree = 7"))
        code = main(["run", str(path)])
        assert code == 1
        assert "error:expectation" in capsys.readouterr().out

    def test_computation_errors_are_reported_per_task(self, tmp_path, capsys):
        # the second task still runs after the first one fails
        text = PLANE + "\nbad: kind = pair | a = H | b = H | strat = main\n"
        code = main(["run", str(scn(tmp_path, text))])
        out = capsys.readouterr().out
        assert code == 1
        assert "error:complementarity" in out
        assert out.count("[ok]") == 1

    def test_strict_complementarity_overrides_task_waivers(self, capsys):
        path = str(CORPUS / "affine_quadric_cone.scn")
        code = main(["run", path, "--strict-complementarity"])
        out = capsys.readouterr().out
        assert code == 1
        assert "error:complementarity" in out

    def test_allow_nonstandard_flag_fills_in_for_task_arg(self, tmp_path, capsys):
        base = parse_text = (CORPUS / "affine_quadric_cone.scn").read_text()
        text = parse_text.replace(" | allow_nonstandard = true", "")
        assert " | allow_nonstandard = true" not in text
        path = scn(tmp_path, text)
        assert main(["run", str(path)]) == 1
        assert "error:perversity" in capsys.readouterr().out
        assert main(["run", str(path), "--allow-nonstandard-perversity"]) == 0
        capsys.readouterr()

    def test_every_bundled_scenario_runs_clean_on_default_budget(self, capsys):
        for path in sorted(CORPUS.glob("*.scn")):
            code = main(["run", str(path)])
            out = capsys.readouterr().out
            assert code == 0, (path.name, out)
            assert "error" not in out

    def test_subcommands_filter_tasks(self, capsys):
        code = main(["stratify", str(CORPUS / "smooth_blowup_plane.scn")])
        out = capsys.readouterr().out
        assert code == 0
        assert "(1 tasks)" in out and "layout" in out

    def test_json_report_is_deterministic(self, tmp_path, capsys):
        path = str(CORPUS / "smooth_blowup_plane.scn")
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["run", path, "--json", str(a)]) == 0
        assert main(["run", path, "--json", str(b)]) == 0
        capsys.readouterr()
        ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
        del ra["elapsed_ms"], rb["elapsed_ms"]
        assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)

    def test_json_report_shape(self, tmp_path, capsys):
        path = str(CORPUS / "nodal_image.scn")
        out = tmp_path / "r.json"
        assert main(["run", path, "--json", str(out)]) == 0
        capsys.readouterr()
        report = json.loads(out.read_text())
        assert report["scenario"] == "nodal_image"
        assert {"name", "status", "payload", "counters"} <= set(report["tasks"][0])
        assert all(isinstance(t["counters"]["reduction_steps"], int) for t in report["tasks"])
        transform = next(t for t in report["tasks"] if t["name"] == "diag_transform")
        for gens in transform["payload"]["charts"].values():
            assert all(isinstance(g, str) for g in gens)
