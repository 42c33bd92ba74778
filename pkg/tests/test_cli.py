import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from veechlab.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE, run
from veechlab.illumination import vh_path
from veechlab.product import build_leaf
from veechlab.surface import builtin_surface, parse_surface
from veechlab.svg import emit_svg, leaf_scene, render_svg, surface_scene, SvgScene, vh_path_scene


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, dict(line.split("=", 1) for line in out.out.splitlines() if "=" in line), out


def test_surface_info(capsys):
    code, kv, _ = call(capsys, "surface", "builtin:L3", "info")
    assert code == EXIT_OK
    assert kv["genus"] == "2" and kv["cone_points"] == "3^1"


def test_leaf_command(capsys, tmp_path):
    out = tmp_path / "leaf.svg"
    code, kv, _ = call(capsys, "leaf", "builtin:L3", "--slope", "2", "--base", "cone,cone",
                       "--branch", "0", "--out", str(out))
    assert code == EXIT_OK and kv["squares"] == "36"
    ET.parse(out)


def test_illuminate_partner(capsys):
    code, kv, _ = call(capsys, "illuminate", "builtin:Y2", "--from", "sq0:1/4,1/4",
                       "--to", "partner:0", "--len", "20")
    assert code == EXIT_OK
    assert kv["verdict"] == "BlockedUpTo(20)" and kv["certified"] == "true"


def test_illuminate_found(capsys):
    code, kv, _ = call(capsys, "illuminate", "L3", "--from", "sq1:1/2,1/2", "--to", "sq2:1/2,1/2",
                       "--len", "4")
    assert code == EXIT_OK and kv["verdict"] == "Illuminated" and kv["holonomy"] == "(-2,-1)"


@pytest.mark.parametrize("argv,key,value", [
    (["decompose", "L3", "--dir", "h"], "cylinders", "2"),
    (["saddles", "L3", "--len", "1"], "count", "12"),
    (["twist", "L3", "--dir", "h"], "derivative", "(1 2;0 1)"),
    (["twist", "L3", "--dir", "h", "--point", "sq0:1/2,1/2"], "image", "sq1:1/2,1/2"),
    (["involution", "L3"], "fixed_points", "6"),
    (["veech-test", "L3", "--matrix", "1,1,0,1"], "in_veech_group", "false"),
    (["veech-test", "L3", "--matrix", "1,2,0,1"], "in_gamma2", "true"),
    (["torus-classify", "1/2,0"], "size", "3"),
    (["torus-classify", "--", "-1+sqrt(2),0"], "orbit", "dense"),
    (["jacobsthal", "6"], "J", "4"),
    (["kronecker", "--phi", "1/3", "--theta", "2/5", "--eps", "1/4"], "n", "3"),
    (["blocked-pairs", "LC"], "status", "AllFixSingular"),
    (["blocked-pairs", "L3"], "status", "RegularFixExists"),
    (["twist-reduce", "L3", "--from", "sq0:1/2,1/2", "--to", "sq1:1/2,1/2"], "result", "certificate"),
    (["vh-path", "L3", "--from", "sq1:1/2,1/2", "--to", "sq2:1/2,1/2"], "length", "2"),
    (["surface", "octagon"], "genus", "2"),
])
def test_subcommands(capsys, argv, key, value):
    code, kv, _ = call(capsys, *argv)
    assert code == EXIT_OK and kv[key] == value


def test_twist_reduce_exhausted_pair(capsys):
    code, kv, _ = call(capsys, "twist-reduce", "Y2", "--from", "sq0:1/4,1/4", "--to", "partner:0")
    assert code == EXIT_OK and kv["result"] == "exhausted" and kv["orbit_closed"] == "true"


def test_usage_errors(capsys):
    assert run(["bogus"]) == EXIT_USAGE
    assert run(["leaf", "L3"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_operation_errors(capsys):
    assert run(["surface", "builtin:nothing"]) == EXIT_FAILED
    assert run(["illuminate", "L3", "--from", "v0", "--to", "sq1:1/2,1/2", "--len", "2"]) == EXIT_FAILED
    assert run(["illuminate", "L3", "--from", "sq0:1/2,1/2", "--to", "partner:0", "--len", "2"]) == EXIT_FAILED
    assert "error=failed" in capsys.readouterr().err


def test_trace_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("VEECHLAB_TRACE_BUDGET", "1")
    code = run(["illuminate", "L3", "--from", "sq0:1/7,1/5", "--to", "sq2:6/7,4/5", "--len", "6"])
    assert code == EXIT_BUDGET
    assert "error=budget" in capsys.readouterr().err


def test_dump_load_round_trip(capsys, tmp_path):
    for name in ["L3", "Y2", "LC", "golden-L"]:
        path = tmp_path / f"{name}.txt"
        assert run(["surface", name, "dump", "--out", str(path)]) == EXIT_OK
        S = parse_surface(path.read_text())
        assert S.canonical_form() == builtin_surface(name).canonical_form()
        code, kv, _ = call(capsys, "surface", str(path), "load")
        assert code == EXIT_OK and kv["genus"] == str(S.genus())


def test_output_is_deterministic(capsys, tmp_path):
    outputs = []
    for k in range(2):
        svg = tmp_path / f"p{k}.svg"
        run(["vh-path", "Y2", "--from", "sq0:1/4,1/4", "--to", "sq5:1/2,1/3", "--out", str(svg)])
        text = capsys.readouterr().out.replace(str(svg), "OUT")
        outputs.append((text, svg.read_bytes()))
    assert outputs[0] == outputs[1]


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "veechlab.cli", "jacobsthal", "30"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "J=6"


# -- svg ------------------------------------------------------------------------------


def test_l3_svg_has_two_cylinder_colours():
    L = builtin_surface("L3")
    root = ET.fromstring(render_svg(surface_scene(L)).split("\n", 1)[1])
    fills = {el.get("fill") for el in root if el.tag.endswith("polygon")}
    assert len(fills) == 2


def test_vh_path_svg_marks_turning_points(tmp_path):
    L = builtin_surface("L3")
    p, q = L.center(1), L.center(2)
    path = vh_path(L, p, q)
    out = emit_svg(vh_path_scene(L, path, p, q), tmp_path / "vh.svg")
    root = ET.parse(out).getroot()
    lines = [el for el in root if el.tag.endswith("line")]
    assert len(lines) == len(path.turning_points)


def test_leaf_svg_is_deterministic():
    leaf = build_leaf(builtin_surface("L3"), 1, "cone", 1)
    assert render_svg(leaf_scene(leaf)) == render_svg(leaf_scene(leaf))


def test_empty_scene_rejected():
    with pytest.raises(ValueError):
        render_svg(SvgScene())
