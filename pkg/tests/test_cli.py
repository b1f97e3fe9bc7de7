"""End-to-end tests for the command line front end."""

import json

import numpy as np
import pytest

import hypnet.anet
import hypnet.hyperboloid
import hypnet.plucker
from hypnet.anet import diagnose_anet, validate_anet
from hypnet.cli import RunConfig, main, run
from hypnet.hyperboloid import hyperboloid_from_parameter
from hypnet.meshio import read_mesh, write_positions_mesh
from hypnet.patch import bilinear_parameter, restrict_to_patch
from hypnet.quadgraph import build
from hypnet.synthetic import (
    moebius_quads,
    quadric_grid,
    random_grid3x3_net,
    random_umbrella_net,
)


def write_net(path, count, quads, positions):
    assert len(positions) == count
    write_positions_mesh(path, positions, quads)
    return str(path)


def saddle_mesh(tmp_path, nx=3, ny=3):
    return write_net(tmp_path / "saddle.obj", *quadric_grid(nx, ny))


def saddle_lambda(nx=3, ny=3):
    """Family coordinate of the grid's own quadric at face 0."""
    count, quads, positions = quadric_grid(nx, ny)
    a = validate_anet(build(count, quads), positions)
    return bilinear_parameter(a.face_frame(0), a.positions)


def run_main(capsys, argv):
    code = main(argv)
    report = json.loads(capsys.readouterr().out)
    assert report["exit_code"] == code
    assert (code == 0) == (report["violations"] == [])
    return code, report


# --- configuration validation -----------------------------------------------------


@pytest.mark.parametrize(
    "config",
    [
        RunConfig(command="polish", input_path="x.obj"),
        RunConfig(command="check", input_path="x.obj", samples=(1, 9)),
        RunConfig(command="fit", input_path="x.obj"),
        RunConfig(command="extend", input_path="x.obj", output_path="y.obj"),
        RunConfig(
            command="extend", input_path="x.obj", output_path="y.obj", lam=0.0
        ),
        RunConfig(
            command="extend",
            input_path="x.obj",
            output_path="y.obj",
            lam=float("nan"),
        ),
        RunConfig(
            command="fit", input_path="x.obj", output_path="y.obj", max_iter=0
        ),
        RunConfig(
            command="check", input_path="x.obj", tolerances={"planar": -1.0}
        ),
        RunConfig(
            command="check", input_path="x.obj", tolerances={"fuzz": 1.0}
        ),
        RunConfig(
            command="check", input_path="x.obj", tolerances={"sig": "loose"}
        ),
    ],
)
def test_invalid_configurations_exit_with_the_input_code(config):
    code, report = run(config)
    assert code == 1
    assert report["violations"][0]["kind"] == "value_error"


def test_missing_input_file_exits_with_the_input_code(tmp_path):
    code, report = run(
        RunConfig(command="check", input_path=str(tmp_path / "absent.obj"))
    )
    assert code == 1
    assert report["violations"]


def test_malformed_face_record_exits_with_the_input_code(tmp_path):
    path = tmp_path / "tri.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    code, report = run(RunConfig(command="check", input_path=str(path)))
    assert code == 1
    assert report["violations"][0]["kind"] == "non_quad_face"


def test_non_manifold_gluing_exits_with_the_mesh_code(tmp_path):
    path = write_net(tmp_path / "moebius.obj", *moebius_quads(), np.zeros((6, 3)))
    code, report = run(RunConfig(command="check", input_path=path))
    assert code == 2
    assert report["violations"]


# --- check ------------------------------------------------------------------------


def test_check_accepts_a_net_on_the_saddle_surface(tmp_path, capsys):
    code, report = run_main(capsys, ["check", saddle_mesh(tmp_path)])
    assert code == 0
    diag = report["diagnostics"]
    assert diag["valid"] and diag["equi_twisted"]
    assert diag["face_count"] == 9 and diag["vertex_count"] == 16
    assert max(r for r in diag["planarity_residuals"]) < 1e-12


def test_check_reports_flat_faces_as_degenerate(tmp_path, capsys):
    count, quads, positions = quadric_grid(2, 2)
    positions = positions.copy()
    positions[:, 2] = 0.0
    path = write_net(tmp_path / "flat.obj", count, quads, positions)
    code, report = run_main(capsys, ["check", path])
    assert code == 3
    kinds = {v["kind"] for v in report["violations"]}
    assert "degenerate_face" in kinds


def test_check_schema_and_report_file_match_stdout(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code, report = run_main(
        capsys, ["check", saddle_mesh(tmp_path), "--report", str(report_path)]
    )
    assert code == 0 and report["schema"] == 1
    on_disk = json.loads(report_path.read_text())
    assert on_disk == report


def test_check_flags_odd_interior_degrees(tmp_path, capsys):
    count, quads, positions = random_umbrella_net(3, np.random.default_rng(2))
    path = write_net(tmp_path / "umbrella.obj", count, quads, positions)
    code, report = run_main(capsys, ["check", path])
    assert code == 4
    kinds = {v["kind"] for v in report["violations"]}
    assert "odd_vertex_degree" in kinds


# --- fit --------------------------------------------------------------------------


def noisy_saddle(tmp_path, scale=1e-3, seed=3):
    count, quads, positions = quadric_grid(3, 3)
    graph = build(count, quads)
    rng = np.random.default_rng(seed)
    noisy = positions.copy()
    for v in range(count):
        if graph.is_referenced(v) and not graph.is_boundary_vertex(v):
            noisy[v] += rng.normal(scale=scale, size=3)
    path = write_net(tmp_path / "noisy.obj", count, quads, noisy)
    return path, graph


def test_fit_restores_planar_stars_of_a_noisy_net(tmp_path, capsys):
    path, graph = noisy_saddle(tmp_path)
    out = tmp_path / "fitted.obj"
    code, report = run_main(capsys, ["fit", path, "-o", str(out)])
    assert code == 0
    assert report["convergence"]["converged"]
    positions, quads = read_mesh(out)
    assert quads == [tuple(q) for q in quadric_grid(3, 3)[1]]
    diag = diagnose_anet(graph, positions)
    assert diag["valid"]
    assert max(r for r in diag["planarity_residuals"]) < 1e-8


def test_fit_pins_the_boundary_by_default(tmp_path, capsys):
    path, graph = noisy_saddle(tmp_path)
    before, _ = read_mesh(path)
    out = tmp_path / "fitted.obj"
    code, report = run_main(capsys, ["fit", path, "-o", str(out)])
    assert code == 0
    after, _ = read_mesh(out)
    for v in report["pinned"]:
        assert np.array_equal(before[v], after[v])
    moved = [v for v in range(len(before)) if not np.array_equal(before[v], after[v])]
    assert moved and all(v not in report["pinned"] for v in moved)


def test_fit_with_explicit_pins_holds_exactly_those_vertices(tmp_path, capsys):
    path, _ = noisy_saddle(tmp_path)
    out = tmp_path / "fitted.obj"
    # the boundary ring plus one interior vertex, listed out of order
    pins = [15, 0, 1, 2, 3, 4, 7, 8, 11, 12, 13, 14, 5]
    code, report = run_main(
        capsys, ["fit", path, "-o", str(out), "--pin", *map(str, pins)]
    )
    assert code == 0
    assert report["pinned"] == sorted(pins)
    before, _ = read_mesh(path)
    after, _ = read_mesh(out)
    assert np.array_equal(before[5], after[5])
    assert not np.array_equal(before[6], after[6])


def test_fit_out_of_budget_exits_with_the_convergence_code(tmp_path, capsys):
    path, _ = noisy_saddle(tmp_path, scale=3e-2)
    out = tmp_path / "fitted.obj"
    code, report = run_main(
        capsys, ["fit", path, "-o", str(out), "--max-iter", "1"]
    )
    assert code == 6
    assert report["violations"][0]["kind"] == "did_not_converge"
    assert not report["convergence"]["converged"]
    assert out.exists()


# --- extend -----------------------------------------------------------------------


def test_extend_samples_the_saddle_net_tangent_continuously(tmp_path, capsys):
    path = saddle_mesh(tmp_path)
    out = tmp_path / "patches.obj"
    code, report = run_main(
        capsys,
        [
            "extend", path, "-o", str(out),
            "--lambda", repr(saddle_lambda()),
            "--samples", "5", "5",
        ],
    )
    assert code == 0
    assert report["c1"]["max_angle"] < 1e-8
    assert not report["c1"]["cusp_edges"]
    assert report["propagation"]["worst_closure_residual"] < 1e-10
    assert max(report["boundary_residuals"].values()) < 1e-10
    positions, quads = read_mesh(out)
    # 9 patches of 5x5 samples welded along 12 interior edge rows and
    # 16 shared corners: 225 - 12*5 - 16 + 4*... counted directly instead
    assert len(quads) == 9 * 16
    assert len(positions) == len({tuple(p) for p in positions.tolist()})
    assert np.max(np.abs(positions[:, 2] - positions[:, 0] * positions[:, 1])) < 1e-9


def test_extend_welds_shared_edges_and_no_weld_keeps_them_apart(tmp_path, capsys):
    path = saddle_mesh(tmp_path, 2, 1)
    lam = repr(saddle_lambda(2, 1))
    welded = tmp_path / "welded.obj"
    apart = tmp_path / "apart.obj"
    base = ["extend", path, "--lambda", lam, "--samples", "3", "3"]
    code, _ = run_main(capsys, base + ["-o", str(welded)])
    assert code == 0
    code, _ = run_main(capsys, base + ["-o", str(apart), "--no-weld"])
    assert code == 0
    assert len(read_mesh(welded)[0]) == 15
    assert len(read_mesh(apart)[0]) == 18


def test_extend_is_byte_deterministic(tmp_path, capsys):
    path = saddle_mesh(tmp_path)
    out = tmp_path / "patches.obj"
    report_path = tmp_path / "report.json"
    argv = [
        "extend", path, "-o", str(out),
        "--lambda", repr(saddle_lambda()),
        "--report", str(report_path),
    ]
    assert main(argv) == 0
    first = (out.read_bytes(), report_path.read_bytes())
    capsys.readouterr()
    assert main(argv) == 0
    capsys.readouterr()
    assert (out.read_bytes(), report_path.read_bytes()) == first


def test_extend_rejects_odd_interior_degrees(tmp_path, capsys):
    count, quads, positions = random_umbrella_net(3, np.random.default_rng(2))
    path = write_net(tmp_path / "umbrella.obj", count, quads, positions)
    code, report = run_main(
        capsys, ["extend", path, "-o", str(tmp_path / "x.obj"), "--lambda", "1.0"]
    )
    assert code == 4
    assert {v["kind"] for v in report["violations"]} & {
        "odd_vertex_degree", "mixed_strip_twists"
    }


def test_extend_rejects_nets_with_mixed_strip_twists(tmp_path, capsys):
    count, quads, positions = random_grid3x3_net(np.random.default_rng(11))
    a = validate_anet(build(count, quads), positions)
    assert not a.equi_twisted()[0]
    path = write_net(tmp_path / "random.obj", count, quads, positions)
    code, report = run_main(
        capsys, ["extend", path, "-o", str(tmp_path / "x.obj"), "--lambda", "0.5"]
    )
    assert code == 4
    assert {v["kind"] for v in report["violations"]} == {"mixed_strip_twists"}


def test_extend_with_the_opposite_family_sign_finds_no_patch(tmp_path, capsys):
    path = saddle_mesh(tmp_path)
    code, report = run_main(
        capsys,
        [
            "extend", path, "-o", str(tmp_path / "x.obj"),
            "--lambda", repr(-saddle_lambda()),
        ],
    )
    assert code == 5
    assert report["violations"][0]["kind"] == "no_adapted_patch"


def test_extend_rejects_zero_lambda_and_bad_seed_faces(tmp_path, capsys):
    path = saddle_mesh(tmp_path)
    out = str(tmp_path / "x.obj")
    code, report = run_main(capsys, ["extend", path, "-o", out, "--lambda", "0"])
    assert code == 1
    code, report = run_main(
        capsys,
        ["extend", path, "-o", out, "--lambda", "1.0", "--seed-face", "99"],
    )
    assert code == 1


def test_usage_errors_exit_with_the_input_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["extend", "x.obj", "-o", "y.obj"])  # --lambda missing
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["resample", "x.obj"])
    assert info.value.code == 1


# --- tolerance overrides ----------------------------------------------------------


def nudged_saddle(tmp_path):
    count, quads, positions = quadric_grid(3, 3)
    positions = positions.copy()
    positions[5, 2] += 1e-6
    return write_net(tmp_path / "nudged.obj", count, quads, positions)


def test_environment_overrides_relax_the_planarity_gate(
    tmp_path, capsys, monkeypatch
):
    path = nudged_saddle(tmp_path)
    code, report = run_main(capsys, ["check", path])
    assert code == 3
    assert {v["kind"] for v in report["violations"]} == {"non_planar_star"}

    monkeypatch.setenv("HYPNET_TOL_PLANAR", "1e-3")
    code, report = run_main(capsys, ["check", path])
    assert code == 0
    assert hypnet.anet.PLANAR_EPS == 1e-8  # restored after the run


def test_unparseable_tolerance_overrides_exit_with_the_input_code(
    tmp_path, capsys, monkeypatch
):
    monkeypatch.setenv("HYPNET_TOL_CLOSURE", "tight")
    code, report = run_main(capsys, ["check", saddle_mesh(tmp_path)])
    assert code == 1
    assert report["violations"][0]["kind"] == "value_error"


def test_tight_closure_override_fails_a_slightly_noisy_extension(
    tmp_path, capsys, monkeypatch
):
    count, quads, positions = quadric_grid(3, 3)
    rng = np.random.default_rng(5)
    noisy = positions + rng.normal(scale=1e-7, size=positions.shape)
    path = write_net(tmp_path / "noisy.obj", count, quads, noisy)
    monkeypatch.setenv("HYPNET_TOL_PLANAR", "1e-3")
    monkeypatch.setenv("HYPNET_TOL_CLOSURE", "1e-14")
    code, report = run_main(
        capsys,
        ["extend", path, "-o", str(tmp_path / "x.obj"), "--lambda",
         repr(saddle_lambda())],
    )
    assert code == 6
    assert report["violations"][0]["kind"] == "closure_violation"
    assert hypnet.hyperboloid.CLOSURE_EPS == 1e-8
