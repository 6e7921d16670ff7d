import json

import numpy as np

from arrowtime.cli import main
from conftest import arctan_trace


def write_config(tmp_path, **overrides):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(overrides))
    return str(path)


def read_blocks(path):
    """Split an emitted CSV into comment lines and data rows."""
    comments, rows = [], []
    for line in open(path):
        line = line.rstrip("\n")
        if line.startswith("#"):
            comments.append(line)
        elif line:
            rows.append(line)
    return comments, rows


def test_trace_exponential_matches_closed_form(tmp_path):
    cfg = write_config(
        tmp_path, experiment="exponential", t0=-2.0, t1=2.0, t_count=9, grid_n=4096
    )
    out = str(tmp_path / "trace.csv")
    assert main(["trace", "--config", cfg, "--out", out]) == 0
    comments, rows = read_blocks(out)
    assert rows[0] == "t,mf,mb,mf_oracle"
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert data.shape == (9, 4)
    exact = arctan_trace(data[:, 0])
    assert np.max(np.abs(data[:, 1] - exact)) < 2e-4
    assert np.max(np.abs(data[:, 3] - exact)) < 1e-4
    assert np.all(np.diff(data[:, 1]) < 0.0)


def test_trace_gaussian_default_monotone(tmp_path):
    cfg = write_config(tmp_path, t_count=21, grid_n=1024)
    out = str(tmp_path / "trace.csv")
    assert main(["trace", "--config", cfg, "--out", out]) == 0
    _, rows = read_blocks(out)
    mf = np.array([float(r.split(",")[1]) for r in rows[1:]])
    assert np.all(np.diff(mf) < 0.0)


def test_trace_zero_count_emits_header_only(tmp_path):
    cfg = write_config(tmp_path, experiment="exponential", t_count=0, grid_n=512)
    out = str(tmp_path / "trace.csv")
    assert main(["trace", "--config", cfg, "--out", out]) == 0
    _, rows = read_blocks(out)
    assert rows == ["t,mf,mb,mf_oracle"]


def test_trace_deterministic(tmp_path):
    cfg = write_config(tmp_path, experiment="exponential", t_count=5, grid_n=512)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["trace", "--config", cfg, "--out", out1]) == 0
    assert main(["trace", "--config", cfg, "--out", out2]) == 0
    assert open(out1).read() == open(out2).read()


def test_config_error_names_field(tmp_path, capsys):
    cfg = write_config(tmp_path, grid_n=4)
    assert main(["trace", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 2
    assert "grid_n" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, grid_m=4096)
    assert main(["trace", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 2
    assert "grid_m" in capsys.readouterr().err


def test_grid_n_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, experiment="exponential", t_count=3, grid_n=512)
    out = str(tmp_path / "trace.csv")
    assert main(["trace", "--config", cfg, "--out", out, "--grid-n", "256"]) == 0
    comments, _ = read_blocks(out)
    assert '"grid_n": 256' in comments[1]


def test_frames_blocks_and_cross_checks(tmp_path):
    cfg = write_config(tmp_path, grid_n=1024, m_size=8192, x_count=801)
    out = str(tmp_path / "frames.csv")
    assert main(["frames", "--config", cfg, "--out", out]) == 0
    comments, rows = read_blocks(out)
    x_blocks = [c for c in comments if c.startswith("# block: x")]
    m_blocks = [c for c in comments if c.startswith("# block: m")]
    assert len(x_blocks) == 5 and len(m_blocks) == 5
    for expected_t in (-0.3, -0.05, 0.0, 0.05, 0.3):
        assert any(f"t={expected_t:.17g}" in c for c in x_blocks)
    mfs = [float(c.split(":")[1]) for c in comments if c.startswith("# mf:")]
    moments = [float(c.split(":")[1]) for c in comments if c.startswith("# first_moment:")]
    assert len(moments) == 5
    # the mf comment appears once per block pair; compare each first moment
    for mf, moment in zip(mfs[1::2], moments):
        assert abs(mf - moment) < 1e-3

    # x-block normalization per frame
    rows_iter = iter(rows)
    header = next(rows_iter)
    assert header == "x,density_x"
    x, dens = [], []
    for r in rows_iter:
        if r == "m,nu,density_m,density_plus,density_minus":
            break
        xi, di = map(float, r.split(","))
        x.append(xi)
        dens.append(di)
    total = np.trapezoid(dens, x)
    assert abs(total - 1.0) < 1e-6


def test_frames_mass_migrates_toward_small_m(tmp_path):
    cfg = write_config(tmp_path, grid_n=1024, m_size=8192)
    out = str(tmp_path / "frames.csv")
    assert main(["frames", "--config", cfg, "--out", out]) == 0
    comments, _ = read_blocks(out)
    moments = [float(c.split(":")[1]) for c in comments if c.startswith("# first_moment:")]
    assert moments[-1] < moments[0]  # t = +0.3 vs t = -0.3


def test_equiv_free_coupling_exact(tmp_path):
    cfg = write_config(
        tmp_path, grid_n=1024, lambdas=[0.0], overlap_times=[-5.0], equiv_t_count=3
    )
    out = str(tmp_path / "equiv.csv")
    assert main(["equiv", "--config", cfg, "--out", out]) == 0
    _, rows = read_blocks(out)
    assert rows[0] == "lambda,max_defect,t,overlap"
    lam, defect, t, overlap = map(float, rows[1].split(","))
    assert defect == 0.0
    assert abs(overlap - 1.0) < 1e-10


def test_galapon_command_trace(tmp_path):
    out = str(tmp_path / "gal.csv")
    assert main(["galapon", "--out", out]) == 0
    comments, rows = read_blocks(out)
    assert "# non_monotone: true" in comments
    dev = [float(c.split(":")[1]) for c in comments if c.startswith("# proportionality_deviation")]
    assert dev[0] < 1e-12
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert np.max(np.abs(data[:, 1] + np.sin(data[:, 0]))) < 1e-12


def test_check_subcommand_filtered(capsys):
    assert main(["check", "--filter", "galapon"]) == 0
    out = capsys.readouterr().out
    assert "galapon.witness" in out and "PASS" in out


def test_check_fault_injection_fails_completeness(capsys):
    code = main(
        ["check", "--filter", "completeness", "--inject-fault", "kernel-antisymmetry"]
    )
    assert code == 1
    captured = capsys.readouterr()
    assert "completeness_defect" in captured.out + captured.err


def test_run_checks_filter_names():
    from arrowtime.checks import check_names, run_checks

    names = check_names()
    assert any(n.startswith("hardy.") for n in names)
    results = run_checks("galapon")
    assert results and all(r.name.startswith("galapon") for r in results)


def test_seed_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, experiment="exponential", t_count=0, grid_n=512)
    out = str(tmp_path / "trace.csv")
    assert main(["trace", "--config", cfg, "--out", out, "--seed", "777"]) == 0
    comments, _ = read_blocks(out)
    assert '"seed": 777' in comments[1]
