import io
import json
import subprocess
import sys

import numpy as np
import pytest

from frflows import presets
from frflows.calculus import PeriodicGrid
from frflows.cli import ConfigError, RunConfig, main
from frflows.diffeo import Density
from frflows.divergences import alpha_divergence
from frflows.errors import InvalidInputError


def run(argv):
    buf = io.StringIO()
    code = main(argv, stdout=buf)
    return code, buf.getvalue()


# -- configuration ---------------------------------------------------------------

def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="bogus"):
        RunConfig.from_dict({"command": "geodesic", "bogus": 1})


@pytest.mark.parametrize("key, value, field", [
    ("n", 15, "n"), ("dt", 0.2, "dt"), ("alpha", [1.5], "alpha"), ("t_final", -1.0, "t_final"),
    ("method", "euler", "method"), ("dim", 4, "dim"), ("save_every", 0, "save_every"),
])
def test_validation_names_the_field(key, value, field):
    with pytest.raises(ConfigError, match=f"^{field}:"):
        RunConfig.from_dict({"command": "geodesic", key: value})


def test_closed_form_alpha_restricted():
    with pytest.raises(ConfigError, match="alpha"):
        RunConfig.from_dict({"command": "geodesic", "method": "closed-form", "alpha": 0.5})
    with pytest.raises(ConfigError, match="alpha"):
        RunConfig.from_dict({"command": "geodesic", "method": "closed-form", "alpha": 0.0, "dim": 2})


def test_config_dict_round_trip():
    cfg = RunConfig.from_dict({"command": "geodesic", "alpha": 0.5, "n": 128, "a": "c1=0.2"})
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_divergence_defaults_to_alpha_grid():
    assert RunConfig.from_dict({"command": "divergence"}).alpha == (-1.0, -0.5, 0.0, 0.5, 1.0)


# -- presets and the trig grammar ---------------------------------------------------

def test_parse_and_format_trig():
    terms = presets.parse_trig("c1=0.3, s2=-0.1", 1)
    assert [(t.kind, t.k, t.coef) for t in terms] == [("c", (1,), 0.3), ("s", (2,), -0.1)]
    assert presets.parse_trig(presets.format_trig(terms), 1) == terms
    assert presets.parse_trig("", 2) == []


@pytest.mark.parametrize("spec, dim", [("x1=0.3", 1), ("c1:0=0.3", 1), ("c1=abc", 1), ("c1=inf", 1)])
def test_parse_trig_errors(spec, dim):
    with pytest.raises(InvalidInputError, match="a:"):
        presets.parse_trig(spec, dim, "a")


def test_eval_trig_on_torus():
    g = PeriodicGrid(32)
    x = g.points
    X, Y = np.meshgrid(x, x, indexing="ij")
    v = presets.eval_trig(presets.parse_trig("c1:0=0.3,s1:-1=0.2", 2), [X, Y])
    assert np.allclose(v, 0.3 * np.cos(2 * np.pi * X) + 0.2 * np.sin(2 * np.pi * (X - Y)), atol=1e-15)


def test_mean_zero_requirement():
    with pytest.raises(InvalidInputError, match="b"):
        presets.require_mean_zero(presets.parse_trig("c0=0.1", 1), "b")


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_standard_presets_exist(dim):
    p = presets.geodesic_preset("standard", dim)
    assert set(p) >= {"a", "b", "swirl"}


# -- divergence ----------------------------------------------------------------------

def test_divergence_identical_densities(tmp_path):
    out = tmp_path / "d.json"
    code, text = run(["divergence", "--preset", "equal", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1
    assert all(d["value"] == 0.0 for d in doc["divergences"])
    assert "hellinger" in text


def test_divergence_is_a_thin_wrapper(tmp_path):
    out = tmp_path / "d.json"
    code, _ = run(["divergence", "--alpha", "-1", "0", "1", "--rho2", "c1=0.3", "--n", "128", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    g = PeriodicGrid(128)
    rho1 = Density(g, np.ones(128))
    rho2 = Density.normalized(g, 1 + 0.3 * np.cos(2 * np.pi * g.points))
    for d in doc["divergences"]:
        assert d["value"] == alpha_divergence(rho1, rho2, d["alpha"])


def test_divergence_alpha_out_of_range(capsys):
    code, _ = run(["divergence", "--alpha", "2"])
    assert code == 2
    assert "[-1, 1]" in capsys.readouterr().err


def test_divergence_csv_with_sidecar(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["divergence", "--format", "csv", "--out", str(out)])[0] == 0
    lines = out.read_bytes().split(b"\n")
    assert lines[0] == b"alpha,divergence"
    assert b"\r" not in out.read_bytes()
    assert json.loads((tmp_path / "d.json").read_text())["schema"] == 1


# -- fisher-rao ------------------------------------------------------------------------

def test_fisher_rao_ratio(tmp_path):
    out = tmp_path / "fr.json"
    assert run(["fisher-rao", "--theta", "0", "--out", str(out)])[0] == 0
    doc = json.loads(out.read_text())
    assert abs(doc["fisher_rao"][0][0] - 0.5) <= 1e-7
    assert abs(doc["h1_lifted"][0][0] - 0.125) <= 1e-12
    assert abs(doc["ratio"] - 0.25) <= 1e-6


def test_fisher_rao_rejects_non_positive_density():
    assert run(["fisher-rao", "--theta", "1.5"])[0] == 2


# -- geodesic ----------------------------------------------------------------------------

def test_zero_data_gives_zero_trajectory(tmp_path):
    out = tmp_path / "z.csv"
    code, _ = run(["geodesic", "--preset", "zero", "--n", "64", "--t-final", "0.05", "--dt", "0.01",
                   "--format", "csv", "--out", str(out)])
    assert code == 0
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.all(data[:, 2:] == 0.0)


def test_geodesic_csv_is_byte_identical(tmp_path):
    args = ["geodesic", "--alpha", "0.5", "--n", "64", "--t-final", "0.1", "--dt", "0.005", "--format", "csv"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(p1)])[0] == 0
    assert run(args + ["--out", str(p2)])[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().split("\n")[0]
    assert header == "t,x,u,div_u"


def test_sidecar_reproduces_run(tmp_path):
    first = tmp_path / "first.csv"
    args = ["geodesic", "--alpha", "0", "--n", "64", "--t-final", "0.1", "--dt", "0.005",
            "--a", "c1=0.4,s2=0.1", "--format", "csv", "--out", str(first)]
    assert run(args)[0] == 0
    sidecar = json.loads((tmp_path / "first.json").read_text())
    sidecar["config"]["out"] = str(tmp_path / "second.csv")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(sidecar))
    assert run(["geodesic", "--config", str(cfg_path)])[0] == 0
    assert first.read_bytes() == (tmp_path / "second.csv").read_bytes()


def test_closed_form_check_alpha1(tmp_path):
    out = tmp_path / "g.csv"
    code, _ = run(["geodesic", "--alpha", "1", "--t-final", "0.5", "--format", "csv", "--out", str(out)])
    assert code == 0
    check = json.loads((tmp_path / "g.json").read_text())["closed_form_check"]
    assert check["max_abs_du"] <= 1e-5


def test_burgers_breakdown_is_data(tmp_path):
    out = tmp_path / "burgers.json"
    code, _ = run(["geodesic", "--alpha", "-1", "--preset", "burgers", "--t-final", "1", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    bd = doc["breakdown"]
    assert bd["occurred"]
    assert abs(bd["time"] - bd["predicted_time"]) <= 2 * doc["dt_used"]


def test_closed_form_torus(tmp_path):
    out = tmp_path / "t.csv"
    code, _ = run(["geodesic", "--dim", "2", "--n", "16", "--method", "closed-form", "--t-final", "0.1",
                   "--dt", "0.01", "--format", "csv", "--out", str(out)])
    assert code == 0
    assert out.read_text().split("\n")[0] == "t,x1,x2,jac,phi"


def test_config_file_for_wrong_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "divergence"}))
    assert run(["geodesic", "--config", str(cfg)])[0] == 2


def test_unreadable_config():
    assert run(["geodesic", "--config", "/nonexistent/cfg.json"])[0] == 2


# -- validate ------------------------------------------------------------------------------

def test_validate_duality(tmp_path):
    out = tmp_path / "v.json"
    code, text = run(["validate", "--suite", "duality", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"]
    duals = [c for s in doc["suites"] for c in s["checks"] if c["name"].startswith("duality")]
    assert len(duals) == 5 and all(c["value"] <= 1e-6 for c in duals)
    assert text.strip().endswith("PASS overall")


def test_validate_unknown_suite():
    assert run(["validate", "--suite", "bogus"])[0] == 2


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("FRF_NUM_THREADS", "zero")
    assert run(["validate", "--suite", "calculus"])[0] == 2


def test_module_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "frflows", "validate", "--suite", "calculus"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "frflows", "geodesic", "--dt", "1"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
    assert "dt:" in bad.stderr
