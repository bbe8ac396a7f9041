import numpy as np
import pytest

from sphblip.cli import EXIT_CONFIG, EXIT_OK, main
from sphblip.config import (InvalidValue, ParseError, RunConfig, UnknownKey, config_text,
                            parse_config)
from sphblip.fv import Reconstruction
from sphblip.gsph import GsphConfig
from sphblip.output import csv_text, read_csv, write_csv
from sphblip.recipes import FIGURES, recipe
from sphblip.sph import DissipationParams


# -- parse_config --------------------------------------------------------------------

def test_minimal_config_fills_defaults():
    cfg = parse_config("problem = sod\nmethod = mpm\nresolution = 450\n")
    assert cfg.problem == "sod" and cfg.method == "mpm"
    assert cfg.resolution == 450
    assert cfg.t_end == 0.15
    assert isinstance(cfg.params, DissipationParams)
    assert cfg.params.alpha_u == 0.0


def test_comments_and_blank_lines():
    cfg = parse_config("# a comment\n\nproblem = blastwave  # trailing\nmethod = fv-remap\n"
                       "reconstruction = linear\n")
    assert cfg.params == Reconstruction("linear", "minmod")
    assert cfg.t_end == 0.01


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as err:
        parse_config("problem = sod\nmethod mpm\n")
    assert err.value.line == 2


def test_duplicate_key():
    with pytest.raises(ParseError):
        parse_config("problem = sod\nproblem = sod\nmethod = mpm\n")


def test_unknown_key():
    with pytest.raises(UnknownKey):
        parse_config("problem = sod\nmethod = mpm\ncolour = red\n")


@pytest.mark.parametrize("text", [
    "problem = sod\n",
    "problem = nope\nmethod = mpm\n",
    "problem = sod\nmethod = sph\n",
    "problem = sod\nmethod = mpm\nresolution = 0\n",
    "problem = sod\nmethod = mpm\nresolution = many\n",
    "problem = sod\nmethod = mpm\nt_end = -1\n",
    "problem = sod\nmethod = mpm\nblend = linear\n",
    "problem = sod\nmethod = gsph\nblend = linear\n",
    "problem = sod\nmethod = gsph-hybrid\n",
    "problem = sod\nmethod = gsph-hybrid\nblend = exponential\n",
    "problem = sod\nmethod = fv-remap\nlimiter = superbee-ish\n",
    "problem = blastwave-2d\nmethod = fv-euler\n",
    "problem = sod\nmethod = mpm\ncadence = 0.1, 0.05\n",
])
def test_invalid_values(text):
    with pytest.raises(InvalidValue):
        parse_config(text)


def test_hybrid_config():
    cfg = parse_config("problem = blastwave\nmethod = gsph-hybrid\nblend = exponential\n"
                       "alpha = 3\n")
    assert isinstance(cfg.params, GsphConfig)
    assert cfg.params.blend == "exponential"
    assert cfg.params.alpha == 3.0
    assert cfg.params.t_final == 0.01


def test_config_text_round_trip():
    for text in ("problem = sod\nmethod = mpm\nresolution = 450\nalpha_u = 1.5\n",
                 "problem = blastwave\nmethod = gsph-hybrid\nblend = linear\n",
                 "problem = blastwave\nmethod = fv-euler\nreconstruction = linear\n"
                 "cadence = 0.005\n"):
        cfg = parse_config(text)
        assert parse_config(config_text(cfg)) == cfg


def test_runconfig_validation():
    with pytest.raises(InvalidValue):
        RunConfig("sod", "mpm", workers=0)


# -- recipes ----------------------------------------------------------------------------

def test_twelve_recipes():
    assert FIGURES == tuple(f"fig{k}" for k in range(1, 13))


def test_fig7_full_tier():
    rec = recipe("fig7", "full")
    assert list(rec.runs) == ["gsph", "gsph-hybrid"]
    assert all(c.problem == "blastwave" and c.resolution == 1000 for c in rec.runs.values())


def test_ci_tier_halves_resolution():
    assert recipe("fig1", "ci").runs["mpm"].resolution == 225
    assert recipe("fig12", "ci").runs["gsph"].resolution == 5000
    assert recipe("fig12", "full").runs["gsph"].resolution == 20000
    assert [c.resolution for c in recipe("fig4", "ci").runs.values()] == [100, 200, 400]


def test_unknown_recipe():
    with pytest.raises(InvalidValue):
        recipe("fig13")


# -- output ----------------------------------------------------------------------------

def test_csv_format(tmp_path):
    text = csv_text({"a": [1, 2], "b": [0.1, 1 / 3], "c": [True, False]})
    assert text == "a,b,c\n1,0.10000000000000001,1\n2,0.33333333333333331,0\n"
    write_csv(tmp_path / "x.csv", {"a": [0.1, 1 / 3]})
    np.testing.assert_array_equal(read_csv(tmp_path / "x.csv")["a"], [0.1, 1 / 3])
    assert list(tmp_path.iterdir()) == [tmp_path / "x.csv"]


def test_csv_rejects_ragged():
    with pytest.raises(ValueError):
        csv_text({"a": [1], "b": [1, 2]})


# -- commands ---------------------------------------------------------------------------

def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_exact_rows(tmp_path):
    assert main(["exact", "sod", "--t", "0.15", "--n", "1000", "--out", str(tmp_path)]) == EXIT_OK
    data = read_csv(tmp_path / "exact_sod_t0.15.csv")
    assert list(data) == ["x", "rho", "u", "p", "e"]
    assert len(data["x"]) == 1000


def test_exact_blastwave_shock(tmp_path):
    assert main(["exact", "blastwave", "--t", "0.01", "--n", "4000",
                 "--out", str(tmp_path)]) == EXIT_OK
    d = read_csv(tmp_path / "exact_blastwave_t0.01.csv")
    shock = d["x"][np.nonzero(d["p"] > 1.0)[0][-1]]
    # M = 198 against c = sqrt(1.4 * 0.01)
    assert shock == pytest.approx(198.0 * np.sqrt(0.014) * 0.01, abs=0.002)


@pytest.mark.parametrize("argv", [
    ["exact", "sod", "--t", "0"],
    ["exact", "nope", "--t", "0.1"],
    ["run"],
    ["run", "--config", "/nonexistent/file.cfg"],
    ["figure", "fig99"],
    ["frobnicate"],
])
def test_config_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] != "frobnicate" else argv) \
        == EXIT_CONFIG


def test_bad_config_file_exit_2(tmp_path):
    path = _write(tmp_path, "problem = sod\nmethod = mpm\nbogus = 1\n")
    assert main(["run", "--config", path]) == EXIT_CONFIG


def test_convergence_single_resolution(tmp_path):
    path = _write(tmp_path, "problem = blastwave\nmethod = fv-euler\n")
    assert main(["convergence", "--config", path, "--resolutions", "100",
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_run_outputs_and_rerun_is_bitwise(tmp_path):
    path = _write(tmp_path, "problem = blastwave\nmethod = fv-remap\nresolution = 120\n"
                            "reconstruction = linear\ncadence = 0.005\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        assert main(["run", "--config", path, "--out", str(out)]) == EXIT_OK
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == ["blip.csv", "metadata.json", "snapshot_t0.005.csv", "snapshot_t0.01.csv"]
    for name in names[:1] + names[2:]:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    head = (outs[0] / "snapshot_t0.01.csv").read_text().splitlines()[0]
    assert head == "j,x_center,rho,u,p,e"


def test_run_sph_snapshot_header(tmp_path):
    path = _write(tmp_path, "problem = blastwave\nmethod = mpm\nresolution = 100\n"
                            "t_end = 0.002\n")
    assert main(["run", "--config", path, "--out", str(tmp_path / "o")]) == EXIT_OK
    head = (tmp_path / "o" / "snapshot_t0.002.csv").read_text().splitlines()[0]
    assert head == "id,x,vx,m,h,rho,e,p"


def test_convergence_and_timehist(tmp_path):
    path = _write(tmp_path, "problem = blastwave\nmethod = fv-euler\n")
    assert main(["convergence", "--config", path, "--resolutions", "100,150,200",
                 "--out", str(tmp_path)]) == EXIT_OK
    d = read_csv(tmp_path / "convergence.csv")
    assert list(d) == ["resolution_or_time", "peak", "width", "location", "star_noise",
                       "detected", "L1_p", "Linf_p"]
    np.testing.assert_array_equal(d["resolution_or_time"], [100, 150, 200])
    assert main(["timehist", "--config", path, "--times", "0.0025,0.005,0.0075,0.01",
                 "--out", str(tmp_path)]) == EXIT_OK
    d = read_csv(tmp_path / "timehist.csv")
    np.testing.assert_allclose(d["resolution_or_time"], [0.0025, 0.005, 0.0075, 0.01])


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "wc-two-blast" in out and "fig12" in out
