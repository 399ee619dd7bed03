from pathlib import Path

import pytest

from lvcfact.config import OUTPUT_ENV, bundled_config_path, load_config, parse_config
from lvcfact.model import CouplingKind

import oracles as O

MINIMAL_1D = """
[model]
coupling = constant
e1 = 9.45
e2 = 9.85
omega_x = 0.2578
kappa1 = -0.2121
kappa2 = 0.2546
lambda = 0.05

[grid.x]
n_points = 51
"""


def test_bundled_configs_load():
    one = load_config("butatriene_1d")
    assert one.model.ndim == 1 and one.model.coupling is CouplingKind.CONSTANT_LAMBDA
    assert one.model.lam == O.LAMBDA_1D and one.grids[0].n_points == 401
    assert one.verification.overlap_points == 6400 and one.convergence.enabled
    two = load_config("butatriene_2d")
    assert two.model.ndim == 2 and two.model.lam == O.LAMBDA_2D
    assert [g.n_points for g in two.grids] == [101, 101]
    assert two.grids[1].omega == O.OMEGA_Y
    assert bundled_config_path("nope") is None


def test_defaults_fill_missing_sections():
    cfg = parse_config(MINIMAL_1D)
    assert cfg.n_states == 10 and cfg.seed == 0
    assert cfg.factorize.cap == 1e6 and cfg.factorize.fd_order == 4
    assert (cfg.grids[0].q_min, cfg.grids[0].q_max) == (-9.0, 9.0)
    assert cfg.output.formats == ("csv", "json") and not cfg.convergence.enabled


def test_overrides():
    cfg = parse_config(MINIMAL_1D).with_overrides(n_states=3, grid_points=77, seed=5, out="x/y")
    assert cfg.n_states == 3 and cfg.grids[0].n_points == 77 and cfg.seed == 5
    assert cfg.output.directory == Path("x/y")
    assert cfg.with_overrides() == cfg


def test_output_env_overrides_directory(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    assert parse_config(MINIMAL_1D + "\n[output]\ndirectory = elsewhere\n").output.directory == tmp_path


def test_field_states_and_formats():
    cfg = parse_config(MINIMAL_1D + "\n[output]\nformats = json\nfield_states = 0, 2 5\n")
    assert cfg.output.formats == ("json",) and cfg.output.field_states == (0, 2, 5)


@pytest.mark.parametrize(
    "text",
    [
        "[grid.x]\nn_points = 5\n",
        MINIMAL_1D.replace("[grid.x]\nn_points = 51\n", ""),
        MINIMAL_1D.replace("constant", "quadratic"),
        MINIMAL_1D + "\n[solver]\nn_states = 0\n",
        MINIMAL_1D + "\n[output]\nformats = xml\n",
        MINIMAL_1D.replace("coupling = constant", "coupling = linear\nomega_y = 0.0913"),
    ],
)
def test_invalid_configs(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("/no/such/file.cfg")


def test_cap_study_keys():
    cfg = parse_config(MINIMAL_1D + "\n[convergence]\nenabled = yes\ncap_values = 20, 50\ncap_states = 3\n")
    assert cfg.convergence.enabled and cfg.convergence.cap_values == (20.0, 50.0) and cfg.convergence.cap_states == 3
    assert parse_config(MINIMAL_1D).convergence.cap_values == (50.0,)
