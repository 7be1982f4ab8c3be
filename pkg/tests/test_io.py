import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddit.analysis import Backend, detect_windows, sweep
from ddit.io import (ConfigError, emit, format_config, params_entries, parse_config,
                     preset_entries, rate_set_from_json, read_csv_columns,
                     spectrum_from_json, window_report_from_json)
from ddit.model import (CavityParams, ChainParams, DetuningGrid, ParameterError, Peak,
                        Window, WindowReport)
from ddit.presets import PRESETS
from ddit.spectral import free_space_rates, rate_crossing_scan, single_excitation_eigensystem

from conftest import cavities, chains

FIG2A = """
# fig 2a by hand
n = 1
d0 = 0.5
gamma0 = 1
gamma = 1e-3
omega_p = 0.03
grid = [-3, 3, 2001]
"""


def test_parse_fig2a_text():
    cfg = parse_config(FIG2A)
    assert cfg.params == ChainParams(1, 0.5, (), 1.0, (1e-3,), 0.03)
    assert cfg.grid == DetuningGrid(-3.0, 3.0, 2001)
    assert cfg.backend is Backend.GENERAL and cfg.format == "csv"


def test_preset_fig2a():
    cfg = parse_config("preset = fig2a")
    assert cfg.params == ChainParams(1, 0.5, (), 1.0, (1e-3,), 0.03)
    assert cfg.grid == DetuningGrid(-3.0, 3.0, 2001)
    assert cfg.preset == "fig2a"


def test_preset_fig4b():
    p = parse_config("preset = fig4b").params
    assert (p.n_extra, p.d0, p.d_tail) == (2, 2.5, (5.0,))


def test_preset_overrides():
    cfg = parse_config("preset = fig4c\nd = 0.2\nbackend = closed\nformat = json\n")
    assert cfg.params.d_tail == (0.2,) * 3
    assert cfg.backend is Backend.CLOSED and cfg.format == "json"
    cfg = parse_config("preset = fig4c\ntail.d = [0.1, 0.2, 0.3]\n")
    assert cfg.params.d_tail == (0.1, 0.2, 0.3)


def test_explicit_lists():
    cfg = parse_config("n = 2\nd0 = 0.5\ntail.d = [0.3]\ngamma0 = 1\n"
                       "tail.gamma = [0.001, 0.002]\nomega_p = 0.03\n")
    assert cfg.params.gamma_tail == (0.001, 0.002)


def test_cavity_config():
    cfg = parse_config("mode = cavity\nn = 1\nd = 3\ngamma0 = 1\ngamma = 1e-3\n"
                       "g = 5\nkappa = 1\nepsilon = 0.03\nn_max = 3\ngrid = [-8, 8, 11]")
    assert isinstance(cfg.params, CavityParams)
    assert cfg.params.chain.d0 == 3.0 and cfg.params.n_max == 3


def test_missing_gamma0_names_key():
    with pytest.raises(ConfigError, match="gamma0"):
        parse_config("n = 1\nd0 = 0.5\ngamma = 1e-3\nomega_p = 0.03\n")


@pytest.mark.parametrize("text,line", [
    ("n = 1\nbogus = 3\n", 2),
    ("n = 1\n\n# c\nd0 0.5\n", 4),
    ("n = x\n", 1),
    ("n = 1.5\n", 1),
    ("n = 1\nn = 2\n", 2),
    ("preset = nope\n", 1),
    ("d = 0.2\ntail.d = [0.2]\n", 1),
    ("tail.d = 0.2\n", 1),
    ("gamma0 =\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line


def test_mode_specific_keys():
    with pytest.raises(ConfigError, match="does not apply"):
        parse_config("preset = fig2a\ng = 1\n")
    with pytest.raises(ConfigError, match="does not apply"):
        parse_config("preset = fig2b\nomega_p = 1\n")


def test_validation_errors_propagate():
    with pytest.raises(ParameterError, match="gamma0"):
        parse_config("preset = fig2a\ngamma0 = 0\n")


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_config_round_trip(name):
    cfg = parse_config(format_config(preset_entries(name)))
    preset = PRESETS[name]
    assert cfg.params == preset.params
    assert cfg.grid == preset.grid


@settings(max_examples=40, deadline=None)
@given(st.one_of(chains(), cavities()))
def test_params_round_trip(p):
    entries = params_entries(p)
    if isinstance(p, CavityParams):
        # the chain drive is unused with a cavity and not serialized
        p = p.replace(chain=p.chain.replace(omega_p=1.0))
    assert parse_config(format_config(entries)).params == p


def small_spectrum():
    return sweep(ChainParams.uniform(1, 0.5, 0.0, 1.0, 1e-3, 0.03), DetuningGrid(-1, 1, 3))


def test_spectrum_csv_shape():
    lines = emit(small_spectrum(), "csv").decode().splitlines()
    assert len(lines) == 4
    assert lines[0] == "detuning,re,im,re_norm,im_norm"


def test_spectrum_csv_round_trip():
    spec = sweep(PRESETS["fig4d"].params, PRESETS["fig4d"].grid)
    cols = read_csv_columns(emit(spec, "csv"))
    assert np.array_equal(cols["detuning"], spec.detuning)
    v = spec.values
    for name, ref in (("re", v.real), ("im", v.imag), ("im_norm", v.imag / spec.norm)):
        assert np.allclose(cols[name], ref, rtol=1e-12, atol=0)


def test_cavity_im_norm_is_raw():
    spec = sweep(PRESETS["fig2b"].params, DetuningGrid(-1, 1, 3))
    cols = read_csv_columns(emit(spec, "csv"))
    assert np.array_equal(cols["im_norm"], spec.values.imag / spec.norm)


def test_spectrum_json_round_trip():
    spec = small_spectrum()
    back = spectrum_from_json(emit(spec, "json"))
    assert np.array_equal(back.values, spec.values) and back.grid == spec.grid
    assert back.kind is spec.kind and back.norm == spec.norm


def test_window_report_json_round_trip():
    report = detect_windows(sweep(PRESETS["fig4d"].params, PRESETS["fig4d"].grid))
    assert window_report_from_json(emit(report, "json")) == report
    hand = WindowReport((Window(0.1, 0.5, 0.2, 0.0),), (Peak(-1.0, 1.0), Peak(1.0, 0.5)))
    assert window_report_from_json(emit(hand, "json")) == hand


def test_window_report_csv():
    report = detect_windows(small_spectrum().__class__(
        DetuningGrid(-3, 3, 2001), sweep(PRESETS["fig2a"].params, DetuningGrid(-3, 3, 2001)).values,
        small_spectrum().kind, 0.03))
    rows = emit(report, "csv").decode().splitlines()
    assert rows[0] == "record,center,depth,fwhm,asymmetry,height"
    assert sum(r.startswith("window") for r in rows) == 1
    assert sum(r.startswith("peak") for r in rows) == 2


def test_rates_index_aligned():
    rates = free_space_rates(PRESETS["fig3b"].params)
    cols = read_csv_columns(emit(rates, "csv"))
    assert np.array_equal(cols["index"], [0, 1, 2])
    assert np.array_equal(cols["energy"], rates.energies)
    assert np.array_equal(cols["rate"], rates.rates)
    back = rate_set_from_json(emit(rates, "json"))
    assert np.array_equal(back.rates, rates.rates)
    assert np.array_equal(back.energies, rates.energies)


def test_eigensystem_and_crossings_emit():
    eig = single_excitation_eigensystem(PRESETS["fig3b"].params)
    data = json.loads(emit(eig, "json"))
    assert np.allclose(data["vectors"], eig.vectors)
    cols = read_csv_columns(emit(eig, "csv"))
    assert set(cols) == {"index", "energy", "v0", "v1", "v2"}
    found = rate_crossing_scan(PRESETS["fig3b"].params, 0.05, 1.2, 200)
    text = emit(found, "csv").decode()
    assert text.startswith("d,pairs\n0.3535533")
    assert json.loads(emit(found, "json"))["crossings"][0]["pairs"] == [[0, 1], [1, 2]]


def test_significant_digits():
    line = emit(small_spectrum(), "csv").decode().splitlines()[1]
    mantissa = line.split(",")[1].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) >= 12


def test_emit_deterministic():
    spec = sweep(PRESETS["fig4a"].params, PRESETS["fig4a"].grid)
    assert emit(spec, "csv") == emit(sweep(PRESETS["fig4a"].params, PRESETS["fig4a"].grid), "csv")


def test_emit_rejects_unknown():
    with pytest.raises(ValueError):
        emit(small_spectrum(), "xml")
    with pytest.raises(TypeError):
        emit(object(), "json")
