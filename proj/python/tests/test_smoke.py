import json
import math
import os
from pathlib import Path

import pytest

import efqse

FIXTURES = Path(os.environ.get("EFQSE_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "tests" / "fixtures"))


def test_read_fcidump_metadata():
    ints = efqse.read_fcidump(str(FIXTURES / "four_orbital_mixed.fcidump"))
    assert ints.n_orbitals == 4
    assert (ints.n_alpha, ints.n_beta) == (2, 2)
    assert ints.orbital_irreps == ["B1", "A1", "A1", "B1"]
    h = ints.one_body
    assert h.shape == (4, 4)
    assert abs(h[0, 1] - h[1, 0]) < 1e-15
    assert ints.eri(0, 1, 2, 3) == ints.eri(3, 2, 1, 0)


def test_bad_path_raises_library_error():
    with pytest.raises(efqse.Error):
        efqse.read_fcidump(str(FIXTURES / "does_not_exist.fcidump"))


def test_casci_open_shell_pair():
    ints = efqse.read_fcidump(str(FIXTURES / "two_orbital_a1b1.fcidump"))
    states = efqse.casci(ints)
    assert [s.label for s in states][0] == "1^1A1"
    by_label = {s.label: s for s in states}
    k = ints.eri(0, 1, 1, 0)
    gap = by_label["1^1B1"].energy - by_label["1^3B1"].energy
    assert gap == pytest.approx(2 * k, abs=1e-12)
    assert by_label["1^3B1"].s2 == pytest.approx(2.0, abs=1e-10)


def test_resource_count_matches_known_row():
    assert efqse.resource_count(5, 3) == {
        "qubits": 5,
        "parameters": 6,
        "single_qubit_gates": 32,
        "two_qubit_gates": 13,
        "depth": 26,
    }


def test_exact_run_reproduces_casci(tmp_path):
    cfg = json.dumps({"fcidump": "h2_like_a1a1.fcidump", "mode": "exact", "seed": 5})
    out = efqse.run(cfg, str(FIXTURES), str(tmp_path))
    exact = {s.label: s for s in out["modes"]["exact"]["states"]}
    for s in out["casci"]["states"]:
        assert exact[s.label].energy == pytest.approx(s.energy, abs=1e-8)
    assert (tmp_path / "comparison.csv").exists()
    assert math.isfinite(out["forged_energy"])


def test_unknown_config_key_is_rejected():
    with pytest.raises(efqse.ConfigError):
        efqse.run(json.dumps({"fcidump": "x.fcidump", "shotz": 3}))
