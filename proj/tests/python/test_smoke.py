# Copyright 2026 The nkfb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import nkfb

EQUATOR = [1 / math.sqrt(2), 1 / math.sqrt(2), 0.0]


def test_build_id():
    assert nkfb.build_id()


def test_noise_stream_is_deterministic():
    a = nkfb.NoiseStream(42, 0)
    b = nkfb.NoiseStream(42, 0)
    assert [a.sample(1.0) for _ in range(5)] == [b.sample(1.0) for _ in range(5)]
    assert a.position == 5
    with pytest.raises(ValueError):
        a.sample(0.0)


def test_validate_config_reports_errors():
    params = json.loads(nkfb.validate_config("sim: {dt: 0.001, tau: 0.1, t_final: 1}\n"))
    assert params["kappa"] == 100
    with pytest.raises(ValueError, match="tau not an integer multiple of dt"):
        nkfb.validate_config("sim: {dt: 0.0001, tau: 0.00035}\n")


def test_oracles():
    assert nkfb.steady_fidelity(0.0, 1.0, 0.5) == pytest.approx(0.683940, abs=1e-6)
    plateau = nkfb.frozen_average(EQUATOR, 1.0, 0.1, 2.0)
    assert plateau[0] == pytest.approx(EQUATOR[0] * math.exp(-0.2), abs=1e-12)
    quarter = nkfb.rabi_reference(EQUATOR, 2 * math.pi, [1, 0, 0], 0.25)
    assert quarter == pytest.approx([EQUATOR[0], 0.0, EQUATOR[0]], abs=1e-12)
    lb = nkfb.lindblad(EQUATOR, 2 * math.pi, [1, 0, 0], 0.5, 0.3)
    assert lb[0] == pytest.approx(EQUATOR[0] * math.exp(-0.3), abs=1e-12)
    rev = nkfb.commuting_average(EQUATOR, 2 * math.pi, 0.5, 0.3, 1.0)
    assert math.hypot(rev[0], rev[1]) == pytest.approx(math.exp(-0.3), abs=1e-12)


def test_run_config_matches_plateau():
    cfg = (
        "system: {omega: 0, rabi_axis: z, gamma: 1.0}\n"
        "sim: {dt: 0.001, t_final: 0.5, tau: 0.1}\n"
        "ensemble: {n_traj: 2000, master_seed: 3}\n"
        "output: {record_every: 50}\n"
    )
    r = nkfb.run_config(cfg)
    assert r["mean"].shape == (11, 3)
    assert r["sem"].shape == (11, 3)
    assert np.allclose(r["mean"][0], EQUATOR)
    plateau = EQUATOR[0] * math.exp(-0.2)
    assert abs(r["mean"][-1, 0] - plateau) <= 4 * r["sem"][-1, 0]
    again = nkfb.run_config(cfg, ["ensemble.workers=2"])
    assert np.array_equal(r["mean"], again["mean"])


def test_single_trajectory_stays_pure():
    traj = nkfb.run_trajectory("sim: {dt: 0.001, t_final: 0.2, tau: 0.05}\n", 4)
    assert traj["bloch"].shape == (201, 3)
    assert np.all(np.abs(traj["purity"] - 1.0) < 1e-9)


def test_run_preset(tmp_path):
    assert "fig-case1" in nkfb.preset_names()
    report = nkfb.run_preset("fig-case1", tmp_path, ["ensemble.n_traj=100", "sim.t_final=1"])
    assert (tmp_path / "case1_me.csv").read_text().startswith("t,Sx,Sy,Sz,Sx_sem,Sy_sem,Sz_sem\n")
    assert any(f.endswith("manifest.json") for f in report["files"])
    with pytest.raises(ValueError):
        nkfb.run_preset("fig-case9", tmp_path)
