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

"""Quantum-trajectory simulator for no-knowledge measurement with delayed feedback."""

from ._nkfb import (
    NoiseStream,
    StepFailure,
    TrajectoryError,
    build_id,
    commuting_average,
    frozen_average,
    lindblad,
    preset_names,
    rabi_reference,
    run_config,
    run_preset,
    run_trajectory,
    steady_fidelity,
    validate_config,
)

__all__ = [
    "NoiseStream",
    "StepFailure",
    "TrajectoryError",
    "build_id",
    "commuting_average",
    "frozen_average",
    "lindblad",
    "preset_names",
    "rabi_reference",
    "run_config",
    "run_preset",
    "run_trajectory",
    "steady_fidelity",
    "validate_config",
]
