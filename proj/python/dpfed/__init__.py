# Copyright 2026 The dpfed Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Differentially private federated optimization simulator."""

from dpfed._dpfed import (
    ConfigError,
    Federation,
    InternalError,
    IoError,
    Unsupported,
    calibrate_sigma2,
    generate_federation,
    load_federation,
    optimal_params,
    run,
    run_config,
    sweep,
    utility_bound,
)

__all__ = [
    "ConfigError",
    "Federation",
    "InternalError",
    "IoError",
    "Unsupported",
    "calibrate_sigma2",
    "generate_federation",
    "load_federation",
    "optimal_params",
    "run",
    "run_config",
    "sweep",
    "utility_bound",
]
