# Copyright 2026 The signopt Authors. All Rights Reserved.
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
# ==============================================================================
"""Sign-based stochastic optimization."""

from signopt._core import (
    ConfigError,
    SignoptError,
    WelfordAccumulator,
    aggregate_majority,
    comm_bits_per_iter,
    commcost,
    compute_warmup,
    density,
    estimate_vote_error,
    evaluate_bound,
    pack_signs,
    reproduce_sparse_noise,
    run_config,
    schedule_signum,
    schedule_smallbatch,
    schedule_thm1,
    sign_vec,
    snr,
    theory,
    unpack_signs,
    worker_seed,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "SignoptError",
    "WelfordAccumulator",
    "aggregate_majority",
    "comm_bits_per_iter",
    "commcost",
    "compute_warmup",
    "density",
    "estimate_vote_error",
    "evaluate_bound",
    "pack_signs",
    "reproduce_sparse_noise",
    "run_config",
    "schedule_signum",
    "schedule_smallbatch",
    "schedule_thm1",
    "sign_vec",
    "snr",
    "theory",
    "unpack_signs",
    "worker_seed",
]
