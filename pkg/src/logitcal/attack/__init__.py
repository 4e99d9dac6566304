# Copyright (c) 2026 logitcal contributors
# ALL RIGHTS RESERVED.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Iterative targeted transfer attack: I-FGSM with MI, TI and DI on an
ensemble of surrogate models.
"""
from logitcal import LogitcalError

# valid pixel range of images and adversarial examples
PIXEL_MIN = 0.0
PIXEL_MAX = 255.0


class AttackDivergedError(LogitcalError):
    pass


class ConstraintViolationError(LogitcalError):
    pass


class EnsembleMismatchError(LogitcalError):
    pass
