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
logitcal: targeted transfer attacks with logit calibration on a
desk-scale model zoo.
"""

__version__ = "1.0"


class LogitcalError(Exception):
    """
    Root of all errors raised by this package.
    """
    pass


class ConfigError(LogitcalError):
    """
    Invalid configuration, plan file or command line arguments.
    """
    pass
