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
import logging
import sys

from logitcal import ConfigError, LogitcalError
from logitcal.cli import attack as cliattack
from logitcal.cli import campaign as clicamp
from logitcal.cli import data as clidata
from logitcal.cli import diag as clidiag

LOG = logging.getLogger("logitcal.cli")

COMMANDS = {
    "gen-data": clidata,
    "train-zoo": clidata,
    "attack": cliattack,
    "transfer": clicamp,
    "sweep-t": clicamp,
    "ensemble": clicamp,
    "vary-target": clicamp,
    "combos": clicamp,
    "diag-curve": clidiag,
    "diag-trajectory": clidiag,
}

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_CONFIG_ERROR = 2


def help():
    print("Missing or unknown command.\n")
    print("Usage: logitcal %s <arguments>\n" % "|".join(sorted(COMMANDS)))
    print("Get more help:")
    print("\tlogitcal transfer --help")
    print("\tlogitcal diag-curve --help")


def main(argv=None):
    """
    :return: exit code, 0 on success, 2 on configuration errors, 1 on
        runtime errors
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in COMMANDS:
        help()
        return EXIT_CONFIG_ERROR
    try:
        COMMANDS[argv[0]].main(argv)
    except SystemExit as ex:
        # argparse exits 2 on bad arguments and 0 on --help
        return ex.code if isinstance(ex.code, int) else EXIT_CONFIG_ERROR
    except ConfigError as ex:
        LOG.error("configuration error: %s", ex)
        return EXIT_CONFIG_ERROR
    except (LogitcalError, IOError, OSError) as ex:
        LOG.error("%s: %s", type(ex).__name__, ex)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
