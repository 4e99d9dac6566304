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
from setuptools import setup, find_packages

setup(name='logitcal',
      version='1.0',
      license='Apache 2.0',
      description='logitcal: logit-calibrated targeted transfer attacks on a desk-scale model zoo',
      package_dir={'': 'src'},
      packages=find_packages('src'),
      include_package_data=True,
      install_requires=[
          'numpy',
          'scipy',
          'pyyaml',
          'tabulate',
          'simplejson',
          'pytest',
          'flake8',
      ],
      zip_safe=False,
      entry_points={
          'console_scripts': [
              'logitcal=logitcal.cli.logitcal_cli:main',
          ],
      },
      tests_require=['pytest'],
      )
