# This file is part of incres.
# 
# incres is free software: you can redistribute it and/or modify it under
# the terms of the GNU General Public License as published by the Free Software
# Foundation, either version 2 of the License, or (at your option) any later
# version.
# 
# incres is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# 
# You should have received a copy of the GNU General Public License along with
# incres. If not, see <https://www.gnu.org/licenses/>.

from setuptools import setup, find_packages

setup(
  name='incres',
  version='0.1.0',
  description='Inclination resonances of the J2 main problem and the radial intermediary',
  long_description=open('README.md').read(),
  long_description_content_type='text/markdown',
  keywords=['astrodynamics', 'j2', 'critical inclination', 'resonance', 'celestial mechanics'],
  classifiers=[
    'Programming Language :: Python :: 3',
    'License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)',
    'Operating System :: OS Independent',
    'Topic :: Scientific/Engineering :: Astronomy',
  ],
  packages = find_packages(exclude=['test', 'test.*']),
  python_requires='>=3.8',
  install_requires=[
    'numpy', # arrays, vectorised kepler solves, sample grids
    'pqdm', # ordered thread fan-out for the acceptance checks and resonance scans
  ],
  extras_require={
    'test': [
      'pytest',
      'scipy', # quadrature and root-bracketing oracles in the tests only
    ],
  },
  entry_points={
    'console_scripts': [
      'incres = incres.cli:main',
    ],
  },
)
