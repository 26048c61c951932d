# MIT License

# Copyright (c) 2023-present the kakeya-lab developers

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
import os

import setuptools

version = '0.4.0'

requirements = []
with open('requirements.txt') as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith('#')]

packages = [
    'kakeya',
    'kakeya.cli',
    'kakeya.filters',
    'kakeya.grid',
    'kakeya.maximal',
    'kakeya.panels',
    'kakeya.pool',
    'kakeya.testsets',
    'kakeya.verify',
]


def get_extra_requirements() -> dict[str, list[str]]:
    extra_requirements = {}
    for fn in os.scandir('extras'):
        if fn.is_file():
            with open(fn) as f:
                extra_requirements[fn.name.split('.')[0]] = f.read().splitlines()
    return extra_requirements


setuptools.setup(
    name='kakeya-lab',
    version=version,
    packages=packages,
    package_data={
        'kakeya': ['panels/banner.txt'],
    },
    entry_points={
        'console_scripts': ['kakeya-lab=kakeya.cli:main'],
    },
    license='MIT',
    author='the kakeya-lab developers',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    install_requires=requirements,
    extras_require=get_extra_requirements(),
    description='Numerical laboratory for Kakeya and Nikodym maximal operators on discrete tori',
    python_requires='>=3.10',
    classifiers=[
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: MIT License',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules',
    ],
)
