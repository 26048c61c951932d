"""
kakeya-lab
~~~~~~~~~~
Kakeya and Nikodym maximal operators on discrete tori, with the checks that audit them.

:copyright: 2023-present the kakeya-lab developers
:license: MIT
"""

from ._about import *
from .errors import *
from .flags import *
from .interface import *
from .grid import *
from .filters import *
from .maximal import *
from .testsets import *
from .pool import *
from .verify import *
