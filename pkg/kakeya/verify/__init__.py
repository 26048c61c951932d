from .sampling import *
from .decay import *
from .bernstein import *
from .domination import *
from .sweep import *
from .params import *
from .suites import *
