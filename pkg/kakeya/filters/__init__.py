from .profile import *
from .bank import *
from .dictionary import *
from .kernels import *
