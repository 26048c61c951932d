from .geometry import *
from .dilation import *
from .operators import *
