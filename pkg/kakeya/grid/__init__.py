from .field import *
from .io import *
