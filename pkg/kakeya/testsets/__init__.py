from .perron import *
from .generators import *
