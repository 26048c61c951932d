from .config import *
from .report import *
from .app import *
