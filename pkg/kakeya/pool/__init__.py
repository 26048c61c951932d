from .concurrer import *
from .orchestrator import *
