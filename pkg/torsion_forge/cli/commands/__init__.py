# Import all command modules
from . import assemble, block, gram, verify
