from . import config, logging, misc
