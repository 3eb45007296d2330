"""Global settings needed for SPyShift experiments."""
import os
import logging

# okay, so, we need to specify where all the SPyShift outputs will go
# this will...
#  ...first try to find an environment variable $SPYSHIFTDATA
#  ...then default to "~/.spyshift"

# load the environment variable
prefix = os.path.expanduser(os.getenv('SPYSHIFTDATA', "~/.spyshift"))
if not os.path.exists(prefix):
    os.makedirs(prefix, exist_ok=True)

logging.basicConfig(
    format="[%(asctime)s] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s",
    datefmt="%H:%M:%S",
    level=getattr(logging, os.getenv('LOG', 'WARNING').upper()))

log_file_handler = logging.FileHandler(os.getenv('LOG_FILE', os.path.join(prefix, 'SPyShift.log')))
logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# create dirs that will store outputs
dirs = {'plots': os.path.join(prefix, 'plots/'),
        'outputs': os.path.join(prefix, 'outputs/'),
        'models': os.path.join(prefix, 'models/')}


def initialize():
    """Make sure all the output directories exist."""
    for d in dirs.values():
        if not os.path.exists(d):
            logger.info("Creating {DIR}".format(DIR=d))
            os.makedirs(d, exist_ok=True)


def seed_override(seed):
    """Return $SPECTRAL_SHIFT_SEED if it is set, otherwise the seed passed in."""
    override = os.getenv('SPECTRAL_SHIFT_SEED')
    if override is None or override.strip() == '':
        return seed
    logger.info('$SPECTRAL_SHIFT_SEED overrides the seed {} with {}'.format(seed, override))
    return int(override)


initialize()

# shortcuts
plots = dirs['plots']
outputs = dirs['outputs']
models = dirs['models']
