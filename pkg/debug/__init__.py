"""Strict inputs dictionaries, to catch typos in experiment documents."""
import logging

from ..errors import ConfigurationError
from ..settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)


class DebugDict(dict):
    """A dictionary of dictionaries of inputs that refuses undocumented keywords.

    documented is a {block: {keyword: description}} dictionary, and choices
    (optional) maps (block, keyword) onto the tuple of allowed values."""

    def __init__(self, inputs, documented, choices=None):
        super(DebugDict, self).__init__()
        self.documented = documented
        self.choices = choices or {}
        for block, keywords in inputs.items():
            self[block] = keywords

    def __setitem__(self, block, keywords):
        if block not in self.documented:
            raise ConfigurationError('unknown block "{}" (expected one of {})'.format(
                block, sorted(self.documented.keys())))
        if not isinstance(keywords, dict):
            raise ConfigurationError('block "{}" must be a dictionary of keywords'.format(block))
        for k, v in keywords.items():
            if k not in self.documented[block]:
                raise ConfigurationError('unknown keyword "{}.{}" (expected one of {})'.format(
                    block, k, sorted(self.documented[block].keys())))
            self.check(block, k, v)
        logger.debug('validated block "{}" with keywords {}'.format(block, sorted(keywords.keys())))
        super(DebugDict, self).__setitem__(block, dict(keywords))

    def check(self, block, keyword, value):
        """Make sure a keyword that names a choice names a valid one."""
        allowed = self.choices.get((block, keyword))
        if allowed is None:
            return
        values = value if isinstance(value, (list, tuple)) else [value]
        for v in values:
            if not isinstance(v, str) or v.lower() not in allowed:
                raise ConfigurationError('"{}.{}" = {!r} is not one of {}'.format(block, keyword, v, allowed))
