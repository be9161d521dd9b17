"""
Reads the run configurations bundled with the package.

The idea is, give the name of a bundled suite and you get a validated
RunConfig for it (as long as it is described in some json file).
"""
import logging

import orjson

from . import DEFAULT_SUITE_FILE
from .config import RunConfig

_loader = None
logger = logging.getLogger(__name__)

DEFAULT_SUITE = "default_suite"


class Loader:
    """Looks up bundled suite configurations by name.

    .. seealso:: ibx/resources/default_suite.json
    """

    def __init__(self, path_suite=DEFAULT_SUITE_FILE):
        """Initialize a new Loader instance."""
        self.suites = {DEFAULT_SUITE: self._read_file(path_suite)}

    @staticmethod
    def _read_file(path):
        """Read file and return a dict."""
        with open(path, "r", encoding="utf8") as file:
            return orjson.loads(file.read())  # pylint: disable=no-member

    def get_suite(self, name=DEFAULT_SUITE) -> RunConfig:
        """Return a new RunConfig for the bundled suite ``name``."""
        if name not in self.suites:
            raise KeyError(f"Could not load suite {name}!")
        return RunConfig.from_dict(self.suites[name])

    @classmethod
    def from_dict(cls, suites=None):
        """Create a new instance directly from json dicts."""
        loader = cls.__new__(Loader)
        loader.suites = suites or {}
        return loader


def get_loader():
    """Get a suite loader.

    If already initialized it returns the existing one.
    """
    # pylint: disable=global-statement
    global _loader
    if _loader is None:
        _loader = Loader()
    return _loader
