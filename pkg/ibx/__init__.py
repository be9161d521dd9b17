import os

ROOT = os.path.abspath(os.path.dirname(__file__))
RESOURCE_DIR = os.path.join(ROOT, "resources")

DEFAULT_SUITE_FILE = os.path.join(RESOURCE_DIR, "default_suite.json")


# Flag if PNG dependencies are installed.
# Installation with `pip install ibx[PNG]`.
SUPPORT_PNG = False
try:
    import png  # noqa: F401

    SUPPORT_PNG = True
except ImportError:
    pass
