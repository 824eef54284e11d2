"""Make the shared oracle module importable from every test file."""

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
