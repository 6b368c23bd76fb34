#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os

from importlib_metadata import PackageNotFoundError, metadata

# all metadata defined in setup.py accessible from package for reuse
package = os.path.basename(os.path.dirname(__file__))
try:
    __meta__ = metadata(package)
    __title__ = __meta__["Summary"].splitlines()[0].replace("# ", "")
except PackageNotFoundError:  # running from a source checkout without installation
    __meta__ = {"Name": package, "Version": "0.0.0", "Summary": "Semidefinite programming toolkit"}
    __title__ = __meta__["Summary"]
