"""Q-factoriality certificates for nodal threefolds.

The package decides whether the singular points of a nodal threefold impose
independent linear conditions on forms of the degree prescribed by the
relevant criterion, and can construct explicit separating hypersurfaces.
"""

__version__ = "0.1.0"

from .scalar import FieldSpec  # noqa: F401
