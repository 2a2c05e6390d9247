"""Bogoliubov quasiparticle levels and condensate thermodynamics of a
weakly interacting Bose gas in a harmonic trap."""

from ._bosetrap import *  # noqa: F401,F403
from ._bosetrap import __doc__  # noqa: F401
